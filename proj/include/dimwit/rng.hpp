#pragma once

#include <cstdint>

namespace dimwit {

// SplitMix64 (Steele, Lea, Flood 2014). Constants:
//   increment 0x9E3779B97F4A7C15
//   mix       0xBF58476D1CE4E5B9, 0x94D049BB133111EB (shifts 30, 27, 31)
// The sequence is fully specified by these constants, so a seed gives the
// same stream on every platform and compiler.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }
  std::uint64_t operator()() { return next(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Seed for an independent substream (restart index, measurement pair, ...).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return SplitMix64::mix(seed ^ SplitMix64::mix(stream + 0x9E3779B97F4A7C15ULL));
}

}  // namespace dimwit
