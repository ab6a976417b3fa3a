#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dimwit/witness.hpp"

namespace dimwit {

// Thrown when an exhaustive search would exceed its work guard.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Classical prepare-and-measure model of dimension d: preparation x sends
// symbol emission[x-1] in 1..d, and measurement y answers response(y, m).
struct DeterministicStrategy {
  int n = 0;
  int d = 0;
  std::vector<int> emission;  // size N, values 1..d
  std::vector<int> response;  // (N-1) x d row-major, values +-1

  int respond(int y, int m) const {
    return response[static_cast<std::size_t>(y - 1) * d + (m - 1)];
  }
  void validate() const;
};

struct ClassicalMaximum {
  double value = 0.0;
  DeterministicStrategy strategy;
  std::uint64_t emissions_scanned = 0;
};

struct OracleOptions {
  // Scan only emission maps in first-occurrence order (symbols relabeled
  // 1, 2, ... as they appear). Same maximum, up to d! less work.
  bool symmetry_reduction = false;
  unsigned workers = 1;
};

inline constexpr std::uint64_t kEnumerationGuard = 10'000'000;

// Exact max of I_N over d-symbol deterministic strategies. Every emission
// map is enumerated; for a fixed map each response bit multiplies its own
// disjoint group of terms, so setting it to the sign of that group's sum
// (ties to +1) is optimal. Ties between maps go to the lexicographically
// smallest emission. Throws ResourceError when d^N exceeds the guard.
ClassicalMaximum exact_classical_max(int n, int d, const OracleOptions& options = {});

CorrelatorTable strategy_correlators(const DeterministicStrategy& s);

}  // namespace dimwit
