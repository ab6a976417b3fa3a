#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "dimwit/state_models.hpp"
#include "dimwit/witness.hpp"

namespace dimwit {

// With probability `fidelity` a detection follows the ideal projection
// statistics; otherwise it lands uniformly on the d elements of the
// measured basis. Rates are expected counts per projector per window.
struct NoiseModel {
  double fidelity = 1.0;
  double dark_rate = 10.0;
  double signal_rate = 1e5;

  void validate() const;
};

class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raw detector tallies for every preparation x, measurement basis y and
// basis element k (k = 1 is the projector M_y^+ itself).
struct CountRecord {
  int n = 0;
  int d = 0;
  Model model = Model::quantum;
  NoiseModel noise;
  std::uint64_t seed = 0;
  int windows = 1;
  std::vector<std::int64_t> counts;  // [x][y][k], 0-based, row-major

  CountRecord() = default;
  CountRecord(int n, int d);

  std::int64_t& at(int x, int y, int k);
  std::int64_t at(int x, int y, int k) const;
  std::span<const std::int64_t> basis_counts(int x, int y) const;
  void validate() const;
};

// Outcome distribution over the completed basis of measurement y for
// preparation x: fidelity * ideal + (1 - fidelity) / d.
std::vector<double> basis_probabilities(const AngleEnsemble& e, int x, int y, double fidelity);

// raw_count(x, y, k) ~ Poisson(signal_rate * p_k + dark_rate), one
// independent stream per (x, y) derived from the seed.
CountRecord simulate_counts(const AngleEnsemble& e, const NoiseModel& noise, std::uint64_t seed);

struct WitnessEstimate {
  double value = 0.0;  // |sum sign * E|
  double signed_value = 0.0;
  double sigma = 0.0;
};

// P(+1|x,y) = n_1 / sum_k n_k, optionally after subtracting the expected
// dark counts from every n_k (clamped at 0). Sigma is the first-order
// propagation of independent Poisson variances through the ratio and the
// signed sum. Throws EstimationError when a pair has no counts.
WitnessEstimate estimate_witness(const CountRecord& counts, const WitnessSpec& spec,
                                 bool dark_correction);

// Witness value the estimator converges to at infinite signal rate.
double expected_witness(const AngleEnsemble& e, const NoiseModel& noise);

struct FidelityEstimate {
  double mean = 0.0;
  double sigma = 0.0;  // of the mean
  std::vector<double> per_projector;
};

// Projects the state of each measurement onto its own basis and reports
// the dark-corrected fraction landing on element 1.
FidelityEstimate measure_fidelity(const AngleEnsemble& e, const NoiseModel& noise,
                                  std::uint64_t seed);

}  // namespace dimwit
