#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "dimwit/state_models.hpp"
#include "dimwit/witness.hpp"

namespace dimwit {

// Signed witness sum as a smooth function of the flattened ensemble
// angles, with analytic gradient. Holds scratch buffers, so one instance
// per thread.
class WitnessObjective {
 public:
  WitnessObjective(const WitnessSpec& spec, Model model, int d);

  int n() const { return n_; }
  int d() const { return d_; }
  Model model() const { return model_; }
  std::size_t size() const { return params_; }

  double value(std::span<const double> params);
  // Returns the value and writes d(value)/d(params) into grad.
  double value_and_gradient(std::span<const double> params, std::span<double> grad);

 private:
  void check(std::span<const double> params) const;
  void amplitudes(std::span<const double> params);

  int n_;
  int d_;
  Model model_;
  std::size_t params_;
  std::vector<int> signs_;  // N x (N-1), 0 for absent terms
  std::vector<double> sin_, cos_, amp_, amp_grad_;
};

double objective(const WitnessSpec& spec, std::span<const double> params, Model model, int d);
std::vector<double> gradient(const WitnessSpec& spec, std::span<const double> params, Model model,
                             int d);

enum class BetaRule {
  polak_ribiere_plus,
  fletcher_reeves,
  steepest_ascent,
};

std::string_view to_string(BetaRule r);
BetaRule beta_rule_from_string(std::string_view s);

struct LineSearchConfig {
  double initial_step = 1.0;
  double shrink = 0.5;
  double sufficient_increase = 1e-4;
};

struct OptimizerConfig {
  int restarts = 2000;
  int max_iterations = 5000;
  double gradient_tolerance = 1e-9;
  LineSearchConfig line_search;
  std::uint64_t seed = 20140101;
  BetaRule beta_rule = BetaRule::polak_ribiere_plus;

  // Throws std::domain_error on invalid settings.
  void validate() const;
};

// Result of one conjugate-gradient ascent.
struct AscentResult {
  double signed_value = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::vector<double> params;
};

// One ascent from the given start point.
AscentResult conjugate_gradient_ascent(WitnessObjective& f, std::vector<double> start,
                                       const OptimizerConfig& config);

// Uniform start point in [0, 2pi)^n for a given restart index.
std::vector<double> restart_start_point(std::uint64_t seed, int restart, std::size_t n);

struct BoundEstimate {
  int n = 0;
  int d = 0;
  Model model = Model::quantum;
  double best_value = 0.0;  // |signed sum|
  double best_signed_value = 0.0;
  int best_restart = -1;
  double best_gradient_norm = 0.0;
  AngleEnsemble best_ensemble;
  // Bin index floor(value / 0.01) -> number of restarts ending there.
  std::map<long, int> restart_histogram;
  double converged_fraction = 0.0;
  double mean_iterations = 0.0;
  OptimizerConfig config;
};

inline constexpr double kHistogramBinWidth = 0.01;

// Multistart ascent over config.restarts uniform starts. Restart r always
// uses the same derived seed, so a run with more restarts contains every
// start of a run with fewer. Results do not depend on `workers`; ties on
// the best value go to the lowest restart index. workers = 0 uses the
// available hardware concurrency.
BoundEstimate maximize(const WitnessSpec& spec, Model model, int d, const OptimizerConfig& config,
                       unsigned workers = 0);

}  // namespace dimwit
