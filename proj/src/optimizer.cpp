#include "dimwit/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>

#include "dimwit/rng.hpp"

namespace dimwit {

namespace {

constexpr double kMinStep = 1e-20;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

WitnessObjective::WitnessObjective(const WitnessSpec& spec, Model model, int d)
    : n_(spec.n()),
      d_(d),
      model_(model),
      params_(0),
      signs_(spec.sign_matrix().begin(), spec.sign_matrix().end()) {
  if (d < 2) throw std::domain_error("objective needs d >= 2, got " + std::to_string(d));
  params_ = parameter_count(n_, d_);
  sin_.resize(params_);
  cos_.resize(params_);
  const std::size_t vectors = static_cast<std::size_t>(2 * n_ - 1);
  amp_.resize(vectors * d_);
  amp_grad_.resize(vectors * d_);
}

void WitnessObjective::check(std::span<const double> params) const {
  if (params.size() != params_) {
    throw std::domain_error("objective for N=" + std::to_string(n_) + ", d=" + std::to_string(d_) +
                            " needs " + std::to_string(params_) + " parameters, got " +
                            std::to_string(params.size()));
  }
}

void WitnessObjective::amplitudes(std::span<const double> params) {
  const std::size_t m = static_cast<std::size_t>(d_ - 1);
  const std::size_t vectors = static_cast<std::size_t>(2 * n_ - 1);
  for (std::size_t k = 0; k < params_; ++k) {
    sin_[k] = std::sin(params[k]);
    cos_[k] = std::cos(params[k]);
  }
  for (std::size_t v = 0; v < vectors; ++v) {
    const double* s = &sin_[v * m];
    const double* c = &cos_[v * m];
    double* out = &amp_[v * d_];
    double prefix = 1.0;
    for (std::size_t j = 0; j < m; ++j) {
      out[j] = c[j] * prefix;
      prefix *= s[j];
    }
    out[m] = prefix;
  }
}

double WitnessObjective::value(std::span<const double> params) {
  check(params);
  amplitudes(params);
  const std::size_t d = static_cast<std::size_t>(d_);
  const int cols = n_ - 1;
  double sum = 0.0;
  for (int x = 0; x < n_; ++x) {
    const double* a = &amp_[x * d];
    for (int y = 0; y < cols; ++y) {
      const int s = signs_[x * cols + y];
      if (s == 0) continue;
      const double* b = &amp_[(n_ + y) * d];
      double p = 0.0;
      if (model_ == Model::quantum) {
        double o = 0.0;
        for (std::size_t i = 0; i < d; ++i) o += a[i] * b[i];
        p = o * o;
      } else {
        for (std::size_t i = 0; i < d; ++i) p += a[i] * a[i] * b[i] * b[i];
      }
      sum += s * (2.0 * p - 1.0);
    }
  }
  return sum;
}

double WitnessObjective::value_and_gradient(std::span<const double> params, std::span<double> grad) {
  check(params);
  if (grad.size() != params_) throw std::domain_error("gradient buffer has the wrong size");
  amplitudes(params);
  std::fill(amp_grad_.begin(), amp_grad_.end(), 0.0);
  const std::size_t d = static_cast<std::size_t>(d_);
  const int cols = n_ - 1;
  double sum = 0.0;
  for (int x = 0; x < n_; ++x) {
    const double* a = &amp_[x * d];
    double* ga = &amp_grad_[x * d];
    for (int y = 0; y < cols; ++y) {
      const int s = signs_[x * cols + y];
      if (s == 0) continue;
      const double* b = &amp_[(n_ + y) * d];
      double* gb = &amp_grad_[(n_ + y) * d];
      if (model_ == Model::quantum) {
        // d/da of 2 (a.b)^2 is 4 (a.b) b.
        double o = 0.0;
        for (std::size_t i = 0; i < d; ++i) o += a[i] * b[i];
        sum += s * (2.0 * o * o - 1.0);
        const double w = 4.0 * s * o;
        for (std::size_t i = 0; i < d; ++i) {
          ga[i] += w * b[i];
          gb[i] += w * a[i];
        }
      } else {
        double p = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
          const double a2 = a[i] * a[i];
          const double b2 = b[i] * b[i];
          p += a2 * b2;
          ga[i] += 4.0 * s * a[i] * b2;
          gb[i] += 4.0 * s * b[i] * a2;
        }
        sum += s * (2.0 * p - 1.0);
      }
    }
  }

  // Chain rule through the hyperspherical map. With prefix_k the product
  // of sin(phi_i) for i < k and
  //   T_{m-1} = g_m,  T_k = g_{k+1} cos(phi_{k+1}) + sin(phi_{k+1}) T_{k+1},
  // the partial derivative is prefix_k (cos(phi_k) T_k - sin(phi_k) g_k).
  // No division by sin, so poles of the chart are handled exactly.
  const std::size_t m = d - 1;
  const std::size_t vectors = static_cast<std::size_t>(2 * n_ - 1);
  for (std::size_t v = 0; v < vectors; ++v) {
    const double* s = &sin_[v * m];
    const double* c = &cos_[v * m];
    const double* g = &amp_grad_[v * d];
    double* out = &grad[v * m];
    double tail = g[m];
    for (std::size_t k = m; k-- > 0;) {
      out[k] = c[k] * tail - s[k] * g[k];
      tail = g[k] * c[k] + s[k] * tail;
    }
    double prefix = 1.0;
    for (std::size_t k = 0; k < m; ++k) {
      out[k] *= prefix;
      prefix *= s[k];
    }
  }
  return sum;
}

double objective(const WitnessSpec& spec, std::span<const double> params, Model model, int d) {
  WitnessObjective f(spec, model, d);
  return f.value(params);
}

std::vector<double> gradient(const WitnessSpec& spec, std::span<const double> params, Model model,
                             int d) {
  WitnessObjective f(spec, model, d);
  std::vector<double> g(f.size());
  f.value_and_gradient(params, g);
  return g;
}

std::string_view to_string(BetaRule r) {
  switch (r) {
    case BetaRule::polak_ribiere_plus:
      return "polak_ribiere_plus";
    case BetaRule::fletcher_reeves:
      return "fletcher_reeves";
    case BetaRule::steepest_ascent:
      return "steepest_ascent";
  }
  return "unknown";
}

BetaRule beta_rule_from_string(std::string_view s) {
  if (s == "polak_ribiere_plus") return BetaRule::polak_ribiere_plus;
  if (s == "fletcher_reeves") return BetaRule::fletcher_reeves;
  if (s == "steepest_ascent") return BetaRule::steepest_ascent;
  throw std::domain_error("unknown beta rule '" + std::string(s) + "'");
}

void OptimizerConfig::validate() const {
  if (restarts < 1) throw std::domain_error("restarts must be >= 1");
  if (max_iterations < 1) throw std::domain_error("max_iterations must be >= 1");
  if (!(gradient_tolerance > 0.0)) throw std::domain_error("gradient_tolerance must be > 0");
  if (!(line_search.initial_step > 0.0)) throw std::domain_error("initial step must be > 0");
  if (!(line_search.shrink > 0.0 && line_search.shrink < 1.0)) {
    throw std::domain_error("line search shrink factor must be in (0, 1)");
  }
  if (!(line_search.sufficient_increase > 0.0 && line_search.sufficient_increase < 1.0)) {
    throw std::domain_error("sufficient-increase constant must be in (0, 1)");
  }
}

AscentResult conjugate_gradient_ascent(WitnessObjective& f, std::vector<double> start,
                                       const OptimizerConfig& config) {
  const std::size_t n = f.size();
  if (start.size() != n) throw std::domain_error("start point has the wrong size");
  const LineSearchConfig& ls = config.line_search;

  AscentResult r;
  std::vector<double> x = std::move(start);
  std::vector<double> g(n), g_trial(n), g_best(n), dir(n), trial(n), best(n);

  // Ascend |S|: the orientation is fixed by the sign at the start point,
  // which is nonzero almost surely for random starts.
  double fx = f.value_and_gradient(x, g);
  r.evaluations = 1;
  const double orientation = fx < 0.0 ? -1.0 : 1.0;
  fx *= orientation;
  for (double& v : g) v *= orientation;

  // Value and directional derivative along dir at x + step * dir.
  auto probe = [&](double step, double& dphi) {
    for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + step * dir[i];
    const double v = orientation * f.value_and_gradient(trial, g_trial);
    for (double& gi : g_trial) gi *= orientation;
    ++r.evaluations;
    dphi = dot(g_trial, dir);
    return v;
  };

  double gg = dot(g, g);
  dir = g;
  bool steepest = true;
  int since_restart = 0;
  double prev_step = 0.0;
  double prev_slope = 0.0;

  for (; r.iterations < config.max_iterations; ++r.iterations) {
    if (std::sqrt(gg) < config.gradient_tolerance) {
      r.converged = true;
      break;
    }
    double slope = dot(g, dir);
    if (!(slope > 0.0)) {
      dir = g;
      slope = gg;
      steepest = true;
      since_restart = 0;
    }

    // First trial: the configured initial step after a restart, otherwise
    // the step that repeats the previous first-order increase.
    double step = ls.initial_step;
    if (!steepest && prev_step > 0.0) step = prev_step * prev_slope / slope;

    // Backtracking with sufficient increase c * step * slope. Each shrink
    // is refined by the secant model of the directional derivative inside
    // [0.1, shrink] * step. Once value differences reach rounding level the
    // increase test is meaningless, and an approximate Wolfe test on the
    // directional derivative takes over.
    double f_best = 0.0, best_step = 0.0;
    bool accepted = false;
    for (int tries = 0; tries < 80 && step > kMinStep; ++tries) {
      double dphi = 0.0;
      const double ft = probe(step, dphi);
      const bool increase = ft >= fx + ls.sufficient_increase * step * slope;
      const bool flat = std::abs(ft - fx) <= 1e-10 * std::max(1.0, std::abs(fx));
      const bool wolfe = dphi <= 0.9 * slope && dphi >= -0.8 * slope;
      const double curvature = (slope - dphi) / step;
      const double model_step = curvature > 0.0 ? slope / curvature : 4.0 * step;

      if (increase || (flat && wolfe)) {
        accepted = true;
        f_best = ft;
        best_step = step;
        best.swap(trial);
        g_best.swap(g_trial);
        // One extrapolation or interpolation to the model maximizer when
        // it predicts a clearly different step.
        if (model_step > 1.5 * step || model_step < 0.66 * step) {
          const double candidate = std::min(model_step, 4.0 * step);
          double dphi_c = 0.0;
          const double fc = probe(candidate, dphi_c);
          const bool better = flat ? std::abs(dphi_c) < std::abs(dphi) : fc > ft;
          if (better && (fc >= fx + ls.sufficient_increase * candidate * slope ||
                         (std::abs(fc - fx) <= 1e-10 * std::max(1.0, std::abs(fx)) &&
                          dphi_c <= 0.9 * slope && dphi_c >= -0.8 * slope))) {
            f_best = fc;
            best_step = candidate;
            best.swap(trial);
            g_best.swap(g_trial);
          }
        }
        break;
      }
      if (flat && dphi > 0.9 * slope) {
        step = std::min(model_step, 10.0 * step);  // too short to register
      } else {
        step = std::clamp(model_step, 0.1 * step, ls.shrink * step);
      }
    }
    if (!accepted) {
      if (steepest) break;  // no ascent possible at this resolution
      dir = g;
      steepest = true;
      since_restart = 0;
      continue;
    }
    prev_step = best_step;
    prev_slope = slope;

    x.swap(best);
    fx = f_best;
    const double gg_next = dot(g_best, g_best);

    double beta = 0.0;
    ++since_restart;
    if (since_restart < static_cast<int>(n)) {
      switch (config.beta_rule) {
        case BetaRule::polak_ribiere_plus:
          beta = std::max(0.0, (gg_next - dot(g_best, g)) / gg);
          break;
        case BetaRule::fletcher_reeves:
          beta = gg_next / gg;
          break;
        case BetaRule::steepest_ascent:
          beta = 0.0;
          break;
      }
    }
    if (!(beta > 0.0) || !std::isfinite(beta)) {
      beta = 0.0;
      since_restart = 0;
    }
    for (std::size_t i = 0; i < n; ++i) dir[i] = g_best[i] + beta * dir[i];
    steepest = (beta == 0.0);
    g.swap(g_best);
    gg = gg_next;
  }
  if (!r.converged && std::sqrt(gg) < config.gradient_tolerance) r.converged = true;

  r.signed_value = orientation * fx;
  r.gradient_norm = std::sqrt(gg);
  r.params = std::move(x);
  return r;
}

std::vector<double> restart_start_point(std::uint64_t seed, int restart, std::size_t n) {
  SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(restart)));
  std::vector<double> x(n);
  for (double& v : x) v = 2.0 * std::numbers::pi * rng.uniform();
  return x;
}

BoundEstimate maximize(const WitnessSpec& spec, Model model, int d, const OptimizerConfig& config,
                       unsigned workers) {
  config.validate();
  if (d < 2) throw std::domain_error("maximize needs d >= 2");
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(config.restarts));

  const std::size_t n_params = parameter_count(spec.n(), d);
  std::vector<AscentResult> results(static_cast<std::size_t>(config.restarts));
  std::atomic<int> next{0};
  auto run = [&] {
    WitnessObjective f(spec, model, d);
    for (int r = next++; r < config.restarts; r = next++) {
      results[static_cast<std::size_t>(r)] =
          conjugate_gradient_ascent(f, restart_start_point(config.seed, r, n_params), config);
    }
  };
  if (workers == 1) {
    run();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
  }

  BoundEstimate est;
  est.n = spec.n();
  est.d = d;
  est.model = model;
  est.config = config;
  int converged = 0;
  long iterations = 0;
  for (int r = 0; r < config.restarts; ++r) {
    const AscentResult& a = results[static_cast<std::size_t>(r)];
    const double v = std::abs(a.signed_value);
    if (a.converged) ++converged;
    iterations += a.iterations;
    ++est.restart_histogram[static_cast<long>(std::floor(v / kHistogramBinWidth))];
    if (est.best_restart < 0 || v > est.best_value) {
      est.best_value = v;
      est.best_signed_value = a.signed_value;
      est.best_restart = r;
      est.best_gradient_norm = a.gradient_norm;
    }
  }
  est.converged_fraction = static_cast<double>(converged) / config.restarts;
  est.mean_iterations = static_cast<double>(iterations) / config.restarts;
  est.best_ensemble = AngleEnsemble::unflatten(
      model, spec.n(), d, results[static_cast<std::size_t>(est.best_restart)].params);
  return est;
}

}  // namespace dimwit
