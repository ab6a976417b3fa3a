#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "dimwit/optimizer.hpp"
#include "dimwit/reference_data.hpp"

using namespace dimwit;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> random_point(std::size_t size, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2 * kPi);
  std::vector<double> x(size);
  for (double& v : x) v = u(rng);
  return x;
}

// Central differences of the signed objective, step h.
std::vector<double> finite_difference(const WitnessSpec& w, std::vector<double> x, Model m, int d,
                                      double h) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = objective(w, x, m, d);
    x[i] = keep - h;
    const double down = objective(w, x, m, d);
    x[i] = keep;
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

// Largest per-component error relative to max(1, |fd|).
double worst_relative_error(const std::vector<double>& a, const std::vector<double>& fd) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - fd[i]) / std::max(1.0, std::abs(fd[i])));
  }
  return worst;
}

OptimizerConfig small_config(int restarts) {
  OptimizerConfig c;
  c.restarts = restarts;
  return c;
}

}  // namespace

TEST_CASE("objective examples") {
  const WitnessSpec w = make_witness(7);
  for (int d = 2; d <= 6; ++d) {
    CHECK(objective(w, std::vector<double>(parameter_count(7, d), 0.0), Model::quantum, d) ==
          doctest::Approx(15.0));
  }
  const AngleEnsemble ref = load_i7_reference_ensemble();
  CHECK(std::abs(std::abs(objective(w, ref.flatten(), Model::quantum, 6)) - 26.1017) <= 5e-4);
  CHECK_THROWS_AS(objective(w, std::vector<double>(64, 0.0), Model::quantum, 6),
                  std::domain_error);
  CHECK_THROWS_AS(gradient(w, std::vector<double>(66, 0.0), Model::quantum, 6),
                  std::domain_error);
}

TEST_CASE("objective matches evaluate on the unflattened ensemble") {
  std::mt19937_64 rng(1);
  for (int n = 3; n <= 8; ++n) {
    const WitnessSpec w = make_witness(n);
    for (int d = 2; d <= 6; ++d) {
      for (Model m : {Model::quantum, Model::classical_diagonal}) {
        const auto x = random_point(parameter_count(n, d), rng);
        const double direct = signed_value(w, correlators(AngleEnsemble::unflatten(m, n, d, x)));
        CHECK(objective(w, x, m, d) == doctest::Approx(direct).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("analytic gradient matches central differences") {
  std::mt19937_64 rng(2);
  for (int n = 3; n <= 7; ++n) {
    const WitnessSpec w = make_witness(n);
    for (int d = 2; d <= 6; ++d) {
      for (Model m : {Model::quantum, Model::classical_diagonal}) {
        double worst = 0.0;
        for (int rep = 0; rep < 100; ++rep) {
          const auto x = random_point(parameter_count(n, d), rng);
          worst = std::max(worst, worst_relative_error(gradient(w, x, m, d),
                                                       finite_difference(w, x, m, d, 1e-6)));
        }
        CAPTURE(n);
        CAPTURE(d);
        CHECK(worst < 1e-5);
      }
    }
  }
}

TEST_CASE("gradient vanishes when every projector is orthogonal to every state") {
  // d = 2: preparations along |0>, measurements along |1>.
  const int n = 5;
  std::vector<double> x(parameter_count(n, 2), 0.0);
  for (int y = 0; y < n - 1; ++y) x[n + y] = kPi / 2;
  const auto g = gradient(make_witness(n), x, Model::quantum, 2);
  for (double v : g) CHECK(std::abs(v) < 1e-15);
}

TEST_CASE("value_and_gradient agrees with the free functions") {
  std::mt19937_64 rng(3);
  const WitnessSpec w = make_witness(6);
  WitnessObjective f(w, Model::quantum, 4);
  const auto x = random_point(f.size(), rng);
  std::vector<double> g(f.size());
  const double v = f.value_and_gradient(x, g);
  CHECK(v == doctest::Approx(objective(w, x, Model::quantum, 4)).epsilon(1e-14));
  CHECK(f.value(x) == v);
  const auto g2 = gradient(w, x, Model::quantum, 4);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(g[i] == doctest::Approx(g2[i]).epsilon(1e-14));
}

TEST_CASE("I_3 in d = 2 reaches the grid-search maximum") {
  // For fixed projectors each preparation enters its own terms only, so the
  // five-angle grid splits into a scan over the second projector (the first
  // is fixed at 0 by rotation invariance) and independent scans per state.
  auto e = [](double a, double b) { return 2 * std::pow(std::cos(a - b), 2) - 1; };
  auto golden = [](auto f, double lo, double hi) {
    const double r = (std::sqrt(5.0) - 1) / 2;
    for (int it = 0; it < 100; ++it) {
      const double a = hi - r * (hi - lo), b = lo + r * (hi - lo);
      if (f(a) > f(b)) hi = b;
      else lo = a;
    }
    return (lo + hi) / 2;
  };
  auto best_over = [&](auto f) {
    double arg = 0.0, top = -1e9;
    for (double t = 0.0; t < kPi; t += 0.01) {
      if (f(t) > top) top = f(t), arg = t;
    }
    return f(golden(f, arg - 0.01, arg + 0.01));
  };
  auto value_for = [&](double m) {
    const double x1 = best_over([&](double a) { return e(a, 0) + e(a, m); });
    const double x2 = best_over([&](double a) { return e(a, 0) - e(a, m); });
    const double x3 = best_over([&](double a) { return -e(a, 0); });
    return x1 + x2 + x3;
  };
  const double grid = best_over(value_for);
  CHECK(grid == doctest::Approx(1 + 2 * std::sqrt(2.0)).epsilon(1e-9));

  const BoundEstimate est = maximize(make_witness(3), Model::quantum, 2, small_config(500), 1);
  CHECK(est.best_value == doctest::Approx(grid).epsilon(1e-9));
  CHECK(est.best_value > classical_bound(3, 2));
}

TEST_CASE("best value is recomputable from the best ensemble") {
  const BoundEstimate est = maximize(make_witness(5), Model::quantum, 3, small_config(40), 1);
  CHECK(std::abs(est.best_value -
                 evaluate(make_witness(5), correlators(est.best_ensemble))) < 1e-9);
  CHECK(est.best_value == std::abs(est.best_signed_value));
  CHECK(est.best_gradient_norm < est.config.gradient_tolerance);
  int total = 0;
  for (const auto& [bin, count] : est.restart_histogram) total += count;
  CHECK(total == 40);
  CHECK(est.restart_histogram.rbegin()->first ==
        static_cast<long>(std::floor(est.best_value / kHistogramBinWidth)));
}

TEST_CASE("maximize is reproducible and independent of the worker count") {
  const WitnessSpec w = make_witness(6);
  const BoundEstimate a = maximize(w, Model::quantum, 4, small_config(24), 1);
  const BoundEstimate b = maximize(w, Model::quantum, 4, small_config(24), 1);
  const BoundEstimate c = maximize(w, Model::quantum, 4, small_config(24), 3);
  for (const BoundEstimate* other : {&b, &c}) {
    CHECK(other->best_value == a.best_value);
    CHECK(other->best_restart == a.best_restart);
    CHECK(other->best_ensemble.flatten() == a.best_ensemble.flatten());
    CHECK(other->restart_histogram == a.restart_histogram);
    CHECK(other->converged_fraction == a.converged_fraction);
    CHECK(other->mean_iterations == a.mean_iterations);
  }
  OptimizerConfig other_seed = small_config(24);
  other_seed.seed += 1;
  CHECK(maximize(w, Model::quantum, 4, other_seed, 1).best_ensemble.flatten() !=
        a.best_ensemble.flatten());
}

TEST_CASE("best value never decreases as nested restart sets grow") {
  const WitnessSpec w = make_witness(7);
  double previous = 0.0;
  for (int restarts : {1, 3, 9, 27}) {
    const BoundEstimate est = maximize(w, Model::quantum, 5, small_config(restarts), 1);
    CHECK(est.best_value >= previous);
    previous = est.best_value;
  }
}

TEST_CASE("restart start points are uniform on [0, 2pi) and nested") {
  const auto p = restart_start_point(5, 3, 1000);
  for (double v : p) {
    CHECK(v >= 0.0);
    CHECK(v < 2 * kPi);
  }
  CHECK(restart_start_point(5, 3, 10) == restart_start_point(5, 3, 10));
  CHECK(restart_start_point(5, 3, 10) != restart_start_point(5, 4, 10));
}

TEST_CASE("classical diagonal maxima stay at or below L_d") {
  for (int n = 4; n <= 6; ++n) {
    for (int d = 2; d <= n - 1; ++d) {
      const BoundEstimate est =
          maximize(make_witness(n), Model::classical_diagonal, d, small_config(60), 1);
      CAPTURE(n);
      CAPTURE(d);
      CHECK(est.best_value <= classical_bound(n, d) + 1e-9);
      CHECK(est.best_value >= classical_bound(n, d) - 1e-6);
    }
  }
}

TEST_CASE("a single ascent from the reference angles converges") {
  const AngleEnsemble ref = load_i7_reference_ensemble();
  WitnessObjective f(make_witness(7), Model::quantum, 6);
  const AscentResult r = conjugate_gradient_ascent(f, ref.flatten(), OptimizerConfig{});
  CHECK(r.converged);
  CHECK(r.gradient_norm < 1e-9);
  CHECK(std::abs(std::abs(r.signed_value) - 26.1017) <= 5e-4);
}

TEST_CASE("every beta rule ascends") {
  for (BetaRule rule :
       {BetaRule::polak_ribiere_plus, BetaRule::fletcher_reeves, BetaRule::steepest_ascent}) {
    OptimizerConfig c = small_config(4);
    c.beta_rule = rule;
    c.max_iterations = 20000;
    const BoundEstimate est = maximize(make_witness(4), Model::quantum, 2, c, 1);
    CAPTURE(to_string(rule));
    CHECK(est.best_value > classical_bound(4, 2));
    CHECK(beta_rule_from_string(to_string(rule)) == rule);
  }
  CHECK_THROWS_AS(beta_rule_from_string("hestenes"), std::domain_error);
}

TEST_CASE("config validation") {
  OptimizerConfig c;
  CHECK_NOTHROW(c.validate());
  c.restarts = 0;
  CHECK_THROWS_AS(c.validate(), std::domain_error);
  c = {};
  c.gradient_tolerance = 0.0;
  CHECK_THROWS_AS(c.validate(), std::domain_error);
  c = {};
  c.line_search.shrink = 1.0;
  CHECK_THROWS_AS(c.validate(), std::domain_error);
}
