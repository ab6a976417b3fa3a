#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "dimwit/json_io.hpp"
#include "dimwit/reference_data.hpp"
#include "dimwit/scalability.hpp"
#include "dimwit/witness.hpp"

using namespace dimwit;

namespace {

// Strictly increasing synthetic bounds: Q(N, d) = L_d(N) + 0.6 for every
// N = 4..20 and d = N-2, N-1.
BoundTable synthetic(double bump = 0.6) {
  BoundTable t;
  for (int n = 4; n <= 20; ++n) {
    for (int d = n - 2; d <= n - 1; ++d) {
      if (d >= 2) t.set(n, d, classical_bound(n, d) + bump, "synthetic");
    }
  }
  return t;
}

BoundTable bundled() {
  return bound_table_from_json(read_json_file(data_dir() / "quantum_bounds.json"));
}

}  // namespace

TEST_CASE("interval examples") {
  const auto one = interval(7, 6, 1.0, 26.1017);
  CHECK(one.i_min == 26.1017);
  CHECK(one.i_max == 26.1017);

  const auto six = interval(7, 6, 0.991, 26.1017);
  CHECK(six.i_min == doctest::Approx(25.8668).epsilon(5e-5 / 25.8668));
  CHECK(six.i_max == doctest::Approx(26.1098).epsilon(5e-5 / 26.1098));

  const auto five = interval(7, 5, 0.991, 24.8987);
  CHECK(five.i_min == doctest::Approx(24.6746).epsilon(5e-5 / 24.6746));
  CHECK(five.i_max == doctest::Approx(24.9176).epsilon(5e-5 / 24.9176));

  CHECK_THROWS_AS(interval(7, 6, 0.0, 26.1), std::domain_error);
  CHECK_THROWS_AS(interval(7, 6, 1.01, 26.1), std::domain_error);
  CHECK_THROWS_AS(interval(7, 6, 0.9, 0.0), std::domain_error);
}

TEST_CASE("interval endpoints recompute exactly from the two formulas") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> pick_n(3, 40);
  std::uniform_real_distribution<double> pick_f(1e-6, 1.0), pick_q(0.1, 500.0);
  for (int rep = 0; rep < 10000; ++rep) {
    const int n = pick_n(rng);
    const int d = 2 + rep % (n - 2);
    const double f = pick_f(rng), q = pick_q(rng);
    const auto iv = interval(n, d, f, q);
    CHECK(iv.i_min == f * q);
    CHECK(iv.i_max == f * q + (1 - f) * ((n + 2) * (n - 1) / 2.0));
    CHECK(iv.i_min <= iv.i_max);
  }
}

TEST_CASE("separable with point intervals and increasing bounds") {
  const BoundTable t = synthetic();
  for (int d = 3; d <= 19; ++d) CHECK(separable(d, 1.0, t));
  CHECK(separable(7, 6, 1.0, t));
}

TEST_CASE("separable follows the interval comparison") {
  const BoundTable t = synthetic();
  for (int d = 3; d <= 19; ++d) {
    for (double f : {0.95, 0.98, 0.99, 0.995}) {
      const int n = d + 1;
      const bool want = interval(n, d - 1, f, *t.get(n, d - 1)).i_max <
                        interval(n, d, f, *t.get(n, d)).i_min;
      CHECK(separable(d, f, t) == want);
    }
  }
}

TEST_CASE("missing bounds are named") {
  BoundTable t;
  t.set(8, 7, 34.12, "h");
  try {
    separable(7, 0.99, t);
    FAIL("expected a domain error");
  } catch (const std::domain_error& e) {
    CHECK(std::string(e.what()).find("(N=8, d=6)") != std::string::npos);
  }
  try {
    max_certifiable_dimension(0.99, t, 3, 5);
    FAIL("expected a domain error");
  } catch (const std::domain_error& e) {
    const std::string what = e.what();
    CHECK(what.find("(N=4, d=3)") != std::string::npos);
    CHECK(what.find("(N=6, d=4)") != std::string::npos);
  }
}

TEST_CASE("max certifiable dimension on synthetic bounds") {
  // Consecutive bounds differ by 2, so d passes iff 2F > (1 - F) A(d+1).
  const BoundTable t = synthetic();
  for (double f : {0.95, 0.98, 0.991}) {
    int want = 0;
    for (int d = 3; d <= 19; ++d) {
      if (f * 2.0 > (1 - f) * algebraic_max(d + 1)) want = d;
    }
    const auto cd = max_certifiable_dimension(f, t, 3, 19);
    REQUIRE(cd.max_dimension.has_value());
    CHECK(*cd.max_dimension == want);
    CHECK(cd.contiguous);
    CHECK(cd.rows.size() == 17);
  }
  CHECK(*max_certifiable_dimension(1.0, t, 3, 19).max_dimension == 19);
  CHECK_FALSE(max_certifiable_dimension(0.5, t, 3, 19).max_dimension.has_value());
}

TEST_CASE("non-contiguous pass sets are flagged") {
  BoundTable t = synthetic();
  // Collapse the gap at d = 5 only.
  t.set(6, 5, *t.get(6, 4) + 0.01, "synthetic");
  const auto cd = max_certifiable_dimension(0.99, t, 3, 10);
  REQUIRE(cd.max_dimension.has_value());
  CHECK_FALSE(cd.contiguous);
}

TEST_CASE("separability is monotone in F on a fine grid") {
  const BoundTable t = synthetic();
  for (int d = 3; d <= 19; ++d) {
    bool seen = false;
    for (int k = 90; k <= 100; ++k) {
      const bool s = separable(d, k / 100.0, t);
      CHECK_FALSE((seen && !s));
      seen = seen || s;
    }
  }
}

TEST_CASE("bundled bound table") {
  const BoundTable t = bundled();
  for (int n = 4; n <= 20; ++n) {
    CAPTURE(n);
    REQUIRE(t.contains(n, n - 1));
    REQUIRE(t.contains(n, n - 2));
    // A quantum bound at least matches the classical bound of the same d.
    CHECK(*t.get(n, n - 1) >= classical_bound(n, n - 1) - 1e-6);
    CHECK(*t.get(n, n - 1) > *t.get(n, n - 2));
    CHECK(*t.get(n, n - 1) <= algebraic_max(n));
  }
  CHECK(*t.get(7, 6) == doctest::Approx(26.1017).epsilon(1e-3 / 26.1017));
  CHECK(*t.get(7, 5) == doctest::Approx(24.8987).epsilon(1e-3 / 24.8987));
  CHECK(t.stale_entries(config_hash(OptimizerConfig{})).empty());
  CHECK(separable(6, 0.991, t));
  CHECK_FALSE(separable(11, 0.98, t));
  CHECK(*max_certifiable_dimension(1.0, t, 3, 19).max_dimension == 19);
}
