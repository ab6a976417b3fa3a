#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "dimwit/json_io.hpp"
#include "dimwit/reference_data.hpp"

using namespace dimwit;

namespace {

// Values with full 17-digit mantissas.
double awkward(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(-1.0, 1.0)(rng) / 3.0;
}

json reparse(const json& j) { return json::parse(j.dump()); }

}  // namespace

TEST_CASE("witness spec round trip") {
  for (int n = 3; n <= 10; ++n) {
    const WitnessSpec w = make_witness(n);
    const json j = to_json(w);
    CHECK(j["N"] == n);
    CHECK(j["terms"].size() == w.terms().size());
    const WitnessSpec back = witness_from_json(reparse(j));
    CHECK(back.n() == n);
    CHECK(to_json(back) == j);
  }
  json bad = to_json(make_witness(4));
  bad["terms"][0]["sign"] = -1;
  CHECK_THROWS_AS(witness_from_json(bad), std::domain_error);
}

TEST_CASE("correlator table round trip is bit exact") {
  std::mt19937_64 rng(1);
  std::vector<double> e(42), p(42);
  for (std::size_t k = 0; k < e.size(); ++k) {
    p[k] = (awkward(rng) + 1.0) / 2.0;
    e[k] = awkward(rng);
  }
  const CorrelatorTable plain(7, e);
  const CorrelatorTable back = correlators_from_json(reparse(to_json(plain)));
  CHECK(std::vector<double>(back.values().begin(), back.values().end()) == e);

  const auto with_p = CorrelatorTable::from_probabilities(7, p);
  const CorrelatorTable back_p = correlators_from_json(reparse(to_json(with_p)));
  CHECK(*back_p.probabilities() == p);
  CHECK(std::vector<double>(back_p.values().begin(), back_p.values().end()) ==
        std::vector<double>(with_p.values().begin(), with_p.values().end()));
  CHECK(to_json(with_p)["E"].size() == 7);
  CHECK(to_json(with_p)["E"][0].size() == 6);
}

TEST_CASE("ensemble round trip") {
  std::mt19937_64 rng(2);
  std::vector<double> x(parameter_count(7, 6));
  for (double& v : x) v = 20 * awkward(rng);
  const AngleEnsemble e = AngleEnsemble::unflatten(Model::classical_diagonal, 7, 6, x);
  const AngleEnsemble back = ensemble_from_json(reparse(to_json(e)));
  CHECK(back.model == Model::classical_diagonal);
  CHECK(back.flatten() == x);
}

TEST_CASE("optimizer config round trip and hash") {
  OptimizerConfig c;
  c.restarts = 17;
  c.gradient_tolerance = 1.0 / 3e9;
  c.beta_rule = BetaRule::fletcher_reeves;
  c.seed = 0xFFFFFFFFFFFFFFFFULL;
  const OptimizerConfig back = optimizer_config_from_json(reparse(to_json(c)));
  CHECK(to_json(back) == to_json(c));
  CHECK(config_hash(back) == config_hash(c));
  CHECK(config_hash(c).size() == 16);
  CHECK(config_hash(c) != config_hash(OptimizerConfig{}));
  CHECK(config_hash(OptimizerConfig{}) == config_hash(OptimizerConfig{}));
  // Partial configs keep the base values.
  const OptimizerConfig partial = optimizer_config_from_json(json{{"restarts", 5}});
  CHECK(partial.restarts == 5);
  CHECK(partial.max_iterations == OptimizerConfig{}.max_iterations);
}

TEST_CASE("bound table round trip") {
  BoundTable t;
  t.set(7, 6, 26.101731233, "abc");
  t.set(8, 7, 1.0 / 3.0 + 34, "abc");
  const BoundTable back = bound_table_from_json(reparse(to_json(t)));
  CHECK(*back.get(7, 6) == 26.101731233);
  CHECK(*back.get(8, 7) == 1.0 / 3.0 + 34);
  CHECK(back.entries().at({8, 7}).config_hash == "abc");
  CHECK(back.stale_entries("abc").empty());
  CHECK(back.stale_entries("xyz").size() == 2);
}

TEST_CASE("count record round trips through JSON and CSV") {
  CountRecord rec(4, 3);
  rec.noise.fidelity = 0.991;
  rec.noise.dark_rate = 12.5;
  rec.seed = 77;
  for (std::size_t k = 0; k < rec.counts.size(); ++k) rec.counts[k] = static_cast<std::int64_t>(k * 37 % 101);
  const CountRecord back = count_record_from_json(reparse(to_json(rec)));
  CHECK(back.counts == rec.counts);
  CHECK(back.noise.fidelity == 0.991);
  CHECK(back.seed == 77);

  const CountRecord from_csv = count_record_from_csv(to_csv(rec), rec.noise);
  CHECK(from_csv.n == 4);
  CHECK(from_csv.d == 3);
  CHECK(from_csv.counts == rec.counts);

  std::string partial = to_csv(rec);
  partial.erase(partial.rfind('\n', partial.size() - 2) + 1);
  CHECK_THROWS_AS(count_record_from_csv(partial, rec.noise), std::domain_error);
  CHECK_THROWS_AS(count_record_from_csv("x,y,k,count\n1,1,one,3\n", rec.noise), std::domain_error);
}

TEST_CASE("bound estimate JSON carries config, hash and histogram") {
  OptimizerConfig c;
  c.restarts = 5;
  const BoundEstimate est = maximize(make_witness(4), Model::quantum, 2, c, 1);
  const json j = to_json(est);
  CHECK(j["best_value"] == est.best_value);
  CHECK(j["config"]["restarts"] == 5);
  CHECK(j["config_hash"] == config_hash(c));
  int total = 0;
  for (const auto& bin : j["restart_histogram"]) total += bin["count"].get<int>();
  CHECK(total == 5);
  CHECK(ensemble_from_json(j["best_ensemble"]).flatten() == est.best_ensemble.flatten());
}

TEST_CASE("files") {
  const auto path = std::filesystem::temp_directory_path() / "dimwit_json_io_test.json";
  write_json_file(path, to_json(make_witness(5)));
  CHECK(witness_from_json(read_json_file(path)).n() == 5);
  std::filesystem::remove(path);
  CHECK_THROWS(read_json_file(path));
}

TEST_CASE("reference data loaders") {
  const auto limits = load_i7_limits();
  REQUIRE(limits.size() == 5);
  CHECK(limits.front().d == 2);
  CHECK(limits.front().classical == 17.0);
  CHECK(limits.back().quantum == 26.1017);
  CHECK(quantum_column(limits).size() == 5);
  CHECK_THROWS_AS(load_i7_reference_ensemble("/nonexistent"), DataError);
}
