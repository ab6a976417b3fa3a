#include <filesystem>
#include <sstream>

#include "commands.hpp"
#include "doctest.h"

using namespace dimwit;
using namespace dimwit::cli;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "dimwit");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::filesystem::path temp(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("dimwit_cli_" + name);
}

}  // namespace

TEST_CASE("bounds classical-exact") {
  const Run r = invoke({"bounds", "--N", "7", "--d", "6", "--model", "classical-exact", "--json"});
  REQUIRE(r.code == 0);
  const json report = json::parse(r.out);
  CHECK(report["outputs"]["classical-exact"]["value"] == 25.0);
  CHECK(report["tool"] == "dimwit");
  CHECK(report["command"] == "bounds");
  CHECK(report.contains("timing"));

  const Run small = invoke({"bounds", "--N", "3", "--d", "2", "--model", "classical-exact", "--json"});
  CHECK(json::parse(small.out)["outputs"]["classical-exact"]["value"] == 3.0);
}

TEST_CASE("bounds quantum with a small restart budget") {
  const Run r = invoke({"bounds", "--N", "4", "--d", "3", "--restarts", "8", "--json"});
  REQUIRE(r.code == 0);
  const json report = json::parse(r.out);
  CHECK(report["config"]["optimizer"]["restarts"] == 8);
  CHECK(report["outputs"]["quantum"]["best_value"].get<double>() > 7.0);
  CHECK(report["seed"] == OptimizerConfig{}.seed);
}

TEST_CASE("bounds --model all includes every model") {
  const Run r = invoke({"bounds", "--N", "4", "--d", "2", "--model", "all", "--restarts", "4", "--json"});
  REQUIRE(r.code == 0);
  const json out = json::parse(r.out)["outputs"];
  CHECK(out.contains("quantum"));
  CHECK(out.contains("classical-diagonal"));
  CHECK(out["classical-exact"]["value"] == 5.0);
  CHECK(out["classical_bound"] == 5.0);
}

TEST_CASE("exit codes") {
  CHECK(invoke({"oracle", "--N", "12", "--d", "6"}).code == kResourceGuard);
  CHECK(invoke({"oracle", "--N", "2", "--d", "1"}).code == kDomainError);
  CHECK(invoke({"bounds", "--model", "complex"}).code == kDomainError);
  CHECK(invoke({"bounds", "--N"}).code == kDomainError);
  CHECK(invoke({"nonsense"}).code == kDomainError);
  CHECK(invoke({"simulate", "--ensemble", "/nonexistent.json"}).code == kDomainError);
  CHECK(invoke({"scalability", "--table", "/nonexistent.json"}).code == kStaleBoundTable);
}

TEST_CASE("verify-tables passes and reports stationarity") {
  const Run r = invoke({"verify-tables", "--json"});
  REQUIRE(r.code == 0);
  const json out = json::parse(r.out)["outputs"];
  CHECK(out["pass"] == true);
  CHECK(std::abs(out["value"].get<double>() - 26.1017) <= 5e-4);
  CHECK(out["polished_gradient_norm"].get<double>() < 1e-4);
}

TEST_CASE("missing data directory exits 4") {
  const char* old = std::getenv("DIMWIT_DATA_DIR");
  const std::string keep = old ? old : "";
  setenv("DIMWIT_DATA_DIR", "/nonexistent-dimwit-data", 1);
  CHECK(invoke({"verify-tables"}).code == kMissingData);
  CHECK(invoke({"simulate", "--ensemble", "classical-best"}).code == kMissingData);
  if (old) setenv("DIMWIT_DATA_DIR", keep.c_str(), 1);
  else unsetenv("DIMWIT_DATA_DIR");
}

TEST_CASE("stale bound tables are refused unless overridden") {
  const auto path = temp("stale_table.json");
  BoundTable t;
  for (int n = 4; n <= 6; ++n) {
    t.set(n, n - 2, classical_bound(n, n - 2) + 0.5, "0000000000000000");
    t.set(n, n - 1, classical_bound(n, n - 1) + 0.9, "0000000000000000");
  }
  write_json_file(path, to_json(t));
  const Run refused = invoke({"scalability", "--table", path.string(), "--d-max", "5"});
  CHECK(refused.code == kStaleBoundTable);
  CHECK(refused.err.find("dimwit bounds --sweep") != std::string::npos);
  const Run allowed =
      invoke({"scalability", "--table", path.string(), "--d-max", "5", "--allow-stale", "--json"});
  CHECK(allowed.code == 0);
  std::filesystem::remove(path);
}

TEST_CASE("simulate reports repetitions and verdicts") {
  const Run r = invoke({"simulate", "--repetitions", "5", "--json"});
  REQUIRE(r.code == 0);
  const json out = json::parse(r.out)["outputs"];
  CHECK(out["repetitions"].size() == 5);
  CHECK(out["repetitions"][0]["verdict"]["min_quantum_dimension"] == 6);
  CHECK(out["fraction_above_classical"] == 1.0);
}

TEST_CASE("counts written by simulate can be estimated again") {
  for (const char* ext : {".csv", ".json"}) {
    const auto path = temp(std::string("counts") + ext);
    const Run first = invoke({"simulate", "--repetitions", "1", "--counts-out", path.string(), "--json"});
    REQUIRE(first.code == 0);
    const Run again = invoke({"simulate", "--counts-in", path.string(), "--json"});
    REQUIRE(again.code == 0);
    CHECK(json::parse(again.out)["outputs"]["value"] ==
          json::parse(first.out)["outputs"]["repetitions"][0]["value"]);
    std::filesystem::remove(path);
  }
}

TEST_CASE("config precedence: flags over file over defaults") {
  const auto path = temp("config.json");
  write_json_file(path, json{{"N", 5}, {"d", 3}, {"optimizer", {{"restarts", 3}, {"seed", 9}}}});
  const Run r = invoke({"bounds", "--config", path.string(), "--d", "2", "--json"});
  REQUIRE(r.code == 0);
  const json config = json::parse(r.out)["config"];
  CHECK(config["N"] == 5);
  CHECK(config["d"] == 2);
  CHECK(config["optimizer"]["restarts"] == 3);
  CHECK(config["optimizer"]["seed"] == 9);
  CHECK(config["optimizer"]["max_iterations"] == OptimizerConfig{}.max_iterations);
  std::filesystem::remove(path);
}

TEST_CASE("replay reproduces reports and detects tampering") {
  const auto report = temp("report.json");
  REQUIRE(invoke({"simulate", "--repetitions", "3", "--report", report.string()}).code == 0);
  const Run ok = invoke({"replay", report.string()});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("REPLAY OK") != std::string::npos);

  json tampered = read_json_file(report);
  tampered["outputs"]["mean"] = tampered["outputs"]["mean"].get<double>() + 1e-12;
  write_json_file(report, tampered);
  CHECK(invoke({"replay", report.string()}).code == kCheckFailed);
  std::filesystem::remove(report);
}

TEST_CASE("csv output") {
  const Run r = invoke({"oracle", "--N", "5", "--d", "3", "--csv"});
  CHECK(r.out == "N,d,value\n5,3,10\n");
}

TEST_CASE("bounds --sweep writes a loadable table stamped with the config hash") {
  const auto path = temp("sweep.json");
  const Run r = invoke({"bounds", "--sweep", "4:5", "--restarts", "3", "--table-out", path.string()});
  REQUIRE(r.code == 0);
  const json doc = read_json_file(path);
  OptimizerConfig c;
  c.restarts = 3;
  CHECK(doc["config_hash"] == config_hash(c));
  const BoundTable t = bound_table_from_json(doc);
  CHECK(t.entries().size() == 4);
  CHECK(t.stale_entries(config_hash(c)).empty());
  CHECK(invoke({"bounds", "--sweep", "5:4"}).code == kDomainError);
  std::filesystem::remove(path);
}
