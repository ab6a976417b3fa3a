#include "commands.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "dimwit/classical_oracle.hpp"
#include "dimwit/experiment_sim.hpp"
#include "dimwit/optimizer.hpp"
#include "dimwit/reference_data.hpp"
#include "dimwit/rng.hpp"
#include "dimwit/scalability.hpp"

namespace dimwit::cli {

namespace {

// Raised for a missing or stale bound table.
class StaleTableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::ostream& log_of(const RunOptions& o) { return o.log ? *o.log : std::cerr; }

std::string fmt(double v, int digits = 6) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

// Shortest decimal form that reads back to the same double.
std::string exact(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::filesystem::path bundled_table_path() { return data_dir() / "quantum_bounds.json"; }

json strategy_json(const DeterministicStrategy& s) {
  json response = json::array();
  for (int y = 1; y <= s.n - 1; ++y) {
    json row = json::array();
    for (int m = 1; m <= s.d; ++m) row.push_back(s.respond(y, m));
    response.push_back(std::move(row));
  }
  return {{"emission", s.emission}, {"response", std::move(response)}};
}

json oracle_json(int n, int d, bool symmetry, const RunOptions& options) {
  OracleOptions oo;
  oo.symmetry_reduction = symmetry;
  oo.workers = options.workers == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                    : options.workers;
  const ClassicalMaximum best = exact_classical_max(n, d, oo);
  json out = {{"N", n},
              {"d", d},
              {"value", best.value},
              {"evaluated_value", evaluate(make_witness(n), strategy_correlators(best.strategy))},
              {"emissions_scanned", best.emissions_scanned},
              {"symmetry_reduction", symmetry},
              {"strategy", strategy_json(best.strategy)}};
  if (d <= n - 1) {
    out["classical_bound"] = classical_bound(n, d);
    out["matches_formula"] = best.value == classical_bound(n, d);
  }
  return out;
}

json estimate_json(const BoundEstimate& est) {
  json j = to_json(est);
  j["recomputed_value"] = evaluate(make_witness(est.n), correlators(est.best_ensemble));
  return j;
}

std::pair<int, int> parse_range(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw std::domain_error("range must look like LO:HI, got " + s);
  const int lo = std::stoi(s.substr(0, colon));
  const int hi = std::stoi(s.substr(colon + 1));
  if (lo < 3 || hi < lo) throw std::domain_error("invalid N range " + s);
  return {lo, hi};
}

json bound_table_document(const BoundTable& table, const OptimizerConfig& config) {
  json doc = {{"description",
               "Best |I_N| found by multistart conjugate-gradient ascent over real ensembles "
               "(model: quantum). Values are empirical maxima, not certified bounds."},
              {"format_version", 1},
              {"config", to_json(config)},
              {"config_hash", config_hash(config)}};
  doc["entries"] = to_json(table).at("entries");
  return doc;
}

CommandResult run_bounds(const json& c, const RunOptions& options) {
  const OptimizerConfig oc = optimizer_config_from_json(c.at("optimizer"));
  const unsigned workers = options.workers;
  CommandResult r;
  std::ostringstream text;

  if (!c.at("sweep").is_null()) {
    const auto [lo, hi] = parse_range(c.at("sweep").get<std::string>());
    BoundTable table;
    json estimates = json::array();
    const std::string hash = config_hash(oc);
    for (int n = lo; n <= hi; ++n) {
      for (int d : {n - 2, n - 1}) {
        if (d < 2) continue;
        log_of(options) << "sweep: N=" << n << " d=" << d << " ..." << std::flush;
        const BoundEstimate est = maximize(make_witness(n), Model::quantum, d, oc, workers);
        log_of(options) << " " << fmt(est.best_value) << "\n";
        table.set(n, d, est.best_value, hash);
        estimates.push_back({{"N", n},
                             {"d", d},
                             {"value", est.best_value},
                             {"converged_fraction", est.converged_fraction},
                             {"best_restart", est.best_restart},
                             {"top_bin_count", est.restart_histogram.rbegin()->second}});
        text << "N=" << n << " d=" << d << "  " << fmt(est.best_value) << "\n";
      }
    }
    const json doc = bound_table_document(table, oc);
    if (!c.at("table_out").is_null() && !c.value("replaying", false)) {
      write_json_file(c.at("table_out").get<std::string>(), doc);
    }
    r.outputs = {{"table", doc}, {"estimates", std::move(estimates)}};
    std::ostringstream csv;
    csv << "N,d,value\n";
    for (const auto& e : r.outputs["estimates"]) {
      csv << e["N"].get<int>() << ',' << e["d"].get<int>() << ','
          << exact(e["value"].get<double>()) << '\n';
    }
    r.text = text.str();
    r.csv = csv.str();
    return r;
  }

  const int n = c.at("N").get<int>();
  const int d = c.at("d").get<int>();
  const std::string model = c.at("model").get<std::string>();
  if (model != "quantum" && model != "classical-diagonal" && model != "classical-exact" &&
      model != "all") {
    throw std::domain_error("unknown model '" + model +
                            "' (quantum, classical-diagonal, classical-exact, all)");
  }
  const WitnessSpec spec = make_witness(n);
  r.outputs = json::object();
  std::ostringstream csv;
  csv << "model,bin_lower,count\n";
  std::optional<AngleEnsemble> best_ensemble;

  for (const auto& [name, m] : {std::pair{"quantum", Model::quantum},
                                std::pair{"classical-diagonal", Model::classical_diagonal}}) {
    if (model != name && model != "all") continue;
    const BoundEstimate est = maximize(spec, m, d, oc, workers);
    if (!best_ensemble) best_ensemble = est.best_ensemble;
    r.outputs[name] = estimate_json(est);
    text << name << ": I_" << n << " max over d=" << d << " is " << fmt(est.best_value)
         << " (restart " << est.best_restart << ", converged " << fmt(est.converged_fraction, 3)
         << ")\n";
    for (const auto& [bin, count] : est.restart_histogram) {
      csv << name << ',' << fmt(bin * kHistogramBinWidth, 2) << ',' << count << '\n';
    }
  }
  if (model == "classical-exact" || model == "all") {
    try {
      r.outputs["classical-exact"] = oracle_json(n, d, c.value("symmetry_reduction", false), options);
      text << "classical-exact: " << fmt(r.outputs["classical-exact"]["value"].get<double>(), 0)
           << "\n";
    } catch (const ResourceError& e) {
      if (model != "all") throw;
      r.outputs["classical-exact"] = {{"skipped", e.what()}};
    }
  }
  if (d >= 1 && d <= n - 1) {
    r.outputs["classical_bound"] = classical_bound(n, d);
    text << "classical bound L_" << d << " = " << fmt(classical_bound(n, d), 0) << "\n";
  }
  if (!c.at("ensemble_out").is_null() && best_ensemble && !c.value("replaying", false)) {
    write_json_file(c.at("ensemble_out").get<std::string>(), to_json(*best_ensemble));
  }
  r.text = text.str();
  r.csv = csv.str();
  return r;
}

CommandResult run_oracle(const json& c, const RunOptions& options) {
  CommandResult r;
  const int n = c.at("N").get<int>();
  const int d = c.at("d").get<int>();
  r.outputs = oracle_json(n, d, c.value("symmetry_reduction", false), options);
  std::ostringstream text;
  text << "exact classical max of I_" << n << " for d=" << d << ": "
       << fmt(r.outputs["value"].get<double>(), 0) << "\n";
  if (r.outputs.contains("classical_bound")) {
    text << "closed form L_d: " << fmt(r.outputs["classical_bound"].get<double>(), 0)
         << (r.outputs["matches_formula"].get<bool>() ? " (match)" : " (MISMATCH)") << "\n";
  }
  text << "emission:";
  for (int m : r.outputs["strategy"]["emission"]) text << ' ' << m;
  text << "\n";
  r.text = text.str();
  r.csv = "N,d,value\n" + std::to_string(n) + "," + std::to_string(d) + "," +
          fmt(r.outputs["value"].get<double>(), 0) + "\n";
  return r;
}

// Largest singular value of the Hessian, by power iteration on central
// differences of the analytic gradient.
double hessian_norm(const WitnessSpec& spec, const std::vector<double>& x, int d) {
  const double h = 1e-6;
  std::vector<double> v(x.size(), 1.0 / std::sqrt(static_cast<double>(x.size())));
  double norm = 0.0;
  for (int it = 0; it < 200; ++it) {
    std::vector<double> xp = x, xm = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
      xp[i] += h * v[i];
      xm[i] -= h * v[i];
    }
    const auto gp = gradient(spec, xp, Model::quantum, d);
    const auto gm = gradient(spec, xm, Model::quantum, d);
    std::vector<double> hv(x.size());
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      hv[i] = (gp[i] - gm[i]) / (2 * h);
      s += hv[i] * hv[i];
    }
    norm = std::sqrt(s);
    if (norm == 0.0) break;
    for (std::size_t i = 0; i < x.size(); ++i) v[i] = hv[i] / norm;
  }
  return norm;
}

CommandResult run_verify_tables(const json& c, const RunOptions&) {
  const double expected = c.at("expected").get<double>();
  const double tolerance = c.at("tolerance").get<double>();
  const double stationarity = c.at("stationarity_tolerance").get<double>();
  const AngleEnsemble e = load_i7_reference_ensemble();
  const WitnessSpec spec = make_witness(e.n);
  const CorrelatorTable table = quantum_correlators(e);
  const double value = evaluate(spec, table);

  const std::vector<double> x = e.flatten();
  const auto g = gradient(spec, x, Model::quantum, e.d);
  const double grad_norm = std::sqrt(std::inner_product(g.begin(), g.end(), g.begin(), 0.0));

  // Printed angles carry up to 5e-5 rounding each; the gradient that
  // rounding alone can produce is bounded by |H| * |rounding|.
  const double rounding = 5e-5 * std::sqrt(static_cast<double>(x.size()));
  const double h_norm = hessian_norm(spec, x, e.d);
  const double rounding_budget = h_norm * rounding;

  // Nearest stationary point, by ascent from the printed angles.
  WitnessObjective f(spec, Model::quantum, e.d);
  OptimizerConfig oc;
  const AscentResult polished = conjugate_gradient_ascent(f, x, oc);
  double max_shift = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    max_shift = std::max(max_shift, std::abs(polished.params[i] - x[i]));
  }

  const bool value_ok = std::abs(value - expected) <= tolerance;
  const bool stationary = polished.gradient_norm < stationarity &&
                          std::abs(std::abs(polished.signed_value) - value) <= tolerance &&
                          grad_norm <= rounding_budget;
  CommandResult r;
  r.outputs = {{"value", value},
               {"signed_value", signed_value(spec, table)},
               {"expected", expected},
               {"tolerance", tolerance},
               {"deviation", value - expected},
               {"gradient_norm", grad_norm},
               {"hessian_norm", h_norm},
               {"rounding_gradient_budget", rounding_budget},
               {"polished_value", std::abs(polished.signed_value)},
               {"polished_gradient_norm", polished.gradient_norm},
               {"polished_max_angle_shift", max_shift},
               {"value_ok", value_ok},
               {"stationary", stationary},
               {"pass", value_ok && stationary}};
  r.exit_code = (value_ok && stationary) ? kOk : kCheckFailed;
  std::ostringstream text;
  text << (value_ok && stationary ? "PASS" : "FAIL") << ": I_7 from bundled angles = "
       << fmt(value) << " (expected " << fmt(expected, 4) << " +- " << tolerance << ")\n"
       << "gradient norm at printed angles " << std::scientific << std::setprecision(3)
       << grad_norm << " (rounding budget " << rounding_budget << ")\n"
       << "nearest stationary point: value " << std::fixed << std::setprecision(6)
       << std::abs(polished.signed_value) << ", gradient norm " << std::scientific
       << polished.gradient_norm << ", max angle shift " << max_shift << "\n";
  r.text = text.str();
  r.csv = "value,expected,gradient_norm,polished_gradient_norm,pass\n" + fmt(value, 10) + "," +
          fmt(expected, 4) + "," + std::to_string(grad_norm) + "," +
          std::to_string(polished.gradient_norm) + "," + (value_ok && stationary ? "1" : "0") +
          "\n";
  return r;
}

AngleEnsemble load_ensemble(const std::string& which) {
  if (which == "tables") return load_i7_reference_ensemble();
  if (which == "classical-best") {
    const auto path = data_dir() / "i7_d6_classical_diagonal.json";
    if (!std::filesystem::exists(path)) throw DataError("missing data file " + path.string());
    return ensemble_from_json(read_json_file(path));
  }
  try {
    return ensemble_from_json(read_json_file(which));
  } catch (const json::exception& e) {
    throw std::domain_error("malformed ensemble file " + which + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw std::domain_error(e.what());
  }
}

CountRecord load_counts(const std::string& path, const NoiseModel& noise) {
  std::ifstream in(path);
  if (!in) throw std::domain_error("cannot open count file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") {
    return count_record_from_csv(buf.str(), noise);
  }
  try {
    return count_record_from_json(json::parse(buf.str()));
  } catch (const json::exception& e) {
    throw std::domain_error("malformed count file " + path + ": " + e.what());
  }
}

CommandResult run_simulate(const json& c, const RunOptions&) {
  const NoiseModel noise = noise_from_json(c.at("noise"));
  const std::uint64_t seed = c.at("seed").get<std::uint64_t>();
  const int repetitions = c.at("repetitions").get<int>();
  const bool dark_correction = c.at("dark_correction").get<bool>();
  if (repetitions < 1) throw std::domain_error("repetitions must be >= 1");

  CommandResult r;
  std::ostringstream text, csv;
  csv << "repetition,value,sigma\n";

  std::optional<std::vector<std::pair<int, double>>> limits;
  auto verdict_for = [&](int n, double value) -> json {
    if (n != 7) return nullptr;
    if (!limits) limits = quantum_column(load_i7_limits());
    return to_json(certify(value, n, *limits));
  };

  if (!c.at("counts_in").is_null()) {
    const CountRecord rec = load_counts(c.at("counts_in").get<std::string>(), noise);
    const WitnessEstimate est = estimate_witness(rec, make_witness(rec.n), dark_correction);
    r.outputs = {{"source", c.at("counts_in")},
                 {"N", rec.n},
                 {"d", rec.d},
                 {"value", est.value},
                 {"sigma", est.sigma},
                 {"verdict", verdict_for(rec.n, est.value)}};
    text << "I_" << rec.n << " = " << fmt(est.value) << " +- " << fmt(est.sigma) << "\n";
    csv << "0," << exact(est.value) << ',' << exact(est.sigma) << '\n';
    r.text = text.str();
    r.csv = csv.str();
    return r;
  }

  const AngleEnsemble e = load_ensemble(c.at("ensemble").get<std::string>());
  const WitnessSpec spec = make_witness(e.n);
  const double classical_limit = classical_bound(e.n, std::min(e.d, e.n - 1));

  json reps = json::array();
  std::vector<double> values;
  double sigma_sum = 0.0;
  int above_classical = 0, certified = 0;
  for (int k = 0; k < repetitions; ++k) {
    const std::uint64_t rep_seed = derive_seed(seed, static_cast<std::uint64_t>(k));
    const CountRecord rec = simulate_counts(e, noise, rep_seed);
    if (k == 0 && !c.at("counts_out").is_null() && !c.value("replaying", false)) {
      const std::string out = c.at("counts_out").get<std::string>();
      std::ofstream f(out);
      if (out.size() >= 4 && out.substr(out.size() - 4) == ".csv") f << to_csv(rec);
      else f << to_json(rec).dump(2) << '\n';
    }
    const WitnessEstimate est = estimate_witness(rec, spec, dark_correction);
    json verdict = verdict_for(e.n, est.value);
    const bool beats_classical = est.value > classical_limit;
    bool quantum_certified = false;
    if (!verdict.is_null()) {
      quantum_certified = verdict["min_quantum_dimension"].get<int>() == e.n - 1 &&
                          verdict["exceeds_classical_at"] == json(e.n - 1);
    }
    above_classical += beats_classical;
    certified += quantum_certified;
    values.push_back(est.value);
    sigma_sum += est.sigma;
    reps.push_back({{"seed", rep_seed},
                    {"value", est.value},
                    {"sigma", est.sigma},
                    {"exceeds_classical_bound", beats_classical},
                    {"quantum_dimension_certified", quantum_certified},
                    {"verdict", std::move(verdict)}});
    csv << k << ',' << exact(est.value) << ',' << exact(est.sigma) << '\n';
  }
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / repetitions;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  const double sd = repetitions > 1 ? std::sqrt(var / (repetitions - 1)) : 0.0;
  const FidelityEstimate fid =
      measure_fidelity(e, noise, derive_seed(seed, 0xF1DE11717ULL));

  r.outputs = {{"ensemble", c.at("ensemble")},
               {"model", std::string(to_string(e.model))},
               {"N", e.n},
               {"d", e.d},
               {"expected_value", expected_witness(e, noise)},
               {"classical_bound", classical_limit},
               {"mean", mean},
               {"std", sd},
               {"mean_sigma", sigma_sum / repetitions},
               {"fraction_above_classical", static_cast<double>(above_classical) / repetitions},
               {"fraction_quantum_certified", static_cast<double>(certified) / repetitions},
               {"measured_fidelity",
                {{"mean", fid.mean}, {"sigma", fid.sigma}, {"per_projector", fid.per_projector}}},
               {"repetitions", std::move(reps)}};
  text << "I_" << e.n << " over " << repetitions << " repetitions: mean " << fmt(mean) << ", sd "
       << fmt(sd) << ", mean reported sigma " << fmt(sigma_sum / repetitions) << "\n"
       << "model expectation " << fmt(expected_witness(e, noise)) << "\n"
       << "above classical bound " << fmt(classical_limit, 0) << ": " << above_classical << "/"
       << repetitions << "\n"
       << "measured fidelity " << fmt(fid.mean) << " +- " << fmt(fid.sigma) << "\n";
  r.text = text.str();
  r.csv = csv.str();
  return r;
}

CommandResult run_scalability(const json& c, const RunOptions&) {
  const auto path = c.at("table").is_null() ? bundled_table_path()
                                            : std::filesystem::path(c.at("table").get<std::string>());
  if (!std::filesystem::exists(path)) {
    throw StaleTableError("bound table " + path.string() +
                          " not found; regenerate with: dimwit bounds --sweep 4:20 --table-out " +
                          path.string());
  }
  BoundTable table;
  try {
    table = bound_table_from_json(read_json_file(path));
  } catch (const json::exception& e) {
    throw StaleTableError("unreadable bound table " + path.string() + ": " + e.what());
  }
  const std::string current = config_hash(OptimizerConfig{});
  const auto stale = table.stale_entries(current);
  if (!stale.empty() && !c.at("allow_stale").get<bool>()) {
    throw StaleTableError("bound table " + path.string() + " has " + std::to_string(stale.size()) +
                          " entries from a different optimizer config (expected hash " + current +
                          "); regenerate with: dimwit bounds --sweep 4:20 --table-out " +
                          path.string() + ", or pass --allow-stale");
  }
  const int d_lo = c.at("d_min").get<int>();
  const int d_hi = c.at("d_max").get<int>();

  CommandResult r;
  std::ostringstream text, csv;
  csv << "fidelity,d,N,i_min_d,i_max_d_minus_1,margin,separable\n";
  json per_f = json::array();
  for (double f : c.at("fidelities").get<std::vector<double>>()) {
    const CertifiableDimension cd = max_certifiable_dimension(f, table, d_lo, d_hi);
    json rows = json::array();
    for (const auto& row : cd.rows) {
      rows.push_back({{"d", row.d},
                      {"N", row.n},
                      {"i_min_d", row.upper.i_min},
                      {"i_max_d_minus_1", row.lower.i_max},
                      {"margin", row.margin},
                      {"separable", row.separable}});
      csv << exact(f) << ',' << row.d << ',' << row.n << ',' << exact(row.upper.i_min) << ','
          << exact(row.lower.i_max) << ',' << exact(row.margin) << ',' << (row.separable ? 1 : 0)
          << '\n';
    }
    per_f.push_back({{"fidelity", f},
                     {"max_dimension", cd.max_dimension ? json(*cd.max_dimension) : json(nullptr)},
                     {"contiguous", cd.contiguous},
                     {"rows", std::move(rows)}});
    text << "F = " << fmt(f, 4) << ": max certifiable dimension "
         << (cd.max_dimension ? std::to_string(*cd.max_dimension) : std::string("none"))
         << (cd.contiguous ? "" : " (pass set not contiguous)") << "\n";
  }

  // Separability must only improve as F grows.
  bool monotone = true;
  for (int d = d_lo; d <= d_hi; ++d) {
    bool seen = false;
    for (int step = 90; step <= 100; ++step) {
      const bool s = separable(d, step / 100.0, table);
      if (seen && !s) monotone = false;
      seen = seen || s;
    }
  }
  r.outputs = {{"table", path.string()},
               {"table_config_hash", stale.empty() ? current : std::string("stale")},
               {"d_range", {d_lo, d_hi}},
               {"fidelities", std::move(per_f)},
               {"monotone_in_fidelity", monotone}};
  text << "separability monotone in F over 0.90..1.00: " << (monotone ? "yes" : "NO") << "\n";
  r.text = text.str();
  r.csv = csv.str();
  return r;
}

void merge(json& base, const json& overlay) {
  for (auto it = overlay.begin(); it != overlay.end(); ++it) {
    if (it.value().is_object() && base.contains(it.key()) && base[it.key()].is_object()) {
      merge(base[it.key()], it.value());
    } else {
      base[it.key()] = it.value();
    }
  }
}

}  // namespace

json default_config(std::string_view command) {
  if (command == "bounds") {
    return {{"N", 7},
            {"d", 6},
            {"model", "quantum"},
            {"optimizer", to_json(OptimizerConfig{})},
            {"symmetry_reduction", false},
            {"sweep", nullptr},
            {"table_out", nullptr},
            {"ensemble_out", nullptr}};
  }
  if (command == "oracle") return {{"N", 7}, {"d", 6}, {"symmetry_reduction", false}};
  if (command == "verify-tables") {
    return {{"expected", 26.1017}, {"tolerance", 5e-4}, {"stationarity_tolerance", 1e-4}};
  }
  if (command == "simulate") {
    NoiseModel noise;
    noise.fidelity = 0.991;
    return {{"ensemble", "tables"},
            {"noise", to_json(noise)},
            {"seed", 1},
            {"repetitions", 100},
            {"dark_correction", true},
            {"counts_in", nullptr},
            {"counts_out", nullptr}};
  }
  if (command == "scalability") {
    return {{"fidelities", {0.991, 0.98, 1.0}},
            {"table", nullptr},
            {"d_min", 3},
            {"d_max", 19},
            {"allow_stale", false}};
  }
  throw std::domain_error("unknown command '" + std::string(command) + "'");
}

CommandResult run_command(std::string_view command, const json& config, const RunOptions& options) {
  if (command == "bounds") return run_bounds(config, options);
  if (command == "oracle") return run_oracle(config, options);
  if (command == "verify-tables") return run_verify_tables(config, options);
  if (command == "simulate") return run_simulate(config, options);
  if (command == "scalability") return run_scalability(config, options);
  throw std::domain_error("unknown command '" + std::string(command) + "'");
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ResourceError*>(&e)) return kResourceGuard;
  if (dynamic_cast<const DataError*>(&e)) return kMissingData;
  if (dynamic_cast<const StaleTableError*>(&e)) return kStaleBoundTable;
  return kDomainError;
}

json make_report(std::string_view command, const std::vector<std::string>& argv, const json& config,
                 const CommandResult& result, double wall_seconds) {
  json seed = nullptr;
  if (config.contains("seed")) seed = config["seed"];
  else if (config.contains("optimizer")) seed = config["optimizer"]["seed"];
  return {{"tool", "dimwit"},
          {"version", kVersion},
          {"command", std::string(command)},
          {"argv", argv},
          {"config", config},
          {"seed", seed},
          {"outputs", result.outputs},
          {"exit_code", result.exit_code},
          {"timing", {{"wall_seconds", wall_seconds}}}};
}

CommandResult replay(const json& report, const RunOptions& options) {
  const std::string command = report.at("command").get<std::string>();
  if (command == "replay") throw std::domain_error("cannot replay a replay report");
  json config = report.at("config");
  config["replaying"] = true;
  const CommandResult again = run_command(command, config, options);
  // Compare through a serialization round trip so both sides carry the
  // same JSON number types.
  const json before = json::parse(report.at("outputs").dump());
  const json after = json::parse(again.outputs.dump());
  const bool same = before == after && report.value("exit_code", 0) == again.exit_code;

  CommandResult r;
  r.outputs = {{"replayed_command", command},
               {"matches", same},
               {"original_exit_code", report.value("exit_code", 0)},
               {"replayed_exit_code", again.exit_code}};
  if (!same) {
    json diffs = json::array();
    for (const auto& op : json::diff(before, after)) {
      diffs.push_back(op);
      if (diffs.size() >= 20) break;
    }
    r.outputs["differences"] = std::move(diffs);
  }
  r.exit_code = same ? kOk : kCheckFailed;
  r.text = std::string(same ? "REPLAY OK" : "REPLAY MISMATCH") + ": " + command + "\n";
  r.csv = std::string("command,matches\n") + command + "," + (same ? "1" : "0") + "\n";
  return r;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dimension witness toolkit: I_N bounds, oracle, simulation, scalability"};
  app.require_subcommand(1);
  bool as_json = false, as_csv = false;
  std::string report_path, config_path;
  unsigned workers = 0;
  app.add_flag("--json", as_json, "Print the run report as JSON");
  app.add_flag("--csv", as_csv, "Print plot-ready CSV");
  app.add_option("--report", report_path, "Also write the run report to this file");
  app.add_option("--config", config_path, "Config JSON (a config echo or a whole run report)");
  app.add_option("--workers", workers, "Worker threads (default: available parallelism)");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Quantum / classical maxima of I_N");
  int b_n = 7, b_d = 6, restarts = 0, max_iter = 0;
  std::string model, sweep, table_out, ensemble_out, beta;
  double tol = 0, init_step = 0, shrink = 0, suff = 0;
  std::uint64_t b_seed = 0;
  bool b_sym = false;
  auto* o_bn = bounds->add_option("--N", b_n, "Witness size N");
  auto* o_bd = bounds->add_option("--d", b_d, "Dimension d");
  auto* o_model = bounds->add_option("--model", model,
                                     "quantum | classical-diagonal | classical-exact | all");
  auto* o_restarts = bounds->add_option("--restarts", restarts, "Uniform random restarts");
  auto* o_maxit = bounds->add_option("--max-iterations", max_iter, "Iterations per restart");
  auto* o_tol = bounds->add_option("--gradient-tolerance", tol, "Stop below this gradient norm");
  auto* o_bseed = bounds->add_option("--seed", b_seed, "Optimizer seed");
  auto* o_beta = bounds->add_option("--beta-rule", beta,
                                    "polak_ribiere_plus | fletcher_reeves | steepest_ascent");
  auto* o_init = bounds->add_option("--initial-step", init_step, "Line search initial step");
  auto* o_shrink = bounds->add_option("--shrink", shrink, "Line search shrink factor");
  auto* o_suff = bounds->add_option("--sufficient-increase", suff, "Armijo constant");
  auto* o_bsym = bounds->add_flag("--symmetry-reduction", b_sym, "Oracle: canonical emissions only");
  auto* o_sweep = bounds->add_option("--sweep", sweep, "N range LO:HI; tabulates d = N-2, N-1");
  auto* o_tout = bounds->add_option("--table-out", table_out, "Write the swept bound table here");
  auto* o_eout = bounds->add_option("--ensemble-out", ensemble_out, "Write the best ensemble here");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Exact classical maximum by enumeration");
  int o_n = 7, o_d = 6;
  bool o_sym = false;
  auto* o_on = oracle->add_option("--N", o_n, "Witness size N");
  auto* o_od = oracle->add_option("--d", o_d, "Number of classical symbols d");
  auto* o_osym = oracle->add_flag("--symmetry-reduction", o_sym, "Canonical emissions only");

  // verify-tables
  auto* verify = app.add_subcommand("verify-tables", "Check the bundled optimal I_7 angles");
  double v_tol = 0;
  auto* o_vtol = verify->add_option("--tolerance", v_tol, "Allowed deviation from 26.1017");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Photon-counting simulation and estimation");
  std::string ensemble, counts_in, counts_out;
  double fidelity = 0, dark = 0, signal = 0;
  std::uint64_t s_seed = 0;
  int reps = 0;
  bool no_dark_correction = false;
  auto* o_ens = simulate->add_option("--ensemble", ensemble,
                                     "tables | classical-best | path to ensemble JSON");
  auto* o_fid = simulate->add_option("--fidelity", fidelity, "Measurement fidelity in (0, 1]");
  auto* o_dark = simulate->add_option("--dark-rate", dark, "Expected dark counts per projector");
  auto* o_sig = simulate->add_option("--signal-rate", signal, "Expected signal counts per basis");
  auto* o_sseed = simulate->add_option("--seed", s_seed, "Simulation seed");
  auto* o_reps = simulate->add_option("--repetitions", reps, "Independent repetitions");
  auto* o_ndc = simulate->add_flag("--no-dark-correction", no_dark_correction,
                                   "Keep dark counts in the estimate");
  auto* o_cin = simulate->add_option("--counts-in", counts_in, "Estimate from a count file");
  auto* o_cout = simulate->add_option("--counts-out", counts_out,
                                      "Write the first repetition's counts (.json or .csv)");

  // scalability
  auto* scal = app.add_subcommand("scalability", "Certifiable dimension versus fidelity");
  std::vector<double> fids;
  std::string table_path;
  int d_min = 0, d_max = 0;
  bool allow_stale = false;
  auto* o_fids = scal->add_option("--F", fids, "Fidelities to analyse");
  auto* o_table = scal->add_option("--table", table_path, "Bound table JSON");
  auto* o_dmin = scal->add_option("--d-min", d_min, "Smallest dimension");
  auto* o_dmax = scal->add_option("--d-max", d_max, "Largest dimension");
  auto* o_stale = scal->add_flag("--allow-stale", allow_stale, "Accept tables from other configs");

  // replay
  auto* rep = app.add_subcommand("replay", "Re-execute a run report and compare outputs");
  std::string replay_path;
  rep->add_option("report", replay_path, "Run report JSON")->required();

  for (auto* sub : {bounds, oracle, verify, simulate, scal, rep}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kDomainError;
  }

  std::vector<std::string> args(argv, argv + argc);
  CLI::App* chosen = app.get_subcommands().front();
  const std::string command = chosen->get_name();
  RunOptions options;
  options.workers = workers;
  options.log = &err;

  const auto start = std::chrono::steady_clock::now();
  json config;
  CommandResult result;
  try {
    if (command == "replay") {
      const json report = read_json_file(replay_path);
      config = {{"report", replay_path}};
      result = replay(report, options);
    } else {
      config = default_config(command);
      if (!config_path.empty()) {
        json file = read_json_file(config_path);
        if (file.contains("config") && file.contains("command")) file = file["config"];
        merge(config, file);
      }
      auto set = [&](CLI::Option* opt, const char* key, const json& v) {
        if (opt->count() > 0) config[key] = v;
      };
      auto set_opt = [&](CLI::Option* opt, const char* key, const json& v) {
        if (opt->count() > 0) config["optimizer"][key] = v;
      };
      auto set_ls = [&](CLI::Option* opt, const char* key, const json& v) {
        if (opt->count() > 0) config["optimizer"]["line_search"][key] = v;
      };
      auto set_noise = [&](CLI::Option* opt, const char* key, const json& v) {
        if (opt->count() > 0) config["noise"][key] = v;
      };
      if (command == "bounds") {
        set(o_bn, "N", b_n);
        set(o_bd, "d", b_d);
        set(o_model, "model", model);
        set(o_bsym, "symmetry_reduction", b_sym);
        set(o_sweep, "sweep", sweep);
        set(o_tout, "table_out", table_out);
        set(o_eout, "ensemble_out", ensemble_out);
        set_opt(o_restarts, "restarts", restarts);
        set_opt(o_maxit, "max_iterations", max_iter);
        set_opt(o_tol, "gradient_tolerance", tol);
        set_opt(o_bseed, "seed", b_seed);
        set_opt(o_beta, "beta_rule", beta);
        set_ls(o_init, "initial_step", init_step);
        set_ls(o_shrink, "shrink", shrink);
        set_ls(o_suff, "sufficient_increase", suff);
      } else if (command == "oracle") {
        set(o_on, "N", o_n);
        set(o_od, "d", o_d);
        set(o_osym, "symmetry_reduction", o_sym);
      } else if (command == "verify-tables") {
        set(o_vtol, "tolerance", v_tol);
      } else if (command == "simulate") {
        set(o_ens, "ensemble", ensemble);
        set(o_sseed, "seed", s_seed);
        set(o_reps, "repetitions", reps);
        if (o_ndc->count() > 0) config["dark_correction"] = !no_dark_correction;
        set(o_cin, "counts_in", counts_in);
        set(o_cout, "counts_out", counts_out);
        set_noise(o_fid, "fidelity", fidelity);
        set_noise(o_dark, "dark_rate", dark);
        set_noise(o_sig, "signal_rate", signal);
      } else if (command == "scalability") {
        set(o_fids, "fidelities", fids);
        set(o_table, "table", table_path);
        set(o_dmin, "d_min", d_min);
        set(o_dmax, "d_max", d_max);
        set(o_stale, "allow_stale", allow_stale);
      }
      result = run_command(command, config, options);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const json report = make_report(command, args, config, result, seconds);
  if (!report_path.empty()) write_json_file(report_path, report);
  if (as_json) out << report.dump(2) << "\n";
  else if (as_csv) out << result.csv;
  else out << result.text;
  return result.exit_code;
}

}  // namespace dimwit::cli
