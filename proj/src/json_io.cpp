#include "dimwit/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dimwit {

namespace {

// Bumped whenever the ascent changes in a way that can move results.
constexpr const char* kAscentRevision = "cg-ascent/2";

json matrix(int rows, int cols, std::span<const double> v) {
  json out = json::array();
  for (int r = 0; r < rows; ++r) {
    json row = json::array();
    for (int c = 0; c < cols; ++c) row.push_back(v[static_cast<std::size_t>(r) * cols + c]);
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<double> flatten_matrix(const json& m, int rows, int cols, const char* what) {
  if (!m.is_array() || static_cast<int>(m.size()) != rows) {
    throw std::domain_error(std::string(what) + " must have " + std::to_string(rows) + " rows");
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(rows) * cols);
  for (const auto& row : m) {
    if (!row.is_array() || static_cast<int>(row.size()) != cols) {
      throw std::domain_error(std::string(what) + " rows must have " + std::to_string(cols) +
                              " entries");
    }
    for (const auto& v : row) out.push_back(v.get<double>());
  }
  return out;
}

json angle_rows(const std::vector<AngleVector>& v) {
  json out = json::array();
  for (const auto& a : v) out.push_back(a.phi);
  return out;
}

std::vector<AngleVector> angle_rows_from(const json& j) {
  std::vector<AngleVector> out;
  for (const auto& row : j) out.push_back(AngleVector{row.get<std::vector<double>>()});
  return out;
}

template <class T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

json to_json(const WitnessSpec& spec) {
  json terms = json::array();
  for (const Term& t : spec.terms()) terms.push_back({{"i", t.i}, {"j", t.j}, {"sign", t.sign}});
  return {{"N", spec.n()}, {"terms", std::move(terms)}};
}

WitnessSpec witness_from_json(const json& j) {
  WitnessSpec spec(j.at("N").get<int>());
  // The sign pattern is fixed by N; a file that disagrees is rejected.
  if (j.contains("terms")) {
    const auto& terms = j.at("terms");
    if (terms.size() != spec.terms().size()) {
      throw std::domain_error("witness file has " + std::to_string(terms.size()) +
                              " terms, expected " + std::to_string(spec.terms().size()));
    }
    for (const auto& t : terms) {
      const int i = t.at("i").get<int>(), jj = t.at("j").get<int>();
      if (spec.sign(i, jj) != t.at("sign").get<int>()) {
        throw std::domain_error("witness file has the wrong sign for (" + std::to_string(i) +
                                ", " + std::to_string(jj) + ")");
      }
    }
  }
  return spec;
}

json to_json(const CorrelatorTable& table) {
  const int n = table.n();
  json out = {{"N", n}, {"E", matrix(n, n - 1, table.values())}};
  if (table.probabilities()) out["P"] = matrix(n, n - 1, *table.probabilities());
  return out;
}

CorrelatorTable correlators_from_json(const json& j) {
  const int n = j.at("N").get<int>();
  if (n < 3) throw std::domain_error("correlator table needs N >= 3");
  auto e = flatten_matrix(j.at("E"), n, n - 1, "E");
  if (j.contains("P") && !j.at("P").is_null()) {
    return CorrelatorTable(n, std::move(e), flatten_matrix(j.at("P"), n, n - 1, "P"));
  }
  return CorrelatorTable(n, std::move(e));
}

json to_json(const AngleEnsemble& e) {
  return {{"N", e.n},
          {"d", e.d},
          {"model", std::string(to_string(e.model))},
          {"preparations", angle_rows(e.preparations)},
          {"measurements", angle_rows(e.measurements)}};
}

AngleEnsemble ensemble_from_json(const json& j) {
  AngleEnsemble e;
  e.n = j.at("N").get<int>();
  e.d = j.at("d").get<int>();
  if (j.contains("model")) e.model = model_from_string(j.at("model").get<std::string>());
  e.preparations = angle_rows_from(j.at("preparations"));
  e.measurements = angle_rows_from(j.at("measurements"));
  e.validate();
  return e;
}

json to_json(const OptimizerConfig& c) {
  return {{"restarts", c.restarts},
          {"max_iterations", c.max_iterations},
          {"gradient_tolerance", c.gradient_tolerance},
          {"line_search",
           {{"initial_step", c.line_search.initial_step},
            {"shrink", c.line_search.shrink},
            {"sufficient_increase", c.line_search.sufficient_increase}}},
          {"seed", c.seed},
          {"beta_rule", std::string(to_string(c.beta_rule))}};
}

OptimizerConfig optimizer_config_from_json(const json& j, OptimizerConfig c) {
  read_if(j, "restarts", c.restarts);
  read_if(j, "max_iterations", c.max_iterations);
  read_if(j, "gradient_tolerance", c.gradient_tolerance);
  read_if(j, "seed", c.seed);
  if (j.contains("beta_rule")) c.beta_rule = beta_rule_from_string(j.at("beta_rule").get<std::string>());
  if (j.contains("line_search")) {
    const auto& ls = j.at("line_search");
    read_if(ls, "initial_step", c.line_search.initial_step);
    read_if(ls, "shrink", c.line_search.shrink);
    read_if(ls, "sufficient_increase", c.line_search.sufficient_increase);
  }
  c.validate();
  return c;
}

std::string config_hash(const OptimizerConfig& c) {
  const std::string canonical = to_json(c).dump() + kAscentRevision;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json to_json(const BoundEstimate& b) {
  json hist = json::array();
  for (const auto& [bin, count] : b.restart_histogram) {
    hist.push_back({{"lower", static_cast<double>(bin) * kHistogramBinWidth}, {"count", count}});
  }
  return {{"N", b.n},
          {"d", b.d},
          {"model", std::string(to_string(b.model))},
          {"best_value", b.best_value},
          {"best_signed_value", b.best_signed_value},
          {"best_restart", b.best_restart},
          {"best_gradient_norm", b.best_gradient_norm},
          {"converged_fraction", b.converged_fraction},
          {"mean_iterations", b.mean_iterations},
          {"histogram_bin_width", kHistogramBinWidth},
          {"restart_histogram", std::move(hist)},
          {"config", to_json(b.config)},
          {"config_hash", config_hash(b.config)},
          {"best_ensemble", to_json(b.best_ensemble)}};
}

json to_json(const CertificationVerdict& v) {
  json bounds = json::array();
  for (const auto& r : v.bounds_used) {
    bounds.push_back({{"d", r.d}, {"classical", r.classical}, {"quantum", r.quantum}});
  }
  return {{"witness_value", v.witness_value},
          {"min_quantum_dimension", v.min_quantum_dimension},
          {"exceeds_all_quantum_bounds", v.exceeds_all_quantum_bounds},
          {"exceeds_classical_at",
           v.exceeds_classical_at ? json(*v.exceeds_classical_at) : json(nullptr)},
          {"bounds_used", std::move(bounds)}};
}

json to_json(const BoundTable& t) {
  json entries = json::array();
  for (const auto& [key, e] : t.entries()) {
    entries.push_back({{"N", e.n}, {"d", e.d}, {"value", e.value}, {"config_hash", e.config_hash}});
  }
  return {{"entries", std::move(entries)}};
}

BoundTable bound_table_from_json(const json& j) {
  BoundTable t;
  for (const auto& e : j.at("entries")) {
    t.set(e.at("N").get<int>(), e.at("d").get<int>(), e.at("value").get<double>(),
          e.value("config_hash", std::string{}));
  }
  return t;
}

json to_json(const NoiseModel& n) {
  return {{"fidelity", n.fidelity}, {"dark_rate", n.dark_rate}, {"signal_rate", n.signal_rate}};
}

NoiseModel noise_from_json(const json& j, NoiseModel n) {
  read_if(j, "fidelity", n.fidelity);
  read_if(j, "dark_rate", n.dark_rate);
  read_if(j, "signal_rate", n.signal_rate);
  n.validate();
  return n;
}

json to_json(const CountRecord& r) {
  json rows = json::array();
  for (int x = 1; x <= r.n; ++x) {
    for (int y = 1; y <= r.n - 1; ++y) {
      const auto c = r.basis_counts(x, y);
      rows.push_back({{"x", x}, {"y", y}, {"counts", std::vector<std::int64_t>(c.begin(), c.end())}});
    }
  }
  return {{"N", r.n},
          {"d", r.d},
          {"model", std::string(to_string(r.model))},
          {"noise", to_json(r.noise)},
          {"seed", r.seed},
          {"windows", r.windows},
          {"tallies", std::move(rows)}};
}

CountRecord count_record_from_json(const json& j) {
  CountRecord r(j.at("N").get<int>(), j.at("d").get<int>());
  if (j.contains("model")) r.model = model_from_string(j.at("model").get<std::string>());
  if (j.contains("noise")) r.noise = noise_from_json(j.at("noise"));
  read_if(j, "seed", r.seed);
  read_if(j, "windows", r.windows);
  for (const auto& row : j.at("tallies")) {
    const int x = row.at("x").get<int>(), y = row.at("y").get<int>();
    const auto c = row.at("counts").get<std::vector<std::int64_t>>();
    if (static_cast<int>(c.size()) != r.d) throw std::domain_error("tally row has the wrong size");
    for (int k = 1; k <= r.d; ++k) r.at(x, y, k) = c[k - 1];
  }
  r.validate();
  return r;
}

std::string to_csv(const CountRecord& r) {
  std::ostringstream os;
  os << "x,y,k,count\n";
  for (int x = 1; x <= r.n; ++x) {
    for (int y = 1; y <= r.n - 1; ++y) {
      for (int k = 1; k <= r.d; ++k) os << x << ',' << y << ',' << k << ',' << r.at(x, y, k) << '\n';
    }
  }
  return os.str();
}

CountRecord count_record_from_csv(const std::string& text, const NoiseModel& settings) {
  struct Row {
    int x, y, k;
    std::int64_t count;
  };
  std::vector<Row> rows;
  std::istringstream is(text);
  std::string line;
  int n = 0, d = 0, line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.rfind("x,", 0) == 0 || line[0] == '#') continue;
    Row r{};
    long long c = 0;
    if (std::sscanf(line.c_str(), "%d,%d,%d,%lld", &r.x, &r.y, &r.k, &c) != 4) {
      throw std::domain_error("malformed count CSV at line " + std::to_string(line_no));
    }
    r.count = c;
    rows.push_back(r);
    n = std::max(n, r.x);
    d = std::max(d, r.k);
  }
  CountRecord rec(n, d);
  rec.noise = settings;
  std::vector<char> seen(rec.counts.size(), 0);
  for (const Row& r : rows) {
    rec.at(r.x, r.y, r.k) = r.count;
    seen[(static_cast<std::size_t>(r.x - 1) * (n - 1) + (r.y - 1)) * d + (r.k - 1)] = 1;
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) throw std::domain_error("count CSV does not cover every (x, y, k)");
  }
  rec.validate();
  return rec;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return json::parse(in);
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace dimwit
