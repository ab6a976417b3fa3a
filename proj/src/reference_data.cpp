#include "dimwit/reference_data.hpp"

#include <cstdlib>
#include <numbers>
#include <string>

#include "dimwit/json_io.hpp"

#ifndef DIMWIT_DEFAULT_DATA_DIR
#define DIMWIT_DEFAULT_DATA_DIR "data"
#endif

namespace dimwit {

namespace {

json load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw DataError("missing data file " + path.string());
  try {
    return read_json_file(path);
  } catch (const json::exception& e) {
    throw DataError("unreadable data file " + path.string() + ": " + e.what());
  }
}

// Rows of angles; the literal string "pi" is accepted for exact pi.
std::vector<AngleVector> angle_rows(const json& file, std::size_t rows, std::size_t cols,
                                    const std::string& name) {
  const json& r = file.at("rows");
  if (r.size() != rows) {
    throw std::domain_error(name + ": expected " + std::to_string(rows) + " rows, found " +
                            std::to_string(r.size()));
  }
  std::vector<AngleVector> out;
  for (const auto& row : r) {
    if (row.size() != cols) {
      throw std::domain_error(name + ": expected " + std::to_string(cols) + " columns, found " +
                              std::to_string(row.size()));
    }
    AngleVector a;
    for (const auto& v : row) {
      if (v.is_string()) {
        if (v.get<std::string>() != "pi") throw std::domain_error(name + ": bad angle literal");
        a.phi.push_back(std::numbers::pi);
      } else {
        a.phi.push_back(v.get<double>());
      }
    }
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("DIMWIT_DATA_DIR"); env && *env) return env;
  return DIMWIT_DEFAULT_DATA_DIR;
}

AngleEnsemble load_i7_reference_ensemble(const std::filesystem::path& dir) {
  const auto prep_path = dir / "i7_d6_preparations.json";
  const auto meas_path = dir / "i7_d6_measurements.json";
  AngleEnsemble e;
  e.model = Model::quantum;
  e.n = 7;
  e.d = 6;
  e.preparations = angle_rows(load(prep_path), 7, 5, prep_path.filename().string());
  e.measurements = angle_rows(load(meas_path), 6, 5, meas_path.filename().string());
  e.validate();
  return e;
}

std::vector<PublishedLimit> load_i7_limits(const std::filesystem::path& dir) {
  const json file = load(dir / "i7_limits.json");
  std::vector<PublishedLimit> out;
  for (const auto& row : file.at("rows")) {
    out.push_back({row.at("d").get<int>(), row.at("classical").get<double>(),
                   row.at("quantum").get<double>()});
  }
  return out;
}

std::vector<std::pair<int, double>> quantum_column(const std::vector<PublishedLimit>& limits) {
  std::vector<std::pair<int, double>> out;
  for (const auto& l : limits) out.emplace_back(l.d, l.quantum);
  return out;
}

}  // namespace dimwit
