#pragma once

#include <filesystem>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dimwit/state_models.hpp"

namespace dimwit {

// A bundled data file is missing or unreadable.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// $DIMWIT_DATA_DIR when set, otherwise the data directory of the source
// tree this binary was built from.
std::filesystem::path data_dir();

// Published optimal I_7 ensemble for d = 6: 7 x 5 preparation angles and
// 6 x 5 measurement angles. Throws DataError for missing files and
// std::domain_error when the row/column counts are wrong.
AngleEnsemble load_i7_reference_ensemble(const std::filesystem::path& dir = data_dir());

struct PublishedLimit {
  int d = 0;
  double classical = 0.0;
  double quantum = 0.0;
};

// Published classical and quantum limits of I_7 for d = 2..6.
std::vector<PublishedLimit> load_i7_limits(const std::filesystem::path& dir = data_dir());

// (d, quantum) pairs in the form certify() takes.
std::vector<std::pair<int, double>> quantum_column(const std::vector<PublishedLimit>& limits);

}  // namespace dimwit
