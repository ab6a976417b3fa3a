#pragma once

// JSON shapes for the data types that cross process boundaries:
//
//   WitnessSpec      {"N": int, "terms": [{"i": int, "j": int, "sign": +-1}]}
//   CorrelatorTable  {"N": int, "E": [[...N-1 values] x N], "P": optional, same shape}
//   AngleEnsemble    {"N", "d", "model", "preparations": [[phi...]], "measurements": [[phi...]]}
//   BoundTable       {"entries": [{"N", "d", "value", "config_hash"}], ...}
//
// Doubles are written with 17 significant digits, so values round-trip
// exactly.

#include <filesystem>
#include <string>

#include "json.hpp"

#include "dimwit/experiment_sim.hpp"
#include "dimwit/optimizer.hpp"
#include "dimwit/scalability.hpp"
#include "dimwit/state_models.hpp"
#include "dimwit/witness.hpp"

namespace dimwit {

using json = nlohmann::ordered_json;

json to_json(const WitnessSpec& spec);
WitnessSpec witness_from_json(const json& j);

json to_json(const CorrelatorTable& table);
CorrelatorTable correlators_from_json(const json& j);

json to_json(const AngleEnsemble& e);
AngleEnsemble ensemble_from_json(const json& j);

json to_json(const OptimizerConfig& c);
// Missing keys keep the values already in `base`.
OptimizerConfig optimizer_config_from_json(const json& j, OptimizerConfig base = {});

// FNV-1a (64-bit) of the canonical config JSON plus the ascent algorithm
// revision, as 16 hex digits. Identifies which optimizer produced a bound.
std::string config_hash(const OptimizerConfig& c);

json to_json(const BoundEstimate& b);

json to_json(const CertificationVerdict& v);

json to_json(const BoundTable& t);
BoundTable bound_table_from_json(const json& j);

json to_json(const NoiseModel& n);
NoiseModel noise_from_json(const json& j, NoiseModel base = {});

json to_json(const CountRecord& r);
CountRecord count_record_from_json(const json& j);
// Rows "x,y,k,count" with a header line.
std::string to_csv(const CountRecord& r);
// Counts from CSV; the ensemble dimensions come from the rows and the
// settings from `settings`.
CountRecord count_record_from_csv(const std::string& text, const NoiseModel& settings);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

}  // namespace dimwit
