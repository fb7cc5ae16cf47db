#pragma once

#include <json.hpp>

#include "scatter/model.hpp"

namespace scatter {

// Parse a model document:
//   { "k": {"kind":"power","alpha":0.6},
//     "cross_section": {"modes": 2},
//     "coeffs": [ {"name":"V","c":0.3,"nu":1.5,"theta_modes":[[0,1.0],[1,0.5]]} ],
//     "cutoff_R": 8.0,
//     "window": [0.5, 1.5] }
// Unknown keys are rejected (ConfigInvalid).
ModelSpec parse_model(const nlohmann::json& j);
nlohmann::json model_to_json(const ModelSpec& m);

// Helper shared by all config readers: throws ConfigInvalid when j contains
// a key outside `allowed`.
void reject_unknown_keys(const nlohmann::json& j,
                         std::initializer_list<const char*> allowed,
                         const std::string& where);

}  // namespace scatter
