#pragma once

#include <json.hpp>

#include "mlsg/model.hpp"
#include "mlsg/sim.hpp"

namespace mlsg {

/// Loads model parameters from a JSON object with keys matching the field
/// names; time-curves are arrays of [t, value] pairs sorted by t, starting
/// at 0 and ending at horizon. Scalars are accepted for curves as shorthand
/// for a constant 2-point table. Throws std::invalid_argument on schema or
/// invariant violations.
ModelParams params_from_json(const nlohmann::json& j);

nlohmann::json params_to_json(const ModelParams& params);

SimConfig sim_config_from_json(const nlohmann::json& j);

/// SimResult with all fields plus the config echo.
nlohmann::json sim_result_to_json(const SimResult& result);

} // namespace mlsg
