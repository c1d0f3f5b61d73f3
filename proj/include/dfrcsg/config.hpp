#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dfrcsg/cancellation.hpp"
#include "dfrcsg/scenario.hpp"

namespace dfrcsg {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * JSON scenario config. Keys match the parameter names (P_V, P_L, G_R,
 * G_C, G_I, kappa, f_c, d_C, d_I, r_Rmin, r_Rmax, psi_VT, psi_VR, psi_LT,
 * lambda_V, lambda_I, lambda_L, alpha_R, alpha_C, alpha_I, beta_R,
 * beta_C, beta_I, K); angles are degrees, powers watts, with P_V_dBm /
 * P_L_dBm accepted as alternatives. An optional "ic" object selects the
 * cancellation model. Missing keys fall back to the benchmark defaults;
 * unknown keys are an error.
 */
struct LoadedConfig {
    ScenarioParams params;
    ResidualModel ic;
    std::vector<std::string> defaults_applied;  // keys not present in the file
};

LoadedConfig parse_config(const nlohmann::json& j);
LoadedConfig load_config_file(const std::string& path);

// full resolved parameter set in config-file units (angles back in degrees)
nlohmann::json resolved_config_json(const ScenarioParams& p, const ResidualModel& ic);

}  // namespace dfrcsg
