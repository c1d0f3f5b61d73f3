#include "dfrcsg/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace dfrcsg {

namespace {

const std::set<std::string> kKnownKeys = {
    "P_V", "P_L", "P_V_dBm", "P_L_dBm", "G_R", "G_C", "G_I", "kappa", "f_c",
    "d_C", "d_I", "r_Rmin", "r_Rmax", "psi_VT", "psi_VR", "psi_LT",
    "lambda_V", "lambda_I", "lambda_L", "alpha_R", "alpha_C", "alpha_I",
    "beta_R", "beta_C", "beta_I", "K", "ic"};

const std::set<std::string> kKnownIcKeys = {"mode", "a", "b", "at_radar", "at_comm"};

double number_at(const nlohmann::json& j, const std::string& key) {
    if (!j.at(key).is_number()) throw ConfigError("config key '" + key + "' must be a number");
    return j.at(key).get<double>();
}

}  // namespace

LoadedConfig parse_config(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");

    std::vector<std::string> unknown;
    for (const auto& item : j.items())
        if (!kKnownKeys.count(item.key())) unknown.push_back(item.key());
    if (!unknown.empty()) {
        std::string msg = "unknown config keys:";
        for (const auto& k : unknown) msg += " '" + k + "'";
        throw ConfigError(msg);
    }

    LoadedConfig out;
    ScenarioParams& p = out.params;

    auto take = [&](const std::string& key, double& field) {
        if (j.contains(key)) field = number_at(j, key);
        else out.defaults_applied.push_back(key);
    };
    auto take_deg = [&](const std::string& key, double& field) {
        if (j.contains(key)) field = deg_to_rad(number_at(j, key));
        else out.defaults_applied.push_back(key);
    };

    if (j.contains("P_V") && j.contains("P_V_dBm"))
        throw ConfigError("give either 'P_V' or 'P_V_dBm', not both");
    if (j.contains("P_L") && j.contains("P_L_dBm"))
        throw ConfigError("give either 'P_L' or 'P_L_dBm', not both");
    if (j.contains("P_V_dBm")) p.p_v = dbm_to_watt(number_at(j, "P_V_dBm"));
    else take("P_V", p.p_v);
    if (j.contains("P_L_dBm")) p.p_l = dbm_to_watt(number_at(j, "P_L_dBm"));
    else take("P_L", p.p_l);

    take("G_R", p.g_r);
    take("G_C", p.g_c);
    take("G_I", p.g_i);
    take("kappa", p.kappa);
    take("f_c", p.f_c);
    take("d_C", p.d_c);
    take("d_I", p.d_i);
    take("r_Rmin", p.r_rmin);
    take("r_Rmax", p.r_rmax);
    take_deg("psi_VT", p.psi_vt);
    take_deg("psi_VR", p.psi_vr);
    take_deg("psi_LT", p.psi_lt);
    take("lambda_V", p.lambda_v);
    take("lambda_I", p.lambda_i);
    take("lambda_L", p.lambda_l);
    take("alpha_R", p.alpha_r);
    take("alpha_C", p.alpha_c);
    take("alpha_I", p.alpha_i);
    take("beta_R", p.beta_r);
    take("beta_C", p.beta_c);
    take("beta_I", p.beta_i);
    take("K", p.rician_k);

    if (j.contains("ic")) {
        const nlohmann::json& ic = j.at("ic");
        if (!ic.is_object()) throw ConfigError("'ic' must be an object");
        for (const auto& item : ic.items())
            if (!kKnownIcKeys.count(item.key()))
                throw ConfigError("unknown key in 'ic': '" + item.key() + "'");
        const std::string mode = ic.value("mode", "none");
        if (mode == "none") {
            out.ic = ResidualModel::none();
        } else if (mode == "partial") {
            out.ic = ResidualModel::partial(ic.value("a", 2.0), ic.value("b", 4.0));
            if (!(out.ic.a > 0.0) || !(out.ic.b > 0.0))
                throw ConfigError("ic: partial mode requires a > 0 and b > 0");
        } else if (mode == "perfect") {
            out.ic = ResidualModel::perfect(ic.value("at_radar", true), ic.value("at_comm", true));
        } else {
            throw ConfigError("ic.mode must be one of none|partial|perfect");
        }
    }
    return out;
}

LoadedConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return parse_config(j);
}

nlohmann::json resolved_config_json(const ScenarioParams& p, const ResidualModel& ic) {
    nlohmann::json j;
    j["P_V"] = p.p_v;
    j["P_L"] = p.p_l;
    j["G_R"] = p.g_r;
    j["G_C"] = p.g_c;
    j["G_I"] = p.g_i;
    j["kappa"] = p.kappa;
    j["f_c"] = p.f_c;
    j["d_C"] = p.d_c;
    j["d_I"] = p.d_i;
    j["r_Rmin"] = p.r_rmin;
    j["r_Rmax"] = p.r_rmax;
    j["psi_VT"] = p.psi_vt * 180.0 / M_PI;
    j["psi_VR"] = p.psi_vr * 180.0 / M_PI;
    j["psi_LT"] = p.psi_lt * 180.0 / M_PI;
    j["lambda_V"] = p.lambda_v;
    j["lambda_I"] = p.lambda_i;
    j["lambda_L"] = p.lambda_l;
    j["alpha_R"] = p.alpha_r;
    j["alpha_C"] = p.alpha_c;
    j["alpha_I"] = p.alpha_i;
    j["beta_R"] = p.beta_r;
    j["beta_C"] = p.beta_c;
    j["beta_I"] = p.beta_i;
    j["K"] = p.rician_k;
    nlohmann::json jic;
    switch (ic.mode) {
        case ResidualModel::Mode::none: jic["mode"] = "none"; break;
        case ResidualModel::Mode::partial:
            jic["mode"] = "partial";
            jic["a"] = ic.a;
            jic["b"] = ic.b;
            break;
        case ResidualModel::Mode::perfect:
            jic["mode"] = "perfect";
            jic["at_radar"] = ic.at_radar;
            jic["at_comm"] = ic.at_comm;
            break;
    }
    j["ic"] = jic;
    return j;
}

}  // namespace dfrcsg
