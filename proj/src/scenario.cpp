#include "dfrcsg/scenario.hpp"

#include <cmath>
#include <sstream>

namespace dfrcsg {

namespace {

std::string join(const std::vector<std::string>& parts) {
    std::ostringstream os;
    os << "invalid scenario:";
    for (const auto& p : parts) os << "\n  - " << p;
    return os.str();
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

ValidatedScenario validate(const ScenarioParams& p) {
    std::vector<std::string> v;
    auto positive = [&](double x, const char* name) {
        if (!(x > 0.0) || !std::isfinite(x)) v.push_back(std::string(name) + ": must be strictly positive");
    };
    auto nonneg = [&](double x, const char* name) {
        if (!(x >= 0.0) || !std::isfinite(x)) v.push_back(std::string(name) + ": must be >= 0");
    };

    positive(p.p_v, "P_V");
    positive(p.p_l, "P_L");
    positive(p.g_r, "G_R");
    positive(p.g_c, "G_C");
    positive(p.g_i, "G_I");
    positive(p.kappa, "kappa");
    positive(p.f_c, "f_c");
    positive(p.d_c, "d_C");
    positive(p.d_i, "d_I");
    positive(p.beta_r, "beta_R");
    positive(p.beta_c, "beta_C");
    positive(p.beta_i, "beta_I");
    positive(p.lambda_l, "lambda_L");
    nonneg(p.lambda_v, "lambda_V");
    nonneg(p.lambda_i, "lambda_I");
    nonneg(p.rician_k, "K");

    if (!(p.r_rmin > 0.0)) v.push_back("r_Rmin: must be strictly positive");
    if (!(p.r_rmin < p.r_rmax)) v.push_back("r_Rmax: empty radar range (require 0 < r_Rmin < r_Rmax)");

    auto beamwidth = [&](double x, const char* name) {
        if (!(x > 0.0 && x < M_PI)) v.push_back(std::string(name) + ": beamwidth must lie in (0, pi) radians");
    };
    beamwidth(p.psi_vt, "psi_VT");
    beamwidth(p.psi_vr, "psi_VR");
    beamwidth(p.psi_lt, "psi_LT");

    auto exponent = [&](double x, const char* name) {
        if (!(x >= 1.0)) v.push_back(std::string(name) + ": path-loss exponent must be >= 1");
    };
    exponent(p.alpha_r, "alpha_R");
    exponent(p.alpha_c, "alpha_C");
    exponent(p.alpha_i, "alpha_I");
    if (p.lambda_i > 0.0 && !(p.alpha_i > 1.0))
        v.push_back("alpha_I: must exceed 1 when lambda_I > 0 (finite interference power)");

    if (!v.empty()) throw ValidationError(std::move(v));
    return ValidatedScenario(p);
}

DerivedQuantities derive(const ValidatedScenario& scenario) {
    const ScenarioParams& p = scenario.params();
    DerivedQuantities d;

    const double friis = kSpeedOfLight * kSpeedOfLight / (4.0 * M_PI * p.f_c * p.f_c);
    d.rho_c = p.p_l * p.g_c * friis / p.beta_c;
    d.rho_i = p.p_v * p.g_i * friis / p.beta_i;
    d.rho_r = p.p_v * p.g_r * friis / (p.beta_r * std::pow(2.0, p.alpha_r));

    d.r_cmin = p.d_c / std::tan(std::min(p.psi_lt, p.psi_vr) / 2.0);
    d.r_imin = p.d_i / std::tan(std::min(p.psi_vt, p.psi_vr) / 2.0);

    d.s_rmin = d.rho_r * std::pow(p.r_rmax, -p.alpha_r);
    d.s_rmax = d.rho_r * std::pow(p.r_rmin, -p.alpha_r);
    d.s_cmax = d.rho_c * std::pow(d.r_cmin * d.r_cmin + p.d_c * p.d_c, -p.alpha_c / 2.0);
    return d;
}

}  // namespace dfrcsg
