#pragma once

#include <functional>

#include "dfrcsg/quadrature.hpp"
#include "dfrcsg/scenario.hpp"

namespace dfrcsg {

/**
 * Distance and power distributions of the two desired links.
 *
 * The nearest same-lane vehicle distance r_R follows a truncated
 * exponential on [r_Rmin, r_Rmax] (conditioned on at least one vehicle in
 * the detectable range); the nearest traffic light r_C follows a shifted
 * exponential on [r_Cmin, inf). Power densities are the exact
 * change-of-variable push-forwards through S_R(r) = rho_R r^-alpha_R and
 * S_C(r) = rho_C (r^2 + d_C^2)^(-alpha_C/2).
 */
class DesiredLinkDistributions {
public:
    DesiredLinkDistributions(const ValidatedScenario& scenario, const DerivedQuantities& derived);

    double pdf_r_radar(double r) const;
    double pdf_r_comm(double r) const;
    double cdf_r_radar(double r) const;
    double cdf_r_comm(double r) const;
    double pdf_power_radar(double s) const;
    double pdf_power_comm(double s) const;

    double power_radar(double r) const;   // S_R(r)
    double power_comm(double r) const;    // S_C(r)
    double radius_radar(double s) const;  // inverse of S_R
    double radius_comm(double s) const;   // inverse of S_C

    // r beyond which the comm-distance exponential tail mass is < tail_eps
    double comm_truncation_radius(double tail_eps) const;

    const ScenarioParams& params() const { return params_; }
    const DerivedQuantities& derived() const { return derived_; }

private:
    ScenarioParams params_;
    DerivedQuantities derived_;
    double radar_norm_;  // lambda_V / (1 - exp(-lambda_V (r_Rmax - r_Rmin)))
};

// Membership predicate over the (S_R, S_C) plane plus the metric's
// interference bounds a and b (in W). b >= a is not assumed; consumers
// clamp negative CDF differences.
struct Region {
    std::function<bool(double s_r, double s_c)> contains;
    std::function<double(double s_r, double s_c)> lower;
    std::function<double(double s_r, double s_c)> upper;

    static Region full();
};

struct ExpectationOptions {
    double tol = 1e-5;
    double tail_eps = 1e-8;
    int max_panels = 60'000;
};

// E[g(S_R, S_C) 1{(S_R,S_C) in region}], integrated in (r_R, r_C) space
// where both densities are smooth; the comm distance is truncated at
// comm_truncation_radius(tail_eps) and the removed mass goes into the
// error bound.
IntegralResult restricted_expectation(const DesiredLinkDistributions& dist,
                                      const std::function<double(double, double)>& g,
                                      const Region& region,
                                      const ExpectationOptions& opts = {});

// Same expectation computed against the power-space densities directly;
// the independent route for validating the change of variables.
IntegralResult restricted_expectation_power_space(const DesiredLinkDistributions& dist,
                                                  const std::function<double(double, double)>& g,
                                                  const Region& region,
                                                  const ExpectationOptions& opts = {});

}  // namespace dfrcsg
