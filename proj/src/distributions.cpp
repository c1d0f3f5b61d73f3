#include "dfrcsg/distributions.hpp"

#include <cmath>
#include <limits>

namespace dfrcsg {

DesiredLinkDistributions::DesiredLinkDistributions(const ValidatedScenario& scenario,
                                                   const DerivedQuantities& derived)
    : params_(scenario.params()), derived_(derived) {
    const double span = params_.r_rmax - params_.r_rmin;
    const double eps = params_.lambda_v * span;
    if (eps < 1e-6) {
        // lambda_V -> 0 limit: uniform density 1/span with the next series terms
        radar_norm_ = (1.0 + 0.5 * eps + eps * eps / 12.0) / span;
    } else {
        radar_norm_ = params_.lambda_v / (-std::expm1(-eps));
    }
}

double DesiredLinkDistributions::pdf_r_radar(double r) const {
    if (r < params_.r_rmin || r > params_.r_rmax) return 0.0;
    return radar_norm_ * std::exp(-params_.lambda_v * (r - params_.r_rmin));
}

double DesiredLinkDistributions::cdf_r_radar(double r) const {
    if (r <= params_.r_rmin) return 0.0;
    if (r >= params_.r_rmax) return 1.0;
    const double lv = params_.lambda_v;
    if (lv * (params_.r_rmax - params_.r_rmin) < 1e-6) {
        // integrate the series form of the density
        const double t = r - params_.r_rmin;
        return radar_norm_ * t * (1.0 - 0.5 * lv * t);
    }
    return -std::expm1(-lv * (r - params_.r_rmin)) / -std::expm1(-lv * (params_.r_rmax - params_.r_rmin));
}

double DesiredLinkDistributions::pdf_r_comm(double r) const {
    if (r < derived_.r_cmin) return 0.0;
    return params_.lambda_l * std::exp(-params_.lambda_l * (r - derived_.r_cmin));
}

double DesiredLinkDistributions::cdf_r_comm(double r) const {
    if (r <= derived_.r_cmin) return 0.0;
    return -std::expm1(-params_.lambda_l * (r - derived_.r_cmin));
}

double DesiredLinkDistributions::power_radar(double r) const {
    return derived_.rho_r * std::pow(r, -params_.alpha_r);
}

double DesiredLinkDistributions::power_comm(double r) const {
    return derived_.rho_c * std::pow(r * r + params_.d_c * params_.d_c, -params_.alpha_c / 2.0);
}

double DesiredLinkDistributions::radius_radar(double s) const {
    return std::pow(derived_.rho_r / s, 1.0 / params_.alpha_r);
}

double DesiredLinkDistributions::radius_comm(double s) const {
    const double t = std::pow(derived_.rho_c, 2.0 / params_.alpha_c) * std::pow(s, -2.0 / params_.alpha_c);
    return std::sqrt(std::max(t - params_.d_c * params_.d_c, 0.0));
}

double DesiredLinkDistributions::pdf_power_radar(double s) const {
    if (s < derived_.s_rmin || s > derived_.s_rmax) return 0.0;
    const double r = radius_radar(s);
    return pdf_r_radar(r) * r / (params_.alpha_r * s);
}

double DesiredLinkDistributions::pdf_power_comm(double s) const {
    if (s <= 0.0 || s > derived_.s_cmax) return 0.0;
    const double r = radius_comm(s);
    if (r <= 0.0) return 0.0;  // only at s = s_cmax exactly
    const double jac = (r * r + params_.d_c * params_.d_c) / (params_.alpha_c * s * r);
    return pdf_r_comm(r) * jac;
}

double DesiredLinkDistributions::comm_truncation_radius(double tail_eps) const {
    return derived_.r_cmin - std::log(tail_eps) / params_.lambda_l;
}

Region Region::full() {
    Region r;
    r.contains = [](double, double) { return true; };
    r.lower = [](double, double) { return 0.0; };
    r.upper = [](double, double) { return std::numeric_limits<double>::infinity(); };
    return r;
}

namespace {

// initial cells: a few uniform radar-axis strips crossed with geometric
// comm-axis strips, so the short-distance band where S_C varies fastest
// is resolved from the start rather than left to error estimates
std::vector<Rect> seeded_cells(const std::vector<double>& xs, const std::vector<double>& ys) {
    std::vector<Rect> cells;
    cells.reserve((xs.size() - 1) * (ys.size() - 1));
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
        for (std::size_t j = 0; j + 1 < ys.size(); ++j)
            cells.push_back({xs[i], xs[i + 1], ys[j], ys[j + 1]});
    return cells;
}

std::vector<double> uniform_breakpoints(double lo, double hi, int n) {
    std::vector<double> out;
    out.reserve(n + 1);
    for (int i = 0; i <= n; ++i) out.push_back(lo + (hi - lo) * i / n);
    return out;
}

}  // namespace

IntegralResult restricted_expectation(const DesiredLinkDistributions& dist,
                                      const std::function<double(double, double)>& g,
                                      const Region& region, const ExpectationOptions& opts) {
    const auto& p = dist.params();
    const auto& d = dist.derived();
    const double r_c_hi = dist.comm_truncation_radius(opts.tail_eps);

    auto integrand = [&](double r_r, double r_c) {
        const double s_r = dist.power_radar(r_r);
        const double s_c = dist.power_comm(r_c);
        if (!region.contains(s_r, s_c)) return 0.0;
        return dist.pdf_r_radar(r_r) * dist.pdf_r_comm(r_c) * g(s_r, s_c);
    };

    const auto cells = seeded_cells(uniform_breakpoints(p.r_rmin, p.r_rmax, 6),
                                    geometric_breakpoints(d.r_cmin, r_c_hi, 1.6));
    IntegralResult res = integrate2d_cells(integrand, cells, opts.tol, opts.max_panels);
    res.error += opts.tail_eps;
    return res;
}

IntegralResult restricted_expectation_power_space(const DesiredLinkDistributions& dist,
                                                  const std::function<double(double, double)>& g,
                                                  const Region& region,
                                                  const ExpectationOptions& opts) {
    const auto& d = dist.derived();
    const double s_c_lo = dist.power_comm(dist.comm_truncation_radius(opts.tail_eps));

    auto integrand = [&](double s_r, double s_c) {
        if (!region.contains(s_r, s_c)) return 0.0;
        return dist.pdf_power_radar(s_r) * dist.pdf_power_comm(s_c) * g(s_r, s_c);
    };

    const auto cells = seeded_cells(geometric_breakpoints(d.s_rmin, d.s_rmax, 2.0),
                                    geometric_breakpoints(s_c_lo, d.s_cmax, 2.0));
    IntegralResult res = integrate2d_cells(integrand, cells, opts.tol, opts.max_panels);
    res.error += opts.tail_eps;
    return res;
}

}  // namespace dfrcsg
