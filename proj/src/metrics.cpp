#include "dfrcsg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dfrcsg {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

MetricEvaluator::MetricEvaluator(const ValidatedScenario& scenario, const MetricOptions& opts)
    : MetricEvaluator(scenario, opts, nullptr) {}

MetricEvaluator::MetricEvaluator(const ValidatedScenario& scenario, const MetricOptions& opts,
                                 std::shared_ptr<const InterferenceCdf> table)
    : scenario_(scenario),
      derived_(derive(scenario)),
      opts_(opts),
      dist_(scenario, derived_),
      laplace_(scenario, derived_) {
    if (opts_.use_cdf_table) {
        if (table) {
            table_ = std::move(table);
        } else {
            InterferenceCdf::BuildOptions b;
            b.tol = opts_.table_tol;
            b.gp_tol = opts_.gp_tol;
            table_ = std::make_shared<const InterferenceCdf>(InterferenceCdf::build(laplace_, b));
        }
    } else if (!laplace_.interference_free()) {
        lt_cache_ = std::make_shared<const LtExponentCache>(laplace_);
    }
}

const InterferenceCdf& MetricEvaluator::cdf_table() const {
    if (!table_) throw std::logic_error("cdf_table: engine runs in direct (no-cache) mode");
    return *table_;
}

double MetricEvaluator::cdf(double x) const {
    if (x < 0.0) return 0.0;
    if (laplace_.interference_free()) return 1.0;
    if (table_) return (*table_)(x);
    GilPelaezOptions gp;
    gp.tol = opts_.gp_tol;
    gp.tau_hi = lt_cache_->tau_hi();
    const auto& cache = *lt_cache_;
    return gil_pelaez_cdf([&cache](double tau) { return cache.log_lt_imag_axis(tau); },
                          cache.mean(), x, gp)
        .cdf;
}

IntegralResult MetricEvaluator::expect(const std::function<double(double, double)>& g,
                                       const Region& region) const {
    ExpectationOptions eo;
    eo.tol = opts_.quad_tol;
    eo.tail_eps = opts_.tail_eps;
    return restricted_expectation(dist_, g, region, eo);
}

MetricEstimate MetricEvaluator::finish(const IntegralResult& r, bool complement) const {
    MetricEstimate est;
    est.value = clamp01(complement ? 1.0 - r.value : r.value);
    est.error_bound = r.error + opts_.table_tol;
    return est;
}

MetricEstimate MetricEvaluator::coverage(double theta, const ResidualModel& model) const {
    if (!(theta > 0.0)) return {1.0, 0.0, MetricEstimate::Method::analytic};
    Region reg;
    reg.lower = [](double, double) { return 0.0; };
    reg.upper = [theta, model](double s_r, double s_c) {
        return s_c / theta - residuals(s_r, s_c, model).zeta_r;
    };
    reg.contains = [upper = reg.upper](double s_r, double s_c) { return upper(s_r, s_c) >= 0.0; };
    auto g = [this, upper = reg.upper](double s_r, double s_c) { return cdf(upper(s_r, s_c)); };
    return finish(expect(g, reg), false);
}

MetricEstimate MetricEvaluator::false_alarm(double gamma, const ResidualModel& model) const {
    if (!(gamma > 0.0)) return {1.0, 0.0, MetricEstimate::Method::analytic};
    Region reg;
    reg.lower = [](double, double) { return 0.0; };
    reg.upper = [gamma, model](double s_r, double s_c) {
        return gamma - residuals(s_r, s_c, model).zeta_c;
    };
    reg.contains = [upper = reg.upper](double s_r, double s_c) { return upper(s_r, s_c) >= 0.0; };
    auto g = [this, upper = reg.upper](double s_r, double s_c) { return cdf(upper(s_r, s_c)); };
    return finish(expect(g, reg), true);
}

MetricEstimate MetricEvaluator::detection(double gamma, const ResidualModel& model) const {
    if (!(gamma > 0.0)) return {1.0, 0.0, MetricEstimate::Method::analytic};
    const double kappa = scenario_.params().kappa;
    Region reg;
    reg.lower = [](double, double) { return 0.0; };
    reg.upper = [gamma, kappa, model](double s_r, double s_c) {
        return gamma - s_r * kappa - residuals(s_r, s_c, model).zeta_c;
    };
    reg.contains = [upper = reg.upper](double s_r, double s_c) { return upper(s_r, s_c) >= 0.0; };
    auto g = [this, upper = reg.upper](double s_r, double s_c) { return cdf(upper(s_r, s_c)); };
    return finish(expect(g, reg), true);
}

MetricEstimate MetricEvaluator::success(double theta_prime, const ResidualModel& model) const {
    if (!(theta_prime > 0.0)) return {1.0, 0.0, MetricEstimate::Method::analytic};
    const double kappa = scenario_.params().kappa;
    Region reg;
    reg.lower = [](double, double) { return 0.0; };
    reg.upper = [theta_prime, kappa, model](double s_r, double s_c) {
        return s_r * kappa / theta_prime - residuals(s_r, s_c, model).zeta_c;
    };
    reg.contains = [upper = reg.upper](double s_r, double s_c) { return upper(s_r, s_c) >= 0.0; };
    auto g = [this, upper = reg.upper](double s_r, double s_c) { return cdf(upper(s_r, s_c)); };
    return finish(expect(g, reg), false);
}

MetricEstimate MetricEvaluator::jrdccp(double theta, double gamma, const ResidualModel& model) const {
    if (!(theta > 0.0)) return detection(gamma, model);
    if (!(gamma > 0.0)) return coverage(theta, model);
    const double kappa = scenario_.params().kappa;
    Region reg;
    // detection succeeds for I >= a, coverage for I <= b; the event is
    // max(a, 0) <= I <= b and F(x < 0) = 0 makes the clamped difference
    // exact over the union of the two proposition regions
    reg.lower = [gamma, kappa, model](double s_r, double s_c) {
        return gamma - s_r * kappa - residuals(s_r, s_c, model).zeta_c;
    };
    reg.upper = [theta, model](double s_r, double s_c) {
        return s_c / theta - residuals(s_r, s_c, model).zeta_r;
    };
    reg.contains = [lower = reg.lower, upper = reg.upper](double s_r, double s_c) {
        const double b = upper(s_r, s_c);
        return b >= 0.0 && b >= lower(s_r, s_c);
    };
    auto g = [this, lower = reg.lower, upper = reg.upper](double s_r, double s_c) {
        return std::max(0.0, cdf(upper(s_r, s_c)) - cdf(lower(s_r, s_c)));
    };
    return finish(expect(g, reg), false);
}

MetricEstimate MetricEvaluator::jrsccp(double theta_prime, double theta,
                                       const ResidualModel& model) const {
    if (!(theta > 0.0)) return success(theta_prime, model);
    if (!(theta_prime > 0.0)) return coverage(theta, model);
    const double kappa = scenario_.params().kappa;
    if (model.is_none() && theta * theta_prime > kappa)
        return {0.0, 0.0, MetricEstimate::Method::analytic};  // exact short-circuit
    Region reg;
    reg.lower = [](double, double) { return 0.0; };
    reg.upper = [theta, theta_prime, kappa, model](double s_r, double s_c) {
        const Residuals z = residuals(s_r, s_c, model);
        return std::min(s_r * kappa / theta_prime - z.zeta_c, s_c / theta - z.zeta_r);
    };
    reg.contains = [upper = reg.upper](double s_r, double s_c) { return upper(s_r, s_c) >= 0.0; };
    auto g = [this, upper = reg.upper](double s_r, double s_c) { return cdf(upper(s_r, s_c)); };
    return finish(expect(g, reg), false);
}

double MetricEvaluator::fa_threshold(double target_pfa, const ResidualModel& model) const {
    if (target_pfa == 1.0) return 0.0;
    if (!(target_pfa > 0.0) || !(target_pfa < 1.0))
        throw std::invalid_argument("fa_threshold: achievable targets lie in (0, 1]");

    double hi = 2.0 * derived_.s_cmax;
    if (table_ && !table_->degenerate())
        hi = 2.0 * std::max(derived_.s_cmax, table_->quantile(1.0 - 0.25 * target_pfa));
    int guard = 0;
    while (false_alarm(hi, model).value > target_pfa) {
        hi *= 2.0;
        if (++guard > 200) throw std::runtime_error("fa_threshold: bracket search failed");
    }

    double lo = 0.0;  // false_alarm(0) = 1
    for (int it = 0; it < 300; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double pfa = false_alarm(mid, model).value;
        if (std::abs(pfa - target_pfa) <= 1e-4) return mid;
        if (pfa > target_pfa) lo = mid; else hi = mid;
        if (hi - lo < 1e-15 * std::max(hi, derived_.s_cmax)) {
            throw std::runtime_error(
                "fa_threshold: target " + std::to_string(target_pfa) +
                " not achievable to 1e-4 (false-alarm curve jumps across it)");
        }
    }
    throw std::runtime_error("fa_threshold: bisection failed to converge");
}

std::pair<double, double> MetricEvaluator::frechet_bounds(JointKind kind, const Thresholds& th,
                                                          const ResidualModel& model) const {
    const double p_c = coverage(th.theta, model).value;
    const double p_a = kind == JointKind::jrdccp ? detection(th.gamma, model).value
                                                 : success(th.theta_prime, model).value;
    return {std::max(0.0, p_a + p_c - 1.0), std::min(p_a, p_c)};
}

MetricEstimate MetricEvaluator::conditional(ConditionalKind kind, const Thresholds& th,
                                            const ResidualModel& model) const {
    MetricEstimate joint, marginal;
    switch (kind) {
        case ConditionalKind::coverage_given_detection:
            joint = jrdccp(th.theta, th.gamma, model);
            marginal = detection(th.gamma, model);
            break;
        case ConditionalKind::coverage_given_success:
            joint = jrsccp(th.theta_prime, th.theta, model);
            marginal = success(th.theta_prime, model);
            break;
        case ConditionalKind::detection_given_coverage:
            joint = jrdccp(th.theta, th.gamma, model);
            marginal = coverage(th.theta, model);
            break;
        case ConditionalKind::success_given_coverage:
            joint = jrsccp(th.theta_prime, th.theta, model);
            marginal = coverage(th.theta, model);
            break;
    }
    if (marginal.value <= 1e-9)
        throw std::runtime_error("conditional metric: conditioning event has ~zero probability");
    MetricEstimate est;
    est.value = clamp01(joint.value / marginal.value);
    est.error_bound = (joint.error_bound + marginal.error_bound) / marginal.value;
    return est;
}

MetricEstimate MetricEvaluator::rate_cdf(double eta, const ResidualModel& model) const {
    if (!(eta > 0.0)) return {1.0, 0.0, MetricEstimate::Method::analytic};
    return coverage(std::exp2(eta) - 1.0, model);
}

MetricEstimate MetricEvaluator::average_rate(double max_eta, const ResidualModel& model) const {
    // (1/ln 2) Int coverage(theta)/(1+theta) dtheta == Int coverage(2^eta - 1) deta
    auto f = [&](double eta) { return coverage(std::exp2(eta) - 1.0, model).value; };
    const IntegralResult r = integrate(f, 0.0, max_eta, 3e-4, 40'000);

    // the SIR is bounded by S_Cmax/S_Rmin, so the tail vanishes beyond eta_hard
    const double eta_hard = std::log2(1.0 + derived_.s_cmax / derived_.s_rmin);
    double tail = 0.0;
    if (max_eta < eta_hard)
        tail = coverage(std::exp2(max_eta) - 1.0, model).value * (eta_hard - max_eta);

    MetricEstimate est;
    est.value = r.value;
    est.error_bound = r.error + tail + opts_.quad_tol * max_eta;
    return est;
}

MetricEstimate MetricEvaluator::evaluate(MetricKind kind, const Thresholds& th,
                                         const ResidualModel& model) const {
    switch (kind) {
        case MetricKind::coverage: return coverage(th.theta, model);
        case MetricKind::false_alarm: return false_alarm(th.gamma, model);
        case MetricKind::detection: return detection(th.gamma, model);
        case MetricKind::success: return success(th.theta_prime, model);
        case MetricKind::jrdccp: return jrdccp(th.theta, th.gamma, model);
        case MetricKind::jrsccp: return jrsccp(th.theta_prime, th.theta, model);
        case MetricKind::rate_cdf: return rate_cdf(th.eta, model);
        case MetricKind::avg_rate: return average_rate(20.0, model);
    }
    throw std::logic_error("evaluate: unknown metric");
}

double metric_regionwise(const MetricEvaluator& ev, MetricKind kind, const Thresholds& th) {
    const double kappa = ev.params().kappa;
    const double theta = th.theta, tp = th.theta_prime, gamma = th.gamma;
    const auto& dist = ev.distributions();
    const double s_cmax = ev.derived().s_cmax;
    const double r_c_hi = dist.comm_truncation_radius(ev.options().tail_eps);
    const double r_c_lo = ev.derived().r_cmin;
    const double tol = 0.2 * ev.options().quad_tol;
    auto F = [&ev](double x) { return ev.cdf(x); };

    // Every region here is an S_C band for fixed S_R. Map the band to a
    // comm-distance interval and integrate up to its exact edges, so no
    // quadrature panel straddles a region boundary.
    auto expect_band = [&](const std::function<double(double)>& s_c_lo_of,
                           const std::function<double(double)>& s_c_hi_of,
                           const std::function<double(double, double)>& g) {
        const ScenarioParams& p = ev.params();
        auto outer = [&](double r_r) {
            const double s_r = dist.power_radar(r_r);
            const double lo = s_c_lo_of(s_r);
            const double hi = std::min(s_c_hi_of(s_r), s_cmax);
            if (!(hi > 0.0) || hi <= lo) return 0.0;
            // S_C decreases with distance: the band flips orientation
            const double r_from = lo <= 0.0 ? r_c_hi : std::min(dist.radius_comm(lo), r_c_hi);
            const double r_to = hi >= s_cmax ? r_c_lo : std::max(dist.radius_comm(hi), r_c_lo);
            if (r_from <= r_to) return 0.0;
            auto inner = [&](double r_c) {
                return dist.pdf_r_comm(r_c) * g(s_r, dist.power_comm(r_c));
            };
            return dist.pdf_r_radar(r_r) *
                   integrate_lenient(inner, r_to, r_from, tol / 50.0, 40'000).value;
        };
        return integrate_lenient(outer, p.r_rmin, p.r_rmax, tol, 300'000).value;
    };

    auto all_s_c = [&](double) { return s_cmax; };
    auto none_s_c = [](double) { return 0.0; };

    switch (kind) {
        case MetricKind::coverage:
            return expect_band([&](double s_r) { return theta * s_r; }, all_s_c,
                               [&](double s_r, double s_c) { return F(s_c / theta - s_r); });
        case MetricKind::false_alarm:
            return 1.0 - expect_band(none_s_c, [&](double) { return gamma; },
                                     [&](double, double s_c) { return F(gamma - s_c); });
        case MetricKind::detection:
            return 1.0 -
                   expect_band(none_s_c, [&](double s_r) { return gamma - s_r * kappa; },
                               [&](double s_r, double s_c) { return F(gamma - s_r * kappa - s_c); });
        case MetricKind::success:
            return expect_band(none_s_c, [&](double s_r) { return s_r * kappa / tp; },
                               [&](double s_r, double s_c) { return F(s_r * kappa / tp - s_c); });
        case MetricKind::jrdccp: {
            // first region: above both the coverage line and the detection line
            const double term1 = expect_band(
                [&](double s_r) { return std::max(theta * s_r, gamma - s_r * kappa); }, all_s_c,
                [&](double s_r, double s_c) { return F(s_c / theta - s_r); });
            // second region: band between the combined line and the detection line
            const double term2 = expect_band(
                [&](double s_r) {
                    return theta * gamma / (theta + 1.0) -
                           s_r * theta * (kappa - 1.0) / (theta + 1.0);
                },
                [&](double s_r) { return gamma - kappa * s_r; },
                [&](double s_r, double s_c) {
                    return F(s_c / theta - s_r) - F(gamma - s_r * kappa - s_c);
                });
            return term1 + term2;
        }
        case MetricKind::jrsccp: {
            if (theta * tp > kappa) return 0.0;
            const double slope = theta * (tp + kappa) / (tp * (theta + 1.0));
            const double term1 = expect_band(
                [&](double s_r) { return slope * s_r; },
                [&](double s_r) { return s_r * kappa / tp; },
                [&](double s_r, double s_c) { return F(s_r * kappa / tp - s_c); });
            const double term2 = expect_band(
                [&](double s_r) { return theta * s_r; }, [&](double s_r) { return slope * s_r; },
                [&](double s_r, double s_c) { return F(s_c / theta - s_r); });
            return term1 + term2;
        }
        default:
            throw std::invalid_argument("metric_regionwise: unsupported metric");
    }
}

}  // namespace dfrcsg
