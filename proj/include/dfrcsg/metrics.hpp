#pragma once

#include <memory>
#include <utility>

#include "dfrcsg/cancellation.hpp"
#include "dfrcsg/distributions.hpp"
#include "dfrcsg/interference.hpp"
#include "dfrcsg/metric_kind.hpp"
#include "dfrcsg/scenario.hpp"

namespace dfrcsg {

struct MetricEstimate {
    enum class Method { analytic, monte_carlo };
    double value = 0.0;
    double error_bound = 0.0;
    Method method = Method::analytic;
};

struct MetricOptions {
    double quad_tol = 1e-5;   // restricted-expectation tolerance
    double gp_tol = 1e-6;     // Gil-Pelaez tolerance
    double table_tol = 1e-5;  // interference CDF table tolerance
    double tail_eps = 1e-8;   // comm-distance truncation tail mass
    bool use_cdf_table = true;  // false: invert per query (--no-cache route)
};

/**
 * Analytic metric engine. Every metric is one generalized implementation
 * over the interference-cancellation residuals; identity residuals
 * reproduce the no-cancellation forms through the same code path. Each
 * value is a restricted expectation over (S_R, S_C) of the interference
 * CDF evaluated at the metric's bounds, with negative CDF differences
 * clamped to zero. All methods are const and safe to call concurrently.
 */
class MetricEvaluator {
public:
    explicit MetricEvaluator(const ValidatedScenario& scenario, const MetricOptions& opts = {});
    // Reuse a prebuilt CDF table (it depends on the interference side of
    // the scenario only); the power-sweep optimizer shares tables this way.
    MetricEvaluator(const ValidatedScenario& scenario, const MetricOptions& opts,
                    std::shared_ptr<const InterferenceCdf> table);

    MetricEstimate coverage(double theta, const ResidualModel& model = {}) const;
    MetricEstimate false_alarm(double gamma, const ResidualModel& model = {}) const;
    MetricEstimate detection(double gamma, const ResidualModel& model = {}) const;
    MetricEstimate success(double theta_prime, const ResidualModel& model = {}) const;
    MetricEstimate jrdccp(double theta, double gamma, const ResidualModel& model = {}) const;
    MetricEstimate jrsccp(double theta_prime, double theta, const ResidualModel& model = {}) const;

    // gamma such that false_alarm(gamma) = target within 1e-4
    double fa_threshold(double target_pfa, const ResidualModel& model = {}) const;

    enum class JointKind { jrdccp, jrsccp };
    // Frechet bounds (lower, upper) from the marginals
    std::pair<double, double> frechet_bounds(JointKind kind, const Thresholds& th,
                                             const ResidualModel& model = {}) const;

    enum class ConditionalKind {
        coverage_given_detection,
        coverage_given_success,
        detection_given_coverage,
        success_given_coverage,
    };
    MetricEstimate conditional(ConditionalKind kind, const Thresholds& th,
                               const ResidualModel& model = {}) const;

    MetricEstimate rate_cdf(double eta, const ResidualModel& model = {}) const;
    MetricEstimate average_rate(double max_eta = 20.0, const ResidualModel& model = {}) const;

    // dispatcher used by the CLI
    MetricEstimate evaluate(MetricKind kind, const Thresholds& th,
                            const ResidualModel& model = {}) const;

    double cdf(double x) const;  // interference CDF, table or direct route

    const ScenarioParams& params() const { return scenario_.params(); }
    const DerivedQuantities& derived() const { return derived_; }
    const DesiredLinkDistributions& distributions() const { return dist_; }
    const InterferenceLaplace& laplace() const { return laplace_; }
    const InterferenceCdf& cdf_table() const;
    const MetricOptions& options() const { return opts_; }

private:
    IntegralResult expect(const std::function<double(double, double)>& g, const Region& region) const;
    MetricEstimate finish(const IntegralResult& r, bool complement) const;

    ValidatedScenario scenario_;
    DerivedQuantities derived_;
    MetricOptions opts_;
    DesiredLinkDistributions dist_;
    InterferenceLaplace laplace_;
    std::shared_ptr<const InterferenceCdf> table_;
    std::shared_ptr<const LtExponentCache> lt_cache_;  // direct route
};

// Second evaluation route: the no-cancellation regions written out as
// explicit line bounds in the (S_R, S_C) plane and integrated term by
// term up to their exact edges. Validates the region algebra of the
// generalized residual implementation; SIR/threshold metrics only.
double metric_regionwise(const MetricEvaluator& ev, MetricKind kind, const Thresholds& th);

}  // namespace dfrcsg
