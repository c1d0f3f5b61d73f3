#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "dfrcsg/cancellation.hpp"
#include "dfrcsg/metric_kind.hpp"
#include "dfrcsg/rng.hpp"
#include "dfrcsg/scenario.hpp"

namespace dfrcsg {

// One sampled road configuration as seen by the typical vehicle.
struct Realization {
    double r_radar = 0.0;              // distance to the vehicle ahead (m)
    double r_comm = 0.0;               // parallel distance to the nearest light (m)
    std::vector<double> interferer_r;  // opposite-lane distances (m)
    std::vector<double> fading;        // |h_i|^2 per interferer
    double s_r = 0.0;                  // radar echo power (W)
    double s_c = 0.0;                  // communication power (W)
    double interference = 0.0;         // aggregate interfering power (W)
};

struct McEstimate {
    double value = 0.0;
    double half_width = 0.0;  // 95% normal-approximation confidence half-width
    long n = 0;
    std::uint64_t seed = 0;
};

enum class RadarRangeSampling {
    rejection,    // simulate the lane process, retry while empty, take the minimum
    inverse_cdf,  // invert the truncated-exponential CDF directly
};

struct SimulatorOptions {
    RadarRangeSampling radar_sampling = RadarRangeSampling::rejection;
    // interferer line truncated where the mean tail power drops below
    // margin * S_Rmin (the smallest power scale of interest)
    double truncation_margin = 1e-6;
    // exact (Clopper-Pearson) intervals instead of the normal
    // approximation; useful at small n or extreme probabilities
    bool exact_ci = false;
};

/**
 * Monte-Carlo oracle. Re-derives every physical constant from the raw
 * parameters (not from DerivedQuantities) so a bug in the analytic
 * derivation cannot confirm itself. Realization i is a pure function of
 * (seed, i); estimates are bit-identical for a fixed (seed, n, scenario)
 * at any thread count.
 */
class Simulator {
public:
    explicit Simulator(const ValidatedScenario& scenario, const SimulatorOptions& opts = {});

    Realization sample_realization(std::uint64_t seed, std::uint64_t index) const;

    // empirical frequency of the metric's defining event (mean value for
    // avg_rate) over n realizations; requires n >= 1000
    McEstimate estimate(MetricKind kind, const Thresholds& th, const ResidualModel& model,
                        long n, std::uint64_t seed) const;

    // sorted interference draws (the empirical CDF)
    std::vector<double> interference_samples(long n, std::uint64_t seed) const;

    double truncation_radius() const { return r_trunc_; }
    double min_comm_distance() const { return r_cmin_; }
    double min_interferer_distance() const { return r_imin_; }

    const SimulatorOptions& options() const { return opts_; }

private:
    void sample_core(Rng& rng, double& s_r, double& s_c, double& interference,
                     Realization* full) const;
    double sample_fading(Rng& rng) const;
    double sample_r_radar(Rng& rng) const;

    ScenarioParams p_;
    SimulatorOptions opts_;
    double friis_r_, friis_c_, friis_i_;  // P G c^2 / (4 pi f_c^2 beta)
    double r_cmin_, r_imin_;
    double r_trunc_;
    double nu_, sigma_;  // Rician components, E[|h|^2] = 1
};

// --- small statistics helpers used by the validation harness ---

struct EmpiricalCdf {
    std::vector<double> sorted;  // ascending
    double operator()(double x) const;
};

// sup_x |F_n(x) - F(x)| over the sample points
double ks_distance(const std::vector<double>& sorted_samples,
                   const std::function<double(double)>& cdf);

double ks_two_sample_distance(const std::vector<double>& sorted_a,
                              const std::vector<double>& sorted_b);

// asymptotic Kolmogorov p-value for statistic d and effective sample size n_eff
double ks_p_value(double d, double n_eff);

// exact binomial (Clopper-Pearson) interval for k successes out of n
std::pair<double, double> clopper_pearson(long k, long n, double alpha = 0.05);

}  // namespace dfrcsg
