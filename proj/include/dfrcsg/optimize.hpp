#pragma once

#include <vector>

#include "dfrcsg/cancellation.hpp"
#include "dfrcsg/metrics.hpp"
#include "dfrcsg/scenario.hpp"

namespace dfrcsg {

struct PowerBox {
    double p_l_min_dbm = 0.0;
    double p_l_max_dbm = 60.0;
    double p_v_min_dbm = 0.0;
    double p_v_max_dbm = 60.0;
    double step_db = 1.0;
};

struct SurfacePoint {
    double p_l_dbm;
    double p_v_dbm;
    double value;
};

struct PowerOptimum {
    double p_l_dbm = 0.0;
    double p_v_dbm = 0.0;
    double value = 0.0;
    double error_bound = 0.0;
    long evaluations = 0;
};

/**
 * argmax of the joint SIR metric over the power box.
 *
 * The metric depends on (P_L, P_V) only through their ratio (every power
 * and the interference scale together), so by default a 1-D ratio grid is
 * searched and ties break toward the lowest total power. The full 2-D
 * grid is available as a cross-check (`ratio_reduction = false`); CDF
 * tables are cached per distinct P_V value either way. If `surface` is
 * given, every evaluated grid point is appended in grid order.
 */
PowerOptimum optimize_powers(const ScenarioParams& base, double theta_prime, double theta,
                             const PowerBox& box, const ResidualModel& model = {},
                             const MetricOptions& mopts = {}, bool ratio_reduction = true,
                             std::vector<SurfacePoint>* surface = nullptr);

}  // namespace dfrcsg
