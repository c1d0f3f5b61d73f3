#include "dfrcsg/optimize.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace dfrcsg {

PowerOptimum optimize_powers(const ScenarioParams& base, double theta_prime, double theta,
                             const PowerBox& box, const ResidualModel& model,
                             const MetricOptions& mopts, bool ratio_reduction,
                             std::vector<SurfacePoint>* surface) {
    if (!(box.p_l_min_dbm < box.p_l_max_dbm) || !(box.p_v_min_dbm < box.p_v_max_dbm))
        throw std::invalid_argument("optimize_powers: power box must have min < max per axis");
    if (!(box.step_db > 0.0)) throw std::invalid_argument("optimize_powers: step must be positive");

    // one CDF table per distinct vehicle power; the interference side of
    // the scenario depends on P_V only
    std::map<double, std::shared_ptr<const InterferenceCdf>> tables;

    auto eval_point = [&](double p_l_dbm, double p_v_dbm, double* err) {
        ScenarioParams p = base;
        p.p_l = dbm_to_watt(p_l_dbm);
        p.p_v = dbm_to_watt(p_v_dbm);
        const ValidatedScenario scenario = validate(p);
        std::shared_ptr<const InterferenceCdf> table;
        if (mopts.use_cdf_table) {
            auto it = tables.find(p_v_dbm);
            if (it == tables.end()) {
                const DerivedQuantities d = derive(scenario);
                const InterferenceLaplace lap(scenario, d);
                InterferenceCdf::BuildOptions b;
                b.tol = mopts.table_tol;
                b.gp_tol = mopts.gp_tol;
                it = tables.emplace(p_v_dbm, std::make_shared<const InterferenceCdf>(
                                                  InterferenceCdf::build(lap, b)))
                         .first;
            }
            table = it->second;
        }
        MetricEvaluator ev(scenario, mopts, table);
        const MetricEstimate est = ev.jrsccp(theta_prime, theta, model);
        if (err) *err = est.error_bound;
        return est.value;
    };

    PowerOptimum best;
    best.value = -1.0;
    auto consider = [&](double p_l_dbm, double p_v_dbm, double value, double err) {
        const bool better =
            value > best.value ||
            (value == best.value &&
             (p_v_dbm < best.p_v_dbm || (p_v_dbm == best.p_v_dbm && p_l_dbm < best.p_l_dbm)));
        if (better) best = {p_l_dbm, p_v_dbm, value, err, best.evaluations};
    };

    long evals = 0;
    if (ratio_reduction) {
        // the metric is a function of P_L/P_V only; walk the ratio range
        // and realize each ratio at the lowest feasible total power
        const double r_min = box.p_l_min_dbm - box.p_v_max_dbm;
        const double r_max = box.p_l_max_dbm - box.p_v_min_dbm;
        const long steps = std::lround((r_max - r_min) / box.step_db);
        for (long i = 0; i <= steps; ++i) {
            const double ratio = std::min(r_min + static_cast<double>(i) * box.step_db, r_max);
            const double p_v = std::max(box.p_v_min_dbm, box.p_l_min_dbm - ratio);
            const double p_l = p_v + ratio;
            double err = 0.0;
            const double value = eval_point(p_l, p_v, &err);
            ++evals;
            if (surface) surface->push_back({p_l, p_v, value});
            consider(p_l, p_v, value, err);
        }
    } else {
        const long nl = std::lround((box.p_l_max_dbm - box.p_l_min_dbm) / box.step_db);
        const long nv = std::lround((box.p_v_max_dbm - box.p_v_min_dbm) / box.step_db);
        for (long iv = 0; iv <= nv; ++iv) {
            const double p_v = std::min(box.p_v_min_dbm + static_cast<double>(iv) * box.step_db,
                                        box.p_v_max_dbm);
            for (long il = 0; il <= nl; ++il) {
                const double p_l = std::min(box.p_l_min_dbm + static_cast<double>(il) * box.step_db,
                                            box.p_l_max_dbm);
                double err = 0.0;
                const double value = eval_point(p_l, p_v, &err);
                ++evals;
                if (surface) surface->push_back({p_l, p_v, value});
                consider(p_l, p_v, value, err);
            }
        }
    }
    best.evaluations = evals;
    return best;
}

}  // namespace dfrcsg
