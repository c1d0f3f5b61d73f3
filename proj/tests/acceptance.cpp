// Acceptance suite: exercises every top-level requirement end to end and
// prints one PASS/FAIL line per criterion. Exit code is the number of
// failed criteria.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "dfrcsg/cli.hpp"
#include "dfrcsg/interference.hpp"
#include "dfrcsg/metrics.hpp"
#include "dfrcsg/montecarlo.hpp"
#include "dfrcsg/optimize.hpp"
#include "dfrcsg/rng.hpp"

using namespace dfrcsg;
namespace fs = std::filesystem;

namespace {

struct Reporter {
    int failures = 0;

    void result(int id, const std::string& name, bool pass, const std::string& detail) {
        std::printf("[%s] %d. %s — %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
        std::fflush(stdout);
        if (!pass) ++failures;
    }

    void guarded(int id, const std::string& name,
                 const std::function<std::pair<bool, std::string>()>& body) {
        try {
            const auto [pass, detail] = body();
            result(id, name, pass, detail);
        } catch (const std::exception& e) {
            result(id, name, false, std::string("exception: ") + e.what());
        }
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::vector<double> db_grid(double lo, double hi, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

constexpr long kMcN = 100'000;
constexpr double kTol = 2e-5;  // quad_tol + table_tol of the default engine

}  // namespace

int main() {
    const ValidatedScenario scenario = validate(ScenarioParams::defaults());
    const MetricEvaluator ev(scenario);
    Simulator sim(scenario);
    Reporter rep;

    // 1. analytic and Monte-Carlo estimates agree within 0.01 everywhere
    rep.guarded(1, "oracle equivalence (6 metrics, threshold grids, n=1e5)", [&] {
        double worst = 0.0;
        std::string worst_at = "-";
        auto track = [&](const std::string& tag, double analytic, double mc) {
            const double d = std::abs(analytic - mc);
            if (d > worst) {
                worst = d;
                worst_at = tag;
            }
        };

        const auto grid = db_grid(-30.0, 10.0, 20);
        std::uint64_t seed = 1000;
        for (double db : grid) {
            Thresholds th;
            th.theta = db_to_linear(db);
            track("coverage@" + fmt(db) + "dB", ev.coverage(th.theta).value,
                  sim.estimate(MetricKind::coverage, th, {}, kMcN, ++seed).value);
        }
        for (double db : grid) {
            Thresholds th;
            th.theta_prime = db_to_linear(db);
            track("success@" + fmt(db) + "dB", ev.success(th.theta_prime).value,
                  sim.estimate(MetricKind::success, th, {}, kMcN, ++seed).value);
        }
        std::vector<double> gammas;
        for (double pfa : {0.5, 0.1, 0.01}) {
            const double gamma = ev.fa_threshold(pfa);
            gammas.push_back(gamma);
            Thresholds th;
            th.gamma = gamma;
            track("false_alarm@pfa=" + fmt(pfa), ev.false_alarm(gamma).value,
                  sim.estimate(MetricKind::false_alarm, th, {}, kMcN, ++seed).value);
            track("detection@pfa=" + fmt(pfa), ev.detection(gamma).value,
                  sim.estimate(MetricKind::detection, th, {}, kMcN, ++seed).value);
        }
        for (double db : grid) {
            Thresholds th;
            th.theta = db_to_linear(db);
            th.gamma = gammas[1];  // P_FA = 0.1
            track("jrdccp@" + fmt(db) + "dB", ev.jrdccp(th.theta, th.gamma).value,
                  sim.estimate(MetricKind::jrdccp, th, {}, kMcN, ++seed).value);
        }
        for (double db : grid) {
            Thresholds th;
            th.theta = db_to_linear(db);
            th.theta_prime = db_to_linear(-10.0);
            track("jrsccp@" + fmt(db) + "dB", ev.jrsccp(th.theta_prime, th.theta).value,
                  sim.estimate(MetricKind::jrsccp, th, {}, kMcN, ++seed).value);
        }
        return std::make_pair(worst <= 0.01,
                              "max |analytic-mc| = " + fmt(worst) + " at " + worst_at +
                                  " (limit 0.01)");
    });

    // 2. characteristic-function inversion against independent oracles
    rep.guarded(2, "inversion correctness (synthetic LT 1e-4, interference KS 0.01)", [&] {
        double worst_exp = 0.0;
        const double lambda = 2.5e12;
        auto log_cf = [lambda](double tau) { return -std::log(Complex(1.0, -tau / lambda)); };
        for (int i = 1; i <= 50; ++i) {
            const double x = 6.0 * i / 50.0 / lambda;
            const double exact = -std::expm1(-lambda * x);
            worst_exp = std::max(worst_exp,
                                 std::abs(gil_pelaez_cdf(log_cf, 1.0 / lambda, x).cdf - exact));
        }
        const auto samples = sim.interference_samples(kMcN, 77);
        const double ks = ks_distance(samples, [&](double x) { return ev.cdf(x); });
        const bool pass = worst_exp <= 1e-4 && ks <= 0.01;
        return std::make_pair(pass, "synthetic max err = " + fmt(worst_exp) +
                                        " (limit 1e-4), interference KS = " + fmt(ks) +
                                        " (limit 0.01)");
    });

    // 3. structural identities
    rep.guarded(3, "structural identities (orderings, bounds, Bayes, limits)", [&] {
        std::vector<std::string> problems;

        double prev_pd = 1.0;
        for (int i = 0; i < 50; ++i) {
            const double gamma = 4e-10 * i / 49.0;
            const double fa = ev.false_alarm(gamma).value;
            const double pd = ev.detection(gamma).value;
            if (fa > pd + 2.0 * kTol) problems.push_back("fa>pd@i=" + std::to_string(i));
            if (pd > prev_pd + 2.0 * kTol) problems.push_back("pd not monotone");
            prev_pd = pd;
        }

        const auto th_grid = db_grid(-30.0, 6.0, 10);
        const double gamma01 = ev.fa_threshold(0.1);
        std::vector<double> gamma_grid;
        for (int i = 0; i < 10; ++i) gamma_grid.push_back(dbm_to_watt(-105.0 + 2.0 * i));
        std::vector<double> cov(10), det(10), suc(10);
        for (int i = 0; i < 10; ++i) {
            cov[i] = ev.coverage(db_to_linear(th_grid[i])).value;
            det[i] = ev.detection(gamma_grid[i]).value;
            suc[i] = ev.success(db_to_linear(th_grid[i])).value;
        }
        for (int i = 0; i < 10; ++i) {
            for (int j = 0; j < 10; ++j) {
                const double jd = ev.jrdccp(db_to_linear(th_grid[i]), gamma_grid[j]).value;
                const double lo = std::max(0.0, det[j] + cov[i] - 1.0);
                const double hi = std::min(det[j], cov[i]);
                if (jd < lo - 4.0 * kTol || jd > hi + 4.0 * kTol)
                    problems.push_back("frechet jrdccp@" + std::to_string(i) + "," + std::to_string(j));
                const double js =
                    ev.jrsccp(db_to_linear(th_grid[j]), db_to_linear(th_grid[i])).value;
                const double lo_s = std::max(0.0, suc[j] + cov[i] - 1.0);
                const double hi_s = std::min(suc[j], cov[i]);
                if (js < lo_s - 4.0 * kTol || js > hi_s + 4.0 * kTol)
                    problems.push_back("frechet jrsccp@" + std::to_string(i) + "," + std::to_string(j));
            }
        }

        // Bayes identities through the conditional API
        Thresholds tb;
        tb.theta = db_to_linear(-20.0);
        tb.theta_prime = db_to_linear(-10.0);
        tb.gamma = gamma01;
        using CK = MetricEvaluator::ConditionalKind;
        const double jd = ev.jrdccp(tb.theta, tb.gamma).value;
        const double js = ev.jrsccp(tb.theta_prime, tb.theta).value;
        if (std::abs(ev.conditional(CK::coverage_given_detection, tb).value *
                         ev.detection(tb.gamma).value - jd) > 3.0 * kTol)
            problems.push_back("bayes C|D");
        if (std::abs(ev.conditional(CK::detection_given_coverage, tb).value *
                         ev.coverage(tb.theta).value - jd) > 3.0 * kTol)
            problems.push_back("bayes D|C");
        if (std::abs(ev.conditional(CK::coverage_given_success, tb).value *
                         ev.success(tb.theta_prime).value - js) > 3.0 * kTol)
            problems.push_back("bayes C|S");
        if (std::abs(ev.conditional(CK::success_given_coverage, tb).value *
                         ev.coverage(tb.theta).value - js) > 3.0 * kTol)
            problems.push_back("bayes S|C");

        // exact zero above the processing-gain budget: theta_dB + theta'_dB > 0
        if (ev.jrsccp(db_to_linear(5.0), db_to_linear(-4.9)).value != 0.0)
            problems.push_back("jrsccp not exactly zero");
        if (ev.jrsccp(db_to_linear(20.0), db_to_linear(20.0)).value != 0.0)
            problems.push_back("jrsccp not exactly zero (high)");

        // vanishing-threshold limits
        if (std::abs(ev.jrdccp(1e-7, gamma01).value - ev.detection(gamma01).value) > 2.0 * kTol)
            problems.push_back("jrdccp theta->0 limit");
        if (std::abs(ev.jrsccp(db_to_linear(-10.0), 1e-7).value -
                     ev.success(db_to_linear(-10.0)).value) > 2.0 * kTol)
            problems.push_back("jrsccp theta->0 limit");

        return std::make_pair(problems.empty(),
                              problems.empty() ? std::string("all identities hold")
                                               : "violations: " + problems.front() + " (+" +
                                                     std::to_string(problems.size() - 1) + ")");
    });

    // 4. scale invariance and the ratio-reduced optimizer
    rep.guarded(4, "scale invariance and optimizer consistency", [&] {
        ScenarioParams scaled = ScenarioParams::defaults();
        scaled.p_v *= 10.0;
        scaled.p_l *= 10.0;
        const MetricEvaluator ev10(validate(scaled));
        double worst = 0.0;
        const double theta = db_to_linear(-15.0);
        const double tp = db_to_linear(-10.0);
        worst = std::max(worst, std::abs(ev10.coverage(theta).value - ev.coverage(theta).value));
        worst = std::max(worst, std::abs(ev10.success(tp).value - ev.success(tp).value));
        worst = std::max(worst, std::abs(ev10.jrsccp(tp, theta).value - ev.jrsccp(tp, theta).value));
        worst = std::max(worst, std::abs(ev10.rate_cdf(1.0).value - ev.rate_cdf(1.0).value));
        Thresholds tc;
        tc.theta = theta;
        tc.theta_prime = tp;
        using CK = MetricEvaluator::ConditionalKind;
        worst = std::max(worst, std::abs(ev10.conditional(CK::success_given_coverage, tc).value -
                                         ev.conditional(CK::success_given_coverage, tc).value));
        const bool scale_ok = worst <= 3.0 * kTol;

        PowerBox box;
        box.p_l_max_dbm = box.p_v_max_dbm = 24.0;
        box.step_db = 4.0;
        const PowerOptimum ratio = optimize_powers(ScenarioParams::defaults(), tp, theta, box);
        const PowerOptimum full =
            optimize_powers(ScenarioParams::defaults(), tp, theta, box, {}, {}, false);
        const bool opt_ok = std::abs(ratio.value - full.value) <= 2.0 * kTol;
        return std::make_pair(scale_ok && opt_ok,
                              "max SIR-metric shift = " + fmt(worst) + " (limit " +
                                  fmt(3.0 * kTol) + "), |ratio-full| = " +
                                  fmt(std::abs(ratio.value - full.value)) + " (limit " +
                                  fmt(2.0 * kTol) + ")");
    });

    // 5. interference-cancellation model
    rep.guarded(5, "cancellation model (identity path, dominance, exact algebra)", [&] {
        std::vector<std::string> problems;
        if (zeta(1.0, 2.0, 4.0) != 1.0) problems.push_back("zeta(1) != 1");
        for (double c : {0.3, 5.0}) {
            const Residuals base = residuals(2.0, 7.0, ResidualModel::partial(2.0, 4.0));
            const Residuals scaled = residuals(2.0 * c, 7.0 * c, ResidualModel::partial(2.0, 4.0));
            if (std::abs(scaled.zeta_r - c * base.zeta_r) > 1e-14 * scaled.zeta_r ||
                std::abs(scaled.zeta_c - c * base.zeta_c) > 1e-14 * scaled.zeta_c)
                problems.push_back("homogeneity@" + fmt(c));
        }
        // the generalized path with mode none IS the no-cancellation metric
        const double a = ev.jrsccp(db_to_linear(-10.0), db_to_linear(-20.0)).value;
        const double b =
            ev.jrsccp(db_to_linear(-10.0), db_to_linear(-20.0), ResidualModel::none()).value;
        if (a != b) problems.push_back("identity-residual path deviates");

        const ResidualModel perfect = ResidualModel::perfect();
        for (double db = -20.0; db <= 0.0; db += 4.0) {
            const double theta = db_to_linear(db);
            if (ev.coverage(theta, perfect).value < ev.coverage(theta).value - 2.0 * kTol)
                problems.push_back("coverage dominance@" + fmt(db));
            if (ev.jrsccp(theta, theta, perfect).value < ev.jrsccp(theta, theta).value - 2.0 * kTol)
                problems.push_back("jrsccp dominance@" + fmt(db));
        }
        return std::make_pair(problems.empty(),
                              problems.empty() ? std::string("identity path exact, dominance holds")
                                               : "violations: " + problems.front());
    });

    // 6. distribution correctness
    rep.guarded(6, "distribution correctness (normalization, samplers, fading power)", [&] {
        const DesiredLinkDistributions dist(scenario, derive(scenario));
        const ScenarioParams p = ScenarioParams::defaults();
        const auto& d = dist.derived();

        const double n1 =
            integrate([&](double r) { return dist.pdf_r_radar(r); }, p.r_rmin, p.r_rmax, 1e-9).value;
        const double n2 = integrate([&](double r) { return dist.pdf_r_comm(r); }, d.r_cmin,
                                    dist.comm_truncation_radius(1e-12), 1e-9)
                              .value;
        const double n3 = integrate([&](double s) { return dist.pdf_power_radar(s); }, d.s_rmin,
                                    d.s_rmax, 1e-9)
                              .value;
        const double n4 = integrate([&](double s) { return dist.pdf_power_comm(s); },
                                    dist.power_comm(dist.comm_truncation_radius(1e-12)), d.s_cmax,
                                    1e-9)
                              .value;
        const double norm_err = std::max({std::abs(n1 - 1.0), std::abs(n2 - 1.0),
                                          std::abs(n3 - 1.0), std::abs(n4 - 1.0)});

        SimulatorOptions inv;
        inv.radar_sampling = RadarRangeSampling::inverse_cdf;
        Simulator sim_inv(scenario, inv);
        std::vector<double> rej, invs;
        for (long i = 0; i < 10000; ++i) {
            rej.push_back(sim.sample_realization(2025, static_cast<std::uint64_t>(i)).r_radar);
            invs.push_back(sim_inv.sample_realization(2026, static_cast<std::uint64_t>(i)).r_radar);
        }
        std::sort(rej.begin(), rej.end());
        std::sort(invs.begin(), invs.end());
        const double ks2 = ks_two_sample_distance(rej, invs);
        const double p_value = ks_p_value(ks2, 10000.0 * 10000.0 / 20000.0);

        double fading_sum = 0.0;
        long fading_count = 0;
        for (std::uint64_t i = 0; fading_count < 1'000'000; ++i) {
            const Realization r = sim.sample_realization(31337, i);
            for (double h : r.fading) {
                fading_sum += h;
                if (++fading_count == 1'000'000) break;
            }
        }
        const double mean_h = fading_sum / static_cast<double>(fading_count);

        const bool pass = norm_err <= 1e-5 && p_value > 0.01 && std::abs(mean_h - 1.0) <= 0.005;
        return std::make_pair(pass, "max normalization err = " + fmt(norm_err) +
                                        " (limit 1e-5), sampler KS p = " + fmt(p_value) +
                                        " (>0.01), E[|h|^2] = " + fmt(mean_h) + " (1 +- 0.005)");
    });

    // 7. determinism
    rep.guarded(7, "determinism (bit-identical estimates and CSV reruns)", [&] {
        Thresholds th;
        th.theta = db_to_linear(-20.0);
        const McEstimate m1 = sim.estimate(MetricKind::coverage, th, {}, 50'000, 99);
        const McEstimate m2 = sim.estimate(MetricKind::coverage, th, {}, 50'000, 99);
        const bool est_ok = m1.value == m2.value && m1.half_width == m2.half_width;

        const std::string config = std::string(TEST_CONFIG_DIR) + "/two_lane_default.json";
        const fs::path dir = fs::temp_directory_path();
        const fs::path mc1 = dir / "dfrcsg_acc_mc1.csv", mc2 = dir / "dfrcsg_acc_mc2.csv";
        const fs::path an1 = dir / "dfrcsg_acc_an1.csv", an2 = dir / "dfrcsg_acc_an2.csv";
        int rc = 0;
        for (const auto& [out, seedrun] :
             {std::make_pair(mc1, "1"), std::make_pair(mc2, "1")}) {
            rc |= cli::run({"mc", "--config", config, "--metric", "jrsccp", "--theta-db",
                            "-25:-15:5", "--theta-p-db", "-10", "--n", "20000", "--seed", seedrun,
                            "--out", out.string()});
        }
        for (const fs::path& out : {an1, an2}) {
            rc |= cli::run({"analytic", "--config", config, "--metric", "coverage", "--theta-db",
                            "-20:-10:5", "--out", out.string()});
        }
        const bool csv_ok = rc == 0 && slurp(mc1) == slurp(mc2) && slurp(an1) == slurp(an2) &&
                            !slurp(mc1).empty() && !slurp(an1).empty();
        for (const fs::path& f : {mc1, mc2, an1, an2}) {
            fs::remove(f);
            fs::remove(f.string() + ".manifest.json");
        }
        return std::make_pair(est_ok && csv_ok,
                              est_ok && csv_ok ? std::string("estimates and CSV outputs reproduce")
                                               : std::string("mismatch detected"));
    });

    std::printf("%d/7 criteria passed\n", 7 - rep.failures);
    return rep.failures;
}
