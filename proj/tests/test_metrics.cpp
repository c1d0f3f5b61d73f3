#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "dfrcsg/metrics.hpp"
#include "dfrcsg/montecarlo.hpp"
#include "dfrcsg/rng.hpp"

using namespace dfrcsg;

namespace {

const MetricEvaluator& engine() {
    static const ValidatedScenario sc = validate(ScenarioParams::defaults());
    static const MetricEvaluator ev(sc);
    return ev;
}

constexpr double kTol = 2e-5;  // quad_tol + table_tol

}  // namespace

TEST_CASE("limit behaviour of the marginal metrics") {
    const auto& ev = engine();
    CHECK(ev.coverage(1e-12).value == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(ev.coverage(1e9).value == doctest::Approx(0.0).epsilon(1e-6).scale(1.0));
    CHECK(ev.success(1e-12).value == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(ev.success(1e9).value == doctest::Approx(0.0).epsilon(1e-6).scale(1.0));
    CHECK(ev.false_alarm(0.0).value == 1.0);
    CHECK(ev.detection(0.0).value == 1.0);
    CHECK(ev.false_alarm(1.0).value == doctest::Approx(0.0).epsilon(1e-6).scale(1.0));
    CHECK(ev.detection(1.0).value == doctest::Approx(0.0).epsilon(1e-6).scale(1.0));
}

TEST_CASE("monotonicity on threshold grids") {
    const auto& ev = engine();
    double prev = 2.0;
    for (double db = -30.0; db <= 10.0; db += 5.0) {
        const double v = ev.coverage(db_to_linear(db)).value;
        CHECK(v <= prev + 2.0 * kTol);
        prev = v;
    }
    prev = 2.0;
    for (double db = -30.0; db <= 10.0; db += 5.0) {
        const double v = ev.success(db_to_linear(db)).value;
        CHECK(v <= prev + 2.0 * kTol);
        prev = v;
    }
    double prev_fa = 2.0, prev_pd = 2.0;
    for (double g = 0.0; g <= 4e-10; g += 5e-11) {
        const double fa = ev.false_alarm(g).value;
        const double pd = ev.detection(g).value;
        CHECK(fa <= prev_fa + 2.0 * kTol);
        CHECK(pd <= prev_pd + 2.0 * kTol);
        CHECK(pd >= fa - 2.0 * kTol);  // the radar echo only adds power
        prev_fa = fa;
        prev_pd = pd;
    }
}

TEST_CASE("jrsccp is nonincreasing in each threshold separately") {
    const auto& ev = engine();
    double prev = 2.0;
    for (double db = -25.0; db <= 0.0; db += 5.0) {
        const double v = ev.jrsccp(db_to_linear(-10.0), db_to_linear(db)).value;
        CHECK(v <= prev + 2.0 * kTol);
        prev = v;
    }
    prev = 2.0;
    for (double db = -25.0; db <= 0.0; db += 5.0) {
        const double v = ev.jrsccp(db_to_linear(db), db_to_linear(-20.0)).value;
        CHECK(v <= prev + 2.0 * kTol);
        prev = v;
    }
}

TEST_CASE("joint metric limits collapse onto the marginals") {
    const auto& ev = engine();
    const double gamma = ev.fa_threshold(0.1);

    // theta -> 0: the coverage requirement vanishes
    const double jd = ev.jrdccp(1e-7, gamma).value;
    CHECK(jd == doctest::Approx(ev.detection(gamma).value).epsilon(0.0).scale(1.0).epsilon(4e-5));

    const double js = ev.jrsccp(db_to_linear(-10.0), 1e-7).value;
    CHECK(js == doctest::Approx(ev.success(db_to_linear(-10.0)).value).scale(1.0).epsilon(4e-5));

    // gamma -> 0: detection is certain
    const double jc = ev.jrdccp(db_to_linear(-20.0), 0.0).value;
    CHECK(jc == doctest::Approx(ev.coverage(db_to_linear(-20.0)).value).scale(1.0).epsilon(4e-5));

    // theta' -> 0 through the jrsccp path reproduces coverage
    const double js2 = ev.jrsccp(1e-7, db_to_linear(-20.0)).value;
    CHECK(js2 == doctest::Approx(ev.coverage(db_to_linear(-20.0)).value).scale(1.0).epsilon(4e-5));
}

TEST_CASE("jrsccp is exactly zero above the processing-gain budget") {
    const auto& ev = engine();
    CHECK(ev.jrsccp(db_to_linear(10.0), db_to_linear(10.0)).value == 0.0);
    CHECK(ev.jrsccp(db_to_linear(0.1), db_to_linear(0.0)).value == 0.0);
    // but not with cancellation active
    CHECK(ev.jrsccp(db_to_linear(3.0), db_to_linear(3.0), ResidualModel::perfect()).value > 0.0);
}

TEST_CASE("frechet bounds sandwich the joint metrics") {
    const auto& ev = engine();
    const double gamma = ev.fa_threshold(0.1);
    for (double th_db = -25.0; th_db <= 5.0; th_db += 10.0) {
        for (double tp_db = -25.0; tp_db <= 5.0; tp_db += 10.0) {
            Thresholds th;
            th.theta = db_to_linear(th_db);
            th.theta_prime = db_to_linear(tp_db);
            th.gamma = gamma;
            const auto [lo_d, hi_d] = ev.frechet_bounds(MetricEvaluator::JointKind::jrdccp, th);
            const double jd = ev.jrdccp(th.theta, gamma).value;
            CHECK(jd >= lo_d - 4.0 * kTol);
            CHECK(jd <= hi_d + 4.0 * kTol);
            const auto [lo_s, hi_s] = ev.frechet_bounds(MetricEvaluator::JointKind::jrsccp, th);
            const double js = ev.jrsccp(th.theta_prime, th.theta).value;
            CHECK(js >= lo_s - 4.0 * kTol);
            CHECK(js <= hi_s + 4.0 * kTol);
        }
    }
    // bounds collapse when one marginal saturates
    Thresholds th;
    th.theta = 1e-9;
    th.theta_prime = db_to_linear(-10.0);
    const auto [lo, hi] = ev.frechet_bounds(MetricEvaluator::JointKind::jrsccp, th);
    CHECK(lo == doctest::Approx(hi).epsilon(1e-3));
}

TEST_CASE("bayes identities tie conditionals to the joints") {
    const auto& ev = engine();
    Thresholds th;
    th.theta = db_to_linear(-20.0);
    th.theta_prime = db_to_linear(-10.0);
    th.gamma = ev.fa_threshold(0.1);

    const double jd = ev.jrdccp(th.theta, th.gamma).value;
    const double js = ev.jrsccp(th.theta_prime, th.theta).value;
    const double pc = ev.coverage(th.theta).value;
    const double pd = ev.detection(th.gamma).value;
    const double ps = ev.success(th.theta_prime).value;

    using CK = MetricEvaluator::ConditionalKind;
    CHECK(ev.conditional(CK::coverage_given_detection, th).value * pd ==
          doctest::Approx(jd).epsilon(0.0).scale(1.0).epsilon(6e-5));
    CHECK(ev.conditional(CK::detection_given_coverage, th).value * pc ==
          doctest::Approx(jd).scale(1.0).epsilon(6e-5));
    CHECK(ev.conditional(CK::coverage_given_success, th).value * ps ==
          doctest::Approx(js).scale(1.0).epsilon(6e-5));
    CHECK(ev.conditional(CK::success_given_coverage, th).value * pc ==
          doctest::Approx(js).scale(1.0).epsilon(6e-5));

    // impossible joint -> conditional is zero
    Thresholds hard;
    hard.theta = db_to_linear(10.0);
    hard.theta_prime = db_to_linear(10.0);
    CHECK(ev.conditional(CK::success_given_coverage, hard).value == 0.0);

    // conditioning on a ~zero-probability event is an error
    Thresholds impossible;
    impossible.theta = db_to_linear(-20.0);
    impossible.theta_prime = 1e12;
    CHECK_THROWS(ev.conditional(CK::coverage_given_success, impossible));
}

TEST_CASE("fa_threshold: round trip, monotonicity, edge cases") {
    const auto& ev = engine();
    CHECK(ev.fa_threshold(1.0) == 0.0);
    const double g10 = ev.fa_threshold(0.1);
    const double g01 = ev.fa_threshold(0.01);
    CHECK(g01 > g10);
    CHECK(ev.false_alarm(g10).value == doctest::Approx(0.1).epsilon(0.0).scale(1.0).epsilon(1.2e-4));
    CHECK(ev.false_alarm(g01).value == doctest::Approx(0.01).scale(1.0).epsilon(1.2e-4));
    CHECK_THROWS(ev.fa_threshold(0.0));
    CHECK_THROWS(ev.fa_threshold(1.5));
}

TEST_CASE("generalized residual path with identity model equals the explicit region forms") {
    const auto& ev = engine();
    Rng rng(777, 0);
    for (int trial = 0; trial < 10; ++trial) {
        Thresholds th;
        th.theta = db_to_linear(rng.uniform(-25.0, 5.0));
        th.theta_prime = db_to_linear(rng.uniform(-25.0, -2.0));
        th.gamma = dbm_to_watt(rng.uniform(-100.0, -94.0));

        const MetricKind kinds[] = {MetricKind::coverage, MetricKind::false_alarm,
                                    MetricKind::detection, MetricKind::success,
                                    MetricKind::jrdccp, MetricKind::jrsccp};
        for (MetricKind k : kinds) {
            const double general = ev.evaluate(k, th).value;
            const double explicit_form = metric_regionwise(ev, k, th);
            CHECK(std::abs(general - explicit_form) < 3.0 * kTol);
        }
    }
}

TEST_CASE("perfect cancellation dominates no cancellation") {
    const auto& ev = engine();
    const ResidualModel perfect = ResidualModel::perfect();
    for (double db = -20.0; db <= 0.0; db += 5.0) {
        const double theta = db_to_linear(db);
        CHECK(ev.coverage(theta, perfect).value >= ev.coverage(theta).value - 2.0 * kTol);
        CHECK(ev.success(theta, perfect).value >= ev.success(theta).value - 2.0 * kTol);
        CHECK(ev.jrsccp(theta, theta, perfect).value >=
              ev.jrsccp(theta, theta).value - 2.0 * kTol);
    }
}

TEST_CASE("SIR metrics are invariant under a common power rescale") {
    ScenarioParams p = ScenarioParams::defaults();
    p.p_v *= 10.0;
    p.p_l *= 10.0;
    const MetricEvaluator scaled(validate(p));
    const auto& ev = engine();

    const double theta = db_to_linear(-15.0);
    const double tp = db_to_linear(-10.0);
    CHECK(std::abs(scaled.coverage(theta).value - ev.coverage(theta).value) < 3.0 * kTol);
    CHECK(std::abs(scaled.success(tp).value - ev.success(tp).value) < 3.0 * kTol);
    CHECK(std::abs(scaled.jrsccp(tp, theta).value - ev.jrsccp(tp, theta).value) < 3.0 * kTol);
    const MetricEstimate r1 = scaled.rate_cdf(1.0);
    const MetricEstimate r0 = ev.rate_cdf(1.0);
    CHECK(std::abs(r1.value - r0.value) < 3.0 * kTol);
}

TEST_CASE("rate metrics") {
    const auto& ev = engine();
    CHECK(ev.rate_cdf(0.0).value == 1.0);
    CHECK(ev.rate_cdf(1.0).value ==
          doctest::Approx(ev.coverage(1.0).value).epsilon(0.0).scale(1.0).epsilon(2.0 * kTol));

    const MetricEstimate ar = ev.average_rate();
    const ValidatedScenario sc = validate(ScenarioParams::defaults());
    Simulator sim(sc);
    const McEstimate mc = sim.estimate(MetricKind::avg_rate, {}, {}, 100000, 11);
    CHECK(std::abs(ar.value - mc.value) / mc.value < 0.02);
}

TEST_CASE("analytic matches Monte-Carlo at spot thresholds") {
    const auto& ev = engine();
    const ValidatedScenario sc = validate(ScenarioParams::defaults());
    Simulator sim(sc);

    Thresholds th;
    th.theta = db_to_linear(-20.0);
    const McEstimate c = sim.estimate(MetricKind::coverage, th, {}, 100000, 17);
    CHECK(std::abs(ev.coverage(th.theta).value - c.value) < 0.01);

    th.theta_prime = db_to_linear(-10.0);
    const McEstimate s = sim.estimate(MetricKind::jrsccp, th, {}, 100000, 17);
    CHECK(std::abs(ev.jrsccp(th.theta_prime, th.theta).value - s.value) < 0.01);

    const ResidualModel partial = ResidualModel::partial(2.0, 4.0);
    const McEstimate sp = sim.estimate(MetricKind::jrsccp, th, partial, 100000, 17);
    CHECK(std::abs(ev.jrsccp(th.theta_prime, th.theta, partial).value - sp.value) < 0.01);

    // joint detection-coverage with active residuals
    Thresholds tj;
    tj.theta = db_to_linear(-15.0);
    tj.gamma = ev.fa_threshold(0.1, partial);
    const McEstimate jp = sim.estimate(MetricKind::jrdccp, tj, partial, 50000, 23);
    CHECK(std::abs(ev.jrdccp(tj.theta, tj.gamma, partial).value - jp.value) < 0.01);
}

TEST_CASE("no-cache engine agrees with the table route") {
    const ValidatedScenario sc = validate(ScenarioParams::defaults());
    MetricOptions direct;
    direct.use_cdf_table = false;
    const MetricEvaluator ev_direct(sc, direct);
    const auto& ev = engine();
    const double theta = db_to_linear(-15.0);
    CHECK(std::abs(ev_direct.coverage(theta).value - ev.coverage(theta).value) < 5e-5);
}

TEST_CASE("interference-free scenario still produces valid metrics") {
    ScenarioParams p = ScenarioParams::defaults();
    p.lambda_i = 0.0;
    const MetricEvaluator ev(validate(p));
    const double v = ev.coverage(db_to_linear(-10.0)).value;
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
    // with no interference the SIR is S_C/S_R; MC cross-check
    Simulator sim(validate(p));
    Thresholds th;
    th.theta = db_to_linear(-10.0);
    const McEstimate m = sim.estimate(MetricKind::coverage, th, {}, 50000, 5);
    CHECK(std::abs(v - m.value) < 0.01);
}
