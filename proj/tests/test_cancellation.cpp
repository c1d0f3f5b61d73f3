#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dfrcsg/cancellation.hpp"

using namespace dfrcsg;

TEST_CASE("zeta profile") {
    CHECK(zeta(0.0, 2.0, 4.0) == 2.0);
    CHECK(zeta(1.0, 2.0, 4.0) == 1.0);  // 2 / (1 + 1)
    CHECK(zeta(1e12, 2.0, 4.0) < 1e-40);
    // strictly decreasing
    double prev = zeta(0.0, 2.0, 4.0);
    for (double x = 0.25; x < 8.0; x += 0.25) {
        const double z = zeta(x, 2.0, 4.0);
        CHECK(z < prev);
        prev = z;
    }
    CHECK_THROWS(zeta(-1.0, 2.0, 4.0));
    CHECK_THROWS(zeta(1.0, 0.0, 4.0));
}

TEST_CASE("residual modes") {
    const Residuals none = residuals(3.0, 5.0, ResidualModel::none());
    CHECK(none.zeta_r == 3.0);
    CHECK(none.zeta_c == 5.0);

    const Residuals both = residuals(3.0, 5.0, ResidualModel::perfect());
    CHECK(both.zeta_r == 0.0);
    CHECK(both.zeta_c == 0.0);

    // perfect cancellation at the radar receiver removes the comm signal
    const Residuals at_radar = residuals(3.0, 5.0, ResidualModel::perfect(true, false));
    CHECK(at_radar.zeta_c == 0.0);
    CHECK(at_radar.zeta_r == 3.0);
    const Residuals at_comm = residuals(3.0, 5.0, ResidualModel::perfect(false, true));
    CHECK(at_comm.zeta_r == 0.0);
    CHECK(at_comm.zeta_c == 5.0);

    // equal powers with a=2, b=4: zeta(1) = 1, residuals pass through
    const Residuals eq = residuals(4.0, 4.0, ResidualModel::partial(2.0, 4.0));
    CHECK(eq.zeta_r == doctest::Approx(4.0));
    CHECK(eq.zeta_c == doctest::Approx(4.0));
}

TEST_CASE("partial residuals are homogeneous of degree one") {
    const ResidualModel m = ResidualModel::partial(2.0, 4.0);
    for (double c : {0.5, 3.0, 1e6}) {
        const Residuals base = residuals(2.0, 7.0, m);
        const Residuals scaled = residuals(2.0 * c, 7.0 * c, m);
        CHECK(scaled.zeta_r == doctest::Approx(c * base.zeta_r).epsilon(1e-14));
        CHECK(scaled.zeta_c == doctest::Approx(c * base.zeta_c).epsilon(1e-14));
    }
}

TEST_CASE("a > 1 amplifies interference at low power ratios") {
    // S_R/S_C < (a-1)^(1/b) means the cancelling receiver sees a low SIR
    // and the residual exceeds the original echo power
    const ResidualModel m = ResidualModel::partial(2.0, 4.0);
    const Residuals r = residuals(1.0, 2.0, m);  // ratio 0.5 < 1
    CHECK(r.zeta_r > 1.0);
}

TEST_CASE("degenerate powers follow the formula limits") {
    const ResidualModel m = ResidualModel::partial(2.0, 4.0);
    const Residuals r = residuals(3.0, 0.0, m);
    CHECK(r.zeta_r == 0.0);  // infinite radar SIR: echo fully cancelled
    CHECK(r.zeta_c == 0.0);
}
