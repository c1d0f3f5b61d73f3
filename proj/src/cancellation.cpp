#include "dfrcsg/cancellation.hpp"

#include <cmath>
#include <stdexcept>

namespace dfrcsg {

double zeta(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("zeta: require a > 0 and b > 0");
    if (!(x >= 0.0)) throw std::invalid_argument("zeta: require x >= 0");
    if (std::isinf(x)) return 0.0;
    return a / (1.0 + std::pow(x, b));
}

Residuals residuals(double s_r, double s_c, const ResidualModel& model) {
    switch (model.mode) {
        case ResidualModel::Mode::none:
            return {s_r, s_c};
        case ResidualModel::Mode::perfect:
            return {model.at_comm ? 0.0 : s_r, model.at_radar ? 0.0 : s_c};
        case ResidualModel::Mode::partial: {
            // limits: at s_c = 0 the radar SIR is infinite, so the echo is
            // fully cancelled (zeta_R -> 0) and zeta_C = 0 trivially
            double zr, zc;
            if (s_c <= 0.0) {
                zr = 0.0;
                zc = 0.0;
            } else if (s_r <= 0.0) {
                zr = 0.0;
                zc = 0.0;
            } else {
                zr = s_r * zeta(s_r / s_c, model.a, model.b);
                zc = s_c * zeta(s_c / s_r, model.a, model.b);
            }
            return {zr, zc};
        }
    }
    return {s_r, s_c};
}

}  // namespace dfrcsg
