#pragma once

namespace dfrcsg {

/**
 * Residual cross-function interference after cancellation.
 *
 * - none: no cancellation, residuals are the raw powers.
 * - partial: residual fraction zeta(x) = a / (1 + x^b) of the interfering
 *   power, where x is the SIR-like power ratio seen by the cancelling
 *   receiver. With a > 1 the residual exceeds the original power at low
 *   ratios (failed cancellation adds interference).
 * - perfect: zero residual at the enabled receiver(s). `at_radar` removes
 *   the communication signal at the radar receiver (zeta_C = 0);
 *   `at_comm` removes the radar echo at the communication receiver
 *   (zeta_R = 0).
 */
struct ResidualModel {
    enum class Mode { none, partial, perfect };

    Mode mode = Mode::none;
    double a = 2.0;  // partial: zeta(0)
    double b = 4.0;  // partial: ratio exponent
    bool at_radar = true;
    bool at_comm = true;

    static ResidualModel none() { return {}; }
    static ResidualModel partial(double a, double b) {
        return {Mode::partial, a, b, true, true};
    }
    static ResidualModel perfect(bool at_radar = true, bool at_comm = true) {
        return {Mode::perfect, 2.0, 4.0, at_radar, at_comm};
    }
    bool is_none() const { return mode == Mode::none; }
};

// zeta(x) = a / (1 + x^b), strictly decreasing, zeta(0) = a.
double zeta(double x, double a, double b);

struct Residuals {
    double zeta_r;  // residual radar echo at the communication receiver (W)
    double zeta_c;  // residual communication signal at the radar receiver (W)
};

// Deterministic functions of the desired powers only (independent of the
// aggregate interference). Degree-1 homogeneous in (s_r, s_c).
Residuals residuals(double s_r, double s_c, const ResidualModel& model);

}  // namespace dfrcsg
