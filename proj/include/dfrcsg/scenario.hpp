#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace dfrcsg {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }
inline double deg_to_rad(double deg) { return deg * M_PI / 180.0; }

/**
 * User-facing parameters of the two-lane scenario.
 *
 * Angles are stored in radians (the config layer accepts degrees),
 * powers in watts, densities in 1/m, gains and intercepts linear.
 */
struct ScenarioParams {
    double p_v = 1.0;   // vehicle transmit power (W)
    double p_l = 1.0;   // traffic-light transmit power (W)
    double g_r = 1.0;   // radar link beamforming gain
    double g_c = 1.0;   // communication link beamforming gain
    double g_i = 1.0;   // interfering link beamforming gain
    double kappa = 1.0; // radar processing gain
    double f_c = 77e9;  // carrier frequency (Hz)
    double d_c = 2.5;   // perpendicular offset to the traffic-light line (m)
    double d_i = 3.0;   // perpendicular offset to the opposite lane (m)
    double r_rmin = 5.0;    // min radar detectable range (m)
    double r_rmax = 150.0;  // max radar detectable range (m)
    double psi_vt = 0.39269908169872414;  // vehicle TX beamwidth (rad) = 22.5 deg
    double psi_vr = 0.7853981633974483;   // vehicle RX beamwidth (rad) = 45 deg
    double psi_lt = 0.7853981633974483;   // traffic-light TX beamwidth (rad) = 45 deg
    double lambda_v = 0.02;   // same-lane vehicle density (1/m)
    double lambda_i = 0.002;  // interfering vehicle density (1/m)
    double lambda_l = 0.01;   // traffic-light density (1/m)
    double alpha_r = 2.0;  // radar path-loss exponent
    double alpha_c = 3.0;  // communication path-loss exponent
    double alpha_i = 3.0;  // interference path-loss exponent
    double beta_r = 4.0 * M_PI;  // radar path-loss intercept (linear)
    double beta_c = 4.0 * M_PI;
    double beta_i = 4.0 * M_PI;
    double rician_k = 10.0;  // Rician K-factor of interfering links (linear)

    static ScenarioParams defaults() { return {}; }
};

// Constants every downstream module shares. rho_r absorbs the round-trip
// factor 2^(-alpha_r): the radar path loss is evaluated at distance 2r.
struct DerivedQuantities {
    double rho_r = 0.0;  // W * m^alpha_r
    double rho_c = 0.0;  // W * m^alpha_c
    double rho_i = 0.0;  // W * m^alpha_i
    double r_cmin = 0.0; // min parallel distance of the communication link (m)
    double r_imin = 0.0; // min parallel distance of interfering links (m)
    double s_rmin = 0.0; // weakest radar echo power (W)
    double s_rmax = 0.0; // strongest radar echo power (W)
    double s_cmax = 0.0; // strongest communication power (W)
};

class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

// Parameter set that passed validation; immutable, freely shareable.
class ValidatedScenario {
public:
    const ScenarioParams& params() const { return params_; }

private:
    friend ValidatedScenario validate(const ScenarioParams&);
    explicit ValidatedScenario(const ScenarioParams& p) : params_(p) {}
    ScenarioParams params_;
};

// Checks every invariant and reports all violations at once.
ValidatedScenario validate(const ScenarioParams& params);

DerivedQuantities derive(const ValidatedScenario& scenario);

}  // namespace dfrcsg
