#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "dfrcsg/scenario.hpp"

namespace dfrcsg {

using Complex = std::complex<double>;

// Laplace transform of the Rician small-scale fading power |h|^2 with
// normalized mean E[|h|^2] = 1:
//   L(s) = (K+1)/(K+1+s) * exp(-K s / (K+1+s)).
Complex fading_lt(Complex s, double k_factor);

// 1 - L(s), evaluated without cancellation for small |s|.
Complex one_minus_fading_lt(Complex s, double k_factor);

/**
 * Laplace transform of the aggregate interference from the opposite-lane
 * point process:
 *   log L_I(s) = -lambda_I Int_{r_Imin}^{inf} (1 - L_h(s rho_I (r^2+d_I^2)^{-alpha_I/2})) dr.
 *
 * The improper integral is truncated where the bound
 * lambda_I |s| rho_I r^{-alpha_I} integrates to < 1e-10, so the truncation
 * error on the exponent is guaranteed.
 */
class InterferenceLaplace {
public:
    InterferenceLaplace(const ValidatedScenario& scenario, const DerivedQuantities& derived);

    // valid for Re(s) >= 0 (includes the imaginary axis s = -j tau)
    Complex log_lt(Complex s) const;
    Complex lt(Complex s) const;

    // log L_I(-j tau) = log E[exp(j tau I)], the Gil-Pelaez kernel
    Complex log_lt_imag_axis(double tau) const;

    double mean() const { return mean_; }  // E[I], closed-form tail integral
    bool interference_free() const { return lambda_i_ <= 0.0; }

private:
    double lambda_i_;
    double rho_i_;
    double alpha_i_;
    double d_i_;
    double r_imin_;
    double k_factor_;
    double mean_;
    double r_floor_ = 0.0;  // minimum truncation radius of the inner integral
};

struct GilPelaezOptions {
    double tol = 1e-6;       // absolute CDF tolerance
    int max_blocks = 4000;   // half-period blocks before giving up
    double tau_hi = 0.0;     // known LT decay cutoff; 0 = scan for it
    double log_phi_cutoff = -42.0;
};

struct GilPelaezResult {
    double cdf;
    double error;
};

// Pr(X <= x) = 1/2 - (1/pi) Int_0^inf Im{phi(tau) e^{-j tau x}} / tau dtau
// for a nonnegative continuous random variable with characteristic
// function phi given through log_cf(tau) = log phi(tau), tau > 0.
// `mean` = E[X] fixes the tau -> 0 limit of the integrand. The oscillatory
// tail is summed per half-period pi/x and accelerated with Wynn's epsilon
// algorithm; below the first zero a geometric ladder of panels handles the
// many-decade scale range. Throws QuadratureError if the block series
// fails its convergence test.
GilPelaezResult gil_pelaez_cdf(const std::function<Complex(double)>& log_cf, double mean,
                               double x, const GilPelaezOptions& opts = {});

/**
 * log L_I(-j tau) cached on an adaptively refined log-tau grid (cubic
 * Hermite of w/tau), so a CDF-table build does not re-evaluate the
 * inner fading integral for every (x, tau) pair.
 */
class LtExponentCache {
public:
    explicit LtExponentCache(const InterferenceLaplace& lt, double rel_tol = 1e-8);

    Complex log_lt_imag_axis(double tau) const;
    double tau_hi() const { return tau_hi_; }
    double tau_lo() const { return tau_lo_; }
    double mean() const { return mean_; }
    std::size_t node_count() const { return t_.size(); }

private:
    void refine(const InterferenceLaplace& lt, double rel_tol);
    Complex eval_nodes(double t) const;

    std::vector<double> t_;    // ln tau
    std::vector<Complex> y_;   // log_lt / tau
    std::vector<Complex> dy_;  // Hermite slopes
    double tau_lo_ = 0.0, tau_hi_ = 0.0, mean_ = 0.0;
};

/**
 * Tabulated CDF of the aggregate interference, built once per scenario by
 * Gil-Pelaez inversion and shared by every metric. Monotone, linear in
 * log x between knots, exact 0 for x < 0. Queries beyond the last knot
 * return the final value, which the builder drives to >= 1 - tol.
 */
class InterferenceCdf {
public:
    struct BuildOptions {
        double tol = 1e-5;        // interpolation refinement target
        double gp_tol = 1e-6;     // Gil-Pelaez tolerance per point
        double x_min_coverage = 0.0;  // extend grid at least this far
        int points_per_decade = 16;
        int max_points = 60'000;
    };

    static InterferenceCdf build(const InterferenceLaplace& lt, const BuildOptions& opts);
    static InterferenceCdf build(const InterferenceLaplace& lt) { return build(lt, BuildOptions{}); }

    double operator()(double x) const;
    double quantile(double p) const;  // smallest grid x with F(x) >= p

    bool degenerate() const { return degenerate_; }  // lambda_I = 0: F = 1{x >= 0}
    double x_lo() const { return grid_x_.empty() ? 0.0 : grid_x_.front(); }
    double x_hi() const { return grid_x_.empty() ? 0.0 : grid_x_.back(); }
    double tolerance() const { return tol_; }
    std::size_t size() const { return grid_x_.size(); }

    const std::vector<double>& grid_x() const { return grid_x_; }
    const std::vector<double>& grid_f() const { return grid_f_; }

    void dump_csv(std::ostream& os) const;  // columns: x,F

private:
    std::vector<double> grid_x_;  // ascending, strictly positive
    std::vector<double> grid_f_;  // nondecreasing, in [0,1]
    double tol_ = 0.0;
    bool degenerate_ = false;
};

// Single direct inversion at x (no table, no exponent cache): the
// verification route behind --no-cache.
double interference_cdf(const InterferenceLaplace& lt, double x, double tol = 1e-6);

}  // namespace dfrcsg
