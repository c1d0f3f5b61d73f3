#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dfrcsg {

struct IntegralResult {
    double value = 0.0;
    double error = 0.0;  // achieved absolute error estimate
};

// Thrown when an integration budget is exhausted before reaching the target;
// carries the best value and the achieved error estimate.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double value, double achieved)
        : std::runtime_error(what), value_(value), achieved_(achieved) {}
    double value() const { return value_; }
    double achieved_error() const { return achieved_; }

private:
    double value_;
    double achieved_;
};

using Fn1D = std::function<double(double)>;
using Fn2D = std::function<double(double, double)>;

// 15-point Gauss-Legendre rule on [-1, 1], generated to machine precision.
const std::array<double, 15>& gauss15_nodes();
const std::array<double, 15>& gauss15_weights();

// Adaptive bisection with a 15-point Gauss-Legendre rule per panel; the
// error estimate of a panel is the difference against its two halves.
IntegralResult integrate(const Fn1D& f, double a, double b, double abs_tol,
                         int max_evals = 2'000'000);

// Non-throwing variant: runs to budget and reports whatever was achieved.
IntegralResult integrate_lenient(const Fn1D& f, double a, double b, double abs_tol,
                                 int max_evals = 2'000'000);

struct Rect {
    double x0, x1, y0, y1;
};

// Globally adaptive 2-D cubature on an axis-aligned rectangle using the
// degree-7/5 Genz-Malik rule pair (17 points per panel in 2-D). Panels are
// split along the axis with the largest fourth divided difference, so
// refinement concentrates on region-boundary curves of discontinuous or
// kinked integrands. The final sum is accumulated in panel-creation order,
// independent of the refinement schedule.
IntegralResult integrate2d(const Fn2D& f, const Rect& domain, double abs_tol,
                           int max_panels = 60'000);

// Same, but the caller provides the initial panel decomposition. Seeding
// cells along known scale structure (log-spaced distance axes, density
// decay) keeps narrow features from slipping between the rule nodes of
// one oversized starting panel.
IntegralResult integrate2d_cells(const Fn2D& f, const std::vector<Rect>& cells, double abs_tol,
                                 int max_panels = 60'000);

// ascending breakpoints, geometric spacing with the given ratio
std::vector<double> geometric_breakpoints(double lo, double hi, double ratio);

}  // namespace dfrcsg
