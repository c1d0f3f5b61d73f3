#include "dfrcsg/interference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

#include "dfrcsg/quadrature.hpp"

namespace dfrcsg {

Complex fading_lt(Complex s, double k_factor) {
    if (!(k_factor >= 0.0)) throw std::invalid_argument("fading_lt: require K >= 0");
    const Complex denom = (k_factor + 1.0) + s;
    if (std::abs(denom) < 1e-12 * (k_factor + 1.0))
        throw std::domain_error("fading_lt: pole at s = -(K+1)");
    return ((k_factor + 1.0) / denom) * std::exp(-k_factor * s / denom);
}

Complex one_minus_fading_lt(Complex s, double k_factor) {
    if (std::abs(s) < 1e-3) {
        // log L = -(K+1) t + (K+1/2) t^2 - (K+1/3) t^3 + O(t^4), t = s/(K+1)
        const Complex t = s / (k_factor + 1.0);
        const Complex t2 = t * t;
        const Complex c = -(k_factor + 1.0) * t + (k_factor + 0.5) * t2 - (k_factor + 1.0 / 3.0) * t2 * t;
        return -(c + c * c * 0.5 + c * c * c * (1.0 / 6.0) + c * c * c * c * (1.0 / 24.0));
    }
    return 1.0 - fading_lt(s, k_factor);
}

namespace {

// adaptive Gauss-Legendre bisection for complex-valued integrands
struct ComplexIntegral {
    Complex value{0.0, 0.0};
    double error = 0.0;
};

Complex gauss_panel_c(const std::function<Complex(double)>& f, double a, double b) {
    const auto& xs = gauss15_nodes();
    const auto& ws = gauss15_weights();
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    Complex s{0.0, 0.0};
    for (int i = 0; i < 15; ++i) s += ws[i] * f(c + h * xs[i]);
    return s * h;
}

ComplexIntegral integrate_complex(const std::function<Complex(double)>& f, double a, double b,
                                  double abs_tol) {
    struct Seg {
        double a, b, tol;
        Complex value;
        int depth;
    };
    ComplexIntegral out;
    if (a == b) return out;
    std::vector<Seg> stack;
    stack.push_back({a, b, std::max(abs_tol, 1e-300), gauss_panel_c(f, a, b), 0});
    while (!stack.empty()) {
        const Seg s = stack.back();
        stack.pop_back();
        const double m = 0.5 * (s.a + s.b);
        const Complex left = gauss_panel_c(f, s.a, m);
        const Complex right = gauss_panel_c(f, m, s.b);
        const double diff = std::abs(s.value - left - right);
        if (diff <= s.tol || s.depth >= 48) {
            out.value += left + right;
            out.error += diff;
            continue;
        }
        stack.push_back({s.a, m, 0.5 * s.tol, left, s.depth + 1});
        stack.push_back({m, s.b, 0.5 * s.tol, right, s.depth + 1});
    }
    return out;
}

// Int_{r_lo}^{inf} (r^2 + d^2)^{-alpha/2} dr via t = 1/r, u = t^{alpha-1};
// the transformed integrand is smooth and bounded for alpha > 1.
double powerlaw_tail_integral(double r_lo, double d, double alpha) {
    const double p = alpha - 1.0;
    const double upper = std::pow(r_lo, -p);
    auto f = [&](double v) {
        return std::pow(1.0 + d * d * std::pow(v, 2.0 / p), -alpha / 2.0);
    };
    return integrate(f, 0.0, upper, 1e-12 * upper).value / p;
}

}  // namespace

InterferenceLaplace::InterferenceLaplace(const ValidatedScenario& scenario,
                                         const DerivedQuantities& derived) {
    const ScenarioParams& p = scenario.params();
    lambda_i_ = p.lambda_i;
    rho_i_ = derived.rho_i;
    alpha_i_ = p.alpha_i;
    d_i_ = p.d_i;
    r_imin_ = derived.r_imin;
    k_factor_ = p.rician_k;
    if (lambda_i_ > 0.0 && !(alpha_i_ > 1.0))
        throw std::invalid_argument("interference: alpha_I must exceed 1 for finite power");
    if (lambda_i_ > 0.0) {
        const double tail = powerlaw_tail_integral(r_imin_, d_i_, alpha_i_);
        mean_ = lambda_i_ * rho_i_ * tail;
        // keep the exponent relatively accurate even when |s| is tiny:
        // integrate at least to where the mean-tail fraction is 1e-6
        r_floor_ = std::pow((alpha_i_ - 1.0) * 1e-6 * tail, -1.0 / (alpha_i_ - 1.0));
        r_floor_ = std::max(r_floor_, 2.0 * r_imin_);
    } else {
        mean_ = 0.0;
        r_floor_ = r_imin_;
    }
}

Complex InterferenceLaplace::log_lt(Complex s) const {
    if (lambda_i_ <= 0.0) return {0.0, 0.0};
    const double smag = std::abs(s);
    if (smag == 0.0) return {0.0, 0.0};

    // truncate where the exponent tail bound drops below 1e-10
    double r_hi = std::pow(lambda_i_ * smag * rho_i_ / ((alpha_i_ - 1.0) * 1e-10),
                           1.0 / (alpha_i_ - 1.0));
    r_hi = std::max(r_hi, r_floor_);

    auto integrand = [&](double r) {
        const double u = rho_i_ * std::pow(r * r + d_i_ * d_i_, -alpha_i_ / 2.0);
        return one_minus_fading_lt(s * u, k_factor_);
    };

    // log-spaced segments; rough pass sizes the tolerance, second pass refines
    std::vector<double> edges{r_imin_};
    while (edges.back() < r_hi) edges.push_back(std::min(edges.back() * 4.0, r_hi));

    Complex rough{0.0, 0.0};
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        rough += gauss_panel_c(integrand, edges[i], edges[i + 1]);

    const double tol = std::max(1e-13, 1e-10 * (1.0 + std::abs(rough))) /
                       static_cast<double>(edges.size());
    Complex total{0.0, 0.0};
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        total += integrate_complex(integrand, edges[i], edges[i + 1], tol).value;

    return -lambda_i_ * total;
}

Complex InterferenceLaplace::lt(Complex s) const { return std::exp(log_lt(s)); }

Complex InterferenceLaplace::log_lt_imag_axis(double tau) const {
    return log_lt(Complex(0.0, -tau));
}

namespace {

double gp_integrand(const std::function<Complex(double)>& log_cf, double x, double tau) {
    const Complex w = log_cf(tau);
    return std::exp(w.real()) * std::sin(w.imag() - tau * x) / tau;
}

// Wynn's epsilon algorithm over a sequence of partial sums; keeps the last
// anti-diagonal of the epsilon table.
class EpsilonTable {
public:
    double add(double s) {
        std::vector<double> cur;
        cur.reserve(prev_.size() + 1);
        cur.push_back(s);
        for (std::size_t j = 1; j <= prev_.size(); ++j) {
            const double denom = cur[j - 1] - prev_[j - 1];
            if (std::abs(denom) < 1e-305) break;  // converged column
            cur.push_back((j >= 2 ? prev_[j - 2] : 0.0) + 1.0 / denom);
        }
        if (cur.size() > 50) cur.resize(50);
        prev_ = std::move(cur);
        const std::size_t last_even = (prev_.size() - 1) & ~std::size_t(1);
        return prev_[last_even];
    }

private:
    std::vector<double> prev_;
};

}  // namespace

GilPelaezResult gil_pelaez_cdf(const std::function<Complex(double)>& log_cf, double mean,
                               double x, const GilPelaezOptions& opts) {
    if (x < 0.0) return {0.0, 0.0};

    double err = 0.0;
    double tau_hi = opts.tau_hi;
    if (tau_hi <= 0.0) {
        double tau = 1.0 / std::max(mean, 1e-290);
        if (x > 0.0) tau = std::min(tau, 1.0 / x);
        int guard = 0;
        while (log_cf(tau).real() > opts.log_phi_cutoff) {
            tau *= 10.0;
            if (++guard > 80)
                throw QuadratureError("gil-pelaez: characteristic function does not decay", 0.5, 1.0);
        }
        tau_hi = tau;
    }
    err += std::exp(opts.log_phi_cutoff) * 200.0;  // tail beyond the decay cutoff

    auto f = [&](double tau) { return gp_integrand(log_cf, x, tau); };

    const double p1 = x > 0.0 ? M_PI / x : std::numeric_limits<double>::infinity();
    const double ladder_end = std::min(p1, tau_hi);

    double total = 0.0;

    // [0, ladder_end]: analytic stub below tau0 (integrand -> mean - x),
    // then octave panels; the scale range can span many decades
    {
        const double weight = mean + x;
        double tau0 = ladder_end;
        if (ladder_end * weight > opts.tol / 100.0) {
            int doublings = static_cast<int>(
                std::ceil(std::log2(ladder_end * weight * 100.0 / opts.tol)));
            doublings = std::clamp(doublings, 1, 900);
            tau0 = std::ldexp(ladder_end, -doublings);
        }
        total += tau0 * (mean - x);
        err += 0.5 * tau0 * weight;
        double lo = tau0;
        while (lo < ladder_end) {
            const double hi = std::min(lo * 2.0, ladder_end);
            const IntegralResult seg = integrate_lenient(f, lo, hi, opts.tol / 64.0, 40'000);
            total += seg.value;
            err += seg.error;
            lo = hi;
        }
    }

    // oscillatory half-period blocks, epsilon-accelerated
    if (p1 < tau_hi) {
        EpsilonTable eps;
        double sum = total;
        double est_prev = std::numeric_limits<double>::quiet_NaN();
        double est_prev2 = std::numeric_limits<double>::quiet_NaN();
        double block_prev = std::numeric_limits<double>::infinity();
        bool finished = false;
        for (int k = 1; k <= opts.max_blocks; ++k) {
            const double lo = p1 * k;
            if (lo >= tau_hi) {
                total = sum;
                finished = true;
                break;
            }
            const double hi = std::min(p1 * (k + 1), tau_hi);
            const IntegralResult seg = integrate_lenient(f, lo, hi, opts.tol / 64.0, 40'000);
            sum += seg.value;
            err += seg.error;
            if (hi >= tau_hi) {
                total = sum;
                finished = true;
                break;
            }
            const double est = eps.add(sum);
            if (k >= 6) {
                const double d1 = std::abs(est - est_prev);
                const double d2 = std::abs(est_prev - est_prev2);
                if (d1 < opts.tol / 4.0 && d2 < opts.tol / 4.0) {
                    total = est;
                    err += d1 + d2;
                    finished = true;
                    break;
                }
                if (std::abs(seg.value) < opts.tol / 8.0 && block_prev < opts.tol / 8.0 &&
                    std::abs(seg.value) <= block_prev) {
                    total = sum;
                    err += std::abs(seg.value);
                    finished = true;
                    break;
                }
            }
            est_prev2 = est_prev;
            est_prev = est;
            block_prev = std::abs(seg.value);
        }
        if (!finished)
            throw QuadratureError("gil-pelaez: oscillatory block series did not converge",
                                  0.5 - sum / M_PI, err + block_prev);
    }

    const double cdf = 0.5 - total / M_PI;
    return {std::clamp(cdf, 0.0, 1.0), err / M_PI};
}

LtExponentCache::LtExponentCache(const InterferenceLaplace& lt, double rel_tol) {
    if (lt.interference_free())
        throw std::logic_error("LtExponentCache: no interference to cache");
    mean_ = lt.mean();

    // low end: descend until the exponent matches j tau E[I], capped at
    // 14 decades below the mean scale (far below any inversion's ladder)
    double tau = 1.0 / mean_;
    Complex w = lt.log_lt_imag_axis(tau);
    for (int guard = 0; guard < 14; ++guard) {
        if (std::abs(w - Complex(0.0, tau * mean_)) <= 1e-7 * std::abs(w)) break;
        tau *= 0.1;
        w = lt.log_lt_imag_axis(tau);
    }
    tau_lo_ = tau;

    // high end: modulus of the LT below exp(-44)
    tau = 1.0 / mean_;
    int guard = 0;
    while (lt.log_lt_imag_axis(tau).real() > -44.0) {
        tau *= 10.0;
        if (++guard > 80)
            throw QuadratureError("interference LT modulus does not decay", 0.0, 1.0);
    }
    tau_hi_ = tau;

    refine(lt, rel_tol);
}

Complex LtExponentCache::eval_nodes(double t) const {
    // cubic Hermite on the current node set
    const auto it = std::upper_bound(t_.begin(), t_.end(), t);
    std::size_t i = it == t_.begin() ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
    if (i + 1 >= t_.size()) i = t_.size() - 2;
    const double h = t_[i + 1] - t_[i];
    const double u = (t - t_[i]) / h;
    const double u2 = u * u, u3 = u2 * u;
    const double h00 = 2 * u3 - 3 * u2 + 1, h10 = u3 - 2 * u2 + u;
    const double h01 = -2 * u3 + 3 * u2, h11 = u3 - u2;
    return h00 * y_[i] + h * h10 * dy_[i] + h01 * y_[i + 1] + h * h11 * dy_[i + 1];
}

void LtExponentCache::refine(const InterferenceLaplace& lt, double rel_tol) {
    auto y_of = [&](double t) {
        const double tau = std::exp(t);
        return lt.log_lt_imag_axis(tau) / tau;
    };

    std::map<double, Complex> nodes;
    const double t0 = std::log(tau_lo_), t1 = std::log(tau_hi_);
    const int n0 = std::max(8, static_cast<int>(std::ceil((t1 - t0) / std::log(10.0) * 16)));
    for (int i = 0; i <= n0; ++i) {
        const double t = t0 + (t1 - t0) * i / n0;
        nodes.emplace(t, y_of(t));
    }

    auto rebuild = [&] {
        t_.clear();
        y_.clear();
        t_.reserve(nodes.size());
        y_.reserve(nodes.size());
        for (const auto& [t, y] : nodes) {
            t_.push_back(t);
            y_.push_back(y);
        }
        const std::size_t n = t_.size();
        dy_.assign(n, Complex{0.0, 0.0});
        for (std::size_t i = 0; i < n; ++i) {
            if (i == 0) {
                dy_[i] = (y_[1] - y_[0]) / (t_[1] - t_[0]);
            } else if (i + 1 == n) {
                dy_[i] = (y_[n - 1] - y_[n - 2]) / (t_[n - 1] - t_[n - 2]);
            } else {
                const double hl = t_[i] - t_[i - 1], hr = t_[i + 1] - t_[i];
                const Complex dl = (y_[i] - y_[i - 1]) / hl, dr = (y_[i + 1] - y_[i]) / hr;
                dy_[i] = (hr * dl + hl * dr) / (hl + hr);
            }
        }
    };

    rebuild();
    for (int round = 0; round < 10; ++round) {
        std::vector<std::pair<double, Complex>> inserts;
        for (std::size_t i = 0; i + 1 < t_.size(); ++i) {
            const double tm = 0.5 * (t_[i] + t_[i + 1]);
            const Complex direct = y_of(tm);
            const Complex interp = eval_nodes(tm);
            if (std::abs(direct - interp) > rel_tol * std::abs(direct) + 1e-320)
                inserts.emplace_back(tm, direct);
        }
        if (inserts.empty() || nodes.size() > 20'000) break;
        for (auto& [t, y] : inserts) nodes.emplace(t, y);
        rebuild();
    }
}

Complex LtExponentCache::log_lt_imag_axis(double tau) const {
    const double t = std::clamp(std::log(tau), t_.front(), t_.back());
    return eval_nodes(t) * tau;
}

InterferenceCdf InterferenceCdf::build(const InterferenceLaplace& lt, const BuildOptions& opts) {
    InterferenceCdf out;
    out.tol_ = opts.tol;
    if (lt.interference_free()) {
        out.degenerate_ = true;
        return out;
    }

    LtExponentCache cache(lt);
    GilPelaezOptions gp;
    gp.tol = opts.gp_tol;
    gp.tau_hi = cache.tau_hi();
    auto log_cf = [&cache](double tau) { return cache.log_lt_imag_axis(tau); };
    auto cdf_at = [&](double x) { return gil_pelaez_cdf(log_cf, cache.mean(), x, gp).cdf; };

    // locate the support of the rise
    double x_lo = cache.mean();
    for (int i = 0; i < 60 && cdf_at(x_lo) > 0.5 * opts.tol; ++i) x_lo *= 0.1;
    double x_hi = cache.mean();
    for (int i = 0; i < 60 && cdf_at(x_hi) < 1.0 - 0.5 * opts.tol; ++i) x_hi *= 10.0;
    if (opts.x_min_coverage > 0.0) x_hi = std::max(x_hi, opts.x_min_coverage);

    std::map<double, double> knots;
    const int decades = std::max(1, static_cast<int>(std::ceil(std::log10(x_hi / x_lo))));
    const int n0 = decades * opts.points_per_decade;
    for (int i = 0; i <= n0; ++i) {
        const double x = x_lo * std::pow(x_hi / x_lo, static_cast<double>(i) / n0);
        knots.emplace(x, cdf_at(x));
    }

    // midpoint refinement of the log-x linear interpolant
    struct Interval {
        double xl, xr, fl, fr;
    };
    std::vector<Interval> work;
    for (auto it = knots.begin(); std::next(it) != knots.end(); ++it)
        work.push_back({it->first, std::next(it)->first, it->second, std::next(it)->second});
    while (!work.empty() && knots.size() < static_cast<std::size_t>(opts.max_points)) {
        const Interval iv = work.back();
        work.pop_back();
        const double xm = std::sqrt(iv.xl * iv.xr);
        if (xm <= iv.xl || xm >= iv.xr) continue;
        const double interp = 0.5 * (iv.fl + iv.fr);  // midpoint in log x
        const double fm = cdf_at(xm);
        if (std::abs(fm - interp) > 0.5 * opts.tol || iv.fr - iv.fl > 0.05) {
            knots.emplace(xm, fm);
            if (iv.fr - iv.fl > 2.0 * opts.tol) {
                work.push_back({iv.xl, xm, iv.fl, fm});
                work.push_back({xm, iv.xr, fm, iv.fr});
            }
        }
    }

    out.grid_x_.reserve(knots.size());
    out.grid_f_.reserve(knots.size());
    for (const auto& [x, fx] : knots) {
        out.grid_x_.push_back(x);
        out.grid_f_.push_back(std::clamp(fx, 0.0, 1.0));
    }
    // enforce monotonicity; anything beyond quadrature noise is a failure
    for (std::size_t i = 1; i < out.grid_f_.size(); ++i) {
        if (out.grid_f_[i] < out.grid_f_[i - 1] - 5.0 * opts.tol)
            throw QuadratureError("interference CDF table is not monotone", out.grid_f_[i],
                                  out.grid_f_[i - 1] - out.grid_f_[i]);
        out.grid_f_[i] = std::max(out.grid_f_[i], out.grid_f_[i - 1]);
    }
    return out;
}

double InterferenceCdf::operator()(double x) const {
    if (x < 0.0) return 0.0;
    if (degenerate_) return 1.0;
    if (grid_x_.empty()) return 0.0;
    if (x <= grid_x_.front()) {
        // linear from (0, 0); the first knot was driven below tol
        return grid_f_.front() * (x / grid_x_.front());
    }
    if (x >= grid_x_.back()) return grid_f_.back();
    const auto it = std::upper_bound(grid_x_.begin(), grid_x_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - grid_x_.begin()) - 1;
    const double u = std::log(x / grid_x_[i]) / std::log(grid_x_[i + 1] / grid_x_[i]);
    return grid_f_[i] + u * (grid_f_[i + 1] - grid_f_[i]);
}

double InterferenceCdf::quantile(double p) const {
    if (degenerate_ || grid_x_.empty()) return 0.0;
    const auto it = std::lower_bound(grid_f_.begin(), grid_f_.end(), p);
    if (it == grid_f_.end()) return grid_x_.back();
    return grid_x_[static_cast<std::size_t>(it - grid_f_.begin())];
}

void InterferenceCdf::dump_csv(std::ostream& os) const {
    os << "x,F\n";
    if (degenerate_) {
        os << "0,1\n";
        return;
    }
    char buf[64];
    for (std::size_t i = 0; i < grid_x_.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", grid_x_[i], grid_f_[i]);
        os << buf;
    }
}

double interference_cdf(const InterferenceLaplace& lt, double x, double tol) {
    if (x < 0.0) return 0.0;
    if (lt.interference_free()) return 1.0;
    GilPelaezOptions opts;
    opts.tol = tol;
    auto log_cf = [&lt](double tau) { return lt.log_lt_imag_axis(tau); };
    return gil_pelaez_cdf(log_cf, lt.mean(), x, opts).cdf;
}

}  // namespace dfrcsg
