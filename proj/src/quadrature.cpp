#include "dfrcsg/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace dfrcsg {

namespace {

// 15-point Gauss-Legendre nodes/weights on [-1,1], generated once by Newton
// iteration on P_15. Avoids hand-typed tables.
struct Gauss15 {
    std::array<double, 15> x{};
    std::array<double, 15> w{};

    Gauss15() {
        constexpr int n = 15;
        for (int i = 0; i < n; ++i) {
            double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double p0, p1, dp;
            for (int it = 0; it < 100; ++it) {
                p0 = 1.0;
                p1 = t;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (t * p1 - p0) / (t * t - 1.0);
                const double dt = p1 / dp;
                t -= dt;
                if (std::abs(dt) < 1e-16) break;
            }
            x[n - 1 - i] = t;
            w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
        }
    }
};

const Gauss15& gauss15() {
    static const Gauss15 g;
    return g;
}

}  // namespace

const std::array<double, 15>& gauss15_nodes() { return gauss15().x; }
const std::array<double, 15>& gauss15_weights() { return gauss15().w; }

namespace {

double gauss_panel(const Fn1D& f, double a, double b) {
    const auto& g = gauss15();
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 15; ++i) s += g.w[i] * f(c + h * g.x[i]);
    return s * h;
}

struct Segment {
    double a, b, value, tol;
    int depth;
};

IntegralResult integrate_impl(const Fn1D& f, double a, double b, double abs_tol,
                              int max_evals, bool lenient) {
    IntegralResult out;
    if (a == b) return out;

    int evals = 0;
    auto panel = [&](double lo, double hi) {
        evals += 15;
        return gauss_panel(f, lo, hi);
    };

    std::vector<Segment> stack;
    stack.push_back({a, b, panel(a, b), std::max(abs_tol, 1e-300), 0});

    bool exhausted = false;
    while (!stack.empty()) {
        const Segment s = stack.back();
        stack.pop_back();
        const double m = 0.5 * (s.a + s.b);
        const double left = panel(s.a, m);
        const double right = panel(m, s.b);
        const double diff = std::abs(s.value - left - right);
        const bool budget = evals > max_evals || s.depth >= 52;
        if (diff <= s.tol || budget) {
            out.value += left + right;
            out.error += diff;
            if (budget && diff > s.tol) exhausted = true;
            continue;
        }
        stack.push_back({s.a, m, left, 0.5 * s.tol, s.depth + 1});
        stack.push_back({m, s.b, right, 0.5 * s.tol, s.depth + 1});
    }

    if (exhausted && !lenient && out.error > abs_tol) {
        throw QuadratureError("1-D quadrature budget exhausted (achieved " +
                                  std::to_string(out.error) + ", target " +
                                  std::to_string(abs_tol) + ")",
                              out.value, out.error);
    }
    return out;
}

// Genz-Malik degree-7 rule with embedded degree-5 estimate, n = 2.
struct GenzMalik2 {
    // generators
    static constexpr double l2 = 0.35856858280031809199064515390793749;  // sqrt(9/70)
    static constexpr double l3 = 0.94868329805051379959966806332981556;  // sqrt(9/10)
    static constexpr double l4 = l3;
    static constexpr double l5 = 0.68824720161168529772162873429362352;  // sqrt(9/19)
    // degree-7 weights (already scaled by the 2^n = 4 reference volume)
    static constexpr double w1 = 4.0 * (12824.0 - 9120.0 * 2 + 400.0 * 4) / 19683.0;
    static constexpr double w2 = 4.0 * 980.0 / 6561.0;
    static constexpr double w3 = 4.0 * (1820.0 - 400.0 * 2) / 19683.0;
    static constexpr double w4 = 4.0 * 200.0 / 19683.0;
    static constexpr double w5 = 6859.0 / 19683.0;
    // embedded degree-5 weights
    static constexpr double v1 = 4.0 * (729.0 - 950.0 * 2 + 50.0 * 4) / 729.0;
    static constexpr double v2 = 4.0 * 245.0 / 486.0;
    static constexpr double v3 = 4.0 * (265.0 - 100.0 * 2) / 1458.0;
    static constexpr double v4 = 4.0 * 25.0 / 729.0;
};

struct PanelEval {
    double rule7;
    double err;
    int split_axis;
};

PanelEval gm_panel(const Fn2D& f, const Rect& r) {
    using G = GenzMalik2;
    const double cx = 0.5 * (r.x0 + r.x1), cy = 0.5 * (r.y0 + r.y1);
    const double hx = 0.5 * (r.x1 - r.x0), hy = 0.5 * (r.y1 - r.y0);
    const double vol_scale = hx * hy;  // maps the [-1,1]^2 reference weights

    const double f0 = f(cx, cy);
    const double f2xm = f(cx - G::l2 * hx, cy), f2xp = f(cx + G::l2 * hx, cy);
    const double f2ym = f(cx, cy - G::l2 * hy), f2yp = f(cx, cy + G::l2 * hy);
    const double f3xm = f(cx - G::l3 * hx, cy), f3xp = f(cx + G::l3 * hx, cy);
    const double f3ym = f(cx, cy - G::l3 * hy), f3yp = f(cx, cy + G::l3 * hy);
    const double f4a = f(cx - G::l4 * hx, cy - G::l4 * hy);
    const double f4b = f(cx - G::l4 * hx, cy + G::l4 * hy);
    const double f4c = f(cx + G::l4 * hx, cy - G::l4 * hy);
    const double f4d = f(cx + G::l4 * hx, cy + G::l4 * hy);
    const double f5a = f(cx - G::l5 * hx, cy - G::l5 * hy);
    const double f5b = f(cx - G::l5 * hx, cy + G::l5 * hy);
    const double f5c = f(cx + G::l5 * hx, cy - G::l5 * hy);
    const double f5d = f(cx + G::l5 * hx, cy + G::l5 * hy);

    const double s2 = f2xm + f2xp + f2ym + f2yp;
    const double s3 = f3xm + f3xp + f3ym + f3yp;
    const double s4 = f4a + f4b + f4c + f4d;
    const double s5 = f5a + f5b + f5c + f5d;

    const double rule7 = vol_scale * (G::w1 * f0 + G::w2 * s2 + G::w3 * s3 + G::w4 * s4 + G::w5 * s5);
    const double rule5 = vol_scale * (G::v1 * f0 + G::v2 * s2 + G::v3 * s3 + G::v4 * s4);

    // fourth divided difference per axis decides the split direction
    constexpr double ratio = (G::l2 * G::l2) / (G::l3 * G::l3);
    const double dx = std::abs(f2xm + f2xp - 2.0 * f0 - ratio * (f3xm + f3xp - 2.0 * f0));
    const double dy = std::abs(f2ym + f2yp - 2.0 * f0 - ratio * (f3ym + f3yp - 2.0 * f0));

    return {rule7, std::abs(rule7 - rule5), dx >= dy ? 0 : 1};
}

struct Panel {
    Rect rect;
    double value;
    double err;
    int split_axis;
    long id;
};

struct PanelWorse {
    bool operator()(const Panel& a, const Panel& b) const {
        if (a.err != b.err) return a.err < b.err;
        return a.id > b.id;  // deterministic tie-break
    }
};

}  // namespace

IntegralResult integrate(const Fn1D& f, double a, double b, double abs_tol, int max_evals) {
    return integrate_impl(f, a, b, abs_tol, max_evals, false);
}

IntegralResult integrate_lenient(const Fn1D& f, double a, double b, double abs_tol,
                                 int max_evals) {
    return integrate_impl(f, a, b, abs_tol, max_evals, true);
}

IntegralResult integrate2d(const Fn2D& f, const Rect& domain, double abs_tol, int max_panels) {
    return integrate2d_cells(f, {domain}, abs_tol, max_panels);
}

IntegralResult integrate2d_cells(const Fn2D& f, const std::vector<Rect>& cells, double abs_tol,
                                 int max_panels) {
    std::priority_queue<Panel, std::vector<Panel>, PanelWorse> heap;
    long next_id = 0;

    double err_sum = 0.0;
    auto push = [&](const Rect& r) {
        const PanelEval e = gm_panel(f, r);
        heap.push({r, e.rule7, e.err, e.split_axis, next_id++});
        err_sum += e.err;
    };
    for (const Rect& cell : cells) push(cell);
    while (err_sum > abs_tol && static_cast<long>(heap.size()) < max_panels) {
        Panel worst = heap.top();
        heap.pop();
        err_sum -= worst.err;
        Rect left = worst.rect, right = worst.rect;
        if (worst.split_axis == 0) {
            const double m = 0.5 * (worst.rect.x0 + worst.rect.x1);
            left.x1 = m;
            right.x0 = m;
        } else {
            const double m = 0.5 * (worst.rect.y0 + worst.rect.y1);
            left.y1 = m;
            right.y0 = m;
        }
        const PanelEval el = gm_panel(f, left);
        const PanelEval er = gm_panel(f, right);
        heap.push({left, el.rule7, el.err, el.split_axis, next_id++});
        heap.push({right, er.rule7, er.err, er.split_axis, next_id++});
        err_sum += el.err + er.err;
    }

    // drain and sum in panel-id order so the result does not depend on the
    // heap's internal layout
    std::vector<Panel> panels;
    panels.reserve(heap.size());
    while (!heap.empty()) {
        panels.push_back(heap.top());
        heap.pop();
    }
    std::sort(panels.begin(), panels.end(), [](const Panel& a, const Panel& b) { return a.id < b.id; });

    IntegralResult out;
    double comp = 0.0;  // Kahan compensation
    for (const Panel& p : panels) {
        const double y = p.value - comp;
        const double t = out.value + y;
        comp = (t - out.value) - y;
        out.value = t;
        out.error += p.err;
    }

    if (out.error > abs_tol * 4.0 && static_cast<long>(panels.size()) >= max_panels) {
        throw QuadratureError("2-D cubature budget exhausted (achieved " +
                                  std::to_string(out.error) + ", target " +
                                  std::to_string(abs_tol) + ")",
                              out.value, out.error);
    }
    return out;
}

std::vector<double> geometric_breakpoints(double lo, double hi, double ratio) {
    if (!(lo > 0.0) || !(hi > lo) || !(ratio > 1.0))
        throw std::invalid_argument("geometric_breakpoints: require 0 < lo < hi, ratio > 1");
    std::vector<double> out{lo};
    double x = lo;
    while (x * ratio < hi) {
        x *= ratio;
        out.push_back(x);
    }
    out.push_back(hi);
    return out;
}

}  // namespace dfrcsg
