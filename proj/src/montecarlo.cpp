#include "dfrcsg/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dfrcsg/parallel.hpp"

namespace dfrcsg {

Simulator::Simulator(const ValidatedScenario& scenario, const SimulatorOptions& opts)
    : p_(scenario.params()), opts_(opts) {
    const double c2 = kSpeedOfLight * kSpeedOfLight;
    const double base = c2 / (4.0 * M_PI * p_.f_c * p_.f_c);
    friis_r_ = p_.p_v * p_.g_r * base / p_.beta_r;
    friis_c_ = p_.p_l * p_.g_c * base / p_.beta_c;
    friis_i_ = p_.p_v * p_.g_i * base / p_.beta_i;

    r_cmin_ = p_.d_c / std::tan(std::min(p_.psi_lt, p_.psi_vr) / 2.0);
    r_imin_ = p_.d_i / std::tan(std::min(p_.psi_vt, p_.psi_vr) / 2.0);

    const double s_rmin = friis_r_ * std::pow(2.0 * p_.r_rmax, -p_.alpha_r);
    if (p_.lambda_i > 0.0) {
        // lambda_I rho_I / ((alpha_I - 1) R^(alpha_I - 1)) < margin * S_Rmin
        const double target = opts_.truncation_margin * s_rmin;
        r_trunc_ = std::pow(p_.lambda_i * friis_i_ / ((p_.alpha_i - 1.0) * target),
                            1.0 / (p_.alpha_i - 1.0));
        r_trunc_ = std::max(r_trunc_, 2.0 * r_imin_);
    } else {
        r_trunc_ = r_imin_;
    }

    nu_ = std::sqrt(p_.rician_k / (p_.rician_k + 1.0));
    sigma_ = std::sqrt(0.5 / (p_.rician_k + 1.0));
}

double Simulator::sample_fading(Rng& rng) const {
    const double phi = rng.uniform(0.0, 2.0 * M_PI);
    const double x = rng.normal(nu_ * std::cos(phi), sigma_);
    const double y = rng.normal(nu_ * std::sin(phi), sigma_);
    return x * x + y * y;
}

double Simulator::sample_r_radar(Rng& rng) const {
    const double span = p_.r_rmax - p_.r_rmin;
    if (opts_.radar_sampling == RadarRangeSampling::rejection) {
        if (p_.lambda_v * span < 1e-12) {
            // conditioning degenerates to the uniform limit
            return p_.r_rmin + span * rng.uniform01();
        }
        for (long guard = 0; guard < 100'000'000; ++guard) {
            const double gap = rng.exponential(p_.lambda_v);
            if (gap <= span) return p_.r_rmin + gap;
        }
        throw std::runtime_error("radar range rejection sampler stalled");
    }
    const double u = rng.uniform01();
    const double eps = p_.lambda_v * span;
    if (eps < 1e-8) return p_.r_rmin + u * span * (1.0 + 0.5 * eps * (u - 1.0));
    return p_.r_rmin - std::log1p(-u * (-std::expm1(-eps))) / p_.lambda_v;
}

void Simulator::sample_core(Rng& rng, double& s_r, double& s_c, double& interference,
                            Realization* full) const {
    const double rr = sample_r_radar(rng);
    const double rc = r_cmin_ + rng.exponential(p_.lambda_l);

    double acc = 0.0;
    if (p_.lambda_i > 0.0) {
        double pos = r_imin_ + rng.exponential(p_.lambda_i);
        while (pos <= r_trunc_) {
            const double h2 = sample_fading(rng);
            acc += friis_i_ * std::pow(pos * pos + p_.d_i * p_.d_i, -p_.alpha_i / 2.0) * h2;
            if (full) {
                full->interferer_r.push_back(pos);
                full->fading.push_back(h2);
            }
            pos += rng.exponential(p_.lambda_i);
        }
    }

    // received powers straight from the propagation equations; the radar
    // path loss is evaluated at the round-trip distance 2r
    s_r = friis_r_ * std::pow(2.0 * rr, -p_.alpha_r);
    s_c = friis_c_ * std::pow(rc * rc + p_.d_c * p_.d_c, -p_.alpha_c / 2.0);
    interference = acc;
    if (full) {
        full->r_radar = rr;
        full->r_comm = rc;
    }
}

Realization Simulator::sample_realization(std::uint64_t seed, std::uint64_t index) const {
    Realization out;
    Rng rng(seed, index);
    sample_core(rng, out.s_r, out.s_c, out.interference, &out);
    return out;
}

McEstimate Simulator::estimate(MetricKind kind, const Thresholds& th, const ResidualModel& model,
                               long n, std::uint64_t seed) const {
    if (n < 1000) throw std::invalid_argument("mc estimate: require n >= 1000");

    const double theta_rate = kind == MetricKind::rate_cdf ? std::exp2(th.eta) - 1.0 : 0.0;

    // per-realization statistic; indicator for all probability metrics
    auto statistic = [&](double s_r, double s_c, double interference) -> double {
        const Residuals z = residuals(s_r, s_c, model);
        const double at_radar = z.zeta_c + interference;
        const double at_comm = z.zeta_r + interference;
        switch (kind) {
            case MetricKind::coverage: return s_c >= th.theta * at_comm ? 1.0 : 0.0;
            case MetricKind::false_alarm: return at_radar >= th.gamma ? 1.0 : 0.0;
            case MetricKind::detection:
                return s_r * p_.kappa + at_radar >= th.gamma ? 1.0 : 0.0;
            case MetricKind::success:
                return s_r * p_.kappa >= th.theta_prime * at_radar ? 1.0 : 0.0;
            case MetricKind::jrdccp:
                return (s_r * p_.kappa + at_radar >= th.gamma && s_c >= th.theta * at_comm) ? 1.0 : 0.0;
            case MetricKind::jrsccp:
                return (s_r * p_.kappa >= th.theta_prime * at_radar && s_c >= th.theta * at_comm)
                           ? 1.0 : 0.0;
            case MetricKind::rate_cdf: return s_c >= theta_rate * at_comm ? 1.0 : 0.0;
            case MetricKind::avg_rate:
                return at_comm > 0.0 ? std::log2(1.0 + s_c / at_comm)
                                     : std::numeric_limits<double>::infinity();
        }
        return 0.0;
    };

    constexpr long kChunk = 8192;
    const long chunks = (n + kChunk - 1) / kChunk;
    std::vector<double> sums(chunks, 0.0), sumsq(chunks, 0.0);

    parallel_for(chunks, [&](long c) {
        const long lo = c * kChunk;
        const long hi = std::min(n, lo + kChunk);
        double s = 0.0, s2 = 0.0;
        for (long i = lo; i < hi; ++i) {
            Rng rng(seed, static_cast<std::uint64_t>(i));
            double s_r, s_c, interference;
            sample_core(rng, s_r, s_c, interference, nullptr);
            const double v = statistic(s_r, s_c, interference);
            s += v;
            s2 += v * v;
        }
        sums[c] = s;
        sumsq[c] = s2;
    });

    double total = 0.0, total_sq = 0.0;
    for (long c = 0; c < chunks; ++c) {  // fixed reduction order
        total += sums[c];
        total_sq += sumsq[c];
    }

    McEstimate est;
    est.n = n;
    est.seed = seed;
    est.value = total / static_cast<double>(n);
    if (opts_.exact_ci && kind != MetricKind::avg_rate) {
        const auto [lo, hi] = clopper_pearson(std::lround(total), n);
        est.half_width = 0.5 * (hi - lo);
    } else {
        const double var = std::max(0.0, total_sq / n - est.value * est.value);
        est.half_width = 1.96 * std::sqrt(var / static_cast<double>(n));
    }
    return est;
}

std::vector<double> Simulator::interference_samples(long n, std::uint64_t seed) const {
    std::vector<double> out(static_cast<std::size_t>(n));
    constexpr long kChunk = 8192;
    const long chunks = (n + kChunk - 1) / kChunk;
    parallel_for(chunks, [&](long c) {
        const long lo = c * kChunk;
        const long hi = std::min(n, lo + kChunk);
        for (long i = lo; i < hi; ++i) {
            Rng rng(seed, static_cast<std::uint64_t>(i));
            double s_r, s_c, interference;
            sample_core(rng, s_r, s_c, interference, nullptr);
            out[static_cast<std::size_t>(i)] = interference;
        }
    });
    std::sort(out.begin(), out.end());
    return out;
}

double EmpiricalCdf::operator()(double x) const {
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
    return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
}

double ks_distance(const std::vector<double>& sorted_samples,
                   const std::function<double(double)>& cdf) {
    const double n = static_cast<double>(sorted_samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted_samples.size(); ++i) {
        const double f = cdf(sorted_samples[i]);
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
        d = std::max(d, std::abs(static_cast<double>(i) / n - f));
    }
    return d;
}

double ks_two_sample_distance(const std::vector<double>& a, const std::vector<double>& b) {
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

namespace {

// regularized incomplete beta I_x(a, b), continued fraction (Lentz)
double beta_cf(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 3e-15) break;
    }
    return h;
}

double betai(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - ln_beta);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double beta_quantile(double p, double a, double b) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (betai(a, b, mid) < p) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

std::pair<double, double> clopper_pearson(long k, long n, double alpha) {
    const double lo = k == 0 ? 0.0 : beta_quantile(alpha / 2.0, static_cast<double>(k),
                                                   static_cast<double>(n - k + 1));
    const double hi = k == n ? 1.0 : beta_quantile(1.0 - alpha / 2.0, static_cast<double>(k + 1),
                                                   static_cast<double>(n - k));
    return {lo, hi};
}

double ks_p_value(double d, double n_eff) {
    const double rt = std::sqrt(n_eff);
    const double lambda = (rt + 0.12 + 0.11 / rt) * d;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = 2.0 * ((k % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-12) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

}  // namespace dfrcsg
