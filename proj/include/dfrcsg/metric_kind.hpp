#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace dfrcsg {

enum class MetricKind {
    coverage,
    false_alarm,
    detection,
    success,
    jrdccp,
    jrsccp,
    rate_cdf,
    avg_rate,
};

// Linear-unit thresholds; which fields apply depends on the metric.
struct Thresholds {
    double theta = 0.0;        // communication SIR threshold
    double theta_prime = 0.0;  // radar SIR threshold
    double gamma = 0.0;        // radar detector threshold (W)
    double eta = 0.0;          // spectral efficiency (bit/s/Hz)
};

inline const char* to_string(MetricKind k) {
    switch (k) {
        case MetricKind::coverage: return "coverage";
        case MetricKind::false_alarm: return "false_alarm";
        case MetricKind::detection: return "detection";
        case MetricKind::success: return "success";
        case MetricKind::jrdccp: return "jrdccp";
        case MetricKind::jrsccp: return "jrsccp";
        case MetricKind::rate_cdf: return "rate_cdf";
        case MetricKind::avg_rate: return "avg_rate";
    }
    return "?";
}

inline std::optional<MetricKind> parse_metric(const std::string& name) {
    if (name == "coverage") return MetricKind::coverage;
    if (name == "false_alarm" || name == "fa") return MetricKind::false_alarm;
    if (name == "detection") return MetricKind::detection;
    if (name == "success") return MetricKind::success;
    if (name == "jrdccp") return MetricKind::jrdccp;
    if (name == "jrsccp") return MetricKind::jrsccp;
    if (name == "rate_cdf") return MetricKind::rate_cdf;
    if (name == "avg_rate") return MetricKind::avg_rate;
    return std::nullopt;
}

inline bool needs_theta(MetricKind k) {
    return k == MetricKind::coverage || k == MetricKind::jrdccp || k == MetricKind::jrsccp;
}
inline bool needs_theta_prime(MetricKind k) {
    return k == MetricKind::success || k == MetricKind::jrsccp;
}
inline bool needs_gamma(MetricKind k) {
    return k == MetricKind::false_alarm || k == MetricKind::detection || k == MetricKind::jrdccp;
}
inline bool needs_eta(MetricKind k) { return k == MetricKind::rate_cdf; }

}  // namespace dfrcsg
