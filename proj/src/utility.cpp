#include "riskgame/utility.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace riskgame {

const char* to_string(RiskAttitude attitude) {
    switch (attitude) {
    case RiskAttitude::Seeking: return "risk-seeking";
    case RiskAttitude::Neutral: return "risk-neutral";
    case RiskAttitude::Averse: return "risk-averse";
    }
    return "?";
}

RiskProfile::RiskProfile(double alpha_in, std::string label_in)
    : alpha(alpha_in), label(std::move(label_in)) {
    if (!std::isfinite(alpha)) {
        throw std::domain_error("RiskProfile: alpha must be finite");
    }
}

Valuation::Valuation(double value) : value_(value) {
    if (!std::isfinite(value) || value < 0.0) {
        throw std::domain_error("Valuation: value must be finite and >= 0");
    }
}

DetectionProbability::DetectionProbability(double p) : p_(p) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
        throw std::domain_error(
            "DetectionProbability: probability must lie in [0, 1]");
    }
}

namespace detail {

double exp_utility(double alpha, double v) {
    const double av = alpha * v;
    if (std::abs(av) < 1e-12) {
        return v * (1.0 - 0.5 * av);
    }
    return -std::expm1(-av) / alpha;
}

}  // namespace detail

double exponential_utility(const RiskProfile& profile, Valuation v) {
    return detail::exp_utility(profile.alpha, v.value());
}

double expected_utility(DetectionProbability p, const RiskProfile& profile,
                        Valuation v) {
    return (1.0 - p.value()) * exponential_utility(profile, v);
}

double cara_coefficient_estimate(const RiskProfile& profile, Valuation v,
                                 double h) {
    if (!std::isfinite(h) || h <= 0.0) {
        throw std::domain_error("cara_coefficient_estimate: h must be > 0");
    }
    const double a = profile.alpha;
    const double x = v.value();
    const double up = detail::exp_utility(a, x + h);
    const double um = detail::exp_utility(a, x - h);
    const double u0 = detail::exp_utility(a, x);
    const double first = (up - um) / (2.0 * h);
    const double second = (up - 2.0 * u0 + um) / (h * h);
    return -second / first;
}

double cara_coefficient_estimate(const RiskProfile& profile, Valuation v) {
    const double h = 1e-4 * std::max(1.0, std::abs(v.value()));
    return cara_coefficient_estimate(profile, v, h);
}

RiskAttitude classify_attitude(const RiskProfile& profile) {
    if (profile.alpha < 0.0) return RiskAttitude::Seeking;
    if (profile.alpha > 0.0) return RiskAttitude::Averse;
    return RiskAttitude::Neutral;
}

}  // namespace riskgame
