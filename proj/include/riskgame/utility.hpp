#pragma once

#include <string>

namespace riskgame {

// Attacker risk attitude, a pure function of the sign of the CARA coefficient.
enum class RiskAttitude { Seeking, Neutral, Averse };

const char* to_string(RiskAttitude attitude);

// Constant-absolute-risk-aversion coefficient, in inverse value-units.
// alpha < 0 models a risk-seeking attacker, alpha = 0 risk-neutral,
// alpha > 0 risk-averse. Must be finite.
struct RiskProfile {
    double alpha = 0.0;
    std::string label;

    RiskProfile() = default;
    explicit RiskProfile(double alpha_in, std::string label_in = {});

    bool operator==(const RiskProfile&) const = default;
};

// Non-negative, finite attack value in dimensionless value-units. The
// default-parameter variant of a malware family is normalized to value 1.
class Valuation {
public:
    Valuation() = default;
    explicit Valuation(double value);
    double value() const { return value_; }

    bool operator==(const Valuation&) const = default;

private:
    double value_ = 0.0;
};

// Probability of detection, in [0, 1].
class DetectionProbability {
public:
    DetectionProbability() = default;
    explicit DetectionProbability(double p);
    double value() const { return p_; }

    bool operator==(const DetectionProbability&) const = default;

private:
    double p_ = 0.0;
};

namespace detail {

// Raw kernel for (1 - exp(-alpha*v)) / alpha, analytically continued to
// v at alpha = 0. Evaluated through expm1 to avoid cancellation; below
// |alpha*v| < 1e-12 the Taylor form v*(1 - alpha*v/2) is used. Assumes
// finite inputs; this is the hot path for solvers and grids.
double exp_utility(double alpha, double v);

}  // namespace detail

// Exponential utility of a successful attack of value v:
//   u(v) = (1 - exp(-alpha*v)) / alpha   for alpha != 0
//   u(v) = v                             for alpha = 0
// Continuous in alpha at 0 and strictly increasing in v. For alpha > 0 the
// utility saturates below the bound 1/alpha.
double exponential_utility(const RiskProfile& profile, Valuation v);

// Expected utility of an attack detected with probability p:
//   (1 - p) * u(v)
// An attack detected with certainty is worth exactly 0.
double expected_utility(DetectionProbability p, const RiskProfile& profile,
                        Valuation v);

// Estimates the CARA coefficient -u''(v)/u'(v) from the utility curve by
// central finite differences with step h > 0. Recovers profile.alpha with
// error O(h^2) as h -> 0.
double cara_coefficient_estimate(const RiskProfile& profile, Valuation v,
                                 double h);

// Same, with the default step h = 1e-4 * max(1, |v|).
double cara_coefficient_estimate(const RiskProfile& profile, Valuation v);

RiskAttitude classify_attitude(const RiskProfile& profile);

}  // namespace riskgame
