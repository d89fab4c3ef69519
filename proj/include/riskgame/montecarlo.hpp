#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "riskgame/game.hpp"

namespace riskgame {

namespace detail {

// Counter-based random stream: every draw is a pure hash of
// (seed, attacker, variant, trial), so per-trial draws are independent of
// evaluation order and the simulation is reproducible bit for bit.
std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t attacker,
                           std::uint64_t variant, std::uint64_t trial);

// Maps a 64-bit hash to [0, 1).
double uniform01(std::uint64_t hash);

// Inverse standard normal CDF (rational approximation refined to machine
// precision with one Halley step).
double normal_quantile(double p);

}  // namespace detail

// A batch of detection experiments: every variant carries its empirically
// observed detection probability, every attacker plays every variant.
struct SimulationPlan {
    std::vector<MalwareVariant> variants;
    std::vector<AttackerProfile> attackers;
    std::uint64_t trials = 100000;
    std::uint64_t seed = 42;
    BeliefPolicy beliefs;
    double detection_penalty = 0.0;  // utility credited on detection
};

// One (attacker, variant) outcome row.
struct SimulationCell {
    std::string attacker;
    double alpha = 0.0;
    std::string variant;
    FamilyId family = FamilyId::Keylogger;
    double value = 0.0;      // effective value used for utilities
    double p_belief = 0.0;   // a-priori detection probability
    double p_actual = 0.0;   // observed detection probability
    double expected_utility = 0.0;   // (1 - p_belief) * u(value)
    double analytic_realized = 0.0;  // (1 - p_actual) * u(value)
    double mc_mean = 0.0;
    double mc_std_error = 0.0;
    std::uint64_t detections = 0;
    std::uint64_t trials = 0;
    // Realized utility relative to the attacker's reference variant: the
    // best-realized variant of the family they would pick a priori at
    // default values. Empty when that reference has no positive utility.
    std::optional<double> satisfaction_ratio;
};

struct SimulationReport {
    std::vector<SimulationCell> cells;  // attacker-major, variant order
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;

    const SimulationCell& cell(const std::string& attacker,
                               const std::string& variant) const;
};

// Utility actually derived from an attack observed to be detected with
// probability p_actual: (1 - p_actual) * u(v).
double realized_utility(DetectionProbability p_actual,
                        const RiskProfile& profile, Valuation v);

// Runs trials independent Bernoulli detection draws per (attacker, variant)
// on the counter-based stream. A trial yields u(value) when undetected and
// the detection penalty (default 0) when detected. Identical plans produce
// bit-identical reports.
SimulationReport run_simulation(const SimulationPlan& plan);

// Ratio of analytic realized utilities between two of one attacker's
// variants. The denominator variant must have nonzero realized utility.
double satisfaction_ratio(const SimulationReport& report,
                          const std::string& attacker,
                          const std::string& numerator_variant,
                          const std::string& denominator_variant);

struct ProportionEstimate {
    double estimate = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double confidence = 0.0;
};

// Point estimate detections/trials with a Wilson score interval.
ProportionEstimate calibrate_detection(std::uint64_t detections,
                                       std::uint64_t trials,
                                       double confidence);

// Machine CSV, one row per (attacker, variant); floats at 9 significant
// digits, never scaled.
void write_simulation_csv(const SimulationReport& report, std::ostream& out);

// Human-readable tables with utilities scaled by 1000, plus per-family
// a-priori expectations and satisfaction ratios.
void render_utility_table(const SimulationReport& report, std::ostream& out);

}  // namespace riskgame
