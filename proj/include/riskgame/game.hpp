#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "riskgame/utility.hpp"

namespace riskgame {

enum class FamilyId { Keylogger, Cryptominer, Ransomware };
enum class DetectorStrategy { Syscall, Packets, Merged };

inline constexpr std::array<FamilyId, 3> kAllFamilies = {
    FamilyId::Keylogger, FamilyId::Cryptominer, FamilyId::Ransomware};
inline constexpr std::array<DetectorStrategy, 3> kAllStrategies = {
    DetectorStrategy::Syscall, DetectorStrategy::Packets,
    DetectorStrategy::Merged};

// Families ranked by the value of a successful attack, highest first.
inline constexpr std::array<FamilyId, 3> kDefaultValueOrder = {
    FamilyId::Ransomware, FamilyId::Keylogger, FamilyId::Cryptominer};

const char* to_string(FamilyId family);
const char* to_string(DetectorStrategy strategy);
std::optional<FamilyId> family_from_string(std::string_view name);
std::optional<DetectorStrategy> strategy_from_string(std::string_view name);

// Deployment cost order: packets < syscall < merged. Merged ingests both
// data sources and is the most expensive to run.
int cost_rank(DetectorStrategy strategy);

// A malware family together with its default beaconing cadence. The default
// exfiltration interval anchors variant values: a variant's value is the
// ratio default_interval / variant_interval.
struct MalwareFamily {
    FamilyId id = FamilyId::Keylogger;
    double default_exfil_interval_s = 0.1;
    std::string payload_note;

    bool operator==(const MalwareFamily&) const = default;
};

// Canonical parameters: ransomware beacons every 15 s, keylogger and
// cryptominer every 0.1 s.
MalwareFamily canonical_family(FamilyId id);

// Complete family x strategy table of detection probabilities.
class DetectionMatrix {
public:
    DetectionMatrix() = default;

    DetectionProbability at(FamilyId family, DetectorStrategy strategy) const;
    void set(FamilyId family, DetectorStrategy strategy,
             DetectionProbability p);

    bool operator==(const DetectionMatrix&) const = default;

private:
    std::array<std::array<DetectionProbability, 3>, 3> entries_{};
};

// A parametrized malware instance. `value` is derived from the exfiltration
// cadence and is recomputable from the other fields; the default-interval
// variant has value exactly 1. `actual_detection` is the empirically
// observed detection probability, when known.
struct MalwareVariant {
    MalwareFamily family;
    double exfil_interval_s = 0.1;
    std::string label;
    Valuation value{1.0};
    std::optional<DetectionProbability> actual_detection;

    bool operator==(const MalwareVariant&) const = default;
};

// Builds a variant with its value derived from the exfiltration interval.
MalwareVariant make_variant(const MalwareFamily& family,
                            double exfil_interval_s, std::string label = {},
                            std::optional<DetectionProbability> actual = {});

// An attacker: risk attitude plus the a-priori detection probabilities they
// believe in (the common-knowledge table). `valuation_overrides` assigns a
// per-family base value; families without an entry have base value 1. The
// effective value of a variant is base value times the variant's ratio.
struct AttackerProfile {
    RiskProfile risk;
    DetectionMatrix beliefs;
    std::map<FamilyId, Valuation> valuation_overrides;

    bool operator==(const AttackerProfile&) const = default;
};

enum class BeliefMode { RowAverage, ColumnConditional };

// How an attacker condenses the belief table into one probability per
// family: either the family's row average, or the entry in the column the
// defender would pick. Probabilities are rounded to `rounding_decimals`
// decimals; nullopt disables rounding.
struct BeliefPolicy {
    BeliefMode mode = BeliefMode::RowAverage;
    std::optional<int> rounding_decimals = 4;

    bool operator==(const BeliefPolicy&) const = default;
};

const char* to_string(BeliefMode mode);
std::optional<BeliefMode> belief_mode_from_string(std::string_view name);

// Rounds a probability to the given number of decimals; nullopt is a no-op.
DetectionProbability rounded_probability(DetectionProbability p,
                                         std::optional<int> decimals);

// Arithmetic mean of a family's detection probability over all strategies.
DetectionProbability row_average(const DetectionMatrix& matrix,
                                 FamilyId family);

// Arithmetic mean of a strategy's detection probability over all families.
DetectionProbability column_average(const DetectionMatrix& matrix,
                                    DetectorStrategy strategy);

// The strategy with the best average detection rate; ties fall to the
// cheapest strategy.
DetectorStrategy best_defender_strategy(const DetectionMatrix& matrix);

DetectionProbability belief_probability(const AttackerProfile& attacker,
                                        FamilyId family,
                                        const BeliefPolicy& policy = {});

// Families no strictly-increasing-utility attacker would pick: a family is
// dominated when some family ranked above it in `value_order` has a row
// average no larger than its own. `value_order` must rank every family
// exactly once, highest value first.
std::vector<FamilyId> dominated_families(
    const DetectionMatrix& matrix,
    std::span<const FamilyId> value_order = kDefaultValueOrder);

// Value of a variant relative to the family default:
// default_interval / exfil_interval.
Valuation variant_value(const MalwareFamily& family, double exfil_interval_s);

// Base value (override or 1) times the variant's interval-derived ratio.
Valuation effective_value(const AttackerProfile& attacker,
                          const MalwareVariant& variant);

struct AttackChoice {
    std::size_t index = 0;
    double expected_utility = 0.0;
    DetectionProbability belief;
};

// The candidate maximizing the attacker's expected utility under their
// beliefs. Ties fall to the lower believed detection probability, then to
// declaration order.
AttackChoice best_attack(const AttackerProfile& attacker,
                         std::span<const MalwareVariant> candidates,
                         const BeliefPolicy& policy = {});

}  // namespace riskgame
