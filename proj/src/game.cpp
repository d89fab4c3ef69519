#include "riskgame/game.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace riskgame {

namespace {

std::size_t index_of(FamilyId family) {
    return static_cast<std::size_t>(family);
}

std::size_t index_of(DetectorStrategy strategy) {
    return static_cast<std::size_t>(strategy);
}

DetectionProbability clamped_probability(double p) {
    return DetectionProbability(std::clamp(p, 0.0, 1.0));
}

}  // namespace

DetectionProbability rounded_probability(DetectionProbability p,
                                         std::optional<int> decimals) {
    if (!decimals) return p;
    const double scale = std::pow(10.0, *decimals);
    return clamped_probability(std::round(p.value() * scale) / scale);
}

const char* to_string(FamilyId family) {
    switch (family) {
    case FamilyId::Keylogger: return "keylogger";
    case FamilyId::Cryptominer: return "cryptominer";
    case FamilyId::Ransomware: return "ransomware";
    }
    return "?";
}

const char* to_string(DetectorStrategy strategy) {
    switch (strategy) {
    case DetectorStrategy::Syscall: return "syscall";
    case DetectorStrategy::Packets: return "packets";
    case DetectorStrategy::Merged: return "merged";
    }
    return "?";
}

std::optional<FamilyId> family_from_string(std::string_view name) {
    for (FamilyId f : kAllFamilies) {
        if (name == to_string(f)) return f;
    }
    return std::nullopt;
}

std::optional<DetectorStrategy> strategy_from_string(std::string_view name) {
    for (DetectorStrategy s : kAllStrategies) {
        if (name == to_string(s)) return s;
    }
    return std::nullopt;
}

int cost_rank(DetectorStrategy strategy) {
    switch (strategy) {
    case DetectorStrategy::Packets: return 0;
    case DetectorStrategy::Syscall: return 1;
    case DetectorStrategy::Merged: return 2;
    }
    return 3;
}

MalwareFamily canonical_family(FamilyId id) {
    switch (id) {
    case FamilyId::Keylogger:
        return {id, 0.1, "keystroke exfiltration"};
    case FamilyId::Cryptominer:
        return {id, 0.1, "coin mining with C2 beacon"};
    case FamilyId::Ransomware:
        return {id, 15.0, "encryption with C2 beacon"};
    }
    throw std::domain_error("canonical_family: unknown family");
}

DetectionProbability DetectionMatrix::at(FamilyId family,
                                         DetectorStrategy strategy) const {
    return entries_[index_of(family)][index_of(strategy)];
}

void DetectionMatrix::set(FamilyId family, DetectorStrategy strategy,
                          DetectionProbability p) {
    entries_[index_of(family)][index_of(strategy)] = p;
}

const char* to_string(BeliefMode mode) {
    switch (mode) {
    case BeliefMode::RowAverage: return "row_average";
    case BeliefMode::ColumnConditional: return "column_conditional";
    }
    return "?";
}

std::optional<BeliefMode> belief_mode_from_string(std::string_view name) {
    if (name == "row_average") return BeliefMode::RowAverage;
    if (name == "column_conditional") return BeliefMode::ColumnConditional;
    return std::nullopt;
}

DetectionProbability row_average(const DetectionMatrix& matrix,
                                 FamilyId family) {
    double sum = 0.0;
    for (DetectorStrategy s : kAllStrategies) {
        sum += matrix.at(family, s).value();
    }
    return clamped_probability(sum / static_cast<double>(kAllStrategies.size()));
}

DetectionProbability column_average(const DetectionMatrix& matrix,
                                    DetectorStrategy strategy) {
    double sum = 0.0;
    for (FamilyId f : kAllFamilies) {
        sum += matrix.at(f, strategy).value();
    }
    return clamped_probability(sum / static_cast<double>(kAllFamilies.size()));
}

DetectorStrategy best_defender_strategy(const DetectionMatrix& matrix) {
    DetectorStrategy best = kAllStrategies.front();
    double best_avg = column_average(matrix, best).value();
    for (DetectorStrategy s : kAllStrategies) {
        const double avg = column_average(matrix, s).value();
        if (avg > best_avg ||
            (avg == best_avg && cost_rank(s) < cost_rank(best))) {
            best = s;
            best_avg = avg;
        }
    }
    return best;
}

DetectionProbability belief_probability(const AttackerProfile& attacker,
                                        FamilyId family,
                                        const BeliefPolicy& policy) {
    DetectionProbability p;
    switch (policy.mode) {
    case BeliefMode::RowAverage:
        p = row_average(attacker.beliefs, family);
        break;
    case BeliefMode::ColumnConditional:
        p = attacker.beliefs.at(family, best_defender_strategy(attacker.beliefs));
        break;
    }
    return rounded_probability(p, policy.rounding_decimals);
}

std::vector<FamilyId> dominated_families(const DetectionMatrix& matrix,
                                         std::span<const FamilyId> value_order) {
    if (value_order.empty()) {
        throw std::domain_error("dominated_families: empty value order");
    }
    std::array<int, kAllFamilies.size()> seen{};
    for (FamilyId f : value_order) {
        if (++seen[static_cast<std::size_t>(f)] > 1) {
            throw std::domain_error(
                "dominated_families: value order must be strict (family "
                "listed twice)");
        }
    }

    std::vector<FamilyId> result;
    for (std::size_t lower = 0; lower < value_order.size(); ++lower) {
        const double p_lower = row_average(matrix, value_order[lower]).value();
        for (std::size_t upper = 0; upper < lower; ++upper) {
            if (row_average(matrix, value_order[upper]).value() <= p_lower) {
                result.push_back(value_order[lower]);
                break;
            }
        }
    }
    std::sort(result.begin(), result.end());
    return result;
}

Valuation variant_value(const MalwareFamily& family, double exfil_interval_s) {
    if (!std::isfinite(exfil_interval_s) || exfil_interval_s <= 0.0) {
        throw std::domain_error("variant_value: exfiltration interval must be > 0");
    }
    if (!std::isfinite(family.default_exfil_interval_s) ||
        family.default_exfil_interval_s <= 0.0) {
        throw std::domain_error("variant_value: family default interval must be > 0");
    }
    return Valuation(family.default_exfil_interval_s / exfil_interval_s);
}

MalwareVariant make_variant(const MalwareFamily& family,
                            double exfil_interval_s, std::string label,
                            std::optional<DetectionProbability> actual) {
    MalwareVariant variant;
    variant.family = family;
    variant.exfil_interval_s = exfil_interval_s;
    variant.label = std::move(label);
    variant.value = variant_value(family, exfil_interval_s);
    variant.actual_detection = actual;
    return variant;
}

Valuation effective_value(const AttackerProfile& attacker,
                          const MalwareVariant& variant) {
    double base = 1.0;
    if (auto it = attacker.valuation_overrides.find(variant.family.id);
        it != attacker.valuation_overrides.end()) {
        base = it->second.value();
    }
    return Valuation(base * variant.value.value());
}

AttackChoice best_attack(const AttackerProfile& attacker,
                         std::span<const MalwareVariant> candidates,
                         const BeliefPolicy& policy) {
    if (candidates.empty()) {
        throw std::domain_error("best_attack: no candidates");
    }
    AttackChoice best;
    bool first = true;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const DetectionProbability p =
            belief_probability(attacker, candidates[i].family.id, policy);
        const double eu = expected_utility(
            p, attacker.risk, effective_value(attacker, candidates[i]));
        const bool wins =
            first || eu > best.expected_utility ||
            (eu == best.expected_utility && p.value() < best.belief.value());
        if (wins) {
            best = AttackChoice{i, eu, p};
            first = false;
        }
    }
    return best;
}

}  // namespace riskgame
