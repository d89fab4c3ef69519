#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "riskgame/game.hpp"
#include "riskgame/montecarlo.hpp"

namespace riskgame {

// Scenario parse/validation failure; the message names the offending field.
class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File-system failure (unreadable input, unwritable output).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A probability written as a percent ("96.35"). The original text is kept
// verbatim so a loaded scenario saves back without drift; the probability
// is parsed from it exactly once.
struct PercentEntry {
    std::string text;
    DetectionProbability probability;

    bool operator==(const PercentEntry&) const = default;
};

struct ScenarioVariant {
    std::string label;
    FamilyId family = FamilyId::Keylogger;
    double exfil_interval_s = 0.1;
    std::optional<PercentEntry> actual_detection;

    bool operator==(const ScenarioVariant&) const = default;
};

struct ScenarioAttacker {
    std::string label;
    double alpha = 0.0;
    std::map<FamilyId, double> valuations;  // base value per family

    bool operator==(const ScenarioAttacker&) const = default;
};

// In-memory form of a scenario document.
struct ScenarioFile {
    int schema_version = 1;
    std::string description;
    bool has_detection_matrix = false;
    std::array<std::array<PercentEntry, 3>, 3> matrix;  // family x strategy
    std::map<FamilyId, double> family_default_interval_s;
    std::vector<ScenarioVariant> variants;
    std::vector<ScenarioAttacker> attackers;
    std::uint64_t trials = 100000;
    std::uint64_t seed = 42;
    BeliefPolicy options;

    bool operator==(const ScenarioFile&) const = default;
};

// Loads and fully validates a scenario; the detection matrix is required.
ScenarioFile load_scenario(const std::filesystem::path& path);

// Same, but tolerates documents that omit the detection matrix (canonical
// data fragments shipped under fixtures/).
ScenarioFile load_scenario_fragment(const std::filesystem::path& path);

ScenarioFile parse_scenario(std::string_view json_text,
                            const std::string& origin = "scenario",
                            bool require_matrix = true);

std::string to_json_text(const ScenarioFile& scenario);
void save_scenario(const ScenarioFile& scenario,
                   const std::filesystem::path& path);

// Assembled views of the scenario.
DetectionMatrix detection_matrix(const ScenarioFile& scenario);
MalwareFamily scenario_family(const ScenarioFile& scenario, FamilyId id);
std::vector<MalwareVariant> build_variants(const ScenarioFile& scenario);
std::vector<AttackerProfile> build_attackers(const ScenarioFile& scenario);

// Full simulation inputs; every variant must carry an actual detection
// probability, otherwise the error names the offending variant.
SimulationPlan build_simulation_plan(const ScenarioFile& scenario);

}  // namespace riskgame
