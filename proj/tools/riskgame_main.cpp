#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "riskgame/montecarlo.hpp"
#include "riskgame/scenario.hpp"
#include "riskgame/textfmt.hpp"
#include "riskgame/threshold.hpp"

namespace {

using namespace riskgame;

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open output file: " + path);
    }
    return out;
}

void finish_output(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) {
        throw IoError("cannot write output file: " + path);
    }
}

// RISKGAME_SEED overrides the scenario seed; an explicit --seed flag wins
// over both.
void apply_seed_env(ScenarioFile& scenario) {
    const char* env = std::getenv("RISKGAME_SEED");
    if (env == nullptr) return;
    const std::string text(env);
    std::uint64_t seed = 0;
    const auto result =
        std::from_chars(text.data(), text.data() + text.size(), seed);
    if (result.ec != std::errc{} || result.ptr != text.data() + text.size()) {
        throw ScenarioError("RISKGAME_SEED: '" + text +
                            "' is not an unsigned integer");
    }
    scenario.seed = seed;
}

std::string percent_text(DetectionProbability p) {
    return format_sig9(p.value() * 100.0) + "%";
}

struct AttackerAnalysis {
    std::string label;
    double alpha = 0.0;
    DetectionProbability p_keylogger;
    DetectionProbability p_ransomware;
    IndifferenceResult threshold;
    std::string best_attack_label;
    double best_attack_eu = 0.0;
};

int cmd_analyze(const ScenarioFile& scenario, const std::string& out_path) {
    const DetectionMatrix matrix = detection_matrix(scenario);
    const DetectorStrategy chosen = best_defender_strategy(matrix);
    const std::vector<FamilyId> dominated = dominated_families(matrix);

    std::cout << "defender strategy selection\n";
    for (DetectorStrategy strategy : kAllStrategies) {
        std::cout << "  " << to_string(strategy) << ": average detection "
                  << percent_text(column_average(matrix, strategy)) << "\n";
    }
    std::cout << "  chosen: " << to_string(chosen) << "\n";

    std::cout << "dominated families:";
    if (dominated.empty()) {
        std::cout << " none";
    }
    for (FamilyId family : dominated) {
        std::cout << ' ' << to_string(family);
    }
    std::cout << "\n";

    // Candidate set for the per-attacker choice: the declared variants, or
    // the default variant of every family when none are declared.
    std::vector<MalwareVariant> candidates = build_variants(scenario);
    if (candidates.empty()) {
        for (FamilyId family : kAllFamilies) {
            candidates.push_back(make_variant(
                scenario_family(scenario, family),
                scenario_family(scenario, family).default_exfil_interval_s,
                std::string(to_string(family)) + "_default"));
        }
    }

    std::vector<AttackerAnalysis> analyses;
    for (const AttackerProfile& attacker : build_attackers(scenario)) {
        AttackerAnalysis analysis;
        analysis.label = attacker.risk.label;
        analysis.alpha = attacker.risk.alpha;
        analysis.p_keylogger =
            belief_probability(attacker, FamilyId::Keylogger, scenario.options);
        analysis.p_ransomware =
            belief_probability(attacker, FamilyId::Ransomware, scenario.options);

        double v_keylogger = 1.0;
        if (auto it = attacker.valuation_overrides.find(FamilyId::Keylogger);
            it != attacker.valuation_overrides.end()) {
            v_keylogger = it->second.value();
        }
        analysis.threshold = indifference_ratio(
            IndifferenceQuery{attacker.risk.alpha, analysis.p_keylogger,
                              analysis.p_ransomware, Valuation(v_keylogger)});

        const AttackChoice choice =
            best_attack(attacker, candidates, scenario.options);
        analysis.best_attack_label = candidates[choice.index].label;
        analysis.best_attack_eu = choice.expected_utility;
        analyses.push_back(std::move(analysis));

        const AttackerAnalysis& a = analyses.back();
        std::cout << "attacker " << a.label << " (alpha="
                  << format_sig9(a.alpha) << ", "
                  << to_string(classify_attitude(attacker.risk)) << ")\n";
        std::cout << "  believed detection: keylogger "
                  << percent_text(a.p_keylogger) << ", ransomware "
                  << percent_text(a.p_ransomware) << "\n";
        std::cout << "  ransomware/keylogger indifference ratio: ";
        if (a.threshold.saturated()) {
            std::cout << "saturated (no finite ransomware value suffices)";
        } else {
            std::cout << format_sig9(a.threshold.threshold->value());
        }
        std::cout << "\n  best attack: " << a.best_attack_label
                  << " (expected utility " << format_sig9(a.best_attack_eu)
                  << ")\n";
    }

    if (!out_path.empty()) {
        std::ofstream out = open_output(out_path);
        out << "key,attacker,value\n";
        for (DetectorStrategy strategy : kAllStrategies) {
            out << "column_average_" << to_string(strategy) << ",,"
                << format_sig9(column_average(matrix, strategy).value())
                << "\n";
        }
        out << "defender_strategy,," << to_string(chosen) << "\n";
        out << "dominated_families,,";
        for (std::size_t i = 0; i < dominated.size(); ++i) {
            out << (i ? ";" : "") << to_string(dominated[i]);
        }
        out << "\n";
        for (const auto& a : analyses) {
            out << "belief_p_keylogger," << a.label << ","
                << format_sig9(a.p_keylogger.value()) << "\n";
            out << "belief_p_ransomware," << a.label << ","
                << format_sig9(a.p_ransomware.value()) << "\n";
            out << "indifference_ratio," << a.label << ",";
            if (a.threshold.saturated()) {
                out << "saturated";
            } else {
                out << format_sig9(a.threshold.threshold->value());
            }
            out << "\n";
            out << "best_attack," << a.label << "," << a.best_attack_label
                << "\n";
            out << "best_attack_expected_utility," << a.label << ","
                << format_sig9(a.best_attack_eu) << "\n";
        }
        finish_output(out, out_path);
        std::cout << "csv: " << out_path << "\n";
    }
    return 0;
}

int cmd_regions(const ScenarioFile& scenario, const std::string& out_path,
                double alpha_min, double alpha_max, double ratio_min,
                double ratio_max, std::size_t steps) {
    const DetectionMatrix matrix = detection_matrix(scenario);
    const auto decimals = scenario.options.rounding_decimals;
    const DetectionProbability p_k = rounded_probability(
        row_average(matrix, FamilyId::Keylogger), decimals);
    const DetectionProbability p_r = rounded_probability(
        row_average(matrix, FamilyId::Ransomware), decimals);

    const RegionGrid grid = preference_region_grid(
        alpha_min, alpha_max, ratio_min, ratio_max, steps, steps, p_k, p_r);

    std::ofstream out = open_output(out_path);
    write_region_csv(grid, out);
    finish_output(out, out_path);
    std::cout << "wrote " << grid.alpha_axis.size() << "x"
              << grid.ratio_axis.size() << " grid (p_keylogger "
              << format_sig9(p_k.value()) << ", p_ransomware "
              << format_sig9(p_r.value()) << ") to " << out_path << "\n";
    return 0;
}

int cmd_simulate(const ScenarioFile& scenario, const std::string& out_path) {
    const SimulationPlan plan = build_simulation_plan(scenario);
    const SimulationReport report = run_simulation(plan);
    render_utility_table(report, std::cout);

    std::ofstream out = open_output(out_path);
    write_simulation_csv(report, out);
    finish_output(out, out_path);
    std::cout << "\ncsv: " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"risk-sensitive attacker/defender detection game"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_path;

    auto* analyze = app.add_subcommand(
        "analyze", "defender choice, dominance, thresholds, best attacks");
    analyze->add_option("--scenario", scenario_path, "scenario JSON file")
        ->required();
    analyze->add_option("--out", out_path, "optional CSV summary path");

    auto* regions = app.add_subcommand(
        "regions", "preferred-family map over an (alpha, value-ratio) grid");
    std::string regions_out = "regions.csv";
    double alpha_min = -0.1, alpha_max = 0.1;
    double ratio_min = 0.0, ratio_max = 100.0;
    std::size_t steps = 200;
    regions->add_option("--scenario", scenario_path, "scenario JSON file")
        ->required();
    regions->add_option("--out", regions_out, "grid CSV path");
    regions->add_option("--alpha-min", alpha_min, "lowest CARA coefficient");
    regions->add_option("--alpha-max", alpha_max, "highest CARA coefficient");
    regions->add_option("--ratio-min", ratio_min, "lowest value ratio");
    regions->add_option("--ratio-max", ratio_max, "highest value ratio");
    regions->add_option("--steps", steps, "grid points per axis");

    auto* simulate = app.add_subcommand(
        "simulate", "seeded detection trials and utility tables");
    std::string simulate_out = "simulation.csv";
    std::optional<std::uint64_t> trials_flag;
    std::optional<std::uint64_t> seed_flag;
    simulate->add_option("--scenario", scenario_path, "scenario JSON file")
        ->required();
    simulate->add_option("--out", simulate_out, "report CSV path");
    simulate->add_option("--trials", trials_flag, "override trial count");
    simulate->add_option("--seed", seed_flag, "override random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        ScenarioFile scenario = riskgame::load_scenario(scenario_path);
        apply_seed_env(scenario);
        if (analyze->parsed()) {
            return cmd_analyze(scenario, out_path);
        }
        if (regions->parsed()) {
            return cmd_regions(scenario, regions_out, alpha_min, alpha_max,
                               ratio_min, ratio_max, steps);
        }
        if (seed_flag) scenario.seed = *seed_flag;
        if (trials_flag) {
            if (*trials_flag < 1) {
                throw riskgame::ScenarioError("--trials: must be >= 1");
            }
            scenario.trials = *trials_flag;
        }
        return cmd_simulate(scenario, simulate_out);
    } catch (const riskgame::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
