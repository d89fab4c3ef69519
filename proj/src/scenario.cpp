#include "riskgame/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "riskgame/textfmt.hpp"

namespace riskgame {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& origin, const std::string& path,
                       const std::string& reason) {
    throw ScenarioError(origin + ": " + path + ": " + reason);
}

void check_keys(const json& node, std::initializer_list<const char*> allowed,
                const std::string& origin, const std::string& path) {
    for (const auto& item : node.items()) {
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
                return item.key() == k;
            }) == allowed.end()) {
            fail(origin, path, "unknown key '" + item.key() + "'");
        }
    }
}

double parse_decimal(const std::string& text, const std::string& origin,
                     const std::string& path) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto result = std::from_chars(begin, end, value);
    if (result.ec != std::errc{} || result.ptr != end) {
        fail(origin, path, "'" + text + "' is not a decimal number");
    }
    return value;
}

PercentEntry parse_percent(const json& node, const std::string& origin,
                           const std::string& path) {
    std::string text;
    double percent = 0.0;
    if (node.is_string()) {
        text = node.get<std::string>();
        percent = parse_decimal(text, origin, path);
    } else if (node.is_number()) {
        percent = node.get<double>();
        text = format_roundtrip(percent);
    } else {
        fail(origin, path, "expected a percent string or number");
    }
    if (!std::isfinite(percent) || percent < 0.0 || percent > 100.0) {
        fail(origin, path, "percent " + text + " outside [0, 100]");
    }
    return PercentEntry{text, DetectionProbability(percent / 100.0)};
}

void check_label(const std::string& label, const std::string& origin,
                 const std::string& path) {
    if (label.empty()) {
        fail(origin, path, "label must not be empty");
    }
    if (label.find_first_of(",\"\n\r") != std::string::npos) {
        fail(origin, path, "label '" + label + "' contains CSV delimiters");
    }
}

double parse_finite_number(const json& node, const std::string& origin,
                           const std::string& path) {
    if (!node.is_number()) {
        fail(origin, path, "expected a number");
    }
    const double value = node.get<double>();
    if (!std::isfinite(value)) {
        fail(origin, path, "must be finite");
    }
    return value;
}

std::uint64_t parse_unsigned(const json& node, const std::string& origin,
                             const std::string& path) {
    if (!node.is_number_integer() ||
        (node.is_number_integer() && !node.is_number_unsigned() &&
         node.get<std::int64_t>() < 0)) {
        fail(origin, path, "expected a non-negative integer");
    }
    return node.get<std::uint64_t>();
}

FamilyId parse_family_name(const std::string& name, const std::string& origin,
                           const std::string& path) {
    const auto family = family_from_string(name);
    if (!family) {
        fail(origin, path, "unknown family '" + name + "'");
    }
    return *family;
}

void parse_matrix(const json& node, ScenarioFile& scenario,
                  const std::string& origin) {
    if (!node.is_object()) {
        fail(origin, "detection_matrix", "expected an object");
    }
    check_keys(node, {"keylogger", "cryptominer", "ransomware"}, origin,
               "detection_matrix");
    for (FamilyId family : kAllFamilies) {
        const std::string fname = to_string(family);
        const std::string fpath = "detection_matrix." + fname;
        if (!node.contains(fname)) {
            fail(origin, fpath, "missing family row");
        }
        const json& row = node.at(fname);
        if (!row.is_object()) {
            fail(origin, fpath, "expected an object");
        }
        check_keys(row, {"syscall", "packets", "merged"}, origin, fpath);
        for (DetectorStrategy strategy : kAllStrategies) {
            const std::string sname = to_string(strategy);
            if (!row.contains(sname)) {
                fail(origin, fpath, "missing strategy column '" + sname + "'");
            }
            scenario.matrix[static_cast<std::size_t>(family)]
                          [static_cast<std::size_t>(strategy)] =
                parse_percent(row.at(sname), origin, fpath + "." + sname);
        }
    }
    scenario.has_detection_matrix = true;
}

void parse_families(const json& node, ScenarioFile& scenario,
                    const std::string& origin) {
    if (!node.is_object()) {
        fail(origin, "families", "expected an object");
    }
    check_keys(node, {"keylogger", "cryptominer", "ransomware"}, origin,
               "families");
    for (const auto& item : node.items()) {
        const std::string path = "families." + item.key();
        const FamilyId family = parse_family_name(item.key(), origin, path);
        if (!item.value().is_object()) {
            fail(origin, path, "expected an object");
        }
        check_keys(item.value(), {"default_exfil_interval_s"}, origin, path);
        if (!item.value().contains("default_exfil_interval_s")) {
            fail(origin, path, "missing default_exfil_interval_s");
        }
        const double interval =
            parse_finite_number(item.value().at("default_exfil_interval_s"),
                                origin, path + ".default_exfil_interval_s");
        if (interval <= 0.0) {
            fail(origin, path + ".default_exfil_interval_s", "must be > 0");
        }
        scenario.family_default_interval_s[family] = interval;
    }
}

void parse_variants(const json& node, ScenarioFile& scenario,
                    const std::string& origin) {
    if (!node.is_array()) {
        fail(origin, "variants", "expected an array");
    }
    for (std::size_t i = 0; i < node.size(); ++i) {
        const std::string path = "variants[" + std::to_string(i) + "]";
        const json& entry = node.at(i);
        if (!entry.is_object()) {
            fail(origin, path, "expected an object");
        }
        check_keys(entry, {"label", "family", "exfil_interval_s"}, origin,
                   path);
        for (const char* key : {"label", "family", "exfil_interval_s"}) {
            if (!entry.contains(key)) {
                fail(origin, path, std::string("missing ") + key);
            }
        }
        ScenarioVariant variant;
        if (!entry.at("label").is_string()) {
            fail(origin, path + ".label", "expected a string");
        }
        variant.label = entry.at("label").get<std::string>();
        check_label(variant.label, origin, path + ".label");
        for (const auto& existing : scenario.variants) {
            if (existing.label == variant.label) {
                fail(origin, path + ".label",
                     "duplicate label '" + variant.label + "'");
            }
        }
        if (!entry.at("family").is_string()) {
            fail(origin, path + ".family", "expected a family name");
        }
        variant.family = parse_family_name(
            entry.at("family").get<std::string>(), origin, path + ".family");
        variant.exfil_interval_s = parse_finite_number(
            entry.at("exfil_interval_s"), origin, path + ".exfil_interval_s");
        if (variant.exfil_interval_s <= 0.0) {
            fail(origin, path + ".exfil_interval_s", "must be > 0");
        }
        scenario.variants.push_back(std::move(variant));
    }
}

void parse_actual_detections(const json& node, ScenarioFile& scenario,
                             const std::string& origin) {
    if (!node.is_object()) {
        fail(origin, "actual_detections", "expected an object");
    }
    for (const auto& item : node.items()) {
        const std::string path = "actual_detections." + item.key();
        const auto it = std::find_if(
            scenario.variants.begin(), scenario.variants.end(),
            [&](const ScenarioVariant& v) { return v.label == item.key(); });
        if (it == scenario.variants.end()) {
            fail(origin, path, "no variant with this label");
        }
        it->actual_detection = parse_percent(item.value(), origin, path);
    }
}

void parse_attackers(const json& node, ScenarioFile& scenario,
                     const std::string& origin) {
    if (!node.is_array()) {
        fail(origin, "attackers", "expected an array");
    }
    for (std::size_t i = 0; i < node.size(); ++i) {
        const std::string path = "attackers[" + std::to_string(i) + "]";
        const json& entry = node.at(i);
        if (!entry.is_object()) {
            fail(origin, path, "expected an object");
        }
        check_keys(entry, {"label", "alpha", "valuations"}, origin, path);
        for (const char* key : {"label", "alpha"}) {
            if (!entry.contains(key)) {
                fail(origin, path, std::string("missing ") + key);
            }
        }
        ScenarioAttacker attacker;
        if (!entry.at("label").is_string()) {
            fail(origin, path + ".label", "expected a string");
        }
        attacker.label = entry.at("label").get<std::string>();
        check_label(attacker.label, origin, path + ".label");
        for (const auto& existing : scenario.attackers) {
            if (existing.label == attacker.label) {
                fail(origin, path + ".label",
                     "duplicate label '" + attacker.label + "'");
            }
        }
        attacker.alpha =
            parse_finite_number(entry.at("alpha"), origin, path + ".alpha");
        if (entry.contains("valuations")) {
            const json& valuations = entry.at("valuations");
            if (!valuations.is_object()) {
                fail(origin, path + ".valuations", "expected an object");
            }
            for (const auto& item : valuations.items()) {
                const std::string vpath = path + ".valuations." + item.key();
                const FamilyId family =
                    parse_family_name(item.key(), origin, vpath);
                const double value =
                    parse_finite_number(item.value(), origin, vpath);
                if (value < 0.0) {
                    fail(origin, vpath, "must be >= 0");
                }
                attacker.valuations[family] = value;
            }
        }
        scenario.attackers.push_back(std::move(attacker));
    }
}

void parse_simulation(const json& node, ScenarioFile& scenario,
                      const std::string& origin) {
    if (!node.is_object()) {
        fail(origin, "simulation", "expected an object");
    }
    check_keys(node, {"trials", "seed"}, origin, "simulation");
    if (node.contains("trials")) {
        scenario.trials =
            parse_unsigned(node.at("trials"), origin, "simulation.trials");
        if (scenario.trials < 1) {
            fail(origin, "simulation.trials", "must be >= 1");
        }
    }
    if (node.contains("seed")) {
        scenario.seed =
            parse_unsigned(node.at("seed"), origin, "simulation.seed");
    }
}

void parse_options(const json& node, ScenarioFile& scenario,
                   const std::string& origin) {
    if (!node.is_object()) {
        fail(origin, "options", "expected an object");
    }
    check_keys(node, {"belief_mode", "p_rounding_decimals"}, origin,
               "options");
    if (node.contains("belief_mode")) {
        if (!node.at("belief_mode").is_string()) {
            fail(origin, "options.belief_mode", "expected a string");
        }
        const auto mode = belief_mode_from_string(
            node.at("belief_mode").get<std::string>());
        if (!mode) {
            fail(origin, "options.belief_mode",
                 "expected 'row_average' or 'column_conditional'");
        }
        scenario.options.mode = *mode;
    }
    if (node.contains("p_rounding_decimals")) {
        const json& value = node.at("p_rounding_decimals");
        if (value.is_null() || (value.is_string() && value == "none")) {
            scenario.options.rounding_decimals = std::nullopt;
        } else if (value.is_number_integer()) {
            const auto decimals = value.get<std::int64_t>();
            if (decimals < 0 || decimals > 15) {
                fail(origin, "options.p_rounding_decimals",
                     "must lie in [0, 15] or be \"none\"");
            }
            scenario.options.rounding_decimals = static_cast<int>(decimals);
        } else {
            fail(origin, "options.p_rounding_decimals",
                 "expected an integer or \"none\"");
        }
    }
}

}  // namespace

ScenarioFile parse_scenario(std::string_view json_text,
                            const std::string& origin, bool require_matrix) {
    json document;
    try {
        document = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ScenarioError(origin + ": " + e.what());
    }
    if (!document.is_object()) {
        fail(origin, "$", "expected a JSON object");
    }
    check_keys(document,
               {"schema_version", "description", "detection_matrix",
                "families", "variants", "actual_detections", "attackers",
                "simulation", "options"},
               origin, "$");

    ScenarioFile scenario;
    for (FamilyId family : kAllFamilies) {
        scenario.family_default_interval_s[family] =
            canonical_family(family).default_exfil_interval_s;
    }

    if (!document.contains("schema_version")) {
        fail(origin, "schema_version", "missing");
    }
    if (!document.at("schema_version").is_number_integer()) {
        fail(origin, "schema_version", "expected an integer");
    }
    scenario.schema_version = document.at("schema_version").get<int>();
    if (scenario.schema_version != 1) {
        fail(origin, "schema_version",
             "unsupported version " + std::to_string(scenario.schema_version));
    }

    if (document.contains("description")) {
        if (!document.at("description").is_string()) {
            fail(origin, "description", "expected a string");
        }
        scenario.description = document.at("description").get<std::string>();
    }
    if (document.contains("detection_matrix")) {
        parse_matrix(document.at("detection_matrix"), scenario, origin);
    } else if (require_matrix) {
        fail(origin, "detection_matrix", "missing");
    }
    if (document.contains("families")) {
        parse_families(document.at("families"), scenario, origin);
    }
    if (document.contains("variants")) {
        parse_variants(document.at("variants"), scenario, origin);
    }
    if (document.contains("actual_detections")) {
        parse_actual_detections(document.at("actual_detections"), scenario,
                                origin);
    }
    if (document.contains("attackers")) {
        parse_attackers(document.at("attackers"), scenario, origin);
    }
    if (document.contains("simulation")) {
        parse_simulation(document.at("simulation"), scenario, origin);
    }
    if (document.contains("options")) {
        parse_options(document.at("options"), scenario, origin);
    }
    return scenario;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open scenario file: " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw IoError("cannot read scenario file: " + path.string());
    }
    return parse_scenario(buffer.str(), path.string(), true);
}

ScenarioFile load_scenario_fragment(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open scenario file: " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw IoError("cannot read scenario file: " + path.string());
    }
    return parse_scenario(buffer.str(), path.string(), false);
}

std::string to_json_text(const ScenarioFile& scenario) {
    json document;
    document["schema_version"] = scenario.schema_version;
    if (!scenario.description.empty()) {
        document["description"] = scenario.description;
    }
    if (scenario.has_detection_matrix) {
        json matrix;
        for (FamilyId family : kAllFamilies) {
            json row;
            for (DetectorStrategy strategy : kAllStrategies) {
                row[to_string(strategy)] =
                    scenario.matrix[static_cast<std::size_t>(family)]
                                   [static_cast<std::size_t>(strategy)]
                        .text;
            }
            matrix[to_string(family)] = std::move(row);
        }
        document["detection_matrix"] = std::move(matrix);
    }
    if (!scenario.family_default_interval_s.empty()) {
        json families;
        for (const auto& [family, interval] :
             scenario.family_default_interval_s) {
            families[to_string(family)] = {
                {"default_exfil_interval_s", interval}};
        }
        document["families"] = std::move(families);
    }
    if (!scenario.variants.empty()) {
        json variants = json::array();
        json actuals;
        for (const auto& variant : scenario.variants) {
            variants.push_back({{"label", variant.label},
                                {"family", to_string(variant.family)},
                                {"exfil_interval_s", variant.exfil_interval_s}});
            if (variant.actual_detection) {
                actuals[variant.label] = variant.actual_detection->text;
            }
        }
        document["variants"] = std::move(variants);
        if (!actuals.empty()) {
            document["actual_detections"] = std::move(actuals);
        }
    }
    if (!scenario.attackers.empty()) {
        json attackers = json::array();
        for (const auto& attacker : scenario.attackers) {
            json entry = {{"label", attacker.label}, {"alpha", attacker.alpha}};
            if (!attacker.valuations.empty()) {
                json valuations;
                for (const auto& [family, value] : attacker.valuations) {
                    valuations[to_string(family)] = value;
                }
                entry["valuations"] = std::move(valuations);
            }
            attackers.push_back(std::move(entry));
        }
        document["attackers"] = std::move(attackers);
    }
    document["simulation"] = {{"trials", scenario.trials},
                              {"seed", scenario.seed}};
    json options;
    options["belief_mode"] = to_string(scenario.options.mode);
    if (scenario.options.rounding_decimals) {
        options["p_rounding_decimals"] = *scenario.options.rounding_decimals;
    } else {
        options["p_rounding_decimals"] = "none";
    }
    document["options"] = std::move(options);
    return document.dump(2) + "\n";
}

void save_scenario(const ScenarioFile& scenario,
                   const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open output file: " + path.string());
    }
    out << to_json_text(scenario);
    if (!out) {
        throw IoError("cannot write output file: " + path.string());
    }
}

DetectionMatrix detection_matrix(const ScenarioFile& scenario) {
    if (!scenario.has_detection_matrix) {
        throw ScenarioError("scenario has no detection matrix");
    }
    DetectionMatrix matrix;
    for (FamilyId family : kAllFamilies) {
        for (DetectorStrategy strategy : kAllStrategies) {
            matrix.set(family, strategy,
                       scenario.matrix[static_cast<std::size_t>(family)]
                                      [static_cast<std::size_t>(strategy)]
                           .probability);
        }
    }
    return matrix;
}

MalwareFamily scenario_family(const ScenarioFile& scenario, FamilyId id) {
    MalwareFamily family = canonical_family(id);
    if (auto it = scenario.family_default_interval_s.find(id);
        it != scenario.family_default_interval_s.end()) {
        family.default_exfil_interval_s = it->second;
    }
    return family;
}

std::vector<MalwareVariant> build_variants(const ScenarioFile& scenario) {
    std::vector<MalwareVariant> variants;
    variants.reserve(scenario.variants.size());
    for (const auto& entry : scenario.variants) {
        std::optional<DetectionProbability> actual;
        if (entry.actual_detection) {
            actual = entry.actual_detection->probability;
        }
        variants.push_back(make_variant(scenario_family(scenario, entry.family),
                                        entry.exfil_interval_s, entry.label,
                                        actual));
    }
    return variants;
}

std::vector<AttackerProfile> build_attackers(const ScenarioFile& scenario) {
    const DetectionMatrix beliefs = detection_matrix(scenario);
    std::vector<AttackerProfile> attackers;
    attackers.reserve(scenario.attackers.size());
    for (const auto& entry : scenario.attackers) {
        AttackerProfile attacker;
        attacker.risk = RiskProfile(entry.alpha, entry.label);
        attacker.beliefs = beliefs;
        for (const auto& [family, value] : entry.valuations) {
            attacker.valuation_overrides.emplace(family, Valuation(value));
        }
        attackers.push_back(std::move(attacker));
    }
    return attackers;
}

SimulationPlan build_simulation_plan(const ScenarioFile& scenario) {
    SimulationPlan plan;
    plan.variants = build_variants(scenario);
    for (const auto& variant : plan.variants) {
        if (!variant.actual_detection) {
            throw ScenarioError("variant '" + variant.label +
                                "' has no actual detection probability");
        }
    }
    plan.attackers = build_attackers(scenario);
    plan.trials = scenario.trials;
    plan.seed = scenario.seed;
    plan.beliefs = scenario.options;
    return plan;
}

}  // namespace riskgame
