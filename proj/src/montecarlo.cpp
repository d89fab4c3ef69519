#include "riskgame/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "riskgame/textfmt.hpp"

namespace riskgame {

namespace detail {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t attacker,
                           std::uint64_t variant, std::uint64_t trial) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ attacker);
    h = splitmix64(h ^ variant);
    h = splitmix64(h ^ trial);
    return h;
}

double uniform01(std::uint64_t hash) {
    return static_cast<double>(hash >> 11) * 0x1.0p-53;
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("normal_quantile: p must lie in (0, 1)");
    }
    // Acklam's rational approximation.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // One Halley refinement step against the exact CDF.
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

}  // namespace detail

double realized_utility(DetectionProbability p_actual,
                        const RiskProfile& profile, Valuation v) {
    return (1.0 - p_actual.value()) * exponential_utility(profile, v);
}

const SimulationCell& SimulationReport::cell(const std::string& attacker,
                                             const std::string& variant) const {
    for (const auto& c : cells) {
        if (c.attacker == attacker && c.variant == variant) return c;
    }
    throw std::domain_error("SimulationReport: no cell for attacker '" +
                            attacker + "', variant '" + variant + "'");
}

namespace {

// The family this attacker would pick a priori among the plan's families at
// their default-parameter values; satisfaction ratios are taken against its
// best-realized variant.
std::optional<FamilyId> reference_family(const AttackerProfile& attacker,
                                         const SimulationPlan& plan) {
    std::vector<MalwareVariant> defaults;
    for (const auto& variant : plan.variants) {
        const bool seen = std::any_of(
            defaults.begin(), defaults.end(), [&](const MalwareVariant& v) {
                return v.family.id == variant.family.id;
            });
        if (!seen) {
            defaults.push_back(make_variant(
                variant.family, variant.family.default_exfil_interval_s));
        }
    }
    if (defaults.empty()) return std::nullopt;
    const AttackChoice choice = best_attack(attacker, defaults, plan.beliefs);
    return defaults[choice.index].family.id;
}

}  // namespace

SimulationReport run_simulation(const SimulationPlan& plan) {
    if (plan.trials < 1) {
        throw std::domain_error("run_simulation: trials must be >= 1");
    }
    if (!std::isfinite(plan.detection_penalty)) {
        throw std::domain_error("run_simulation: detection penalty must be finite");
    }
    for (const auto& variant : plan.variants) {
        if (!variant.actual_detection) {
            throw std::domain_error(
                "run_simulation: variant '" + variant.label +
                "' has no actual detection probability");
        }
    }

    SimulationReport report;
    report.trials = plan.trials;
    report.seed = plan.seed;
    report.cells.reserve(plan.attackers.size() * plan.variants.size());

    const double n = static_cast<double>(plan.trials);
    for (std::size_t ai = 0; ai < plan.attackers.size(); ++ai) {
        const AttackerProfile& attacker = plan.attackers[ai];
        const std::size_t first_cell = report.cells.size();
        for (std::size_t vi = 0; vi < plan.variants.size(); ++vi) {
            const MalwareVariant& variant = plan.variants[vi];
            const DetectionProbability p_actual = *variant.actual_detection;
            const DetectionProbability p_belief =
                belief_probability(attacker, variant.family.id, plan.beliefs);
            const Valuation value = effective_value(attacker, variant);
            const double utility = exponential_utility(attacker.risk, value);

            std::uint64_t detections = 0;
            for (std::uint64_t t = 0; t < plan.trials; ++t) {
                const double draw = detail::uniform01(
                    detail::counter_hash(plan.seed, ai, vi, t));
                if (draw < p_actual.value()) ++detections;
            }

            // Trials take only two values (utility or penalty), so the exact
            // detection count is a sufficient statistic for mean and spread
            // whatever order the trials ran in.
            const double k = static_cast<double>(detections);
            const double penalty = plan.detection_penalty;
            const double mean = ((n - k) * utility + k * penalty) / n;
            double variance = 0.0;
            if (plan.trials >= 2) {
                const double du = utility - mean;
                const double dp = penalty - mean;
                variance = ((n - k) * du * du + k * dp * dp) / (n - 1.0);
            }

            SimulationCell cell;
            cell.attacker = attacker.risk.label;
            cell.alpha = attacker.risk.alpha;
            cell.variant = variant.label;
            cell.family = variant.family.id;
            cell.value = value.value();
            cell.p_belief = p_belief.value();
            cell.p_actual = p_actual.value();
            cell.expected_utility =
                expected_utility(p_belief, attacker.risk, value);
            cell.analytic_realized =
                (1.0 - p_actual.value()) * utility + p_actual.value() * penalty;
            cell.mc_mean = mean;
            cell.mc_std_error = std::sqrt(variance / n);
            cell.detections = detections;
            cell.trials = plan.trials;
            report.cells.push_back(std::move(cell));
        }

        const auto reference = reference_family(attacker, plan);
        if (!reference) continue;
        double best_realized = 0.0;
        for (std::size_t i = first_cell; i < report.cells.size(); ++i) {
            const auto& cell = report.cells[i];
            if (cell.family == *reference) {
                best_realized = std::max(best_realized, cell.analytic_realized);
            }
        }
        if (best_realized > 0.0) {
            for (std::size_t i = first_cell; i < report.cells.size(); ++i) {
                report.cells[i].satisfaction_ratio =
                    report.cells[i].analytic_realized / best_realized;
            }
        }
    }
    return report;
}

double satisfaction_ratio(const SimulationReport& report,
                          const std::string& attacker,
                          const std::string& numerator_variant,
                          const std::string& denominator_variant) {
    const double numerator =
        report.cell(attacker, numerator_variant).analytic_realized;
    const double denominator =
        report.cell(attacker, denominator_variant).analytic_realized;
    if (denominator == 0.0) {
        throw std::domain_error(
            "satisfaction_ratio: denominator variant '" + denominator_variant +
            "' has zero realized utility");
    }
    return numerator / denominator;
}

ProportionEstimate calibrate_detection(std::uint64_t detections,
                                       std::uint64_t trials,
                                       double confidence) {
    if (trials == 0) {
        throw std::domain_error("calibrate_detection: trials must be >= 1");
    }
    if (detections > trials) {
        throw std::domain_error("calibrate_detection: detections exceed trials");
    }
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw std::domain_error(
            "calibrate_detection: confidence must lie in (0, 1)");
    }
    const double n = static_cast<double>(trials);
    const double p_hat = static_cast<double>(detections) / n;
    const double z = detail::normal_quantile(0.5 * (1.0 + confidence));
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p_hat + z2 / (2.0 * n)) / denom;
    const double half =
        (z / denom) * std::sqrt(p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n));
    ProportionEstimate result;
    result.estimate = p_hat;
    result.lower = std::clamp(center - half, 0.0, p_hat);
    result.upper = std::clamp(center + half, p_hat, 1.0);
    result.confidence = confidence;
    return result;
}

void write_simulation_csv(const SimulationReport& report, std::ostream& out) {
    out << "attacker,alpha,variant,family,value,p_belief,p_actual,"
           "expected_utility,analytic_realized,mc_mean,mc_std_error,"
           "detections,trials\n";
    for (const auto& cell : report.cells) {
        out << cell.attacker << ',' << format_sig9(cell.alpha) << ','
            << cell.variant << ',' << to_string(cell.family) << ','
            << format_sig9(cell.value) << ',' << format_sig9(cell.p_belief)
            << ',' << format_sig9(cell.p_actual) << ','
            << format_sig9(cell.expected_utility) << ','
            << format_sig9(cell.analytic_realized) << ','
            << format_sig9(cell.mc_mean) << ','
            << format_sig9(cell.mc_std_error) << ',' << cell.detections << ','
            << cell.trials << '\n';
    }
}

void render_utility_table(const SimulationReport& report, std::ostream& out) {
    out << "utilities x1000 (" << report.trials << " trials, seed "
        << report.seed << ")\n\n";
    out << std::left << std::setw(16) << "attacker" << std::setw(24)
        << "variant" << std::setw(13) << "family" << std::setw(12) << "value"
        << std::setw(10) << "p_belief" << std::setw(10) << "p_actual"
        << std::setw(10) << "realized" << std::setw(10) << "mc_mean"
        << "mc_se\n";
    for (const auto& cell : report.cells) {
        out << std::left << std::setw(16) << cell.attacker << std::setw(24)
            << cell.variant << std::setw(13) << to_string(cell.family)
            << std::setw(12) << format_sig9(cell.value) << std::setw(10)
            << format_sig9(cell.p_belief) << std::setw(10)
            << format_sig9(cell.p_actual) << std::setw(10)
            << format_fixed(cell.analytic_realized * 1000.0, 3)
            << std::setw(10) << format_fixed(cell.mc_mean * 1000.0, 3)
            << format_fixed(cell.mc_std_error * 1000.0, 3) << '\n';
    }

    // Per-family a-priori expectation at the default-parameter value.
    out << "\nexpected utility x1000 at default value\n";
    out << std::left << std::setw(16) << "attacker" << std::setw(13)
        << "family" << std::setw(10) << "p_belief"
        << "expected\n";
    std::vector<std::pair<std::string, FamilyId>> printed;
    for (const auto& cell : report.cells) {
        const auto key = std::make_pair(cell.attacker, cell.family);
        if (std::find(printed.begin(), printed.end(), key) != printed.end()) {
            continue;
        }
        printed.push_back(key);
        const double expected =
            (1.0 - cell.p_belief) * detail::exp_utility(cell.alpha, 1.0);
        out << std::left << std::setw(16) << cell.attacker << std::setw(13)
            << to_string(cell.family) << std::setw(10)
            << format_sig9(cell.p_belief)
            << format_fixed(expected * 1000.0, 3) << '\n';
    }

    bool header_done = false;
    for (const auto& cell : report.cells) {
        if (!cell.satisfaction_ratio || *cell.satisfaction_ratio == 1.0) {
            continue;
        }
        if (!header_done) {
            out << "\nrealized utility relative to the attacker's reference "
                   "variant\n";
            out << std::left << std::setw(16) << "attacker" << std::setw(24)
                << "variant"
                << "ratio\n";
            header_done = true;
        }
        out << std::left << std::setw(16) << cell.attacker << std::setw(24)
            << cell.variant << format_fixed(*cell.satisfaction_ratio, 2)
            << '\n';
    }
}

}  // namespace riskgame
