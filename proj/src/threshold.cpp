#include "riskgame/threshold.hpp"

#include <cmath>
#include <ostream>

#include "riskgame/textfmt.hpp"

namespace riskgame {

namespace {

void validate(const IndifferenceQuery& query) {
    if (!std::isfinite(query.alpha)) {
        throw std::domain_error("indifference query: alpha must be finite");
    }
    if (query.v_keylogger.value() <= 0.0) {
        throw std::domain_error(
            "indifference query: keylogger value must be > 0");
    }
}

double eu_difference(const IndifferenceQuery& query, double v_ransomware) {
    const double eu_r = (1.0 - query.p_ransomware.value()) *
                        detail::exp_utility(query.alpha, v_ransomware);
    const double eu_k = (1.0 - query.p_keylogger.value()) *
                        detail::exp_utility(query.alpha,
                                            query.v_keylogger.value());
    return eu_r - eu_k;
}

}  // namespace

IndifferenceResult indifference_ratio(const IndifferenceQuery& query) {
    validate(query);
    const double target = (1.0 - query.p_keylogger.value()) *
                          detail::exp_utility(query.alpha,
                                              query.v_keylogger.value());
    const double survival_r = 1.0 - query.p_ransomware.value();
    if (survival_r <= 0.0) {
        if (target > 0.0) return {};  // certain detection, positive target
        return {Valuation(0.0)};
    }
    const double required = target / survival_r;  // utility level to reach
    if (query.alpha == 0.0) {
        return {Valuation(required)};
    }
    // Invert u(v) = required: v = -ln(1 - alpha*required) / alpha. For
    // alpha > 0 the utility saturates at 1/alpha, so a non-positive log
    // argument means no finite value reaches the target.
    const double log_arg = 1.0 - query.alpha * required;
    if (log_arg <= 0.0) {
        return {};
    }
    return {Valuation(-std::log1p(-query.alpha * required) / query.alpha)};
}

Valuation indifference_ratio_bisect(const IndifferenceQuery& query,
                                    Valuation lo, Valuation hi, double tol) {
    validate(query);
    if (!(tol > 0.0) || !std::isfinite(tol)) {
        throw std::domain_error("indifference_ratio_bisect: tol must be > 0");
    }
    double a = lo.value();
    double b = hi.value();
    if (a > b) std::swap(a, b);
    double fa = eu_difference(query, a);
    double fb = eu_difference(query, b);
    if (fa == 0.0) return Valuation(a);
    if (fb == 0.0) return Valuation(b);
    if ((fa < 0.0) == (fb < 0.0)) {
        throw BracketError(
            "indifference_ratio_bisect: expected-utility difference does not "
            "change sign on the bracket");
    }
    while (b - a > tol) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;  // bracket at floating-point limit
        const double fm = eu_difference(query, mid);
        if (fm == 0.0) return Valuation(mid);
        if ((fm < 0.0) == (fa < 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    return Valuation(0.5 * (a + b));
}

const RegionGrid::Cell& RegionGrid::at(std::size_t alpha_idx,
                                       std::size_t ratio_idx) const {
    return cells.at(alpha_idx * ratio_axis.size() + ratio_idx);
}

namespace {

std::vector<double> linspace(double lo, double hi, std::size_t count) {
    std::vector<double> axis;
    axis.reserve(count);
    if (count == 1) {
        axis.push_back(lo);
        return axis;
    }
    for (std::size_t i = 0; i < count; ++i) {
        axis.push_back(lo + (hi - lo) * static_cast<double>(i) /
                                static_cast<double>(count - 1));
    }
    return axis;
}

}  // namespace

RegionGrid preference_region_grid(double alpha_min, double alpha_max,
                                  double ratio_min, double ratio_max,
                                  std::size_t alpha_steps,
                                  std::size_t ratio_steps,
                                  DetectionProbability p_keylogger,
                                  DetectionProbability p_ransomware) {
    if (alpha_steps == 0 || ratio_steps == 0) {
        throw std::domain_error("preference_region_grid: step counts must be >= 1");
    }
    if (!(alpha_min <= alpha_max) || !(ratio_min <= ratio_max)) {
        throw std::domain_error("preference_region_grid: empty axis range");
    }
    if (ratio_min < 0.0) {
        throw std::domain_error("preference_region_grid: ratios must be >= 0");
    }
    if (!std::isfinite(alpha_min) || !std::isfinite(alpha_max) ||
        !std::isfinite(ratio_min) || !std::isfinite(ratio_max)) {
        throw std::domain_error("preference_region_grid: ranges must be finite");
    }

    RegionGrid grid;
    grid.alpha_axis = linspace(alpha_min, alpha_max, alpha_steps);
    grid.ratio_axis = linspace(ratio_min, ratio_max, ratio_steps);
    grid.cells.resize(alpha_steps * ratio_steps);

    const double survival_k = 1.0 - p_keylogger.value();
    const double survival_r = 1.0 - p_ransomware.value();
    for (std::size_t ai = 0; ai < alpha_steps; ++ai) {
        const double alpha = grid.alpha_axis[ai];
        const double eu_k = survival_k * detail::exp_utility(alpha, 1.0);
        for (std::size_t ri = 0; ri < ratio_steps; ++ri) {
            const double ratio = grid.ratio_axis[ri];
            const double eu_r =
                survival_r * detail::exp_utility(alpha, ratio);
            auto& cell = grid.cells[ai * ratio_steps + ri];
            cell.eu_keylogger = eu_k;
            cell.eu_ransomware = eu_r;
            cell.preferred = eu_r > eu_k ? FamilyId::Ransomware
                                         : FamilyId::Keylogger;
        }
    }
    return grid;
}

void write_region_csv(const RegionGrid& grid, std::ostream& out) {
    out << "alpha,ratio,preferred,eu_keylogger,eu_ransomware\n";
    for (std::size_t ai = 0; ai < grid.alpha_axis.size(); ++ai) {
        for (std::size_t ri = 0; ri < grid.ratio_axis.size(); ++ri) {
            const auto& cell = grid.at(ai, ri);
            out << format_sig9(grid.alpha_axis[ai]) << ','
                << format_sig9(grid.ratio_axis[ri]) << ','
                << to_string(cell.preferred) << ','
                << format_sig9(cell.eu_keylogger) << ','
                << format_sig9(cell.eu_ransomware) << '\n';
        }
    }
}

}  // namespace riskgame
