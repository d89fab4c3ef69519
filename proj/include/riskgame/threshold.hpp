#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

#include "riskgame/game.hpp"
#include "riskgame/utility.hpp"

namespace riskgame {

// Thrown when a root-bracketing interval does not change sign.
class BracketError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Inputs of the ransomware-vs-keylogger indifference problem: at which
// ransomware value do the two expected utilities cross, holding the
// keylogger value fixed?
struct IndifferenceQuery {
    double alpha = 0.0;
    DetectionProbability p_keylogger;
    DetectionProbability p_ransomware;
    Valuation v_keylogger{1.0};
};

// The minimum ransomware value at which ransomware is weakly preferred.
// `threshold` is empty when the attacker's bounded utility (alpha > 0)
// can never reach the keylogger's expected utility: no finite ransomware
// value suffices. Saturation is a legitimate analytic outcome, not an
// error.
struct IndifferenceResult {
    std::optional<Valuation> threshold;

    bool saturated() const { return !threshold.has_value(); }
};

// Closed-form inversion of the indifference condition
//   (1 - p_r) * u(v_r) = (1 - p_k) * u(v_k).
// For alpha = 0 the threshold is E / (1 - p_r); otherwise
// -ln(1 - alpha*E/(1 - p_r)) / alpha when the log argument is positive,
// and Saturated when it is not.
IndifferenceResult indifference_ratio(const IndifferenceQuery& query);

// Independent numeric route: bisection on the expected-utility difference
// over [lo, hi]. Throws BracketError when the difference does not change
// sign on the bracket (in particular for saturated queries).
Valuation indifference_ratio_bisect(const IndifferenceQuery& query,
                                    Valuation lo, Valuation hi, double tol);

// Preferred-family map over an (alpha, value-ratio) grid with v_keylogger
// fixed at 1. Within each constant-alpha column the preference is monotone:
// once ransomware wins at some ratio it wins at every larger ratio.
struct RegionGrid {
    struct Cell {
        FamilyId preferred = FamilyId::Keylogger;
        double eu_keylogger = 0.0;
        double eu_ransomware = 0.0;
    };

    std::vector<double> alpha_axis;
    std::vector<double> ratio_axis;
    std::vector<Cell> cells;  // row-major: alpha outer, ratio inner

    const Cell& at(std::size_t alpha_idx, std::size_t ratio_idx) const;
};

// Each cell depends only on its own coordinates, so the result is identical
// however the cells are evaluated. Axis counts are grid points per axis;
// a count of 1 degenerates to the lower endpoint.
RegionGrid preference_region_grid(double alpha_min, double alpha_max,
                                  double ratio_min, double ratio_max,
                                  std::size_t alpha_steps,
                                  std::size_t ratio_steps,
                                  DetectionProbability p_keylogger,
                                  DetectionProbability p_ransomware);

// CSV export: header alpha,ratio,preferred,eu_keylogger,eu_ransomware;
// floats at 9 significant digits.
void write_region_csv(const RegionGrid& grid, std::ostream& out);

}  // namespace riskgame
