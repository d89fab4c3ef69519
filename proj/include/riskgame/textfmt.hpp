#pragma once

#include <string>

namespace riskgame {

// Renders a double with 9 significant digits (machine CSV convention).
std::string format_sig9(double x);

// Shortest decimal text that parses back to exactly the same double.
std::string format_roundtrip(double x);

// Fixed-point with `decimals` digits, for human-readable tables.
std::string format_fixed(double x, int decimals);

}  // namespace riskgame
