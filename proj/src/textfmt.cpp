#include "riskgame/textfmt.hpp"

#include <charconv>
#include <cstdio>

namespace riskgame {

std::string format_sig9(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", x);
    return buf;
}

std::string format_roundtrip(double x) {
    char buf[40];
    const auto result = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, result.ptr);
}

std::string format_fixed(double x, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, x);
    return buf;
}

}  // namespace riskgame
