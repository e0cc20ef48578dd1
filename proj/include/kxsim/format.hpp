#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>

#include "kxsim/error.hpp"

namespace kxsim {

/// Shortest text that reads back to the identical double.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

inline double parse_double(std::string_view text) {
    if (text == "inf") return INFINITY;
    if (text == "-inf") return -INFINITY;
    if (text == "nan") return NAN;
    double x = 0.0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
    if (ec != std::errc{} || end != text.data() + text.size())
        throw ConfigError("not a number: \"" + std::string(text) + "\"");
    return x;
}

}  // namespace kxsim
