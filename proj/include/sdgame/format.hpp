#pragma once

#include <charconv>
#include <cstdint>
#include <string>

namespace sdgame {

// Shortest round-trip decimal form; identical on every platform.
inline std::string format_double(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

inline std::string format_fixed(double x, int digits) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, digits);
    return std::string(buf, end);
}

// Dollar amount from integer cents, e.g. 226 -> "2.26".
inline std::string format_cents(std::int64_t cents) {
    const bool negative = cents < 0;
    const auto abs = negative ? -cents : cents;
    auto frac = std::to_string(abs % 100);
    if (frac.size() < 2) frac.insert(0, "0");
    return (negative ? "-" : "") + std::to_string(abs / 100) + "." + frac;
}

}  // namespace sdgame
