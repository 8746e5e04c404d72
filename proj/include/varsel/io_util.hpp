#pragma once

#include <charconv>
#include <string>
#include <system_error>

#include "varsel/errors.hpp"

namespace varsel {

// Shortest round-trip decimal form via to_chars: locale-independent and
// byte-stable, which the benchmark CSV determinism contract depends on.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw Error("format_double failed");
    return std::string(buf, ptr);
}

inline double parse_double(const std::string& s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw Error("bad number: '" + s + "'");
    return v;
}

inline long long parse_int(const std::string& s) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw Error("bad integer: '" + s + "'");
    return v;
}

} // namespace varsel
