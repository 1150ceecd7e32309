#ifndef RISKBENCH_FORMAT_HPP
#define RISKBENCH_FORMAT_HPP

#include <charconv>
#include <cstdio>
#include <string>

namespace riskbench {

/// Shortest-roundtrip-safe text for a double (%.17g).
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Shortest text that parses back to x (0.1 rather than 0.10000000000000001).
inline std::string format_shortest(double x) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

}  // namespace riskbench

#endif  // RISKBENCH_FORMAT_HPP
