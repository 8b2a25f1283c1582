#ifndef ALERTSIFT_NUMFMT_HPP
#define ALERTSIFT_NUMFMT_HPP

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace alertsift {

// Shortest decimal form that round-trips to the same double ("1", "0.25", ...).
// Used for every number we emit in JSON-lines and CSV so output is byte-stable.
inline std::string format_double(double v) {
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

// Exact bit-preserving text form ("0x1.8p+1"); strtod parses it back losslessly.
inline std::string format_double_hex(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%a", v);
    return std::string(buf);
}

inline double parse_double_hex(const std::string& s) {
    const char* begin = s.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end != begin + s.size() || s.empty())
        throw std::runtime_error("bad hex-float literal: '" + s + "'");
    return v;
}

} // namespace alertsift

#endif
