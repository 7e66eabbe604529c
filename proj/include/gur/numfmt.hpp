#pragma once

#include <charconv>
#include <string>

namespace gur {

/// Shortest decimal string that parses back to exactly the same double.
/// Used by every output writer so that emitted numbers round-trip
/// losslessly and identically across runs.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

} // namespace gur
