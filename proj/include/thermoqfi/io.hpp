#pragma once

#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <system_error>

namespace thermoqfi::io {

/// Shortest round-trip decimal form; "nan"/"inf" spelled out.
inline std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string("nan"); }

}  // namespace thermoqfi::io
