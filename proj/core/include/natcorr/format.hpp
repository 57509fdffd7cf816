// format.hpp: shortest round-trip decimal formatting of doubles.

#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace natcorr {

/// Shortest decimal string that parses back to exactly the same double.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc()) return "nan";
    return std::string(buf, res.ptr);
}

}  // namespace natcorr
