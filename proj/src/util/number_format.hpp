#pragma once

#include <charconv>
#include <string>

namespace gavis::util {

// Shortest round-trip decimal form, no forced fraction ("2", "0.5", "1e-05").
inline std::string short_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

} // namespace gavis::util
