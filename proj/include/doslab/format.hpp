#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <system_error>

namespace doslab {

// Shortest decimal string that round-trips the double exactly; keeps emitted
// CSV/JSON byte-stable across reruns and thread counts.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string format_int(std::int64_t v) { return std::to_string(v); }

}  // namespace doslab
