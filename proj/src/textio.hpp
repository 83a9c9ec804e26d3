#pragma once

#include <charconv>
#include <string>

namespace lyapnet {

// Locale-independent shortest round-trip decimal formatting.
inline void append_double(std::string& out, double v) {
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    out.append(buf, p);
}

inline std::string format_double(double v) {
    std::string s;
    append_double(s, v);
    return s;
}

}  // namespace lyapnet
