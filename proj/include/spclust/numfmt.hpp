#pragma once

#include <charconv>
#include <string>
#include <system_error>

#include "spclust/errors.hpp"

namespace spclust {

// Shortest round-trip decimal form; locale-independent and stable across
// runs, which the byte-identical-output contract relies on.
inline std::string fmt_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

inline double parse_double(std::string_view text) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw invalid_input_error("not a number: '" + std::string(text) + "'");
    }
    return v;
}

}  // namespace spclust
