#pragma once

#include <stdexcept>
#include <string>

namespace spclust {

// Bad user input: malformed files, out-of-range parameters, wrong mode.
class invalid_input_error : public std::runtime_error {
public:
    explicit invalid_input_error(const std::string& msg) : std::runtime_error(msg) {}
};

// The requested (k, L) instance admits no solution (e.g. k*L > n).
class infeasible_error : public std::runtime_error {
public:
    explicit infeasible_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace spclust
