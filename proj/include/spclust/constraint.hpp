#pragma once

#include <boost/rational.hpp>
#include <cctype>
#include <string>

#include "spclust/errors.hpp"

namespace spclust {

using Rational = boost::rational<long long>;

/// Exact value of a plain decimal literal like "0.25". Feasibility
/// thresholds compare integers against tau = (1-eps)*L, and parsing eps
/// through a double could flip those comparisons.
inline Rational parse_rational_decimal(const std::string& text) {
    std::size_t pos = 0;
    if (pos < text.size() && text[pos] == '+') ++pos;
    long long num = 0;
    long long den = 1;
    int digits = 0;
    bool seen_dot = false;
    for (; pos < text.size(); ++pos) {
        const char c = text[pos];
        if (c == '.') {
            if (seen_dot) throw invalid_input_error("not a decimal number: '" + text + "'");
            seen_dot = true;
            continue;
        }
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            throw invalid_input_error("not a decimal number: '" + text + "'");
        }
        if (++digits > 18) throw invalid_input_error("too many digits: '" + text + "'");
        num = num * 10 + (c - '0');
        if (seen_dot) den *= 10;
    }
    if (digits == 0) throw invalid_input_error("not a decimal number: '" + text + "'");
    return Rational(num, den);
}

inline long long ceil_rational(const Rational& r) {
    // positive operands after boost normalization (denominator > 0)
    if (r.numerator() <= 0) return 0;
    return (r.numerator() + r.denominator() - 1) / r.denominator();
}

inline long long floor_rational(const Rational& r) {
    if (r.numerator() < 0) {
        return -((-r.numerator() + r.denominator() - 1) / r.denominator());
    }
    return r.numerator() / r.denominator();
}

///// Minimum-size constraint: every group needs at least L points, relaxed
/// to the exact-rational threshold tau = (1-eps)*L.
struct SizeConstraint {
    long long L = 1;
    Rational epsilon{0};

    SizeConstraint() = default;
    SizeConstraint(long long min_size, Rational eps) : L(min_size), epsilon(eps) {
        if (L < 1) throw invalid_input_error("L must be a positive integer");
        if (epsilon < Rational(0) || epsilon >= Rational(1)) {
            throw invalid_input_error("epsilon must be in [0, 1)");
        }
    }
    SizeConstraint(long long min_size, const std::string& eps_text)
        : SizeConstraint(min_size, parse_rational_decimal(eps_text)) {}

    Rational tau() const { return (Rational(1) - epsilon) * Rational(L); }

    // An integer load meets tau exactly when it meets ceil(tau).
    long long ceil_tau() const { return ceil_rational(tau()); }

    bool meets(long long size) const { return size >= ceil_tau(); }
};

}  // namespace spclust
