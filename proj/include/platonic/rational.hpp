#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace platonic {

/// Exact rational scalar used throughout the library.
using Rational = mpq_class;

/// Canonical num/den. Prefer this over mpq_class(num, den), which does not
/// reduce and therefore breaks equality comparisons.
inline Rational ratio(long num, long den = 1) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

/// Parses "a/b", an integer, or a decimal literal such as "-0.125" or "1e-3"
/// into an exact rational. Throws std::invalid_argument on malformed input.
Rational parse_rational(std::string_view text);

/// Exact rational equal to the shortest decimal that round-trips `value`.
/// 0.1 maps to 1/10, not to the binary expansion of the double.
Rational rational_from_double(double value);

/// Canonical "a/b" (or "a" for integers).
std::string to_string(const Rational& value);

inline double to_double(const Rational& value) { return value.get_d(); }

std::vector<double> to_doubles(const std::vector<Rational>& values);

inline Rational abs(const Rational& value) { return value < 0 ? Rational(-value) : value; }

/// Largest integer not exceeding `value`.
Rational floor(const Rational& value);

}  // namespace platonic
