#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace rsched {

using Rational = mpq_class;

// Parses "p/q", an integer, or a decimal with optional exponent ("0.125",
// "-1.5e-3") into an exact rational. Throws ParseError on malformed input.
Rational parse_rational(std::string_view text);

// Canonical "p/q" form, or "p" when the denominator is 1.
std::string to_string(const Rational& value);

// Exact rational value of a finite double.
Rational exact_from_double(double value);

inline double to_double(const Rational& value) { return value.get_d(); }
inline double to_double(double value) { return value; }

}  // namespace rsched
