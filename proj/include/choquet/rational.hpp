#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace choquet {

/// Exact rational number used for region coordinates and explicit capacity tables.
using Rational = boost::multiprecision::cpp_rational;

/// Parses "p/q", "p", or a decimal literal such as "0.25". Throws Error(parse) on
/// malformed input or a zero denominator.
Rational parse_rational(std::string_view text);

/// Exact conversion: every finite double is a dyadic rational.
Rational rational_from_double(double value);

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// "p/q" (or "p" when the denominator is one).
std::string to_string(const Rational& r);

}  // namespace choquet
