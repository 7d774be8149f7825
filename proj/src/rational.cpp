#include "choquet/rational.hpp"

#include "choquet/error.hpp"

#include <cctype>
#include <cmath>

namespace choquet {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::parse: return "parse-error";
    case ErrorCode::universe_mismatch: return "universe-mismatch";
    case ErrorCode::domain: return "domain-error";
    case ErrorCode::unsupported_capacity: return "unsupported-capacity";
    case ErrorCode::precondition: return "precondition-error";
    case ErrorCode::malformed_utility: return "malformed-utility";
    case ErrorCode::division: return "division-error";
    case ErrorCode::internal_invariant: return "internal-invariant";
  }
  return "unknown";
}

namespace {

using boost::multiprecision::cpp_int;

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

cpp_int parse_integer(std::string_view s, std::string_view whole) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) fail(ErrorCode::parse, "malformed rational '" + std::string(whole) + "'");
  cpp_int v{std::string(s)};
  return negative ? cpp_int(-v) : v;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) fail(ErrorCode::parse, "empty rational literal");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    cpp_int num = parse_integer(text.substr(0, slash), text);
    cpp_int den = parse_integer(text.substr(slash + 1), text);
    if (den == 0) fail(ErrorCode::parse, "zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = text.substr(0, dot);
    std::string_view frac_part = text.substr(dot + 1);
    bool negative = !int_part.empty() && int_part.front() == '-';
    if (!int_part.empty() && (int_part.front() == '-' || int_part.front() == '+')) int_part.remove_prefix(1);
    if (int_part.empty()) int_part = "0";
    if (!all_digits(int_part) || (!frac_part.empty() && !all_digits(frac_part))) {
      fail(ErrorCode::parse, "malformed rational '" + std::string(text) + "'");
    }
    cpp_int scale = 1;
    for (std::size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
    cpp_int num = cpp_int(std::string(int_part)) * scale +
                  (frac_part.empty() ? cpp_int(0) : cpp_int(std::string(frac_part)));
    Rational r(num, scale);
    return negative ? Rational(-r) : r;
  }
  return Rational(parse_integer(text, text));
}

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) fail(ErrorCode::domain, "non-finite value cannot be made rational");
  return Rational(value);
}

std::string to_string(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

}  // namespace choquet
