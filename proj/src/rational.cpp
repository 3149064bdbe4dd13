#include "rsched/rational.h"

#include <cctype>
#include <cmath>
#include <string>

#include "rsched/errors.h"

namespace rsched {
namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char ch : s) {
    if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
  }
  return true;
}

mpz_class pow10(unsigned long exponent) {
  mpz_class result;
  mpz_ui_pow_ui(result.get_mpz_t(), 10, exponent);
  return result;
}

Rational parse_decimal(std::string_view text) {
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  long exponent = 0;
  if (auto pos = body.find_first_of("eE"); pos != std::string_view::npos) {
    std::string_view exp_text = body.substr(pos + 1);
    body = body.substr(0, pos);
    bool exp_negative = false;
    if (!exp_text.empty() && (exp_text.front() == '-' || exp_text.front() == '+')) {
      exp_negative = exp_text.front() == '-';
      exp_text.remove_prefix(1);
    }
    if (!all_digits(exp_text) || exp_text.size() > 6) {
      throw ParseError("malformed exponent in '" + std::string(text) + "'");
    }
    exponent = std::stol(std::string(exp_text));
    if (exp_negative) exponent = -exponent;
  }
  std::string digits;
  long fraction_digits = 0;
  if (auto dot = body.find('.'); dot != std::string_view::npos) {
    std::string_view whole = body.substr(0, dot);
    std::string_view frac = body.substr(dot + 1);
    if ((whole.empty() && frac.empty()) ||
        (!whole.empty() && !all_digits(whole)) ||
        (!frac.empty() && !all_digits(frac))) {
      throw ParseError("malformed decimal '" + std::string(text) + "'");
    }
    digits = std::string(whole) + std::string(frac);
    fraction_digits = static_cast<long>(frac.size());
  } else {
    if (!all_digits(body)) {
      throw ParseError("malformed number '" + std::string(text) + "'");
    }
    digits = std::string(body);
  }
  if (digits.empty()) digits = "0";
  Rational value{mpz_class(digits, 10)};
  long scale = exponent - fraction_digits;
  if (scale > 0) {
    value *= Rational(pow10(static_cast<unsigned long>(scale)));
  } else if (scale < 0) {
    value /= Rational(pow10(static_cast<unsigned long>(-scale)));
  }
  value.canonicalize();
  return negative ? Rational(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
    text.remove_prefix(1);
  }
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
    text.remove_suffix(1);
  }
  if (text.empty()) throw ParseError("empty number");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::string_view num = text.substr(0, slash);
    std::string_view den = text.substr(slash + 1);
    std::string_view num_digits = num;
    if (!num_digits.empty() && (num_digits.front() == '-' || num_digits.front() == '+')) {
      num_digits.remove_prefix(1);
    }
    if (!all_digits(num_digits) || !all_digits(den)) {
      throw ParseError("malformed rational '" + std::string(text) + "'");
    }
    mpz_class denominator(std::string{den}, 10);
    if (denominator == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    std::string num_string(num);
    if (!num_string.empty() && num_string.front() == '+') num_string.erase(0, 1);
    Rational value(mpz_class(num_string, 10), denominator);
    value.canonicalize();
    return value;
  }
  return parse_decimal(text);
}

std::string to_string(const Rational& value) {
  Rational canonical = value;
  canonical.canonicalize();
  return canonical.get_str();
}

Rational exact_from_double(double value) {
  if (!std::isfinite(value)) throw ParseError("non-finite value has no rational form");
  Rational result(value);  // mpq_set_d is exact
  result.canonicalize();
  return result;
}

}  // namespace rsched
