#include "parafee/rational.hpp"

#include <cctype>
#include <iomanip>
#include <sstream>

namespace parafee {

namespace {

BigInt parse_integer(std::string_view text, std::string_view whole) {
  if (text.empty()) {
    throw Error("malformed rational '" + std::string(whole) + "'");
  }
  std::size_t pos = 0;
  bool negative = false;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    pos = 1;
  }
  if (pos == text.size()) {
    throw Error("malformed rational '" + std::string(whole) + "'");
  }
  BigInt value = 0;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw Error("malformed rational '" + std::string(whole) + "'");
    }
    value = value * 10 + (c - '0');
  }
  return negative ? BigInt(-value) : value;
}

BigInt pow10(long exponent) {
  BigInt result = 1;
  for (long i = 0; i < exponent; ++i) result *= 10;
  return result;
}

Rational parse_decimal(std::string_view text, std::string_view whole) {
  std::string_view mantissa = text;
  long exponent = 0;
  if (const auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = text.substr(0, e);
    const BigInt exp_value = parse_integer(text.substr(e + 1), whole);
    exponent = exp_value.convert_to<long>();
  }
  bool negative = false;
  if (!mantissa.empty() && (mantissa[0] == '-' || mantissa[0] == '+')) {
    negative = mantissa[0] == '-';
    mantissa.remove_prefix(1);
  }
  std::string digits;
  long fraction_digits = 0;
  bool seen_point = false;
  for (const char c : mantissa) {
    if (c == '.') {
      if (seen_point) throw Error("malformed rational '" + std::string(whole) + "'");
      seen_point = true;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      if (seen_point) ++fraction_digits;
    } else {
      throw Error("malformed rational '" + std::string(whole) + "'");
    }
  }
  if (digits.empty()) throw Error("malformed rational '" + std::string(whole) + "'");
  BigInt num = parse_integer(digits, whole);
  if (negative) num = -num;
  const long scale = exponent - fraction_digits;
  if (scale >= 0) return Rational(num * pow10(scale));
  return Rational(num, pow10(-scale));
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw Error("empty rational");
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const BigInt num = parse_integer(text.substr(0, slash), text);
    const BigInt den = parse_integer(text.substr(slash + 1), text);
    if (den == 0) throw Error("zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
  }
  if (text.find_first_of(".eE") != std::string_view::npos) return parse_decimal(text, text);
  return Rational(parse_integer(text, text));
}

std::string to_string(const Rational& value) { return value.str(); }

std::string to_decimal_string(const Rational& value, int digits) {
  const BigInt scale = pow10(digits);
  BigInt num = boost::multiprecision::numerator(value) * scale;
  const BigInt den = boost::multiprecision::denominator(value);
  const bool negative = num < 0;
  if (negative) num = -num;
  BigInt q = num / den;
  const BigInt r = num % den;
  if (r * 2 >= den) q += 1;
  std::string text = q.str();
  if (digits > 0) {
    if (text.size() <= static_cast<std::size_t>(digits)) {
      text.insert(0, static_cast<std::size_t>(digits) + 1 - text.size(), '0');
    }
    text.insert(text.size() - static_cast<std::size_t>(digits), ".");
  }
  if (negative && q != 0) text.insert(0, "-");
  return text;
}

Decimal to_decimal(const Rational& value) {
  return Decimal(boost::multiprecision::numerator(value)) /
         Decimal(boost::multiprecision::denominator(value));
}

Rational round_to_rational(const Decimal& value) {
  std::ostringstream out;
  out << std::scientific << std::setprecision(kDecimalDigits - 1) << value;
  return parse_rational(out.str());
}

}  // namespace parafee
