#pragma once

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace parafee {

/// Exact rational number used for every monetary and gas quantity.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Fixed-precision decimal used only where an exact value cannot exist (exp).
using Decimal = boost::multiprecision::number<boost::multiprecision::cpp_dec_float<40>>;

/// Significant digits kept when a Decimal result is folded back into a Rational.
inline constexpr int kDecimalDigits = 30;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an exhaustive procedure is asked to go beyond its size cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// Parses "p/q", "p", or a decimal literal such as "0.125" or "-1e-3".
Rational parse_rational(std::string_view text);

/// "num/den" (or "num" when the denominator is 1).
std::string to_string(const Rational& value);

/// Display-only decimal rendering with `digits` digits after the point.
std::string to_decimal_string(const Rational& value, int digits = 6);

Decimal to_decimal(const Rational& value);

/// Rounds to kDecimalDigits significant digits and returns the exact
/// rational value of that decimal string.
Rational round_to_rational(const Decimal& value);

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
  return Rational(BigInt(num), BigInt(den));
}

}  // namespace parafee
