#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <system_error>

#include <boost/multiprecision/gmp.hpp>

#include "genwass/error.hpp"

namespace genwass {

/// Exact field used in exact mode.
using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

template <class T>
struct scalar_traits;

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static constexpr std::string_view mode = "float";
};

template <>
struct scalar_traits<Rational> {
  static constexpr bool exact = true;
  static constexpr std::string_view mode = "exact";
};

template <class T>
concept Scalar = requires { scalar_traits<T>::exact; };

template <Scalar T>
inline constexpr bool is_exact_v = scalar_traits<T>::exact;

/// Zero in exact mode, `float_tol` in float mode.
template <Scalar T>
T tolerance(double float_tol) {
  if constexpr (is_exact_v<T>) {
    return T(0);
  } else {
    return float_tol;
  }
}

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.convert_to<double>(); }

template <Scalar T>
T from_double(double x) {
  if constexpr (is_exact_v<T>) {
    return Rational(x);  // exact binary value of x
  } else {
    return x;
  }
}

template <Scalar T>
T abs_value(const T& x) {
  return x < T(0) ? T(-x) : x;
}

inline bool is_integer(double x) { return std::isfinite(x) && std::floor(x) == x; }
inline bool is_integer(const Rational& x) { return denominator(x) == 1; }

namespace detail {

inline bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

// [-+]digits[.digits] or [-+].digits, optional e[-+]digits.
inline Rational parse_decimal(std::string_view text) {
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_part = s.substr(e + 1);
    bool exp_negative = false;
    if (!exp_part.empty() && (exp_part.front() == '-' || exp_part.front() == '+')) {
      exp_negative = exp_part.front() == '-';
      exp_part.remove_prefix(1);
    }
    if (!all_digits(exp_part) || exp_part.size() > 6) {
      throw Error(ErrorCode::ParseError, "malformed number '" + std::string(text) + "'");
    }
    exponent = std::stol(std::string(exp_part));
    if (exp_negative) exponent = -exponent;
    s = s.substr(0, e);
  }
  std::string digits;
  long scale = 0;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view whole = s.substr(0, dot);
    std::string_view frac = s.substr(dot + 1);
    if ((whole.empty() && frac.empty()) || (!whole.empty() && !all_digits(whole)) ||
        (!frac.empty() && !all_digits(frac))) {
      throw Error(ErrorCode::ParseError, "malformed number '" + std::string(text) + "'");
    }
    digits = std::string(whole) + std::string(frac);
    scale = static_cast<long>(frac.size());
  } else {
    if (!all_digits(s)) {
      throw Error(ErrorCode::ParseError, "malformed number '" + std::string(text) + "'");
    }
    digits = std::string(s);
  }
  Rational value{BigInt(digits)};
  long shift = exponent - scale;
  BigInt ten_pow = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(std::labs(shift)));
  if (shift >= 0) {
    value *= Rational(ten_pow);
  } else {
    value /= Rational(ten_pow);
  }
  return negative ? Rational(-value) : value;
}

}  // namespace detail

/// Parses "p/q", integers and decimal literals. Exact for `Rational`.
template <Scalar T>
T parse_scalar(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  if (text.empty()) throw Error(ErrorCode::ParseError, "empty number");
  Rational value;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational num = detail::parse_decimal(trim(text.substr(0, slash)));
    Rational den = detail::parse_decimal(trim(text.substr(slash + 1)));
    if (den == 0) throw Error(ErrorCode::ParseError, "zero denominator in '" + std::string(text) + "'");
    value = num / den;
  } else {
    value = detail::parse_decimal(text);
  }
  if constexpr (is_exact_v<T>) {
    return value;
  } else {
    return to_double(value);
  }
}

/// Exact decimal reading of a double via its shortest round-trip representation,
/// so that 0.1 becomes 1/10 rather than the binary expansion.
inline Rational rational_from_shortest_decimal(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw Error(ErrorCode::ParseError, "unrepresentable number");
  return detail::parse_decimal(std::string_view(buf, static_cast<std::size_t>(end - buf)));
}

inline std::string format_scalar(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

inline std::string format_scalar(const Rational& x) {
  if (is_integer(x)) return numerator(x).str();
  return numerator(x).str() + "/" + denominator(x).str();
}

/// Integer exponent as an exact product, otherwise through `std::pow`.
template <Scalar T>
T power(const T& base, double p) {
  if (p == std::floor(p) && p >= 0 && p <= 64) {
    T out(1);
    for (int k = 0; k < static_cast<int>(p); ++k) out *= base;
    return out;
  }
  return from_double<T>(std::pow(to_double(base), p));
}

/// `value^(1/p)`; the identity when p = 1, a floating-point root otherwise.
template <Scalar T>
T root(const T& value, double p) {
  if (p == 1.0) return value;
  double v = to_double(value);
  return from_double<T>(v <= 0 ? 0.0 : std::pow(v, 1.0 / p));
}

}  // namespace genwass
