#pragma once

#include <gmpxx.h>

#include <concepts>
#include <cstdint>
#include <string>
#include <string_view>

namespace monolab {

using Rational = mpq_class;

/// Scalar types a behavior or functional may be instantiated with.
template <typename T>
concept Scalar = std::same_as<T, Rational> || std::same_as<T, double>;

/// Parses "3", "-1/3", "0.25", "1e-3" or "2.5E+2" exactly.
/// Throws StructuralError on anything else.
Rational parse_rational(std::string_view text);

/// Lowest-terms "p/q" (or "p" when q == 1).
std::string to_string(const Rational& value);

inline double to_double(const Rational& value) { return value.get_d(); }
inline double to_double(double value) { return value; }

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
  Rational r(static_cast<long>(num), static_cast<long>(den));
  r.canonicalize();
  return r;
}

template <Scalar T>
T from_rational(const Rational& value) {
  if constexpr (std::same_as<T, double>) {
    return value.get_d();
  } else {
    return value;
  }
}

template <Scalar T>
T scalar_abs(const T& value) {
  if constexpr (std::same_as<T, double>) {
    return value < 0 ? -value : value;
  } else {
    return T(abs(value));
  }
}

template <Scalar T>
bool is_zero(const T& value) {
  if constexpr (std::same_as<T, double>) {
    return value == 0.0;
  } else {
    return sgn(value) == 0;
  }
}

}  // namespace monolab
