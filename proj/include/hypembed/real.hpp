#pragma once

// Helpers that let the numerical code be written once for both hardware
// doubles and BigFloat.

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <type_traits>

#include "hypembed/bigfloat.hpp"

namespace hypembed {

template <class R>
concept Real = std::is_same_v<R, double> || std::is_same_v<R, BigFloat>;

template <class R>
struct RealTraits;

template <>
struct RealTraits<double> {
  static int bits() { return 53; }
  // Default solver tolerance.
  static double tol() { return 1e-12; }
  // Relative stopping tolerance for power iteration.
  static double power_tol() { return 1e-12; }
  static double epsilon() { return 0x1p-52; }
};

template <>
struct RealTraits<BigFloat> {
  static int bits() { return working_precision(); }
  static double tol() { return std::ldexp(1.0, 20 - bits()); }
  static double power_tol() { return std::ldexp(1.0, 16 - bits()); }
  static double epsilon() { return std::ldexp(1.0, 1 - bits()); }
};

inline double to_double(double x) { return x; }
inline double to_double(const BigFloat& x) { return x.to_double(); }

// Value of x in scalar type To; BigFloat results use the working precision.
template <Real To, Real From>
To convert_real(const From& x) {
  if constexpr (std::is_same_v<To, double>) {
    return to_double(x);
  } else if constexpr (std::is_same_v<From, double>) {
    return BigFloat(x);
  } else {
    return round_to_working(x);
  }
}

template <Real R>
R parse_real(std::string_view text);

template <Real R>
R pi_value() {
  if constexpr (std::is_same_v<R, double>) {
    return std::numbers::pi;
  } else {
    BigFloat r;
    mpfr_const_pi(r.get(), MPFR_RNDN);
    return r;
  }
}

template <Real R>
R ln2_value() {
  if constexpr (std::is_same_v<R, double>) {
    return std::numbers::ln2;
  } else {
    BigFloat r;
    mpfr_const_log2(r.get(), MPFR_RNDN);
    return r;
  }
}

// Significant decimal digits needed to print a p-bit value: ceil(p*log10 2)+2.
int decimal_digits_for_bits(int bits);

// Round-trippable text form with decimal_digits_for_bits(bits) digits.
std::string format_real(double x, int bits = 53);
std::string format_real(const BigFloat& x, int bits);

template <Real R>
std::string format_real(const R& x) {
  if constexpr (std::is_same_v<R, double>) {
    return format_real(x, 53);
  } else {
    return format_real(x, x.precision());
  }
}

// Clamped acosh: inputs in [1 - 4 ulp, 1) are treated as 1; anything smaller
// raises NumericalError.
double acosh_clamped(double x);
BigFloat acosh_clamped(const BigFloat& x);

// acosh(1 + q) for q >= 0, accurate when q is tiny.
template <Real R>
R acosh1p(const R& q) {
  using std::log1p;
  using std::sqrt;
  return log1p(q + sqrt(q * (q + 2.0)));
}

}  // namespace hypembed
