#include "hypembed/bigfloat.hpp"

#include <cmath>
#include <string>

#include "hypembed/errors.hpp"
#include "hypembed/real.hpp"

namespace hypembed {

namespace {
thread_local int tl_precision = 128;
}

int working_precision() noexcept { return tl_precision; }

void set_working_precision(int bits) {
  if (bits < MPFR_PREC_MIN || bits > (1 << 20)) {
    throw InputError("precision out of range: " + std::to_string(bits) + " bits");
  }
  tl_precision = bits;
}

BigFloat::BigFloat(std::string_view text) {
  mpfr_init2(v_, working_precision());
  const std::string s(text);
  char* end = nullptr;
  bool ok = !s.empty();
  if (ok) {
    mpfr_strtofr(v_, s.c_str(), &end, 10, MPFR_RNDN);
    ok = end != s.c_str() && *end == '\0';
  }
  if (!ok) {
    mpfr_clear(v_);
    throw InputError("not a number: '" + s + "'");
  }
}

std::string BigFloat::to_string(int digits) const {
  if (mpfr_nan_p(v_)) return "nan";
  if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
  if (digits < 1) digits = 1;
  char* buf = nullptr;
  const std::string fmt = "%." + std::to_string(digits - 1) + "Re";
  if (mpfr_asprintf(&buf, fmt.c_str(), v_) < 0) throw NumericalError("mpfr_asprintf failed");
  std::string out(buf);
  mpfr_free_str(buf);
  return out;
}

template <>
double parse_real<double>(std::string_view text) {
  const std::string s(text);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end == s.c_str() || *end != '\0') throw InputError("not a number: '" + s + "'");
  return v;
}

template <>
BigFloat parse_real<BigFloat>(std::string_view text) {
  return BigFloat(text);
}

int decimal_digits_for_bits(int bits) {
  return static_cast<int>(std::ceil(bits * std::log10(2.0))) + 2;
}

std::string format_real(double x, int bits) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", decimal_digits_for_bits(bits) - 1, x);
  return buf;
}

std::string format_real(const BigFloat& x, int bits) {
  return x.to_string(decimal_digits_for_bits(bits));
}

double acosh_clamped(double x) {
  if (x < 1.0) {
    if (x < 1.0 - 4 * 0x1p-53 || std::isnan(x)) {
      throw NumericalError("acosh argument below 1: " + format_real(x));
    }
    return 0.0;
  }
  return std::acosh(x);
}

BigFloat acosh_clamped(const BigFloat& x) {
  if (x < 1.0) {
    BigFloat slack = 1.0 - x;
    // 4 ulp of 1 at this precision.
    if (!x.is_finite() || slack.to_double() > std::ldexp(4.0, -x.precision())) {
      throw NumericalError("acosh argument below 1: " + format_real(x, x.precision()));
    }
    return BigFloat(0.0);
  }
  return acosh(x);
}

}  // namespace hypembed
