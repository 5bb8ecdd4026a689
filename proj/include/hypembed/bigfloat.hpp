#pragma once

#include <mpfr.h>

#include <compare>
#include <string>
#include <string_view>
#include <utility>

namespace hypembed {

// Precision (in mantissa bits) used for newly constructed BigFloat values on
// the calling thread.
int working_precision() noexcept;
void set_working_precision(int bits);

// Sets the working precision for the lifetime of the scope.
class PrecisionScope {
 public:
  explicit PrecisionScope(int bits) : saved_(working_precision()) {
    set_working_precision(bits);
  }
  ~PrecisionScope() { set_working_precision(saved_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  int saved_;
};

// Binary floating point number with a run-time mantissa width, rounding to
// nearest. A value keeps the precision it was created with; copies inherit it.
class BigFloat {
 public:
  BigFloat() { mpfr_init2(v_, working_precision()); mpfr_set_zero(v_, 1); }
  BigFloat(double x) { mpfr_init2(v_, working_precision()); mpfr_set_d(v_, x, MPFR_RNDN); }
  BigFloat(int x) { mpfr_init2(v_, working_precision()); mpfr_set_si(v_, x, MPFR_RNDN); }
  BigFloat(long x) { mpfr_init2(v_, working_precision()); mpfr_set_si(v_, x, MPFR_RNDN); }
  BigFloat(unsigned long x) { mpfr_init2(v_, working_precision()); mpfr_set_ui(v_, x, MPFR_RNDN); }
  BigFloat(long long x) : BigFloat(static_cast<long>(x)) {}
  BigFloat(unsigned long long x) : BigFloat(static_cast<unsigned long>(x)) {}
  // Parses a decimal literal ("1.25", "-3e-40", "inf"). Throws InputError.
  explicit BigFloat(std::string_view text);

  BigFloat(const BigFloat& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  BigFloat(BigFloat&& o) noexcept {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_swap(v_, o.v_);
  }
  BigFloat& operator=(const BigFloat& o) {
    if (this != &o) {
      if (mpfr_get_prec(v_) != mpfr_get_prec(o.v_)) mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  BigFloat& operator=(BigFloat&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  BigFloat& operator=(double x) {
    mpfr_set_d(v_, x, MPFR_RNDN);
    return *this;
  }
  ~BigFloat() { mpfr_clear(v_); }

  friend void swap(BigFloat& a, BigFloat& b) noexcept { mpfr_swap(a.v_, b.v_); }

  mpfr_srcptr get() const noexcept { return v_; }
  mpfr_ptr get() noexcept { return v_; }
  int precision() const noexcept { return static_cast<int>(mpfr_get_prec(v_)); }

  double to_double() const noexcept { return mpfr_get_d(v_, MPFR_RNDN); }
  explicit operator double() const noexcept { return to_double(); }
  // Scientific notation with `digits` significant decimal digits.
  std::string to_string(int digits) const;

  bool is_finite() const noexcept { return mpfr_number_p(v_) != 0; }
  bool is_zero() const noexcept { return mpfr_zero_p(v_) != 0; }
  int sign() const noexcept { return mpfr_sgn(v_); }

  BigFloat& operator+=(const BigFloat& o) { mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
  BigFloat& operator-=(const BigFloat& o) { mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
  BigFloat& operator*=(const BigFloat& o) { mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
  BigFloat& operator/=(const BigFloat& o) { mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }
  BigFloat& operator+=(double o) { mpfr_add_d(v_, v_, o, MPFR_RNDN); return *this; }
  BigFloat& operator-=(double o) { mpfr_sub_d(v_, v_, o, MPFR_RNDN); return *this; }
  BigFloat& operator*=(double o) { mpfr_mul_d(v_, v_, o, MPFR_RNDN); return *this; }
  BigFloat& operator/=(double o) { mpfr_div_d(v_, v_, o, MPFR_RNDN); return *this; }

  BigFloat operator-() const {
    BigFloat r(*this);
    mpfr_neg(r.v_, r.v_, MPFR_RNDN);
    return r;
  }

  friend BigFloat operator+(BigFloat a, const BigFloat& b) { return a += b; }
  friend BigFloat operator-(BigFloat a, const BigFloat& b) { return a -= b; }
  friend BigFloat operator*(BigFloat a, const BigFloat& b) { return a *= b; }
  friend BigFloat operator/(BigFloat a, const BigFloat& b) { return a /= b; }
  friend BigFloat operator+(BigFloat a, double b) { return a += b; }
  friend BigFloat operator-(BigFloat a, double b) { return a -= b; }
  friend BigFloat operator*(BigFloat a, double b) { return a *= b; }
  friend BigFloat operator/(BigFloat a, double b) { return a /= b; }
  friend BigFloat operator+(double a, BigFloat b) { return b += a; }
  friend BigFloat operator*(double a, BigFloat b) { return b *= a; }
  friend BigFloat operator-(double a, const BigFloat& b) {
    BigFloat r(b);
    mpfr_d_sub(r.v_, a, b.v_, MPFR_RNDN);
    return r;
  }
  friend BigFloat operator/(double a, const BigFloat& b) {
    BigFloat r(b);
    mpfr_d_div(r.v_, a, b.v_, MPFR_RNDN);
    return r;
  }

  friend bool operator==(const BigFloat& a, const BigFloat& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend std::partial_ordering operator<=>(const BigFloat& a, const BigFloat& b) {
    if (mpfr_unordered_p(a.v_, b.v_)) return std::partial_ordering::unordered;
    const int c = mpfr_cmp(a.v_, b.v_);
    return c < 0 ? std::partial_ordering::less
                 : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
  }
  friend bool operator==(const BigFloat& a, double b) { return mpfr_cmp_d(a.v_, b) == 0; }
  friend std::partial_ordering operator<=>(const BigFloat& a, double b) {
    if (mpfr_nan_p(a.v_) || b != b) return std::partial_ordering::unordered;
    const int c = mpfr_cmp_d(a.v_, b);
    return c < 0 ? std::partial_ordering::less
                 : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
  }

 private:
  mpfr_t v_;
};

namespace detail {
template <int (*F)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t)>
inline BigFloat apply(const BigFloat& x) {
  BigFloat r(x);
  F(r.get(), x.get(), MPFR_RNDN);
  return r;
}
}  // namespace detail

inline BigFloat sqrt(const BigFloat& x) { return detail::apply<mpfr_sqrt>(x); }
inline BigFloat exp(const BigFloat& x) { return detail::apply<mpfr_exp>(x); }
inline BigFloat expm1(const BigFloat& x) { return detail::apply<mpfr_expm1>(x); }
inline BigFloat log(const BigFloat& x) { return detail::apply<mpfr_log>(x); }
inline BigFloat log1p(const BigFloat& x) { return detail::apply<mpfr_log1p>(x); }
inline BigFloat log2(const BigFloat& x) { return detail::apply<mpfr_log2>(x); }
inline BigFloat cosh(const BigFloat& x) { return detail::apply<mpfr_cosh>(x); }
inline BigFloat sinh(const BigFloat& x) { return detail::apply<mpfr_sinh>(x); }
inline BigFloat tanh(const BigFloat& x) { return detail::apply<mpfr_tanh>(x); }
inline BigFloat acosh(const BigFloat& x) { return detail::apply<mpfr_acosh>(x); }
inline BigFloat asinh(const BigFloat& x) { return detail::apply<mpfr_asinh>(x); }
inline BigFloat atanh(const BigFloat& x) { return detail::apply<mpfr_atanh>(x); }
inline BigFloat cos(const BigFloat& x) { return detail::apply<mpfr_cos>(x); }
inline BigFloat sin(const BigFloat& x) { return detail::apply<mpfr_sin>(x); }
inline BigFloat abs(const BigFloat& x) { return detail::apply<mpfr_abs>(x); }
inline BigFloat fabs(const BigFloat& x) { return abs(x); }
inline BigFloat atan2(const BigFloat& y, const BigFloat& x) {
  BigFloat r(y);
  mpfr_atan2(r.get(), y.get(), x.get(), MPFR_RNDN);
  return r;
}
inline bool isfinite(const BigFloat& x) { return x.is_finite(); }

// Copy of x rounded to the current working precision.
inline BigFloat round_to_working(const BigFloat& x) {
  BigFloat r;
  mpfr_set(r.get(), x.get(), MPFR_RNDN);
  return r;
}

}  // namespace hypembed
