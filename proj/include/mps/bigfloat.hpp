#pragma once

#include <mpfr.h>

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

#include "mps/multicomp.hpp"

// Arbitrary-precision reference scalar. Thin RAII wrapper over MPFR with
// value semantics; every operation rounds to nearest at the wider of the
// operand precisions.

namespace mps {

class BigFloat {
 public:
  static constexpr unsigned kDefaultBits = 256;
  static constexpr unsigned kMinBits = 24;

  explicit BigFloat(unsigned bits = kDefaultBits) {
    check_bits(bits);
    mpfr_init2(v_, bits);
    mpfr_set_zero(v_, 1);
  }
  explicit BigFloat(double d, unsigned bits = kDefaultBits) {
    check_bits(bits);
    mpfr_init2(v_, bits);
    mpfr_set_d(v_, d, MPFR_RNDN);
  }

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
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  BigFloat& operator=(BigFloat&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~BigFloat() { mpfr_clear(v_); }

  unsigned mantissa_bits() const { return static_cast<unsigned>(mpfr_get_prec(v_)); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }

  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }

  // Exact embedding of a multi-component value. `bits` is a floor; the
  // result widens as needed to cover the component span exactly.
  template <int Kc>
  static BigFloat from(const MultiComponent<Kc>& x, unsigned bits = kDefaultBits) {
    BigFloat r(exact_span_bits<Kc>(x, bits));
    for (int i = 0; i < Kc; ++i) mpfr_add_d(r.v_, r.v_, x.c[i], MPFR_RNDN);
    return r;
  }

  // Round-to-nearest extraction into K components.
  template <int Kc>
  MultiComponent<Kc> to_multicomponent() const {
    MultiComponent<Kc> r;
    if (!is_finite()) {
      r.c[0] = to_double();
      return r;
    }
    BigFloat rest(*this);
    mpfr_prec_round(rest.v_, mpfr_get_prec(v_) + 64, MPFR_RNDN);
    for (int i = 0; i < Kc; ++i) {
      double d = mpfr_get_d(rest.v_, MPFR_RNDN);
      r.c[i] = d;
      mpfr_sub_d(rest.v_, rest.v_, d, MPFR_RNDN);
    }
    return r;
  }

  static BigFloat pi(unsigned bits = kDefaultBits) {
    BigFloat r(bits);
    mpfr_const_pi(r.v_, MPFR_RNDN);
    return r;
  }

  friend BigFloat operator+(const BigFloat& a, const BigFloat& b) {
    BigFloat r(join_bits(a, b));
    mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend BigFloat operator-(const BigFloat& a, const BigFloat& b) {
    BigFloat r(join_bits(a, b));
    mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend BigFloat operator*(const BigFloat& a, const BigFloat& b) {
    BigFloat r(join_bits(a, b));
    mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend BigFloat operator/(const BigFloat& a, const BigFloat& b) {
    BigFloat r(join_bits(a, b));
    mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend BigFloat operator*(const BigFloat& a, double b) {
    BigFloat r(a.mantissa_bits());
    mpfr_mul_d(r.v_, a.v_, b, MPFR_RNDN);
    return r;
  }
  friend BigFloat operator*(double a, const BigFloat& b) { return b * a; }
  friend BigFloat operator-(const BigFloat& a) {
    BigFloat r(a.mantissa_bits());
    mpfr_neg(r.v_, a.v_, MPFR_RNDN);
    return r;
  }

  friend BigFloat sqrt(const BigFloat& a) {
    BigFloat r(a.mantissa_bits());
    mpfr_sqrt(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  friend BigFloat abs(const BigFloat& a) {
    BigFloat r(a.mantissa_bits());
    mpfr_abs(r.v_, a.v_, MPFR_RNDN);
    return r;
  }

  friend bool operator==(const BigFloat& a, const BigFloat& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend bool operator!=(const BigFloat& a, const BigFloat& b) { return mpfr_lessgreater_p(a.v_, b.v_) != 0; }
  friend bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
  friend bool operator<=(const BigFloat& a, const BigFloat& b) { return mpfr_lessequal_p(a.v_, b.v_) != 0; }
  friend bool operator>(const BigFloat& a, const BigFloat& b) { return mpfr_greater_p(a.v_, b.v_) != 0; }
  friend bool operator>=(const BigFloat& a, const BigFloat& b) { return mpfr_greaterequal_p(a.v_, b.v_) != 0; }

 private:
  static void check_bits(unsigned bits) {
    if (bits < kMinBits)
      throw std::invalid_argument("BigFloat: mantissa_bits must be at least 24, got " +
                                  std::to_string(bits));
  }
  static unsigned join_bits(const BigFloat& a, const BigFloat& b) {
    return std::max(a.mantissa_bits(), b.mantissa_bits());
  }
  template <int Kc>
  static unsigned exact_span_bits(const MultiComponent<Kc>& x, unsigned bits) {
    if (!mps::is_finite(x) || x.c[0] == 0.0) return std::max(bits, 64u);
    int top = std::ilogb(x.c[0]);
    int bot = top;
    for (int i = Kc - 1; i > 0; --i) {
      if (x.c[i] != 0.0) {
        bot = std::ilogb(x.c[i]);
        break;
      }
    }
    unsigned span = static_cast<unsigned>(top - bot) + 64;
    return std::max(bits, span);
  }

  mpfr_t v_;
};

inline double to_double(const BigFloat& x) { return x.to_double(); }
inline bool is_finite(const BigFloat& x) { return x.is_finite(); }

}  // namespace mps
