#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "mps/bigfloat.hpp"
#include "mps/multicomp.hpp"

namespace mps {

// Runtime descriptor of a working precision. Multi-component widths carry
// their effective significand size; the arbitrary-precision backend is
// configurable.
struct PrecisionTag {
  enum class Kind { F64, DD, TD, QD, Mpfr };

  Kind kind = Kind::F64;
  unsigned mantissa_bits = 53;

  static PrecisionTag f64() { return {Kind::F64, 53}; }
  static PrecisionTag dd() { return {Kind::DD, 106}; }
  static PrecisionTag td() { return {Kind::TD, 159}; }
  static PrecisionTag qd() { return {Kind::QD, 212}; }
  static PrecisionTag mpfr(unsigned bits = BigFloat::kDefaultBits) { return {Kind::Mpfr, bits}; }

  std::string name() const {
    switch (kind) {
      case Kind::F64: return "f64";
      case Kind::DD: return "dd";
      case Kind::TD: return "td";
      case Kind::QD: return "qd";
      case Kind::Mpfr: return "mpfr:" + std::to_string(mantissa_bits);
    }
    return "?";
  }

  static std::optional<PrecisionTag> parse(std::string_view s) {
    if (s == "f64" || s == "double" || s == "d") return f64();
    if (s == "dd") return dd();
    if (s == "td") return td();
    if (s == "qd") return qd();
    if (s.rfind("mpfr", 0) == 0) {
      if (s == "mpfr") return mpfr();
      if (s.size() > 5 && s[4] == ':') {
        unsigned bits = 0;
        for (char ch : s.substr(5)) {
          if (ch < '0' || ch > '9') return std::nullopt;
          bits = bits * 10 + static_cast<unsigned>(ch - '0');
          if (bits > 1u << 20) return std::nullopt;
        }
        if (bits < BigFloat::kMinBits) return std::nullopt;
        return mpfr(bits);
      }
    }
    return std::nullopt;
  }

  friend bool operator==(const PrecisionTag& a, const PrecisionTag& b) {
    return a.kind == b.kind && a.mantissa_bits == b.mantissa_bits;
  }
  friend bool operator!=(const PrecisionTag& a, const PrecisionTag& b) { return !(a == b); }
  // Ordering by significand size, the natural "wider than" relation.
  friend bool operator<(const PrecisionTag& a, const PrecisionTag& b) {
    return a.mantissa_bits < b.mantissa_bits;
  }
};

// Scalar conversions. Widening from binary64 is exact; narrowing rounds
// to nearest via an exact arbitrary-precision detour.

template <class To>
struct ConvertTo;

template <>
struct ConvertTo<double> {
  static double from(double x) { return x; }
  template <int K>
  static double from(const MultiComponent<K>& x) {
    return BigFloat::from(x).to_double();
  }
  static double from(const BigFloat& x) { return x.to_double(); }
};

template <int K>
struct ConvertTo<MultiComponent<K>> {
  static MultiComponent<K> from(double x) { return MultiComponent<K>(x); }
  template <int J>
  static MultiComponent<K> from(const MultiComponent<J>& x) {
    if constexpr (J <= K) {
      MultiComponent<K> r;
      for (int i = 0; i < J; ++i) r.c[i] = x.c[i];
      return r;
    } else {
      return BigFloat::from(x).template to_multicomponent<K>();
    }
  }
  static MultiComponent<K> from(const BigFloat& x) { return x.template to_multicomponent<K>(); }
};

template <class To, class From>
inline To convert(const From& x) {
  return ConvertTo<To>::from(x);
}

inline BigFloat convert_to_bigfloat(double x, unsigned bits = BigFloat::kDefaultBits) {
  return BigFloat(x, bits);
}
template <int K>
inline BigFloat convert_to_bigfloat(const MultiComponent<K>& x,
                                    unsigned bits = BigFloat::kDefaultBits) {
  return BigFloat::from(x, bits);
}
inline BigFloat convert_to_bigfloat(const BigFloat& x, unsigned bits = BigFloat::kDefaultBits) {
  BigFloat r(bits);
  mpfr_set(r.raw(), x.raw(), MPFR_RNDN);
  return r;
}

// Zero of the same shape/precision as a prototype value; lets generic
// kernels start accumulators without knowing the element type's config.
inline double to_double(double x) { return x; }

inline double zero_like(double) { return 0.0; }
template <int K>
inline MultiComponent<K> zero_like(const MultiComponent<K>&) {
  return MultiComponent<K>{};
}
inline BigFloat zero_like(const BigFloat& x) { return BigFloat(x.mantissa_bits()); }

// from_double with a prototype, for building constants at a vector's
// working precision.
inline double scalar_like(double v, double) { return v; }
template <int K>
inline MultiComponent<K> scalar_like(double v, const MultiComponent<K>&) {
  return MultiComponent<K>(v);
}
inline BigFloat scalar_like(double v, const BigFloat& proto) {
  return BigFloat(v, proto.mantissa_bits());
}

}  // namespace mps
