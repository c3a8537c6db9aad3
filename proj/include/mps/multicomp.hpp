#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

#include "mps/eft.hpp"

// Unevaluated-sum formats: a value is the exact sum of K binary64
// components, magnitude-decreasing and non-overlapping
// (|c[i+1]| <= ulp(c[i]) / 2 after renormalization). K = 2, 3, 4 give
// roughly 106, 159 and 212 significand bits.

namespace mps {

template <int K>
struct MultiComponent {
  static_assert(K >= 2 && K <= 4, "supported widths: 2, 3, 4");

  std::array<double, K> c{};

  constexpr MultiComponent() = default;
  // Widening from binary64 is exact.
  explicit constexpr MultiComponent(double hi) { c[0] = hi; }
  explicit constexpr MultiComponent(const std::array<double, K>& comps) : c(comps) {}

  double hi() const { return c[0]; }
  bool is_zero() const { return c[0] == 0.0; }
};

using DoubleDouble = MultiComponent<2>;
using TripleDouble = MultiComponent<3>;
using QuadDouble = MultiComponent<4>;

namespace detail {

// Renormalize N roughly magnitude-ordered values into K non-overlapping
// components carrying the same sum (minus the residue beyond component
// K-1, which is below the format's resolution). Backward Dekker sweep,
// then forward collection of the nonzero parts; once the last slot is
// reached the remaining terms are folded in with plain adds.
template <int K, std::size_t N>
inline MultiComponent<K> renorm_n(std::array<double, N> t) {
  static_assert(N > K);
  MultiComponent<K> r;
  if (!std::isfinite(t[0])) {
    double s = 0.0;
    for (double v : t) s += v;
    r.c[0] = s;
    return r;
  }
  double s = t[N - 1];
  for (std::size_t i = N - 1; i-- > 0;) {
    auto [hi, lo] = quick_two_sum_raw(t[i], s);
    s = hi;
    t[i + 1] = lo;
  }
  t[0] = s;

  int k = 0;
  s = t[0];
  for (std::size_t i = 1; i < N; ++i) {
    if (k == K - 1) {
      s += t[i];
      continue;
    }
    auto [hi, lo] = quick_two_sum_raw(s, t[i]);
    if (lo != 0.0) {
      r.c[k++] = hi;
      s = lo;
    } else {
      s = hi;
    }
  }
  r.c[k] = s;
  return r;
}

template <class T>
inline void dd_add_core(T x0, T x1, T y0, T y1, T& r0, T& r1) {
  auto [s, e] = two_sum(x0, y0);
  T w = x1 + y1;
  e = e + w;
  auto [h, l] = quick_two_sum_raw(s, e);
  r0 = h;
  r1 = l;
}

template <class T>
inline void dd_mul_core(T x0, T x1, T y0, T y1, T& r0, T& r1) {
  auto [p1, p2] = two_prod_fma(x0, y0);
  T w1 = x0 * y1;
  T w2 = x1 * y0;
  T w3 = w1 + w2;
  p2 = p2 + w3;
  auto [h, l] = quick_two_sum_raw(p1, p2);
  r0 = h;
  r1 = l;
}

template <class T>
inline void dd_mul_d_core(T x0, T x1, T y, T& r0, T& r1) {
  using std::fma;
  auto [p1, p2] = two_prod_fma(x0, y);
  p2 = fma(x1, y, p2);
  auto [h, l] = quick_two_sum_raw(p1, p2);
  r0 = h;
  r1 = l;
}

// Sloppy quad add; emits the five pre-renormalization values.
template <class T>
inline void qd_add_prenorm(const T* x, const T* y, T* out) {
  auto [s0, t0] = two_sum(x[0], y[0]);
  auto [s1, t1] = two_sum(x[1], y[1]);
  auto [s2, t2] = two_sum(x[2], y[2]);
  auto [s3, t3] = two_sum(x[3], y[3]);

  auto [s1b, t0b] = two_sum(s1, t0);
  s1 = s1b;
  t0 = t0b;
  three_sum(s2, t0, t1);
  three_sum2(s3, t0, t2);
  t0 = t0 + t1 + t3;

  out[0] = s0;
  out[1] = s1;
  out[2] = s2;
  out[3] = s3;
  out[4] = t0;
}

// Sloppy quad product: the eleven partial products of weight >= 2^-159
// are combined exactly, the rest in one rounded chain.
template <class T>
inline void qd_mul_prenorm(const T* a, const T* b, T* out) {
  auto [p0, q0] = two_prod_fma(a[0], b[0]);
  auto [p1, q1] = two_prod_fma(a[0], b[1]);
  auto [p2, q2] = two_prod_fma(a[1], b[0]);
  auto [p3, q3] = two_prod_fma(a[0], b[2]);
  auto [p4, q4] = two_prod_fma(a[1], b[1]);
  auto [p5, q5] = two_prod_fma(a[2], b[0]);

  three_sum(p1, p2, q0);

  three_sum(p2, q1, q2);
  three_sum(p3, p4, p5);
  auto [s0, t0] = two_sum(p2, p3);
  auto [s1, t1] = two_sum(q1, p4);
  T s2 = q2 + p5;
  auto [s1b, t0b] = two_sum(s1, t0);
  s1 = s1b;
  s2 = s2 + (t0b + t1);

  s1 = s1 + (a[0] * b[3] + a[1] * b[2] + a[2] * b[1] + a[3] * b[0] + q0 + q3 + q4 + q5);

  out[0] = p0;
  out[1] = p1;
  out[2] = s0;
  out[3] = s1;
  out[4] = s2;
}

template <class T>
inline void qd_mul_d_prenorm(const T* a, T b, T* out) {
  auto [p0, q0] = two_prod_fma(a[0], b);
  auto [p1, q1] = two_prod_fma(a[1], b);
  auto [p2, q2] = two_prod_fma(a[2], b);
  T p3 = a[3] * b;

  auto [s1, s2] = two_sum(q0, p1);
  three_sum(s2, q1, p2);
  three_sum2(q1, p2, p3);
  T s3 = q1;
  T s4 = q2 + p2;

  out[0] = p0;
  out[1] = s1;
  out[2] = s2;
  out[3] = s3;
  out[4] = s4;
}

template <class T>
inline void td_mul_d_prenorm(const T* a, T b, T* out) {
  auto [p0, q0] = two_prod_fma(a[0], b);
  auto [p1, q1] = two_prod_fma(a[1], b);
  auto [p2, q2] = two_prod_fma(a[2], b);

  auto [s1, s2] = two_sum(q0, p1);
  three_sum(s2, q1, p2);
  T s3 = q2 + p2;

  out[0] = p0;
  out[1] = s1;
  out[2] = s2;
  out[3] = s3;
}

// Triple-width add/mul run the quad chains on zero-extended operands and
// renormalize straight to three components.
template <class T>
inline void td_add_prenorm(const T* x, const T* y, T* out) {
  T xe[4] = {x[0], x[1], x[2], T{}};
  T ye[4] = {y[0], y[1], y[2], T{}};
  qd_add_prenorm(xe, ye, out);
}

template <class T>
inline void td_mul_prenorm(const T* x, const T* y, T* out) {
  T xe[4] = {x[0], x[1], x[2], T{}};
  T ye[4] = {y[0], y[1], y[2], T{}};
  qd_mul_prenorm(xe, ye, out);
}

}  // namespace detail

// Renormalization of K+1 components into canonical K-component form.
template <int K>
inline MultiComponent<K> renorm(const std::array<double, K + 1>& parts) {
  return detail::renorm_n<K, static_cast<std::size_t>(K) + 1>(parts);
}

inline MultiComponent<2> add(const MultiComponent<2>& x, const MultiComponent<2>& y) {
  MultiComponent<2> r;
  detail::dd_add_core(x.c[0], x.c[1], y.c[0], y.c[1], r.c[0], r.c[1]);
  return r;
}

inline MultiComponent<2> mul(const MultiComponent<2>& x, const MultiComponent<2>& y) {
  MultiComponent<2> r;
  detail::dd_mul_core(x.c[0], x.c[1], y.c[0], y.c[1], r.c[0], r.c[1]);
  return r;
}

inline MultiComponent<2> mul_by_double(const MultiComponent<2>& x, double y) {
  MultiComponent<2> r;
  detail::dd_mul_d_core(x.c[0], x.c[1], y, r.c[0], r.c[1]);
  return r;
}

inline MultiComponent<3> add(const MultiComponent<3>& x, const MultiComponent<3>& y) {
  std::array<double, 5> t;
  detail::td_add_prenorm(x.c.data(), y.c.data(), t.data());
  return detail::renorm_n<3, 5>(t);
}

inline MultiComponent<3> mul(const MultiComponent<3>& x, const MultiComponent<3>& y) {
  std::array<double, 5> t;
  detail::td_mul_prenorm(x.c.data(), y.c.data(), t.data());
  return detail::renorm_n<3, 5>(t);
}

inline MultiComponent<3> mul_by_double(const MultiComponent<3>& x, double y) {
  std::array<double, 4> t;
  detail::td_mul_d_prenorm(x.c.data(), y, t.data());
  return detail::renorm_n<3, 4>(t);
}

inline MultiComponent<4> add(const MultiComponent<4>& x, const MultiComponent<4>& y) {
  std::array<double, 5> t;
  detail::qd_add_prenorm(x.c.data(), y.c.data(), t.data());
  return detail::renorm_n<4, 5>(t);
}

inline MultiComponent<4> mul(const MultiComponent<4>& x, const MultiComponent<4>& y) {
  std::array<double, 5> t;
  detail::qd_mul_prenorm(x.c.data(), y.c.data(), t.data());
  return detail::renorm_n<4, 5>(t);
}

inline MultiComponent<4> mul_by_double(const MultiComponent<4>& x, double y) {
  std::array<double, 5> t;
  detail::qd_mul_d_prenorm(x.c.data(), y, t.data());
  return detail::renorm_n<4, 5>(t);
}

template <int K>
inline MultiComponent<K> negate(const MultiComponent<K>& x) {
  MultiComponent<K> r;
  for (int i = 0; i < K; ++i) r.c[i] = -x.c[i];
  return r;
}

template <int K>
inline MultiComponent<K> sub(const MultiComponent<K>& x, const MultiComponent<K>& y) {
  return add(x, negate(y));
}

// Long division: K+1 quotient digits against the leading component, each
// followed by an exact-style remainder update, then one renormalization.
template <int K>
inline MultiComponent<K> divide(const MultiComponent<K>& a, const MultiComponent<K>& b) {
  std::array<double, K + 1> q;
  MultiComponent<K> r = a;
  for (int i = 0; i <= K; ++i) {
    q[i] = r.c[0] / b.c[0];
    if (i < K) r = sub(r, mul_by_double(b, q[i]));
  }
  return renorm<K>(q);
}

template <int K>
inline MultiComponent<K> sqrt(const MultiComponent<K>& a) {
  if (a.c[0] == 0.0) return MultiComponent<K>{};
  if (a.c[0] < 0.0 || std::isnan(a.c[0]))
    return MultiComponent<K>(std::numeric_limits<double>::quiet_NaN());

  // Newton on 1/sqrt(a) from a binary64 seed, then one self-correcting
  // multiply-back step.
  MultiComponent<K> x(1.0 / std::sqrt(a.c[0]));
  const MultiComponent<K> one(1.0);
  const int iters = (K == 4) ? 3 : 2;
  for (int i = 0; i < iters; ++i) {
    MultiComponent<K> e = sub(one, mul(a, mul(x, x)));
    x = add(x, mul_by_double(mul(x, e), 0.5));
  }
  MultiComponent<K> r = mul(a, x);
  r = add(r, mul_by_double(mul(sub(a, mul(r, r)), x), 0.5));
  return r;
}

template <int K>
inline MultiComponent<K> abs(const MultiComponent<K>& x) {
  return (x.c[0] < 0.0) ? negate(x) : x;
}

// Nearest-double snapshot (folds the tail low-to-high).
template <int K>
inline double to_double(const MultiComponent<K>& x) {
  double s = x.c[K - 1];
  for (int i = K - 2; i >= 0; --i) s = x.c[i] + s;
  return s;
}

template <int K>
inline bool is_finite(const MultiComponent<K>& x) {
  return std::isfinite(x.c[0]);
}

// Componentwise lexicographic compare; valid for renormalized values.
// Returns -1/0/+1; any NaN makes the pair unordered, reported as -2.
template <int K>
inline int compare(const MultiComponent<K>& x, const MultiComponent<K>& y) {
  if (std::isnan(x.c[0]) || std::isnan(y.c[0])) return -2;
  for (int i = 0; i < K; ++i) {
    if (x.c[i] < y.c[i]) return -1;
    if (x.c[i] > y.c[i]) return 1;
  }
  return 0;
}

template <int K>
inline MultiComponent<K> operator+(const MultiComponent<K>& x, const MultiComponent<K>& y) {
  return add(x, y);
}
template <int K>
inline MultiComponent<K> operator-(const MultiComponent<K>& x, const MultiComponent<K>& y) {
  return sub(x, y);
}
template <int K>
inline MultiComponent<K> operator-(const MultiComponent<K>& x) {
  return negate(x);
}
template <int K>
inline MultiComponent<K> operator*(const MultiComponent<K>& x, const MultiComponent<K>& y) {
  return mul(x, y);
}
template <int K>
inline MultiComponent<K> operator*(const MultiComponent<K>& x, double y) {
  return mul_by_double(x, y);
}
template <int K>
inline MultiComponent<K> operator*(double x, const MultiComponent<K>& y) {
  return mul_by_double(y, x);
}
template <int K>
inline MultiComponent<K> operator/(const MultiComponent<K>& x, const MultiComponent<K>& y) {
  return divide(x, y);
}

template <int K>
inline bool operator==(const MultiComponent<K>& x, const MultiComponent<K>& y) {
  return compare(x, y) == 0;
}
template <int K>
inline bool operator!=(const MultiComponent<K>& x, const MultiComponent<K>& y) {
  return !(x == y);
}
template <int K>
inline bool operator<(const MultiComponent<K>& x, const MultiComponent<K>& y) {
  return compare(x, y) == -1;
}
template <int K>
inline bool operator<=(const MultiComponent<K>& x, const MultiComponent<K>& y) {
  int c = compare(x, y);
  return c == 0 || c == -1;
}
template <int K>
inline bool operator>(const MultiComponent<K>& x, const MultiComponent<K>& y) {
  return compare(x, y) > 0;
}
template <int K>
inline bool operator>=(const MultiComponent<K>& x, const MultiComponent<K>& y) {
  return compare(x, y) >= 0;
}

}  // namespace mps
