#pragma once

#include <cassert>
#include <cmath>
#include <type_traits>

// Error-free transformations: each maps floating-point inputs to a
// (result, error) pair whose exact sum equals the exact result of the
// operation. Templated on the element type so the same chains run on
// plain binary64 and on the 4-wide lane type.

namespace mps {

template <class T>
struct Eft {
  T hi;
  T lo;
};

namespace detail {

// Dekker sum without the precondition assert; the sloppy multi-component
// chains call this in spots where cancellation can legally break the
// |a| >= |b| requirement and the error model absorbs it.
template <class T>
inline Eft<T> quick_two_sum_raw(T a, T b) {
  T s = a + b;
  T e = b - (s - a);
  return {s, e};
}

}  // namespace detail

// Knuth sum: s + e == a + b regardless of operand ordering.
template <class T>
inline Eft<T> two_sum(T a, T b) {
  T s = a + b;
  T v = s - a;
  T e = (a - (s - v)) + (b - v);
  return {s, e};
}

// Dekker sum: requires |a| >= |b| or a == 0.
template <class T>
inline Eft<T> quick_two_sum(T a, T b) {
  if constexpr (std::is_same_v<T, double>) {
    assert(a == 0.0 || !(std::fabs(b) > std::fabs(a)) || std::isnan(a + b));
  }
  return detail::quick_two_sum_raw(a, b);
}

// p + e == a * b exactly, via FMA.
template <class T>
inline Eft<T> two_prod_fma(T a, T b) {
  using std::fma;
  T p = a * b;
  T e = fma(a, b, -p);
  return {p, e};
}

// Exact three-way sum; on return a + b + c is preserved with a carrying
// the dominant part.
template <class T>
inline void three_sum(T& a, T& b, T& c) {
  auto [t1, t2] = two_sum(a, b);
  auto [s1, t3] = two_sum(c, t1);
  auto [s2, s3] = two_sum(t2, t3);
  a = s1;
  b = s2;
  c = s3;
}

// Two-output variant: the lowest-order contribution is folded into b.
template <class T>
inline void three_sum2(T& a, T& b, T c) {
  auto [t1, t2] = two_sum(a, b);
  auto [s1, t3] = two_sum(c, t1);
  a = s1;
  b = t2 + t3;
}

}  // namespace mps
