#pragma once

#include <array>
#include <cmath>
#include <cstring>

#include "mps/multicomp.hpp"

// Four-lane batches of multi-component values, stored component-major so
// matrix data streams in with contiguous loads. The arithmetic runs the
// same chains as the scalar ops on an elementwise 4-vector type; the
// branchy renormalization tail is applied lane by lane, which keeps every
// lane bit-identical to the scalar operation.

namespace mps {

struct Vec4 {
  std::array<double, 4> v{};

  static Vec4 broadcast(double x) { return Vec4{{x, x, x, x}}; }
  static Vec4 load(const double* p) {
    Vec4 r;
    std::memcpy(r.v.data(), p, sizeof(r.v));
    return r;
  }
  void store(double* p) const { std::memcpy(p, v.data(), sizeof(v)); }
  double operator[](int i) const { return v[i]; }
  double& operator[](int i) { return v[i]; }

  friend Vec4 operator+(const Vec4& a, const Vec4& b) {
    Vec4 r;
    for (int i = 0; i < 4; ++i) r.v[i] = a.v[i] + b.v[i];
    return r;
  }
  friend Vec4 operator-(const Vec4& a, const Vec4& b) {
    Vec4 r;
    for (int i = 0; i < 4; ++i) r.v[i] = a.v[i] - b.v[i];
    return r;
  }
  friend Vec4 operator*(const Vec4& a, const Vec4& b) {
    Vec4 r;
    for (int i = 0; i < 4; ++i) r.v[i] = a.v[i] * b.v[i];
    return r;
  }
  friend Vec4 operator-(const Vec4& a) {
    Vec4 r;
    for (int i = 0; i < 4; ++i) r.v[i] = -a.v[i];
    return r;
  }
  friend Vec4 fma(const Vec4& a, const Vec4& b, const Vec4& c) {
    Vec4 r;
    for (int i = 0; i < 4; ++i) r.v[i] = std::fma(a.v[i], b.v[i], c.v[i]);
    return r;
  }
};

template <int K>
struct LaneBatch {
  static constexpr int width = 4;
  std::array<Vec4, K> comp{};

  MultiComponent<K> lane(int i) const {
    MultiComponent<K> r;
    for (int j = 0; j < K; ++j) r.c[j] = comp[j][i];
    return r;
  }
  void set_lane(int i, const MultiComponent<K>& x) {
    for (int j = 0; j < K; ++j) comp[j][i] = x.c[j];
  }
  static LaneBatch broadcast(const MultiComponent<K>& x) {
    LaneBatch r;
    for (int j = 0; j < K; ++j) r.comp[j] = Vec4::broadcast(x.c[j]);
    return r;
  }
};

namespace detail {

// Pull the lanes of a prenormalization batch through the scalar renorm.
template <int K, std::size_t N>
inline LaneBatch<K> renorm_lanes(const std::array<Vec4, N>& pre) {
  LaneBatch<K> out;
  for (int lane = 0; lane < 4; ++lane) {
    std::array<double, N> t;
    for (std::size_t j = 0; j < N; ++j) t[j] = pre[j][lane];
    out.set_lane(lane, renorm_n<K, N>(t));
  }
  return out;
}

}  // namespace detail

inline LaneBatch<2> operator+(const LaneBatch<2>& x, const LaneBatch<2>& y) {
  LaneBatch<2> r;
  detail::dd_add_core(x.comp[0], x.comp[1], y.comp[0], y.comp[1], r.comp[0], r.comp[1]);
  return r;
}

inline LaneBatch<2> operator*(const LaneBatch<2>& x, const LaneBatch<2>& y) {
  LaneBatch<2> r;
  detail::dd_mul_core(x.comp[0], x.comp[1], y.comp[0], y.comp[1], r.comp[0], r.comp[1]);
  return r;
}

inline LaneBatch<2> operator*(const LaneBatch<2>& x, const Vec4& y) {
  LaneBatch<2> r;
  detail::dd_mul_d_core(x.comp[0], x.comp[1], y, r.comp[0], r.comp[1]);
  return r;
}

inline LaneBatch<3> operator+(const LaneBatch<3>& x, const LaneBatch<3>& y) {
  std::array<Vec4, 5> t;
  detail::td_add_prenorm(x.comp.data(), y.comp.data(), t.data());
  return detail::renorm_lanes<3, 5>(t);
}

inline LaneBatch<3> operator*(const LaneBatch<3>& x, const LaneBatch<3>& y) {
  std::array<Vec4, 5> t;
  detail::td_mul_prenorm(x.comp.data(), y.comp.data(), t.data());
  return detail::renorm_lanes<3, 5>(t);
}

inline LaneBatch<3> operator*(const LaneBatch<3>& x, const Vec4& y) {
  std::array<Vec4, 4> t;
  detail::td_mul_d_prenorm(x.comp.data(), y, t.data());
  return detail::renorm_lanes<3, 4>(t);
}

inline LaneBatch<4> operator+(const LaneBatch<4>& x, const LaneBatch<4>& y) {
  std::array<Vec4, 5> t;
  detail::qd_add_prenorm(x.comp.data(), y.comp.data(), t.data());
  return detail::renorm_lanes<4, 5>(t);
}

inline LaneBatch<4> operator*(const LaneBatch<4>& x, const LaneBatch<4>& y) {
  std::array<Vec4, 5> t;
  detail::qd_mul_prenorm(x.comp.data(), y.comp.data(), t.data());
  return detail::renorm_lanes<4, 5>(t);
}

inline LaneBatch<4> operator*(const LaneBatch<4>& x, const Vec4& y) {
  std::array<Vec4, 5> t;
  detail::qd_mul_d_prenorm(x.comp.data(), y, t.data());
  return detail::renorm_lanes<4, 5>(t);
}

}  // namespace mps
