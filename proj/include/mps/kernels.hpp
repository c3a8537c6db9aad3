#pragma once

#include <omp.h>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mps/lanebatch.hpp"
#include "mps/precision.hpp"
#include "mps/sparse.hpp"

// CSR matrix-vector products over every supported scalar. Two matrix
// representations are supported: Pure (matrix elements at the working
// precision) and MixedBinary64 (binary64 matrix, extended vector; products
// use the element-times-double forms, accumulation stays at working
// precision).
//
// Determinism guarantees, relied on by the benchmark protocol:
//   - spmv: row results are independent of the thread count (rows are
//     computed independently into disjoint outputs);
//   - sptmv: thread-private accumulators are merged in ascending thread
//     order, so results are reproducible for a fixed thread count, and the
//     single-threaded product is bit-identical to spmv on the explicit
//     transpose (with lanes disabled);
//   - lane path: four lane partial sums reduced left to right, remainder
//     appended last; identical to the scalar path when every row has
//     fewer than four entries.

namespace mps {

enum class MatrixMode { Pure, MixedBinary64 };

inline const char* to_string(MatrixMode m) {
  return m == MatrixMode::Pure ? "p" : "m";
}

struct KernelMode {
  PrecisionTag precision{};
  MatrixMode matrix_mode = MatrixMode::Pure;
  bool transposed = false;
  int threads = 1;
  bool lanes_enabled = true;
};

namespace detail {

// One product term at the working precision F from a matrix element E.
inline double mul_term(double a, double v) { return a * v; }
template <int K>
inline MultiComponent<K> mul_term(const MultiComponent<K>& a, const MultiComponent<K>& v) {
  return mul(a, v);
}
template <int K>
inline MultiComponent<K> mul_term(double a, const MultiComponent<K>& v) {
  return mul_by_double(v, a);
}
inline BigFloat mul_term(const BigFloat& a, const BigFloat& v) { return a * v; }
inline BigFloat mul_term(double a, const BigFloat& v) { return v * a; }

// nnz-balanced contiguous row blocks; never splits a row.
inline std::vector<std::int64_t> partition_rows(const std::vector<std::int64_t>& indptr,
                                                std::int64_t nrows, int parts) {
  std::vector<std::int64_t> bounds(static_cast<std::size_t>(parts) + 1, nrows);
  bounds[0] = 0;
  std::int64_t total = indptr[static_cast<std::size_t>(nrows)];
  for (int t = 1; t < parts; ++t) {
    std::int64_t target = total * t / parts;
    const auto* base = indptr.data();
    std::int64_t lo = bounds[t - 1], hi = nrows;
    while (lo < hi) {
      std::int64_t mid = lo + (hi - lo) / 2;
      if (base[mid] < target) lo = mid + 1;
      else hi = mid;
    }
    bounds[t] = lo;
  }
  return bounds;
}

template <int K>
LaneBatch<K> load_matrix_lanes(const CsrValues<MultiComponent<K>>& vals, std::size_t k) {
  LaneBatch<K> b;
  for (int j = 0; j < K; ++j) b.comp[j] = Vec4::load(vals.component(j) + k);
  return b;
}

// Row accumulation, scalar order.
template <class E, class F>
F row_sum_scalar(const CsrMatrix<E>& A, const std::vector<F>& v, std::int64_t begin,
                 std::int64_t end, const F& zero) {
  F acc = zero;
  for (std::int64_t k = begin; k < end; ++k) {
    acc = acc + mul_term(A.values.get(static_cast<std::size_t>(k)),
                         v[static_cast<std::size_t>(A.indices[static_cast<std::size_t>(k)])]);
  }
  return acc;
}

// Row accumulation, lane order: whole 4-groups into lane partials which
// are reduced left to right, then the remainder appended.
template <int K, class F>
F row_sum_lanes_pure(const CsrMatrix<MultiComponent<K>>& A, const std::vector<F>& v,
                     std::int64_t begin, std::int64_t end, const F& zero) {
  LaneBatch<K> acc{};
  std::int64_t k = begin;
  for (; k + 4 <= end; k += 4) {
    LaneBatch<K> x;
    for (int lane = 0; lane < 4; ++lane)
      x.set_lane(lane, v[static_cast<std::size_t>(A.indices[static_cast<std::size_t>(k + lane)])]);
    acc = acc + load_matrix_lanes(A.values, static_cast<std::size_t>(k)) * x;
  }
  F s = ((zero + acc.lane(0)) + acc.lane(1)) + acc.lane(2);
  s = s + acc.lane(3);
  for (; k < end; ++k) {
    s = s + mul_term(A.values.get(static_cast<std::size_t>(k)),
                     v[static_cast<std::size_t>(A.indices[static_cast<std::size_t>(k)])]);
  }
  return s;
}

template <int K>
MultiComponent<K> row_sum_lanes_mixed(const CsrMatrix<double>& A,
                                      const std::vector<MultiComponent<K>>& v, std::int64_t begin,
                                      std::int64_t end, const MultiComponent<K>& zero) {
  LaneBatch<K> acc{};
  std::int64_t k = begin;
  for (; k + 4 <= end; k += 4) {
    LaneBatch<K> x;
    for (int lane = 0; lane < 4; ++lane)
      x.set_lane(lane, v[static_cast<std::size_t>(A.indices[static_cast<std::size_t>(k + lane)])]);
    acc = acc + x * Vec4::load(A.values.data() + k);
  }
  MultiComponent<K> s = ((zero + acc.lane(0)) + acc.lane(1)) + acc.lane(2);
  s = s + acc.lane(3);
  for (; k < end; ++k) {
    s = s + mul_by_double(v[static_cast<std::size_t>(A.indices[static_cast<std::size_t>(k)])],
                          A.values.get(static_cast<std::size_t>(k)));
  }
  return s;
}

inline double row_sum_lanes_f64(const CsrMatrix<double>& A, const std::vector<double>& v,
                                std::int64_t begin, std::int64_t end, double) {
  Vec4 acc{};
  std::int64_t k = begin;
  for (; k + 4 <= end; k += 4) {
    Vec4 x;
    for (int lane = 0; lane < 4; ++lane)
      x[lane] = v[static_cast<std::size_t>(A.indices[static_cast<std::size_t>(k + lane)])];
    acc = acc + Vec4::load(A.values.data() + k) * x;
  }
  double s = ((acc[0] + acc[1]) + acc[2]) + acc[3];
  for (; k < end; ++k)
    s = s + A.values.get(static_cast<std::size_t>(k)) *
                v[static_cast<std::size_t>(A.indices[static_cast<std::size_t>(k)])];
  return s;
}

// Lane-path selection per element/vector type pair; falls back to scalar
// order where no lane form exists (arbitrary precision).
template <class E, class F>
struct RowSum {
  static constexpr bool has_lanes = false;
  static F lanes(const CsrMatrix<E>& A, const std::vector<F>& v, std::int64_t b, std::int64_t e,
                 const F& zero) {
    return row_sum_scalar(A, v, b, e, zero);
  }
};

template <int K>
struct RowSum<MultiComponent<K>, MultiComponent<K>> {
  static constexpr bool has_lanes = true;
  static MultiComponent<K> lanes(const CsrMatrix<MultiComponent<K>>& A,
                                 const std::vector<MultiComponent<K>>& v, std::int64_t b,
                                 std::int64_t e, const MultiComponent<K>& zero) {
    return row_sum_lanes_pure<K>(A, v, b, e, zero);
  }
};

template <int K>
struct RowSum<double, MultiComponent<K>> {
  static constexpr bool has_lanes = true;
  static MultiComponent<K> lanes(const CsrMatrix<double>& A,
                                 const std::vector<MultiComponent<K>>& v, std::int64_t b,
                                 std::int64_t e, const MultiComponent<K>& zero) {
    return row_sum_lanes_mixed<K>(A, v, b, e, zero);
  }
};

template <>
struct RowSum<double, double> {
  static constexpr bool has_lanes = true;
  static double lanes(const CsrMatrix<double>& A, const std::vector<double>& v, std::int64_t b,
                      std::int64_t e, const double& zero) {
    return row_sum_lanes_f64(A, v, b, e, zero);
  }
};

template <class E, class F>
void spmv_block(const CsrMatrix<E>& A, const std::vector<F>& v, std::vector<F>& y,
                std::int64_t row_begin, std::int64_t row_end, bool lanes, const F& zero) {
  for (std::int64_t i = row_begin; i < row_end; ++i) {
    std::int64_t b = A.indptr[static_cast<std::size_t>(i)];
    std::int64_t e = A.indptr[static_cast<std::size_t>(i) + 1];
    y[static_cast<std::size_t>(i)] = (lanes && RowSum<E, F>::has_lanes)
                                         ? RowSum<E, F>::lanes(A, v, b, e, zero)
                                         : row_sum_scalar(A, v, b, e, zero);
  }
}

// Transposed product over one row block into a caller-owned accumulator.
template <class E, class F>
void sptmv_block(const CsrMatrix<E>& A, const std::vector<F>& v, std::vector<F>& acc,
                 std::int64_t row_begin, std::int64_t row_end) {
  for (std::int64_t i = row_begin; i < row_end; ++i) {
    const F& vi = v[static_cast<std::size_t>(i)];
    for (std::int64_t k = A.indptr[static_cast<std::size_t>(i)];
         k < A.indptr[static_cast<std::size_t>(i) + 1]; ++k) {
      std::size_t j = static_cast<std::size_t>(A.indices[static_cast<std::size_t>(k)]);
      acc[j] = acc[j] + mul_term(A.values.get(static_cast<std::size_t>(k)), vi);
    }
  }
}

// Lane variants of the transposed product. Within a row the column
// indices are strictly ascending, so a 4-group gather/update/scatter on
// the accumulator touches four distinct slots.
template <class E, class F>
struct SptRow {
  static constexpr bool has_lanes = false;
  static void lanes(const CsrMatrix<E>& A, const std::vector<F>& v, std::vector<F>& acc,
                    std::int64_t row_begin, std::int64_t row_end) {
    sptmv_block(A, v, acc, row_begin, row_end);
  }
};

template <int K>
struct SptRow<MultiComponent<K>, MultiComponent<K>> {
  static void lanes(const CsrMatrix<MultiComponent<K>>& A,
                    const std::vector<MultiComponent<K>>& v,
                    std::vector<MultiComponent<K>>& acc, std::int64_t row_begin,
                    std::int64_t row_end) {
    for (std::int64_t i = row_begin; i < row_end; ++i) {
      auto vib = LaneBatch<K>::broadcast(v[static_cast<std::size_t>(i)]);
      std::int64_t k = A.indptr[static_cast<std::size_t>(i)];
      std::int64_t e = A.indptr[static_cast<std::size_t>(i) + 1];
      for (; k + 4 <= e; k += 4) {
        LaneBatch<K> yb;
        for (int lane = 0; lane < 4; ++lane)
          yb.set_lane(lane,
                      acc[static_cast<std::size_t>(A.indices[static_cast<std::size_t>(k + lane)])]);
        yb = yb + load_matrix_lanes(A.values, static_cast<std::size_t>(k)) * vib;
        for (int lane = 0; lane < 4; ++lane)
          acc[static_cast<std::size_t>(A.indices[static_cast<std::size_t>(k + lane)])] =
              yb.lane(lane);
      }
      for (; k < e; ++k) {
        std::size_t j = static_cast<std::size_t>(A.indices[static_cast<std::size_t>(k)]);
        acc[j] = acc[j] + mul(A.values.get(static_cast<std::size_t>(k)),
                              v[static_cast<std::size_t>(i)]);
      }
    }
  }
  static constexpr bool has_lanes = true;
};

template <int K>
struct SptRow<double, MultiComponent<K>> {
  static void lanes(const CsrMatrix<double>& A, const std::vector<MultiComponent<K>>& v,
                    std::vector<MultiComponent<K>>& acc, std::int64_t row_begin,
                    std::int64_t row_end) {
    for (std::int64_t i = row_begin; i < row_end; ++i) {
      auto vib = LaneBatch<K>::broadcast(v[static_cast<std::size_t>(i)]);
      std::int64_t k = A.indptr[static_cast<std::size_t>(i)];
      std::int64_t e = A.indptr[static_cast<std::size_t>(i) + 1];
      for (; k + 4 <= e; k += 4) {
        LaneBatch<K> yb;
        for (int lane = 0; lane < 4; ++lane)
          yb.set_lane(lane,
                      acc[static_cast<std::size_t>(A.indices[static_cast<std::size_t>(k + lane)])]);
        yb = yb + vib * Vec4::load(A.values.data() + k);
        for (int lane = 0; lane < 4; ++lane)
          acc[static_cast<std::size_t>(A.indices[static_cast<std::size_t>(k + lane)])] =
              yb.lane(lane);
      }
      for (; k < e; ++k) {
        std::size_t j = static_cast<std::size_t>(A.indices[static_cast<std::size_t>(k)]);
        acc[j] = acc[j] + mul_by_double(v[static_cast<std::size_t>(i)],
                                        A.values.get(static_cast<std::size_t>(k)));
      }
    }
  }
  static constexpr bool has_lanes = true;
};

template <>
struct SptRow<double, double> {
  static void lanes(const CsrMatrix<double>& A, const std::vector<double>& v,
                    std::vector<double>& acc, std::int64_t row_begin, std::int64_t row_end) {
    for (std::int64_t i = row_begin; i < row_end; ++i) {
      Vec4 vib = Vec4::broadcast(v[static_cast<std::size_t>(i)]);
      std::int64_t k = A.indptr[static_cast<std::size_t>(i)];
      std::int64_t e = A.indptr[static_cast<std::size_t>(i) + 1];
      for (; k + 4 <= e; k += 4) {
        Vec4 yb;
        for (int lane = 0; lane < 4; ++lane)
          yb[lane] = acc[static_cast<std::size_t>(A.indices[static_cast<std::size_t>(k + lane)])];
        yb = yb + Vec4::load(A.values.data() + k) * vib;
        for (int lane = 0; lane < 4; ++lane)
          acc[static_cast<std::size_t>(A.indices[static_cast<std::size_t>(k + lane)])] = yb[lane];
      }
      for (; k < e; ++k) {
        std::size_t j = static_cast<std::size_t>(A.indices[static_cast<std::size_t>(k)]);
        acc[j] = acc[j] + A.values.get(static_cast<std::size_t>(k)) *
                               v[static_cast<std::size_t>(i)];
      }
    }
  }
  static constexpr bool has_lanes = true;
};

template <class E, class F>
void sptmv_dispatch(const CsrMatrix<E>& A, const std::vector<F>& v, std::vector<F>& acc,
                    std::int64_t row_begin, std::int64_t row_end, bool lanes) {
  if (lanes && SptRow<E, F>::has_lanes)
    SptRow<E, F>::lanes(A, v, acc, row_begin, row_end);
  else
    sptmv_block(A, v, acc, row_begin, row_end);
}

template <class F>
void check_dims(std::int64_t ncols, std::size_t vsize, const char* what) {
  if (static_cast<std::size_t>(ncols) != vsize)
    throw std::invalid_argument(std::string(what) + ": vector length " + std::to_string(vsize) +
                                " does not match matrix dimension " + std::to_string(ncols));
  (void)sizeof(F);
}

template <class F>
F vector_proto(const std::vector<F>& v) {
  return v.empty() ? F{} : zero_like(v[0]);
}

}  // namespace detail

template <class E, class F>
std::vector<F> spmv(const CsrMatrix<E>& A, const std::vector<F>& v, const KernelMode& mode) {
  detail::check_dims<F>(A.ncols, v.size(), "spmv");
  F zero = detail::vector_proto(v);
  std::vector<F> y(static_cast<std::size_t>(A.nrows), zero);
  int threads = std::max(1, mode.threads);
  if (threads == 1 || A.nrows == 0) {
    detail::spmv_block(A, v, y, 0, A.nrows, mode.lanes_enabled, zero);
    return y;
  }
  auto bounds = detail::partition_rows(A.indptr, A.nrows, threads);
#pragma omp parallel num_threads(threads)
  {
    int t = omp_get_thread_num();
    detail::spmv_block(A, v, y, bounds[static_cast<std::size_t>(t)],
                       bounds[static_cast<std::size_t>(t) + 1], mode.lanes_enabled, zero);
  }
  return y;
}

template <class E, class F>
std::vector<F> sptmv(const CsrMatrix<E>& A, const std::vector<F>& v, const KernelMode& mode) {
  detail::check_dims<F>(A.nrows, v.size(), "sptmv");
  F zero = detail::vector_proto(v);
  int threads = std::max(1, mode.threads);
  if (threads == 1 || A.nrows == 0) {
    std::vector<F> y(static_cast<std::size_t>(A.ncols), zero);
    detail::sptmv_dispatch(A, v, y, 0, A.nrows, mode.lanes_enabled);
    return y;
  }
  auto bounds = detail::partition_rows(A.indptr, A.nrows, threads);
  std::vector<std::vector<F>> partial(static_cast<std::size_t>(threads));
#pragma omp parallel num_threads(threads)
  {
    int t = omp_get_thread_num();
    auto& acc = partial[static_cast<std::size_t>(t)];
    acc.assign(static_cast<std::size_t>(A.ncols), zero);
    detail::sptmv_dispatch(A, v, acc, bounds[static_cast<std::size_t>(t)],
                           bounds[static_cast<std::size_t>(t) + 1], mode.lanes_enabled);
  }
  std::vector<F> y = std::move(partial[0]);
  for (int t = 1; t < threads; ++t) {
    const auto& acc = partial[static_cast<std::size_t>(t)];
    for (std::size_t j = 0; j < y.size(); ++j) y[j] = y[j] + acc[j];
  }
  return y;
}

// Complex product via four real products:
//   y_re = A_re v_re - A_im v_im,  y_im = A_re v_im + A_im v_re,
// combined elementwise at the working precision.
template <class E, class F>
ComplexVector<F> spmv_complex(const ComplexSparseMatrix<E>& A, const ComplexVector<F>& v,
                              const KernelMode& mode) {
  if (v.re.size() != v.im.size())
    throw std::invalid_argument("spmv_complex: re/im vector length mismatch");
  auto rr = spmv(A.re, v.re, mode);
  auto ii = spmv(A.im, v.im, mode);
  auto ri = spmv(A.re, v.im, mode);
  auto ir = spmv(A.im, v.re, mode);
  ComplexVector<F> y;
  y.re.reserve(rr.size());
  y.im.reserve(rr.size());
  for (std::size_t i = 0; i < rr.size(); ++i) {
    y.re.push_back(rr[i] - ii[i]);
    y.im.push_back(ri[i] + ir[i]);
  }
  return y;
}

// Transposed complex product; with conjugate set this is the adjoint.
template <class E, class F>
ComplexVector<F> sptmv_complex(const ComplexSparseMatrix<E>& A, const ComplexVector<F>& v,
                               const KernelMode& mode, bool conjugate = false) {
  if (v.re.size() != v.im.size())
    throw std::invalid_argument("sptmv_complex: re/im vector length mismatch");
  auto rr = sptmv(A.re, v.re, mode);
  auto ii = sptmv(A.im, v.im, mode);
  auto ri = sptmv(A.re, v.im, mode);
  auto ir = sptmv(A.im, v.re, mode);
  ComplexVector<F> y;
  y.re.reserve(rr.size());
  y.im.reserve(rr.size());
  for (std::size_t i = 0; i < rr.size(); ++i) {
    if (conjugate) {
      y.re.push_back(rr[i] + ii[i]);
      y.im.push_back(ri[i] - ir[i]);
    } else {
      y.re.push_back(rr[i] - ii[i]);
      y.im.push_back(ri[i] + ir[i]);
    }
  }
  return y;
}

// Gather four vector elements into a lane batch.
template <int K>
LaneBatch<K> gather_lanes(const std::vector<MultiComponent<K>>& v,
                          const std::array<std::int64_t, 4>& idx) {
  LaneBatch<K> b;
  for (int lane = 0; lane < 4; ++lane) b.set_lane(lane, v[static_cast<std::size_t>(idx[lane])]);
  return b;
}

inline Vec4 gather_lanes(const std::vector<double>& v, const std::array<std::int64_t, 4>& idx) {
  Vec4 b;
  for (int lane = 0; lane < 4; ++lane) b[lane] = v[static_cast<std::size_t>(idx[lane])];
  return b;
}

}  // namespace mps
