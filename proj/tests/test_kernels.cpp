#include <bit>
#include <cmath>

#include "doctest.h"
#include "mps/bench.hpp"
#include "mps/kernels.hpp"
#include "support/fixtures.hpp"

using namespace mps;
using test::exact;
using test::kOracleBits;
using test::rel_error;
using test::Rng;

namespace {

CsrMatrix<double> example5x5() {
  CooMatrix<double> coo;
  coo.nrows = coo.ncols = 5;
  coo.entries = {{0, 0, 1.0}, {0, 2, 2.0},  {1, 1, 3.0}, {1, 4, -4.0},
                 {2, 2, 5.0}, {3, 0, 6.0}, {3, 3, -7.0}, {4, 4, 8.0}};
  return coo_to_csr(coo);
}

bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}
template <int K>
bool same_bits(const MultiComponent<K>& a, const MultiComponent<K>& b) {
  for (int j = 0; j < K; ++j)
    if (!same_bits(a.c[j], b.c[j])) return false;
  return true;
}
template <class E>
bool same_bits(const std::vector<E>& a, const std::vector<E>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same_bits(a[i], b[i])) return false;
  return true;
}

template <class E>
std::vector<E> ramp(std::int64_t n, const E& proto) {
  std::vector<E> v;
  v.reserve(static_cast<std::size_t>(n));
  for (std::int64_t j = 0; j < n; ++j) v.push_back(scalar_like(double(j + 1), proto));
  return v;
}

// Positive-valued random matrix and vector, so row sums have no
// cancellation and element-relative oracle bounds stay meaningful.
CsrMatrix<double> random_positive_csr(Rng& rng, std::int64_t n, int nnz) {
  CooMatrix<double> coo;
  coo.nrows = coo.ncols = n;
  std::vector<char> used(static_cast<std::size_t>(n * n), 0);
  int placed = 0;
  while (placed < nnz) {
    auto r = rng.uniform_int(0, static_cast<int>(n) - 1);
    auto c = rng.uniform_int(0, static_cast<int>(n) - 1);
    auto& slot = used[static_cast<std::size_t>(r) * static_cast<std::size_t>(n) +
                      static_cast<std::size_t>(c)];
    if (slot) continue;
    slot = 1;
    coo.entries.push_back({r, c, rng.normalized(-4, 4, false)});
    ++placed;
  }
  return coo_to_csr(coo);
}

template <class E>
std::vector<E> random_vector(Rng& rng, std::int64_t n, const E& proto) {
  std::vector<E> v;
  for (std::int64_t j = 0; j < n; ++j) v.push_back(scalar_like(rng.normalized(-4, 4, false), proto));
  return v;
}

std::vector<BigFloat> oracle_spmv(const CsrMatrix<double>& A, const std::vector<BigFloat>& v) {
  std::vector<BigFloat> y(static_cast<std::size_t>(A.nrows), BigFloat(kOracleBits));
  for (std::int64_t i = 0; i < A.nrows; ++i) {
    BigFloat s(kOracleBits);
    for (std::int64_t k = A.indptr[static_cast<std::size_t>(i)];
         k < A.indptr[static_cast<std::size_t>(i) + 1]; ++k)
      s = s + BigFloat(A.values.get(static_cast<std::size_t>(k)), kOracleBits) *
                  v[static_cast<std::size_t>(A.indices[static_cast<std::size_t>(k)])];
    y[static_cast<std::size_t>(i)] = s;
  }
  return y;
}

template <class E>
std::vector<BigFloat> lift(const std::vector<E>& v) {
  std::vector<BigFloat> out;
  for (const auto& x : v) out.push_back(exact(x));
  return out;
}

}  // namespace

TEST_CASE("worked example product is exact at every precision and mode") {
  auto A = example5x5();
  const double want[] = {7.0, -14.0, 15.0, -22.0, 40.0};

  for (int threads : {1, 2, 4, 8}) {
    for (bool lanes : {false, true}) {
      KernelMode mode{PrecisionTag::f64(), MatrixMode::Pure, false, threads, lanes};

      auto yd = spmv(A, ramp(5, 0.0), mode);
      for (int i = 0; i < 5; ++i) CHECK(yd[static_cast<std::size_t>(i)] == want[i]);

      auto check_mc = [&](auto proto) {
        using E = decltype(proto);
        auto Ak = convert_csr<E>(A);
        auto v = ramp(5, proto);
        auto pure = spmv(Ak, v, mode);
        auto mixed = spmv(A, v, mode);
        for (int i = 0; i < 5; ++i) {
          CHECK(to_double(pure[static_cast<std::size_t>(i)]) == want[i]);
          CHECK(same_bits(pure[static_cast<std::size_t>(i)],
                          scalar_like(want[i], proto)));
          CHECK(same_bits(mixed[static_cast<std::size_t>(i)],
                          pure[static_cast<std::size_t>(i)]));
        }
      };
      check_mc(DoubleDouble{});
      check_mc(TripleDouble{});
      check_mc(QuadDouble{});

      auto Ab = convert_csr_bigfloat(A, 256);
      auto vb = ramp(5, BigFloat(256u));
      auto yb = spmv(Ab, vb, mode);
      auto ybm = spmv(A, vb, mode);
      for (int i = 0; i < 5; ++i) {
        CHECK(yb[static_cast<std::size_t>(i)].to_double() == want[i]);
        CHECK(ybm[static_cast<std::size_t>(i)].to_double() == want[i]);
      }
    }
  }
}

TEST_CASE("transposed worked example product is exact") {
  auto A = example5x5();
  const double want[] = {25.0, 6.0, 17.0, -28.0, 32.0};
  for (int threads : {1, 2, 4}) {
    for (bool lanes : {false, true}) {
      KernelMode mode{PrecisionTag::dd(), MatrixMode::Pure, true, threads, lanes};
      auto y = sptmv(convert_csr<DoubleDouble>(A), ramp(5, DoubleDouble{}), mode);
      for (int i = 0; i < 5; ++i) CHECK(to_double(y[static_cast<std::size_t>(i)]) == want[i]);
    }
  }
}

TEST_CASE("single-threaded sptmv with lanes off bit-equals spmv on the transpose") {
  Rng rng(0x6e61f001);
  for (int trial = 0; trial < 6; ++trial) {
    auto A = test::random_coo(rng, 60, 45, 400);
    auto C = coo_to_csr(A);
    auto T = transpose_csr(C);
    KernelMode seq{PrecisionTag::dd(), MatrixMode::Pure, true, 1, false};

    auto vd = random_vector(rng, 60, 0.0);
    CHECK(same_bits(sptmv(C, vd, seq), spmv(T, vd, seq)));

    auto Cdd = convert_csr<DoubleDouble>(C);
    auto Tdd = transpose_csr(Cdd);
    auto v = random_vector(rng, 60, DoubleDouble{});
    CHECK(same_bits(sptmv(Cdd, v, seq), spmv(Tdd, v, seq)));
    CHECK(same_bits(sptmv(C, v, seq), spmv(T, v, seq)));

    auto Cqd = convert_csr<QuadDouble>(C);
    auto Tqd = transpose_csr(Cqd);
    auto vq = random_vector(rng, 60, QuadDouble{});
    CHECK(same_bits(sptmv(Cqd, vq, seq), spmv(Tqd, vq, seq)));
  }
}

TEST_CASE("spmv output does not depend on the thread count") {
  Rng rng(0x6e61f002);
  auto A = coo_to_csr(test::random_coo(rng, 300, 300, 4000));
  auto Add = convert_csr<DoubleDouble>(A);
  auto Atd = convert_csr<TripleDouble>(A);
  auto v = random_vector(rng, 300, DoubleDouble{});
  auto vt = random_vector(rng, 300, TripleDouble{});
  auto vd = random_vector(rng, 300, 0.0);

  for (bool lanes : {false, true}) {
    KernelMode one{PrecisionTag::dd(), MatrixMode::Pure, false, 1, lanes};
    auto ref = spmv(Add, v, one);
    auto reft = spmv(Atd, vt, one);
    auto refd = spmv(A, vd, one);
    auto refm = spmv(A, v, one);
    for (int threads : {2, 4, 8}) {
      KernelMode mode{PrecisionTag::dd(), MatrixMode::Pure, false, threads, lanes};
      CHECK(same_bits(spmv(Add, v, mode), ref));
      CHECK(same_bits(spmv(Atd, vt, mode), reft));
      CHECK(same_bits(spmv(A, vd, mode), refd));
      CHECK(same_bits(spmv(A, v, mode), refm));
    }
  }
}

TEST_CASE("lane path equals scalar path when no row reaches a full lane group") {
  Rng rng(0x6e61f003);
  CooMatrix<double> coo;
  coo.nrows = coo.ncols = 64;
  for (std::int64_t i = 0; i < 64; ++i) {
    int row_nnz = rng.uniform_int(0, 3);
    for (int k = 0; k < row_nnz; ++k)
      coo.entries.push_back({i, (i * 7 + k * 13) % 64, rng.normalized(-4, 4)});
  }
  auto A = coo_to_csr(coo);
  auto Aq = convert_csr<QuadDouble>(A);
  auto v = random_vector(rng, 64, QuadDouble{});

  KernelMode off{PrecisionTag::qd(), MatrixMode::Pure, false, 1, false};
  KernelMode on{PrecisionTag::qd(), MatrixMode::Pure, false, 1, true};
  CHECK(same_bits(spmv(Aq, v, off), spmv(Aq, v, on)));
  CHECK(same_bits(spmv(A, v, off), spmv(A, v, on)));
  CHECK(same_bits(sptmv(Aq, v, off), sptmv(Aq, v, on)));
}

TEST_CASE("row sums track the oracle at every precision, lanes on and off") {
  Rng rng(0x6e61f004);
  auto A = random_positive_csr(rng, 80, 1200);
  auto vb_basis = random_vector(rng, 80, 0.0);
  auto ref = oracle_spmv(A, lift(vb_basis));

  auto check = [&](auto proto, double bound) {
    using E = decltype(proto);
    std::vector<E> v;
    for (double x : vb_basis) v.push_back(scalar_like(x, proto));
    auto Ak = convert_csr<E>(A);
    for (bool lanes : {false, true}) {
      for (auto mm : {MatrixMode::Pure, MatrixMode::MixedBinary64}) {
        KernelMode mode{PrecisionTag::dd(), mm, false, 1, lanes};
        auto y = mm == MatrixMode::Pure ? spmv(Ak, v, mode) : spmv(A, v, mode);
        for (std::size_t i = 0; i < y.size(); ++i)
          CHECK(rel_error(exact(y[i]), ref[i]) <= bound);
      }
    }
  };
  check(DoubleDouble{}, std::ldexp(1.0, -96));
  check(TripleDouble{}, std::ldexp(1.0, -149));
  check(QuadDouble{}, std::ldexp(1.0, -202));

  auto Ab = convert_csr_bigfloat(A, 256);
  std::vector<BigFloat> v256;
  for (double x : vb_basis) v256.push_back(BigFloat(x, 256));
  KernelMode mode{PrecisionTag::mpfr(256), MatrixMode::Pure, false, 1, true};
  auto yb = spmv(Ab, v256, mode);
  for (std::size_t i = 0; i < yb.size(); ++i)
    CHECK(rel_error(yb[i], ref[i]) <= std::ldexp(1.0, -245));
}

TEST_CASE("mixed products agree with pure products on a binary64 matrix") {
  Rng rng(0x6e61f005);
  auto A = random_positive_csr(rng, 60, 700);
  auto v = random_vector(rng, 60, DoubleDouble{});
  KernelMode mode{PrecisionTag::dd(), MatrixMode::Pure, false, 1, true};
  auto pure = spmv(convert_csr<DoubleDouble>(A), v, mode);
  auto mixed = spmv(A, v, mode);
  for (std::size_t i = 0; i < pure.size(); ++i)
    CHECK(rel_error(mixed[i], exact(pure[i])) <= std::ldexp(1.0, -99));
}

TEST_CASE("multiplying by iI swaps and negates components exactly") {
  CooMatrix<std::complex<double>> coo;
  coo.nrows = coo.ncols = 7;
  for (std::int64_t j = 0; j < 7; ++j) coo.entries.push_back({j, j, {0.0, 1.0}});
  auto A = split_complex(coo);

  Rng rng(0x6e61f006);
  ComplexVector<DoubleDouble> v;
  for (int j = 0; j < 7; ++j) {
    v.re.push_back(rng.multicomp<2>());
    v.im.push_back(rng.multicomp<2>());
  }
  // Component-wise == rather than bit equality: when a low component is
  // zero, the kernel's zero-times-entry chains and negate() may disagree on
  // the sign of that zero while the values stay exact.
  auto same_value = [](const DoubleDouble& a, const DoubleDouble& b) {
    return a.c[0] == b.c[0] && a.c[1] == b.c[1];
  };
  auto Add = convert_complex_csr<DoubleDouble>(A);
  KernelMode mode{PrecisionTag::dd(), MatrixMode::Pure, false, 1, true};
  auto y = spmv_complex(Add, v, mode);
  for (std::size_t i = 0; i < 7; ++i) {
    CHECK(same_value(y.re[i], negate(v.im[i])));
    CHECK(same_value(y.im[i], v.re[i]));
  }

  auto ym = spmv_complex(A, v, mode);
  for (std::size_t i = 0; i < 7; ++i) {
    CHECK(same_value(ym.re[i], negate(v.im[i])));
    CHECK(same_value(ym.im[i], v.re[i]));
  }
}

TEST_CASE("complex product matches the complex dense oracle on the qc324 stand-in") {
  auto coo = test::qc324_standin();
  auto A = split_complex(coo);
  auto Add = convert_complex_csr<DoubleDouble>(A);
  auto v = make_complex_vector(324, DoubleDouble{});

  KernelMode mode{PrecisionTag::dd(), MatrixMode::Pure, false, 4, true};
  auto y = spmv_complex(Add, v, mode);

  auto re_ref = oracle_spmv(A.re, lift(v.re));
  auto im_im = oracle_spmv(A.im, lift(v.im));
  auto re_im = oracle_spmv(A.re, lift(v.im));
  auto im_re = oracle_spmv(A.im, lift(v.re));

  double worst = 0.0;
  for (std::size_t i = 0; i < 324; ++i) {
    BigFloat yre = re_ref[i] - im_im[i];
    BigFloat yim = re_im[i] + im_re[i];
    BigFloat mag = test::oracle_sqrt(yre * yre + yim * yim);
    BigFloat dre = exact(y.re[i]) - yre;
    BigFloat dim = exact(y.im[i]) - yim;
    double err = ((abs(dre) + abs(dim)) / mag).to_double();
    worst = std::max(worst, err);
  }
  CHECK(worst <= std::ldexp(1.0, -100));
  MESSAGE("qc324 stand-in worst element error: ", worst);
}

TEST_CASE("adjoint product on a hermitian matrix reproduces the forward product") {
  CooMatrix<std::complex<double>> coo;
  coo.nrows = coo.ncols = 4;
  coo.entries = {{0, 0, {2.0, 0.0}}, {1, 1, {3.0, 0.0}}, {2, 2, {1.0, 0.0}},
                 {3, 3, {5.0, 0.0}}, {1, 0, {1.0, -2.0}}, {0, 1, {1.0, 2.0}},
                 {3, 2, {4.0, 1.0}}, {2, 3, {4.0, -1.0}}};
  auto A = split_complex(coo);
  auto Add = convert_complex_csr<DoubleDouble>(A);

  ComplexVector<DoubleDouble> v;
  for (int j = 0; j < 4; ++j) {
    v.re.push_back(DoubleDouble(j + 1.0));
    v.im.push_back(DoubleDouble(0.5 * j - 1.0));
  }
  KernelMode mode{PrecisionTag::dd(), MatrixMode::Pure, false, 1, true};
  auto fwd = spmv_complex(Add, v, mode);
  auto adj = sptmv_complex(Add, v, mode, /*conjugate=*/true);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(to_double(fwd.re[i]) == to_double(adj.re[i]));
    CHECK(to_double(fwd.im[i]) == to_double(adj.im[i]));
  }
}

TEST_CASE("dimension mismatches are rejected") {
  auto A = example5x5();
  std::vector<double> bad(4, 1.0);
  KernelMode mode{PrecisionTag::f64(), MatrixMode::Pure, false, 1, true};
  CHECK_THROWS_AS((void)spmv(A, bad, mode), std::invalid_argument);
  CHECK_THROWS_AS((void)sptmv(A, bad, mode), std::invalid_argument);

  ComplexVector<double> cv;
  cv.re = {1.0, 2.0};
  cv.im = {1.0};
  ComplexSparseMatrix<double> CA;
  CA.re = A;
  CA.im = A;
  CHECK_THROWS_AS((void)spmv_complex(CA, cv, mode), std::invalid_argument);
}
