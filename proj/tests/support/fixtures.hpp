#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "mps/sparse.hpp"
#include "support/oracle.hpp"

// Deterministic stand-ins for the collection matrices the experiment
// configs name. Sizes, nonzero counts, and symmetry match the published
// figures (tub1000: 1000/3996 nonsymmetric; nd3k: 9000/3279690 symmetric
// positive definite, condition ~1e7; qc324: 324/26730 complex); the entry
// values are synthetic. All values are small dyadic rationals or binary64
// sums of them, so precision conversions are exact.

namespace mps::test {

// Nonsymmetric banded matrix, diagonals {-1, 0, +1, +2}.
// nnz = 1000 + 999 + 999 + 998 = 3996.
inline CooMatrix<double> tub1000_standin() {
  constexpr std::int64_t n = 1000;
  CooMatrix<double> coo;
  coo.nrows = coo.ncols = n;
  coo.entries.reserve(3996);
  for (std::int64_t i = 0; i < n; ++i) {
    if (i >= 1) coo.entries.push_back({i, i - 1, -(1.0 + 0.125 * static_cast<double>((3 * i) % 7))});
    coo.entries.push_back({i, i, 6.0 + 0.25 * static_cast<double>((7 * i) % 13)});
    if (i + 1 < n) coo.entries.push_back({i, i + 1, 1.0 + 0.125 * static_cast<double>((5 * i) % 11)});
    if (i + 2 < n) coo.entries.push_back({i, i + 2, 0.5 + 0.125 * static_cast<double>((2 * i) % 5)});
  }
  return coo;
}

// Symmetric positive definite: full band of half-width 182 with
// a_ij = -1/(1+|i-j|), plus 13998 extra symmetric pairs at offsets
// 183/184, diagonal = row |off-diagonal| sum + slack. A handful of rows
// get a tiny slack, which pins the smallest eigenvalues near 1e-6 and the
// condition number near 1e7 while keeping conjugate-gradient iteration
// counts desk-friendly.
// off-diagonal pairs: sum_{d=1..182} (9000-d) = 1621347, extras 8600+5398;
// nnz = 9000 + 2*(1621347 + 13998) = 3279690.
inline CsrMatrix<double> nd3k_standin() {
  constexpr std::int64_t n = 9000;
  constexpr std::int64_t w = 182;
  constexpr std::int64_t extra1 = 8600;  // offset w+1
  constexpr std::int64_t extra2 = 5398;  // offset w+2

  auto band_value = [](std::int64_t dist) { return -1.0 / (1.0 + static_cast<double>(dist)); };
  auto slack = [](std::int64_t i) {
    if (i >= 137 && (i - 137) % 524 == 0 && (i - 137) / 524 < 17)
      return 1e-6 * static_cast<double>((i - 137) / 524 + 1);
    return 8.0;
  };

  // Partial sums of |band_value|: H[d] = sum_{k=1..d} 1/(1+k).
  std::vector<double> band_sum(static_cast<std::size_t>(w) + 1, 0.0);
  for (std::int64_t d = 1; d <= w; ++d)
    band_sum[static_cast<std::size_t>(d)] =
        band_sum[static_cast<std::size_t>(d - 1)] + 1.0 / (1.0 + static_cast<double>(d));

  CsrMatrix<double> m;
  m.nrows = m.ncols = n;
  m.indptr.assign(static_cast<std::size_t>(n) + 1, 0);
  m.indices.reserve(3279690);
  std::vector<double> vals;
  vals.reserve(3279690);

  for (std::int64_t i = 0; i < n; ++i) {
    std::int64_t lo = std::max<std::int64_t>(0, i - w);
    std::int64_t hi = std::min<std::int64_t>(n - 1, i + w);

    double offsum = band_sum[static_cast<std::size_t>(i - lo)] +
                    band_sum[static_cast<std::size_t>(hi - i)];
    // extras touching row i, as (i, i+183/184) or mirrored
    bool up1 = i < extra1, up2 = i < extra2;
    bool dn1 = i >= w + 1 && i - (w + 1) < extra1;
    bool dn2 = i >= w + 2 && i - (w + 2) < extra2;
    if (up1) offsum += -band_value(w + 1);
    if (up2) offsum += -band_value(w + 2);
    if (dn1) offsum += -band_value(w + 1);
    if (dn2) offsum += -band_value(w + 2);

    if (dn2) {
      m.indices.push_back(i - (w + 2));
      vals.push_back(band_value(w + 2));
    }
    if (dn1) {
      m.indices.push_back(i - (w + 1));
      vals.push_back(band_value(w + 1));
    }
    for (std::int64_t j = lo; j < i; ++j) {
      m.indices.push_back(j);
      vals.push_back(band_value(i - j));
    }
    m.indices.push_back(i);
    vals.push_back(offsum + slack(i));
    for (std::int64_t j = i + 1; j <= hi; ++j) {
      m.indices.push_back(j);
      vals.push_back(band_value(j - i));
    }
    if (up1) {
      m.indices.push_back(i + w + 1);
      vals.push_back(band_value(w + 1));
    }
    if (up2) {
      m.indices.push_back(i + w + 2);
      vals.push_back(band_value(w + 2));
    }
    m.indptr[static_cast<std::size_t>(i) + 1] = static_cast<std::int64_t>(m.indices.size());
  }
  m.values.resize(vals.size());
  for (std::size_t k = 0; k < vals.size(); ++k) m.values.set(k, vals[k]);
  return m;
}

// Complex, structurally symmetric: diagonal + full band of half-width 41
// (13284 - 861 = 12423 pairs) + 780 extra pairs at offsets 42/43/44;
// nnz = 324 + 2*(12423 + 780) = 26730. Imaginary parts run an order of
// magnitude smaller than real parts. Off-diagonal real parts are biased
// positive so long row sums never cancel to near zero; with ~82 entries per
// row, element-relative double-double error bounds need that headroom.
inline CooMatrix<std::complex<double>> qc324_standin() {
  constexpr std::int64_t n = 324;
  constexpr std::int64_t w = 41;
  auto off_value = [](std::int64_t i, std::int64_t j) {
    double re = 0.25 * static_cast<double>((i + j) % 9 - 4) + 0.75;
    double im = 0.03125 * static_cast<double>((i * j) % 7 - 3);
    if (re == 0.0 && im == 0.0) re = 0.25;
    return std::complex<double>(re, im);
  };

  CooMatrix<std::complex<double>> coo;
  coo.nrows = coo.ncols = n;
  coo.entries.reserve(26730);
  auto push_pair = [&](std::int64_t i, std::int64_t j) {
    auto v = off_value(i, j);
    coo.entries.push_back({i, j, v});
    coo.entries.push_back({j, i, v});
  };
  for (std::int64_t i = 0; i < n; ++i) {
    coo.entries.push_back(
        {i, i,
         {2.0 + 0.125 * static_cast<double>(i % 5), 0.0625 * static_cast<double>(i % 3 - 1)}});
    for (std::int64_t d = 1; d <= w && i + d < n; ++d) push_pair(i, i + d);
  }
  for (std::int64_t p = 0; p < 780; ++p) {
    std::int64_t i, off;
    if (p < 282) {
      i = p;
      off = w + 1;
    } else if (p < 563) {
      i = p - 282;
      off = w + 2;
    } else {
      i = p - 563;
      off = w + 3;
    }
    push_pair(i, i + off);
  }
  return coo;
}

// Random sparse COO for round-trip tests: unique positions, values with
// full 53-bit significands.
inline CooMatrix<double> random_coo(Rng& rng, std::int64_t nrows, std::int64_t ncols,
                                    int target_nnz) {
  CooMatrix<double> coo;
  coo.nrows = nrows;
  coo.ncols = ncols;
  std::vector<char> used(static_cast<std::size_t>(nrows * ncols), 0);
  target_nnz = static_cast<int>(std::min<std::int64_t>(target_nnz, nrows * ncols));
  int placed = 0;
  while (placed < target_nnz) {
    std::int64_t r = rng.uniform_int(0, static_cast<int>(nrows) - 1);
    std::int64_t c = rng.uniform_int(0, static_cast<int>(ncols) - 1);
    auto idx = static_cast<std::size_t>(r * ncols + c);
    if (used[idx]) continue;
    used[idx] = 1;
    coo.entries.push_back({r, c, rng.normalized(-6, 6)});
    ++placed;
  }
  return coo;
}

inline CooMatrix<std::complex<double>> random_complex_coo(Rng& rng, std::int64_t nrows,
                                                          std::int64_t ncols, int target_nnz) {
  CooMatrix<std::complex<double>> coo;
  coo.nrows = nrows;
  coo.ncols = ncols;
  std::vector<char> used(static_cast<std::size_t>(nrows * ncols), 0);
  target_nnz = static_cast<int>(std::min<std::int64_t>(target_nnz, nrows * ncols));
  int placed = 0;
  while (placed < target_nnz) {
    std::int64_t r = rng.uniform_int(0, static_cast<int>(nrows) - 1);
    std::int64_t c = rng.uniform_int(0, static_cast<int>(ncols) - 1);
    auto idx = static_cast<std::size_t>(r * ncols + c);
    if (used[idx]) continue;
    used[idx] = 1;
    coo.entries.push_back({r, c, {rng.normalized(-6, 6), rng.normalized(-6, 6)}});
    ++placed;
  }
  return coo;
}

// Random diagonally dominant square matrix (dense-ish sparsity) for solver
// oracle tests; dominance keeps every Krylov method convergent.
inline CooMatrix<double> random_diag_dominant(Rng& rng, std::int64_t n, double density,
                                              bool symmetric) {
  CooMatrix<double> coo;
  coo.nrows = coo.ncols = n;
  std::vector<double> rowsum(static_cast<std::size_t>(n), 0.0);
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = symmetric ? i + 1 : 0; j < n; ++j) {
      if (j == i || rng.uniform(0.0, 1.0) >= density) continue;
      double v = rng.normalized(-3, 0);
      coo.entries.push_back({i, j, v});
      rowsum[static_cast<std::size_t>(i)] += std::fabs(v);
      if (symmetric) {
        coo.entries.push_back({j, i, v});
        rowsum[static_cast<std::size_t>(j)] += std::fabs(v);
      }
    }
  }
  for (std::int64_t i = 0; i < n; ++i)
    coo.entries.push_back(
        {i, i, rowsum[static_cast<std::size_t>(i)] + 1.0 + rng.uniform(0.0, 2.0)});
  return coo;
}

// Oracle copy of a CSR matrix for dense reference computations.
inline DenseOracle dense_from_csr(const CsrMatrix<double>& m) {
  DenseOracle d = DenseOracle::zeros(static_cast<int>(m.nrows));
  for (std::int64_t i = 0; i < m.nrows; ++i)
    for (std::int64_t k = m.indptr[static_cast<std::size_t>(i)];
         k < m.indptr[static_cast<std::size_t>(i) + 1]; ++k)
      d.at(static_cast<int>(i), static_cast<int>(m.indices[static_cast<std::size_t>(k)])) =
          BigFloat(m.values.get(static_cast<std::size_t>(k)), kOracleBits);
  return d;
}

}  // namespace mps::test
