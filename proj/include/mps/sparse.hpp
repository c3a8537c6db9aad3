#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "mps/bigfloat.hpp"
#include "mps/multicomp.hpp"
#include "mps/precision.hpp"

namespace mps {

template <class E>
struct CooEntry {
  std::int64_t row = 0;
  std::int64_t col = 0;
  E value{};
};

template <class E>
struct CooMatrix {
  std::int64_t nrows = 0;
  std::int64_t ncols = 0;
  std::vector<CooEntry<E>> entries;
};

// Value storage behind CSR. Multi-component elements are kept
// component-major: K parallel double arrays sharing the index structure,
// so kernels stream each component contiguously.
template <class E>
class CsrValues {
 public:
  std::size_t size() const { return v_.size(); }
  void resize(std::size_t n) { v_.resize(n); }
  void resize(std::size_t n, const E& proto) { v_.resize(n, zero_like(proto)); }
  E get(std::size_t i) const { return v_[i]; }
  void set(std::size_t i, const E& x) { v_[i] = x; }
  const E* data() const { return v_.data(); }

 private:
  std::vector<E> v_;
};

template <int K>
class CsrValues<MultiComponent<K>> {
 public:
  std::size_t size() const { return comp_[0].size(); }
  void resize(std::size_t n) {
    for (auto& c : comp_) c.resize(n, 0.0);
  }
  void resize(std::size_t n, const MultiComponent<K>&) { resize(n); }
  MultiComponent<K> get(std::size_t i) const {
    MultiComponent<K> r;
    for (int j = 0; j < K; ++j) r.c[j] = comp_[j][i];
    return r;
  }
  void set(std::size_t i, const MultiComponent<K>& x) {
    for (int j = 0; j < K; ++j) comp_[j][i] = x.c[j];
  }
  const double* component(int j) const { return comp_[j].data(); }

 private:
  std::array<std::vector<double>, K> comp_;
};

template <class E>
struct CsrMatrix {
  std::int64_t nrows = 0;
  std::int64_t ncols = 0;
  std::vector<std::int64_t> indptr;   // nrows + 1 offsets
  std::vector<std::int64_t> indices;  // ascending within each row
  CsrValues<E> values;

  std::int64_t nnz() const { return static_cast<std::int64_t>(indices.size()); }
};

// CSR assembly: entries sorted row-major with columns ascending,
// duplicates summed in input order.
template <class E>
CsrMatrix<E> coo_to_csr(const CooMatrix<E>& coo) {
  for (const auto& e : coo.entries) {
    if (e.row < 0 || e.row >= coo.nrows || e.col < 0 || e.col >= coo.ncols)
      throw std::invalid_argument("coo_to_csr: entry out of bounds");
  }
  std::vector<std::size_t> order(coo.entries.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ea = coo.entries[a];
    const auto& eb = coo.entries[b];
    if (ea.row != eb.row) return ea.row < eb.row;
    return ea.col < eb.col;
  });

  CsrMatrix<E> m;
  m.nrows = coo.nrows;
  m.ncols = coo.ncols;
  m.indptr.assign(static_cast<std::size_t>(coo.nrows) + 1, 0);
  m.indices.reserve(coo.entries.size());

  std::vector<E> merged;
  merged.reserve(coo.entries.size());
  std::int64_t prev_row = -1, prev_col = -1;
  for (std::size_t oi : order) {
    const auto& e = coo.entries[oi];
    if (e.row == prev_row && e.col == prev_col) {
      merged.back() = merged.back() + e.value;
      continue;
    }
    merged.push_back(e.value);
    m.indices.push_back(e.col);
    m.indptr[static_cast<std::size_t>(e.row) + 1]++;
    prev_row = e.row;
    prev_col = e.col;
  }
  for (std::size_t i = 1; i < m.indptr.size(); ++i) m.indptr[i] += m.indptr[i - 1];
  m.values.resize(merged.size());
  for (std::size_t i = 0; i < merged.size(); ++i) m.values.set(i, merged[i]);
  return m;
}

template <class E>
CooMatrix<E> csr_to_coo(const CsrMatrix<E>& m) {
  CooMatrix<E> coo;
  coo.nrows = m.nrows;
  coo.ncols = m.ncols;
  coo.entries.reserve(m.indices.size());
  for (std::int64_t i = 0; i < m.nrows; ++i) {
    for (std::int64_t k = m.indptr[i]; k < m.indptr[i + 1]; ++k) {
      coo.entries.push_back({i, m.indices[static_cast<std::size_t>(k)],
                             m.values.get(static_cast<std::size_t>(k))});
    }
  }
  return coo;
}

// Counting transpose; keeps values, swaps the structure. Output columns
// come out ascending because input rows are scanned in order.
template <class E>
CsrMatrix<E> transpose_csr(const CsrMatrix<E>& m) {
  CsrMatrix<E> t;
  t.nrows = m.ncols;
  t.ncols = m.nrows;
  t.indptr.assign(static_cast<std::size_t>(m.ncols) + 1, 0);
  t.indices.resize(m.indices.size());
  t.values.resize(m.indices.size());

  for (std::int64_t j : m.indices) t.indptr[static_cast<std::size_t>(j) + 1]++;
  for (std::size_t i = 1; i < t.indptr.size(); ++i) t.indptr[i] += t.indptr[i - 1];

  std::vector<std::int64_t> next(t.indptr.begin(), t.indptr.end() - 1);
  for (std::int64_t i = 0; i < m.nrows; ++i) {
    for (std::int64_t k = m.indptr[i]; k < m.indptr[i + 1]; ++k) {
      std::int64_t j = m.indices[static_cast<std::size_t>(k)];
      std::int64_t pos = next[static_cast<std::size_t>(j)]++;
      t.indices[static_cast<std::size_t>(pos)] = i;
      t.values.set(static_cast<std::size_t>(pos), m.values.get(static_cast<std::size_t>(k)));
    }
  }
  return t;
}

struct StructureStats {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::int64_t nnz = 0;
  std::int64_t bandwidth = 0;
  std::int64_t row_nnz_min = 0;
  std::int64_t row_nnz_max = 0;
  double row_nnz_mean = 0.0;
};

template <class E>
StructureStats structure_stats(const CsrMatrix<E>& m) {
  StructureStats s;
  s.rows = m.nrows;
  s.cols = m.ncols;
  s.nnz = m.nnz();
  s.row_nnz_min = m.nrows > 0 ? m.nnz() : 0;
  for (std::int64_t i = 0; i < m.nrows; ++i) {
    std::int64_t cnt = m.indptr[i + 1] - m.indptr[i];
    s.row_nnz_min = std::min(s.row_nnz_min, cnt);
    s.row_nnz_max = std::max(s.row_nnz_max, cnt);
    for (std::int64_t k = m.indptr[i]; k < m.indptr[i + 1]; ++k) {
      std::int64_t w = m.indices[static_cast<std::size_t>(k)] - i;
      s.bandwidth = std::max(s.bandwidth, w < 0 ? -w : w);
    }
  }
  s.row_nnz_mean = m.nrows > 0 ? static_cast<double>(m.nnz()) / static_cast<double>(m.nrows) : 0.0;
  return s;
}

// Precision conversion of the value array; structure is shared verbatim.
template <class To, class From>
CsrMatrix<To> convert_csr(const CsrMatrix<From>& m) {
  CsrMatrix<To> r;
  r.nrows = m.nrows;
  r.ncols = m.ncols;
  r.indptr = m.indptr;
  r.indices = m.indices;
  r.values.resize(m.indices.size());
  for (std::size_t i = 0; i < m.indices.size(); ++i)
    r.values.set(i, convert<To>(m.values.get(i)));
  return r;
}

inline CsrMatrix<BigFloat> convert_csr_bigfloat(const CsrMatrix<double>& m, unsigned bits) {
  CsrMatrix<BigFloat> r;
  r.nrows = m.nrows;
  r.ncols = m.ncols;
  r.indptr = m.indptr;
  r.indices = m.indices;
  r.values.resize(m.indices.size(), BigFloat(bits));
  for (std::size_t i = 0; i < m.indices.size(); ++i)
    r.values.set(i, BigFloat(m.values.get(i), bits));
  return r;
}

// Complex values as a pair of identically structured real matrices.
template <class E>
struct ComplexSparseMatrix {
  CsrMatrix<E> re;
  CsrMatrix<E> im;

  std::int64_t nrows() const { return re.nrows; }
  std::int64_t ncols() const { return re.ncols; }
  std::int64_t nnz() const { return re.nnz(); }
};

template <class E>
struct ComplexVector {
  std::vector<E> re;
  std::vector<E> im;

  std::size_t size() const { return re.size(); }
};

inline ComplexSparseMatrix<double> split_complex(const CooMatrix<std::complex<double>>& coo) {
  CooMatrix<double> re, im;
  re.nrows = im.nrows = coo.nrows;
  re.ncols = im.ncols = coo.ncols;
  re.entries.reserve(coo.entries.size());
  im.entries.reserve(coo.entries.size());
  for (const auto& e : coo.entries) {
    re.entries.push_back({e.row, e.col, e.value.real()});
    im.entries.push_back({e.row, e.col, e.value.imag()});
  }
  ComplexSparseMatrix<double> m{coo_to_csr(re), coo_to_csr(im)};
  return m;
}

template <class E>
void check_split_structure(const ComplexSparseMatrix<E>& m) {
  if (m.re.nrows != m.im.nrows || m.re.ncols != m.im.ncols || m.re.indptr != m.im.indptr ||
      m.re.indices != m.im.indices)
    throw std::invalid_argument("complex matrix: real/imaginary structure mismatch");
}

template <class To, class From>
ComplexSparseMatrix<To> convert_complex_csr(const ComplexSparseMatrix<From>& m) {
  return {convert_csr<To>(m.re), convert_csr<To>(m.im)};
}

}  // namespace mps
