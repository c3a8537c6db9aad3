#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mps/kernels.hpp"
#include "mps/krylov.hpp"

// Benchmark harness: deterministic test vectors, kernel timing with
// checksummed outputs, speedup bookkeeping bucketed by matrix size, and a
// config-driven suite runner that writes JSON-lines records plus CSV
// summaries.

namespace mps {

enum class KernelKind { Spmv, Sptmv, SpmvComplex, SptmvComplex };

inline const char* to_string(KernelKind k) {
  switch (k) {
    case KernelKind::Spmv: return "spmv";
    case KernelKind::Sptmv: return "sptmv";
    case KernelKind::SpmvComplex: return "spmv_complex";
    case KernelKind::SptmvComplex: return "sptmv_complex";
  }
  return "?";
}

std::optional<KernelKind> parse_kernel(std::string_view s);
std::optional<MatrixMode> parse_matrix_mode(std::string_view s);

struct BenchRecord {
  static constexpr const char* kSchema = "mpsparse.bench.v1";
  std::string matrix_name;
  std::int64_t n = 0;
  std::int64_t nnz = 0;
  KernelKind kernel = KernelKind::Spmv;
  PrecisionTag precision;
  MatrixMode matrix_mode = MatrixMode::Pure;
  int threads = 1;
  bool lanes_enabled = true;
  int repetitions = 0;
  double median_seconds = 0.0;
  std::uint64_t checksum = 0;

  nlohmann::json to_json() const;
  static BenchRecord from_json(const nlohmann::json& j);
  // True when two records describe the same benchmark except for the
  // threads/lanes acceleration settings.
  bool same_subject(const BenchRecord& other) const;
};

struct SpeedupSummary {
  KernelKind kernel = KernelKind::Spmv;
  PrecisionTag precision;
  MatrixMode matrix_mode = MatrixMode::Pure;
  std::int64_t bucket_lo = 0;
  std::int64_t bucket_hi = 0;
  std::int64_t matrix_count = 0;
  // NaN when the bucket is empty.
  double pct_speedup_gt_1 = 0.0;
  double mean_speedup = 0.0;
};

bool operator==(const SpeedupSummary& a, const SpeedupSummary& b);

// The three size groups the summary tables use.
inline constexpr std::array<std::pair<std::int64_t, std::int64_t>, 3> kSizeBuckets{
    {{101, 1000}, {1001, 5000}, {5001, 10000}}};

// v_j = sqrt(2) * j, j = 1..n, evaluated in the target precision.
template <class E>
std::vector<E> make_vector(std::int64_t n, const E& proto) {
  using std::sqrt;
  if (n < 1) throw std::invalid_argument("make_vector: n must be at least 1");
  E root2 = sqrt(scalar_like(2.0, proto));
  std::vector<E> v;
  v.reserve(static_cast<std::size_t>(n));
  for (std::int64_t j = 1; j <= n; ++j)
    v.push_back(root2 * scalar_like(static_cast<double>(j), proto));
  return v;
}

// v_j = sqrt(2 + 3i) * j with the principal square root; for z = 2 + 3i,
// Re = sqrt((|z| + 2) / 2) and Im = sqrt((|z| - 2) / 2) with |z| = sqrt(13).
template <class E>
ComplexVector<E> make_complex_vector(std::int64_t n, const E& proto) {
  using std::sqrt;
  if (n < 1) throw std::invalid_argument("make_vector: n must be at least 1");
  E half = scalar_like(0.5, proto);
  E two = scalar_like(2.0, proto);
  E root13 = sqrt(scalar_like(13.0, proto));
  E re = sqrt((root13 + two) * half);
  E im = sqrt((root13 - two) * half);
  ComplexVector<E> v;
  v.re.reserve(static_cast<std::size_t>(n));
  v.im.reserve(static_cast<std::size_t>(n));
  for (std::int64_t j = 1; j <= n; ++j) {
    E jj = scalar_like(static_cast<double>(j), proto);
    v.re.push_back(re * jj);
    v.im.push_back(im * jj);
  }
  return v;
}

// FNV-1a over the component bit patterns, in element order.
inline std::uint64_t fnv1a_bytes(std::uint64_t h, const void* data, std::size_t size) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;

inline std::uint64_t checksum_accumulate(std::uint64_t h, double x) {
  std::uint64_t bits;
  std::memcpy(&bits, &x, sizeof(bits));
  return fnv1a_bytes(h, &bits, sizeof(bits));
}

inline std::uint64_t checksum(const std::vector<double>& v) {
  std::uint64_t h = kFnvOffset;
  for (double x : v) h = checksum_accumulate(h, x);
  return h;
}

template <int K>
std::uint64_t checksum(const std::vector<MultiComponent<K>>& v) {
  std::uint64_t h = kFnvOffset;
  for (const auto& x : v)
    for (int j = 0; j < K; ++j) h = checksum_accumulate(h, x.c[j]);
  return h;
}

std::uint64_t checksum(const std::vector<BigFloat>& v);

template <class E>
std::uint64_t checksum(const ComplexVector<E>& v) {
  return checksum(v.re) * 1099511628211ull ^ checksum(v.im);
}

// Invokes fn with a zero prototype of the tagged precision.
template <class Fn>
decltype(auto) with_precision(const PrecisionTag& tag, Fn&& fn) {
  switch (tag.kind) {
    case PrecisionTag::Kind::F64: return fn(0.0);
    case PrecisionTag::Kind::DD: return fn(DoubleDouble{});
    case PrecisionTag::Kind::TD: return fn(TripleDouble{});
    case PrecisionTag::Kind::QD: return fn(QuadDouble{});
    case PrecisionTag::Kind::Mpfr: return fn(BigFloat(tag.mantissa_bits));
  }
  throw std::invalid_argument("unknown precision tag");
}

struct KernelRequest {
  KernelKind kernel = KernelKind::Spmv;
  PrecisionTag precision;
  MatrixMode matrix_mode = MatrixMode::Pure;
  int threads = 1;
  bool lanes_enabled = true;
  int repetitions = 5;
};

// One warm-up run, then `repetitions` timed runs of the requested kernel on
// v from make_vector; the record keeps the median and the output checksum.
// Matrix conversion to the target precision happens before timing.
BenchRecord time_kernel(const CsrMatrix<double>& A, const std::string& matrix_name,
                        const KernelRequest& request);
BenchRecord time_kernel(const ComplexSparseMatrix<double>& A, const std::string& matrix_name,
                        const KernelRequest& request);

// baseline_time / accelerated_time; > 1 means the accelerated run is faster.
double speedup_ratio(const BenchRecord& baseline, const BenchRecord& accelerated);

// Pairs each matrix's baseline record (threads=1, lanes off) with its
// fastest-config accelerated record (max threads, lanes on) and aggregates
// per kernel x precision x mode x size bucket. Every bucket of a group that
// appears in the records is emitted, including empty ones.
std::vector<SpeedupSummary> summarize(const std::vector<BenchRecord>& records);

void write_records_jsonl(std::ostream& out, const std::vector<BenchRecord>& records);
std::vector<BenchRecord> read_records_jsonl(std::istream& in);
void write_summary_csv(std::ostream& out, const std::vector<SpeedupSummary>& summaries);
std::vector<SpeedupSummary> read_summary_csv(std::istream& in);

struct SolveArtifacts {
  nlohmann::json record;    // mpsparse.solve.v1
  std::string history_csv;  // iter,residual rows
  std::string history_name; // suggested file name for the history
};

// Solves A x = b with b = A * make_vector(n) at the configured precision.
// Pure mode converts the matrix to the working precision first; mixed mode
// keeps the binary64 matrix and uses mixed-precision products.
SolveArtifacts run_matrix_solve(const CsrMatrix<double>& A, const std::string& matrix_name,
                                const SolverConfig& config);

struct SuiteMatrixEntry {
  std::string name;
  std::filesystem::path path;  // empty: fetch by name
};

struct SuiteConfig {
  std::vector<SuiteMatrixEntry> matrices;
  std::vector<KernelKind> kernels;
  std::vector<PrecisionTag> precisions;
  std::vector<MatrixMode> modes;
  int baseline_threads = 1;
  int accelerated_threads = 0;  // 0: hardware concurrency
  int repetitions = 5;
  std::vector<KrylovMethod> solver_methods;
  std::vector<PrecisionTag> solver_precisions;
  double solver_rel_tol = 1e-13;
  double solver_abs_tol = 1e-99;
  std::int64_t solver_max_iters = 20000;

  // Strict: unknown keys, unknown kernel/precision/mode/method names, or
  // out-of-range counts fail here, before anything runs.
  static SuiteConfig from_json(const nlohmann::json& j);
  static SuiteConfig load(const std::filesystem::path& path);
};

struct SuiteOutcome {
  int matrices_attempted = 0;
  int matrices_failed = 0;
  std::vector<std::string> failures;
  std::filesystem::path records_path;
  std::filesystem::path summary_path;
  std::filesystem::path solves_path;
  bool all_failed() const { return matrices_attempted > 0 && matrices_failed == matrices_attempted; }
};

struct FetchOptions;

// Runs every configured benchmark and solver over every matrix, writing
// records.jsonl, summary.csv, solves.jsonl, and per-solve residual history
// CSVs under out_dir. Per-matrix failures are logged to `log` and skipped.
SuiteOutcome run_suite(const SuiteConfig& config, const std::filesystem::path& out_dir,
                       const FetchOptions* fetch_options = nullptr,
                       std::ostream* log = nullptr);

}  // namespace mps
