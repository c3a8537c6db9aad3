#include "mps/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>
#include <variant>

#include "mps/fetch.hpp"
#include "mps/mtxio.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace mps {

namespace {

using Clock = std::chrono::steady_clock;

double median_of(std::vector<double> t) {
  std::sort(t.begin(), t.end());
  std::size_t m = t.size() / 2;
  if (t.size() % 2 == 1) return t[m];
  return 0.5 * (t[m - 1] + t[m]);
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, v);
  return buf;
}

// Orders precisions for reports: by significand size, mpfr after the
// multi-component format of equal width.
std::tuple<unsigned, int> precision_rank(const PrecisionTag& p) {
  return {p.mantissa_bits, static_cast<int>(p.kind)};
}

template <class MatE, class F>
std::pair<double, std::uint64_t> time_real_loop(const CsrMatrix<MatE>& A, const std::vector<F>& v,
                                                const KernelMode& mode, bool transposed,
                                                int reps) {
  auto run = [&] { return transposed ? sptmv(A, v, mode) : spmv(A, v, mode); };
  auto y = run();  // warm-up
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(reps));
  for (int i = 0; i < reps; ++i) {
    auto t0 = Clock::now();
    y = run();
    times.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
  }
  return {median_of(std::move(times)), checksum(y)};
}

template <class MatE, class F>
std::pair<double, std::uint64_t> time_complex_loop(const ComplexSparseMatrix<MatE>& A,
                                                   const ComplexVector<F>& v,
                                                   const KernelMode& mode, bool transposed,
                                                   int reps) {
  auto run = [&] { return transposed ? sptmv_complex(A, v, mode) : spmv_complex(A, v, mode); };
  auto y = run();
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(reps));
  for (int i = 0; i < reps; ++i) {
    auto t0 = Clock::now();
    y = run();
    times.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
  }
  return {median_of(std::move(times)), checksum(y)};
}

BenchRecord record_shell(const std::string& name, std::int64_t n, std::int64_t nnz,
                         const KernelRequest& req) {
  if (req.repetitions < 1)
    throw std::invalid_argument("time_kernel: repetitions must be at least 1");
  if (req.threads < 1) throw std::invalid_argument("time_kernel: threads must be at least 1");
  BenchRecord rec;
  rec.matrix_name = name;
  rec.n = n;
  rec.nnz = nnz;
  rec.kernel = req.kernel;
  rec.precision = req.precision;
  rec.matrix_mode = req.matrix_mode;
  rec.threads = req.threads;
  rec.lanes_enabled = req.lanes_enabled;
  rec.repetitions = req.repetitions;
  return rec;
}

KernelMode kernel_mode(const KernelRequest& req, bool transposed) {
  return KernelMode{req.precision, req.matrix_mode, transposed, req.threads, req.lanes_enabled};
}

}  // namespace

std::optional<KernelKind> parse_kernel(std::string_view s) {
  if (s == "spmv") return KernelKind::Spmv;
  if (s == "sptmv") return KernelKind::Sptmv;
  if (s == "spmv_complex") return KernelKind::SpmvComplex;
  if (s == "sptmv_complex") return KernelKind::SptmvComplex;
  return std::nullopt;
}

std::optional<MatrixMode> parse_matrix_mode(std::string_view s) {
  if (s == "p" || s == "pure") return MatrixMode::Pure;
  if (s == "m" || s == "mixed") return MatrixMode::MixedBinary64;
  return std::nullopt;
}

std::uint64_t checksum(const std::vector<BigFloat>& v) {
  std::uint64_t h = kFnvOffset;
  for (const auto& x : v) {
    mpfr_exp_t exp = 0;
    char* digits = mpfr_get_str(nullptr, &exp, 16, 0, x.raw(), MPFR_RNDN);
    if (digits) {
      h = fnv1a_bytes(h, digits, std::strlen(digits));
      mpfr_free_str(digits);
    }
    h = fnv1a_bytes(h, &exp, sizeof(exp));
  }
  return h;
}

json BenchRecord::to_json() const {
  return json{{"schema", kSchema},
              {"matrix", matrix_name},
              {"n", n},
              {"nnz", nnz},
              {"kernel", to_string(kernel)},
              {"precision", precision.name()},
              {"mode", to_string(matrix_mode)},
              {"threads", threads},
              {"lanes", lanes_enabled},
              {"repetitions", repetitions},
              {"median_seconds", median_seconds},
              {"checksum", hex64(checksum)}};
}

BenchRecord BenchRecord::from_json(const json& j) {
  if (j.at("schema").get<std::string>() != kSchema)
    throw std::invalid_argument("bench record: unexpected schema " +
                                j.at("schema").get<std::string>());
  BenchRecord rec;
  rec.matrix_name = j.at("matrix").get<std::string>();
  rec.n = j.at("n").get<std::int64_t>();
  rec.nnz = j.at("nnz").get<std::int64_t>();
  auto kernel = parse_kernel(j.at("kernel").get<std::string>());
  auto precision = PrecisionTag::parse(j.at("precision").get<std::string>());
  auto mode = parse_matrix_mode(j.at("mode").get<std::string>());
  if (!kernel || !precision || !mode)
    throw std::invalid_argument("bench record: unknown kernel/precision/mode name");
  rec.kernel = *kernel;
  rec.precision = *precision;
  rec.matrix_mode = *mode;
  rec.threads = j.at("threads").get<int>();
  rec.lanes_enabled = j.at("lanes").get<bool>();
  rec.repetitions = j.at("repetitions").get<int>();
  rec.median_seconds = j.at("median_seconds").get<double>();
  rec.checksum = std::stoull(j.at("checksum").get<std::string>(), nullptr, 16);
  return rec;
}

bool BenchRecord::same_subject(const BenchRecord& other) const {
  return matrix_name == other.matrix_name && n == other.n && nnz == other.nnz &&
         kernel == other.kernel && precision == other.precision &&
         matrix_mode == other.matrix_mode;
}

bool operator==(const SpeedupSummary& a, const SpeedupSummary& b) {
  auto same = [](double x, double y) { return (std::isnan(x) && std::isnan(y)) || x == y; };
  return a.kernel == b.kernel && a.precision == b.precision && a.matrix_mode == b.matrix_mode &&
         a.bucket_lo == b.bucket_lo && a.bucket_hi == b.bucket_hi &&
         a.matrix_count == b.matrix_count && same(a.pct_speedup_gt_1, b.pct_speedup_gt_1) &&
         same(a.mean_speedup, b.mean_speedup);
}

BenchRecord time_kernel(const CsrMatrix<double>& A, const std::string& matrix_name,
                        const KernelRequest& req) {
  if (req.kernel != KernelKind::Spmv && req.kernel != KernelKind::Sptmv)
    throw std::invalid_argument("time_kernel: real matrix requires the spmv or sptmv kernel");
  BenchRecord rec = record_shell(matrix_name, A.nrows, A.nnz(), req);
  bool transposed = req.kernel == KernelKind::Sptmv;
  KernelMode mode = kernel_mode(req, transposed);
  auto timed = with_precision(req.precision, [&](auto proto) {
    using F = decltype(proto);
    auto v = make_vector<F>(A.ncols, proto);
    if constexpr (std::is_same_v<F, double>) {
      return time_real_loop(A, v, mode, transposed, req.repetitions);
    } else if constexpr (std::is_same_v<F, BigFloat>) {
      if (req.matrix_mode == MatrixMode::Pure) {
        auto Ap = convert_csr_bigfloat(A, req.precision.mantissa_bits);
        return time_real_loop(Ap, v, mode, transposed, req.repetitions);
      }
      return time_real_loop(A, v, mode, transposed, req.repetitions);
    } else {
      if (req.matrix_mode == MatrixMode::Pure) {
        auto Ap = convert_csr<F>(A);
        return time_real_loop(Ap, v, mode, transposed, req.repetitions);
      }
      return time_real_loop(A, v, mode, transposed, req.repetitions);
    }
  });
  rec.median_seconds = timed.first;
  rec.checksum = timed.second;
  return rec;
}

BenchRecord time_kernel(const ComplexSparseMatrix<double>& A, const std::string& matrix_name,
                        const KernelRequest& req) {
  if (req.kernel != KernelKind::SpmvComplex && req.kernel != KernelKind::SptmvComplex)
    throw std::invalid_argument("time_kernel: complex matrix requires a complex kernel");
  BenchRecord rec = record_shell(matrix_name, A.nrows(), A.nnz(), req);
  bool transposed = req.kernel == KernelKind::SptmvComplex;
  KernelMode mode = kernel_mode(req, transposed);
  auto timed = with_precision(req.precision, [&](auto proto) {
    using F = decltype(proto);
    auto v = make_complex_vector<F>(A.ncols(), proto);
    if constexpr (std::is_same_v<F, double>) {
      return time_complex_loop(A, v, mode, transposed, req.repetitions);
    } else if constexpr (std::is_same_v<F, BigFloat>) {
      if (req.matrix_mode == MatrixMode::Pure) {
        ComplexSparseMatrix<BigFloat> Ap{convert_csr_bigfloat(A.re, req.precision.mantissa_bits),
                                         convert_csr_bigfloat(A.im, req.precision.mantissa_bits)};
        return time_complex_loop(Ap, v, mode, transposed, req.repetitions);
      }
      return time_complex_loop(A, v, mode, transposed, req.repetitions);
    } else {
      if (req.matrix_mode == MatrixMode::Pure) {
        auto Ap = convert_complex_csr<F>(A);
        return time_complex_loop(Ap, v, mode, transposed, req.repetitions);
      }
      return time_complex_loop(A, v, mode, transposed, req.repetitions);
    }
  });
  rec.median_seconds = timed.first;
  rec.checksum = timed.second;
  return rec;
}

double speedup_ratio(const BenchRecord& baseline, const BenchRecord& accelerated) {
  if (!baseline.same_subject(accelerated))
    throw std::invalid_argument(
        "speedup_ratio: records describe different benchmarks (matrix/kernel/precision/mode "
        "must match)");
  if (!(baseline.median_seconds > 0.0) || !(accelerated.median_seconds > 0.0))
    throw std::invalid_argument("speedup_ratio: non-positive timing");
  return baseline.median_seconds / accelerated.median_seconds;
}

std::vector<SpeedupSummary> summarize(const std::vector<BenchRecord>& records) {
  // kernel, precision rank, mode
  using Combo = std::tuple<int, unsigned, int, int>;
  auto combo_of = [](const BenchRecord& r) {
    auto [bits, kind] = precision_rank(r.precision);
    return Combo{static_cast<int>(r.kernel), bits, kind, static_cast<int>(r.matrix_mode)};
  };
  using SubjectKey = std::pair<Combo, std::string>;
  struct Subject {
    const BenchRecord* baseline = nullptr;
    const BenchRecord* accelerated = nullptr;
  };
  std::map<SubjectKey, Subject> subjects;
  std::map<Combo, PrecisionTag> combos;
  for (const auto& r : records) {
    Combo c = combo_of(r);
    combos.emplace(c, r.precision);
    auto& s = subjects[{c, r.matrix_name}];
    if (r.threads == 1 && !r.lanes_enabled) {
      if (!s.baseline) s.baseline = &r;
    } else if (r.lanes_enabled) {
      if (!s.accelerated || r.threads > s.accelerated->threads) s.accelerated = &r;
    }
  }

  std::vector<SpeedupSummary> out;
  for (const auto& [combo, tag] : combos) {
    for (const auto& bucket : kSizeBuckets) {
      SpeedupSummary s;
      s.kernel = static_cast<KernelKind>(std::get<0>(combo));
      s.precision = tag;
      s.matrix_mode = static_cast<MatrixMode>(std::get<3>(combo));
      s.bucket_lo = bucket.first;
      s.bucket_hi = bucket.second;
      double sum = 0.0;
      std::int64_t count = 0, faster = 0;
      // subjects map is ordered by (combo, name): deterministic accumulation
      for (const auto& [key, subj] : subjects) {
        if (key.first != combo || !subj.baseline || !subj.accelerated) continue;
        std::int64_t n = subj.baseline->n;
        if (n < bucket.first || n > bucket.second) continue;
        double ratio = speedup_ratio(*subj.baseline, *subj.accelerated);
        sum += ratio;
        ++count;
        if (ratio > 1.0) ++faster;
      }
      s.matrix_count = count;
      if (count > 0) {
        s.pct_speedup_gt_1 = 100.0 * static_cast<double>(faster) / static_cast<double>(count);
        s.mean_speedup = sum / static_cast<double>(count);
      } else {
        s.pct_speedup_gt_1 = std::numeric_limits<double>::quiet_NaN();
        s.mean_speedup = std::numeric_limits<double>::quiet_NaN();
      }
      out.push_back(s);
    }
  }
  return out;
}

void write_records_jsonl(std::ostream& out, const std::vector<BenchRecord>& records) {
  for (const auto& r : records) out << r.to_json().dump() << '\n';
}

std::vector<BenchRecord> read_records_jsonl(std::istream& in) {
  std::vector<BenchRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    records.push_back(BenchRecord::from_json(json::parse(line)));
  }
  return records;
}

void write_summary_csv(std::ostream& out, const std::vector<SpeedupSummary>& summaries) {
  out << "# mpsparse.summary.v1\n";
  out << "kernel,precision,mode,bucket_lo,bucket_hi,matrix_count,pct_speedup_gt_1,mean_speedup\n";
  for (const auto& s : summaries) {
    out << to_string(s.kernel) << ',' << s.precision.name() << ',' << to_string(s.matrix_mode)
        << ',' << s.bucket_lo << ',' << s.bucket_hi << ',' << s.matrix_count << ',';
    if (s.matrix_count > 0)
      out << fmt17(s.pct_speedup_gt_1) << ',' << fmt17(s.mean_speedup) << '\n';
    else
      out << ",\n";
  }
}

std::vector<SpeedupSummary> read_summary_csv(std::istream& in) {
  std::vector<SpeedupSummary> out;
  std::string line;
  bool seen_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!seen_header) {
      if (line !=
          "kernel,precision,mode,bucket_lo,bucket_hi,matrix_count,pct_speedup_gt_1,mean_speedup")
        throw std::invalid_argument("summary csv: unexpected header: " + line);
      seen_header = true;
      continue;
    }
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 8) throw std::invalid_argument("summary csv: bad row: " + line);
    SpeedupSummary s;
    auto kernel = parse_kernel(fields[0]);
    auto precision = PrecisionTag::parse(fields[1]);
    auto mode = parse_matrix_mode(fields[2]);
    if (!kernel || !precision || !mode)
      throw std::invalid_argument("summary csv: unknown kernel/precision/mode: " + line);
    s.kernel = *kernel;
    s.precision = *precision;
    s.matrix_mode = *mode;
    s.bucket_lo = std::stoll(fields[3]);
    s.bucket_hi = std::stoll(fields[4]);
    s.matrix_count = std::stoll(fields[5]);
    s.pct_speedup_gt_1 =
        fields[6].empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(fields[6]);
    s.mean_speedup =
        fields[7].empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(fields[7]);
    out.push_back(s);
  }
  if (!seen_header) throw std::invalid_argument("summary csv: missing header");
  return out;
}

namespace {

void expect_keys(const json& j, std::initializer_list<const char*> allowed,
                 const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || it.key() == k;
    if (!ok)
      throw std::invalid_argument("suite config: unknown key \"" + it.key() + "\" in " + where);
  }
}

}  // namespace

SuiteConfig SuiteConfig::from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("suite config: top level must be an object");
  expect_keys(j,
              {"matrices", "kernels", "precisions", "modes", "baseline_threads",
               "accelerated_threads", "repetitions", "solver"},
              "the top-level object");
  SuiteConfig cfg;
  cfg.kernels = {KernelKind::Spmv, KernelKind::Sptmv};
  cfg.precisions = {PrecisionTag::mpfr(256), PrecisionTag::dd(), PrecisionTag::td(),
                    PrecisionTag::qd()};
  cfg.modes = {MatrixMode::Pure, MatrixMode::MixedBinary64};

  if (!j.contains("matrices") || !j.at("matrices").is_array())
    throw std::invalid_argument("suite config: \"matrices\" array is required");
  for (const auto& m : j.at("matrices")) {
    SuiteMatrixEntry entry;
    if (m.is_string()) {
      entry.name = m.get<std::string>();
    } else if (m.is_object()) {
      expect_keys(m, {"name", "path"}, "a matrices entry");
      if (m.contains("name")) entry.name = m.at("name").get<std::string>();
      if (m.contains("path")) entry.path = m.at("path").get<std::string>();
      if (entry.name.empty() && !entry.path.empty()) entry.name = entry.path.stem().string();
    } else {
      throw std::invalid_argument("suite config: matrices entries are names or objects");
    }
    if (entry.name.empty())
      throw std::invalid_argument("suite config: matrices entry without a name");
    cfg.matrices.push_back(std::move(entry));
  }
  if (cfg.matrices.empty())
    throw std::invalid_argument("suite config: \"matrices\" must list at least one matrix");

  if (j.contains("kernels")) {
    cfg.kernels.clear();
    for (const auto& k : j.at("kernels")) {
      auto kind = parse_kernel(k.get<std::string>());
      if (!kind)
        throw std::invalid_argument("suite config: unknown kernel \"" + k.get<std::string>() +
                                    "\"");
      cfg.kernels.push_back(*kind);
    }
  }
  if (j.contains("precisions")) {
    cfg.precisions.clear();
    for (const auto& p : j.at("precisions")) {
      auto tag = PrecisionTag::parse(p.get<std::string>());
      if (!tag)
        throw std::invalid_argument("suite config: unknown precision \"" + p.get<std::string>() +
                                    "\"");
      cfg.precisions.push_back(*tag);
    }
  }
  if (j.contains("modes")) {
    cfg.modes.clear();
    for (const auto& m : j.at("modes")) {
      auto mode = parse_matrix_mode(m.get<std::string>());
      if (!mode)
        throw std::invalid_argument("suite config: unknown mode \"" + m.get<std::string>() +
                                    "\" (expected \"p\" or \"m\")");
      cfg.modes.push_back(*mode);
    }
  }
  if (j.contains("baseline_threads")) cfg.baseline_threads = j.at("baseline_threads").get<int>();
  if (j.contains("accelerated_threads"))
    cfg.accelerated_threads = j.at("accelerated_threads").get<int>();
  if (j.contains("repetitions")) cfg.repetitions = j.at("repetitions").get<int>();
  if (cfg.baseline_threads < 1 || cfg.accelerated_threads < 0 || cfg.repetitions < 1)
    throw std::invalid_argument("suite config: thread and repetition counts must be positive");

  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    if (!s.is_object()) throw std::invalid_argument("suite config: \"solver\" must be an object");
    expect_keys(s, {"methods", "precisions", "rel_tol", "abs_tol", "max_iters"},
                "the solver object");
    if (s.contains("methods")) {
      for (const auto& m : s.at("methods")) {
        auto method = parse_method(m.get<std::string>());
        if (!method)
          throw std::invalid_argument("suite config: unknown solver method \"" +
                                      m.get<std::string>() + "\"");
        cfg.solver_methods.push_back(*method);
      }
    }
    if (s.contains("precisions")) {
      for (const auto& p : s.at("precisions")) {
        auto tag = PrecisionTag::parse(p.get<std::string>());
        if (!tag)
          throw std::invalid_argument("suite config: unknown solver precision \"" +
                                      p.get<std::string>() + "\"");
        cfg.solver_precisions.push_back(*tag);
      }
    }
    if (s.contains("rel_tol")) cfg.solver_rel_tol = s.at("rel_tol").get<double>();
    if (s.contains("abs_tol")) cfg.solver_abs_tol = s.at("abs_tol").get<double>();
    if (s.contains("max_iters")) cfg.solver_max_iters = s.at("max_iters").get<std::int64_t>();
    if (!(cfg.solver_rel_tol > 0.0) || !(cfg.solver_abs_tol > 0.0) || cfg.solver_max_iters < 1)
      throw std::invalid_argument("suite config: solver tolerances/max_iters out of range");
    if (!cfg.solver_methods.empty() && cfg.solver_precisions.empty())
      cfg.solver_precisions = {PrecisionTag::dd()};
  }
  return cfg;
}

SuiteConfig SuiteConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("suite config: cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("suite config: " + path.string() + " is not valid JSON: " +
                                e.what());
  }
  return from_json(j);
}

namespace {

std::string sanitize_component(std::string s) {
  for (char& c : s)
    if (c == '/' || c == ':' || c == '\\') c = '_';
  return s;
}

std::optional<KernelKind> effective_kernel(KernelKind requested, bool complex_matrix) {
  if (complex_matrix) {
    switch (requested) {
      case KernelKind::Spmv: return KernelKind::SpmvComplex;
      case KernelKind::Sptmv: return KernelKind::SptmvComplex;
      default: return requested;
    }
  }
  if (requested == KernelKind::SpmvComplex || requested == KernelKind::SptmvComplex)
    return std::nullopt;
  return requested;
}

// Builds b = A * make_vector(n) in the working precision F and solves.
template <class MatE, class F>
SolverReport solve_core(const CsrMatrix<MatE>& A, const SolverConfig& scfg, const F& proto) {
  auto v = make_vector<F>(A.ncols, proto);
  KernelMode mode{scfg.precision, scfg.matrix_mode, false, scfg.threads, scfg.lanes_enabled};
  auto b = spmv(A, v, mode);
  CsrOperator<MatE> op{&A, scfg.threads, scfg.lanes_enabled};
  return solve(op, b, scfg).report;
}

}  // namespace

SolveArtifacts run_matrix_solve(const CsrMatrix<double>& A, const std::string& matrix_name,
                                const SolverConfig& scfg) {
  const PrecisionTag& tag = scfg.precision;
  SolverReport rep;
  if (scfg.matrix_mode == MatrixMode::MixedBinary64) {
    rep = with_precision(tag, [&](auto proto) { return solve_core(A, scfg, proto); });
  } else {
    switch (tag.kind) {
      case PrecisionTag::Kind::F64: rep = solve_core(A, scfg, 0.0); break;
      case PrecisionTag::Kind::DD: {
        auto Ap = convert_csr<DoubleDouble>(A);
        rep = solve_core(Ap, scfg, DoubleDouble{});
        break;
      }
      case PrecisionTag::Kind::TD: {
        auto Ap = convert_csr<TripleDouble>(A);
        rep = solve_core(Ap, scfg, TripleDouble{});
        break;
      }
      case PrecisionTag::Kind::QD: {
        auto Ap = convert_csr<QuadDouble>(A);
        rep = solve_core(Ap, scfg, QuadDouble{});
        break;
      }
      case PrecisionTag::Kind::Mpfr: {
        auto Ap = convert_csr_bigfloat(A, tag.mantissa_bits);
        rep = solve_core(Ap, scfg, BigFloat(tag.mantissa_bits));
        break;
      }
    }
  }

  SolveArtifacts art;
  art.history_name = sanitize_component(matrix_name) + "_" + to_string(scfg.method) + "_" +
                     sanitize_component(tag.name()) + ".csv";
  std::ostringstream csv;
  csv << "iter,residual\n";
  for (std::size_t k = 0; k < rep.residual_history.size(); ++k)
    csv << k << ',' << fmt17(rep.residual_history[k]) << '\n';
  art.history_csv = csv.str();

  art.record = json{{"schema", "mpsparse.solve.v1"},
                    {"matrix", matrix_name},
                    {"method", to_string(scfg.method)},
                    {"precision", tag.name()},
                    {"mode", to_string(scfg.matrix_mode)},
                    {"threads", scfg.threads},
                    {"n", A.nrows},
                    {"nnz", A.nnz()},
                    {"status", to_string(rep.status)},
                    {"converged", rep.converged},
                    {"iterations", rep.iterations},
                    {"rhs_norm", rep.rhs_norm},
                    {"final_recurrence_residual", rep.final_recurrence_residual},
                    {"final_true_residual", rep.final_true_residual},
                    {"setup_seconds", rep.setup_seconds},
                    {"solve_seconds", rep.solve_seconds},
                    {"residual_csv", std::string("residuals/") + art.history_name}};
  if (!rep.detail.empty()) art.record["detail"] = rep.detail;
  return art;
}

SuiteOutcome run_suite(const SuiteConfig& config, const fs::path& out_dir,
                       const FetchOptions* fetch_options, std::ostream* log) {
  std::ostream& lg = log ? *log : std::clog;
  std::error_code ec;
  fs::create_directories(out_dir / "residuals", ec);
  if (ec) throw std::runtime_error("suite: cannot create output directory " + out_dir.string());

  SuiteOutcome outcome;
  outcome.records_path = out_dir / "records.jsonl";
  outcome.summary_path = out_dir / "summary.csv";
  outcome.solves_path = out_dir / "solves.jsonl";

  std::ofstream records_out(outcome.records_path);
  std::ofstream solves_out(outcome.solves_path);
  if (!records_out || !solves_out)
    throw std::runtime_error("suite: cannot write outputs under " + out_dir.string());

  int accelerated = config.accelerated_threads > 0
                        ? config.accelerated_threads
                        : static_cast<int>(std::thread::hardware_concurrency());
  if (accelerated < 1) accelerated = 1;

  std::vector<BenchRecord> all_records;
  for (const auto& entry : config.matrices) {
    ++outcome.matrices_attempted;
    try {
      fs::path path = entry.path;
      if (path.empty()) {
        if (!fetch_options)
          throw std::runtime_error("no local path given and fetching is not configured");
        path = fetch_matrix(entry.name, *fetch_options);
      }
      ParsedMtx parsed = parse_mtx_file(path, /*require_square=*/true);
      bool complex_matrix = is_complex(parsed);

      CsrMatrix<double> A;
      ComplexSparseMatrix<double> Ac;
      if (complex_matrix)
        Ac = split_complex(std::get<CooMatrix<std::complex<double>>>(parsed));
      else
        A = coo_to_csr(std::get<CooMatrix<double>>(parsed));

      for (KernelKind requested : config.kernels) {
        auto kind = effective_kernel(requested, complex_matrix);
        if (!kind) {
          lg << "suite: " << entry.name << ": skipping " << to_string(requested)
             << " (real matrix)\n";
          continue;
        }
        for (const auto& precision : config.precisions) {
          for (MatrixMode mode : config.modes) {
            for (bool accelerated_run : {false, true}) {
              KernelRequest req;
              req.kernel = *kind;
              req.precision = precision;
              req.matrix_mode = mode;
              req.threads = accelerated_run ? accelerated : config.baseline_threads;
              req.lanes_enabled = accelerated_run;
              req.repetitions = config.repetitions;
              BenchRecord rec = complex_matrix ? time_kernel(Ac, entry.name, req)
                                               : time_kernel(A, entry.name, req);
              records_out << rec.to_json().dump() << '\n';
              records_out.flush();
              all_records.push_back(std::move(rec));
            }
          }
        }
      }

      if (!config.solver_methods.empty()) {
        if (complex_matrix) {
          lg << "suite: " << entry.name << ": solvers run on real matrices only, skipping\n";
        } else {
          for (KrylovMethod method : config.solver_methods) {
            for (const auto& tag : config.solver_precisions) {
              SolverConfig scfg;
              scfg.method = method;
              scfg.precision = tag;
              scfg.matrix_mode = MatrixMode::Pure;
              scfg.rel_tol = config.solver_rel_tol;
              scfg.abs_tol = config.solver_abs_tol;
              scfg.max_iters = config.solver_max_iters;
              scfg.threads = accelerated;
              scfg.lanes_enabled = true;
              auto art = run_matrix_solve(A, entry.name, scfg);
              std::ofstream hist(out_dir / "residuals" / art.history_name);
              hist << art.history_csv;
              if (!hist)
                throw std::runtime_error("cannot write residual history for " + entry.name);
              solves_out << art.record.dump() << '\n';
              solves_out.flush();
            }
          }
        }
      }
    } catch (const std::exception& e) {
      ++outcome.matrices_failed;
      outcome.failures.push_back(entry.name + ": " + e.what());
      lg << "suite: " << entry.name << " failed: " << e.what() << '\n';
    }
  }

  auto summaries = summarize(all_records);
  std::ofstream summary_out(outcome.summary_path);
  write_summary_csv(summary_out, summaries);
  if (!summary_out) throw std::runtime_error("suite: cannot write " + outcome.summary_path.string());
  return outcome;
}

}  // namespace mps
