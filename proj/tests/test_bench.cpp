#include <cmath>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "mps/bench.hpp"
#include "mps/mtxio.hpp"
#include "support/fixtures.hpp"

using namespace mps;
using test::exact;
using test::kOracleBits;
using test::oracle_sqrt;
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

BenchRecord stub_record(const std::string& name, std::int64_t n, int threads, bool lanes,
                        double seconds) {
  BenchRecord r;
  r.matrix_name = name;
  r.n = n;
  r.nnz = 3 * n;
  r.kernel = KernelKind::Spmv;
  r.precision = PrecisionTag::dd();
  r.matrix_mode = MatrixMode::Pure;
  r.threads = threads;
  r.lanes_enabled = lanes;
  r.repetitions = 3;
  r.median_seconds = seconds;
  r.checksum = 0x1234u;
  return r;
}

const SpeedupSummary* find_bucket(const std::vector<SpeedupSummary>& s, std::int64_t lo) {
  for (const auto& row : s)
    if (row.bucket_lo == lo) return &row;
  return nullptr;
}

}  // namespace

TEST_CASE("benchmark vectors match their closed forms in oracle precision") {
  auto v = make_vector(3, DoubleDouble{});
  REQUIRE(v.size() == 3);
  BigFloat root2 = oracle_sqrt(BigFloat(2.0, kOracleBits));
  for (int j = 1; j <= 3; ++j)
    CHECK(rel_error(v[static_cast<std::size_t>(j - 1)], root2 * BigFloat(double(j), kOracleBits)) <=
          std::ldexp(1.0, -103));

  auto again = make_vector(3, DoubleDouble{});
  CHECK(checksum(v) == checksum(again));
  CHECK_THROWS_AS((void)make_vector(0, 0.0), std::invalid_argument);

  auto c = make_complex_vector(4, DoubleDouble{});
  BigFloat root13 = oracle_sqrt(BigFloat(13.0, kOracleBits));
  BigFloat half(0.5, kOracleBits);
  BigFloat re1 = oracle_sqrt((root13 + BigFloat(2.0, kOracleBits)) * half);
  BigFloat im1 = oracle_sqrt((root13 - BigFloat(2.0, kOracleBits)) * half);
  for (int j = 1; j <= 4; ++j) {
    CHECK(rel_error(c.re[static_cast<std::size_t>(j - 1)], re1 * BigFloat(double(j), kOracleBits)) <=
          std::ldexp(1.0, -102));
    CHECK(rel_error(c.im[static_cast<std::size_t>(j - 1)], im1 * BigFloat(double(j), kOracleBits)) <=
          std::ldexp(1.0, -102));
  }
  // (re + i*im)^2 = 2 + 3i for the unit entry.
  double re = to_double(c.re[0]), im = to_double(c.im[0]);
  CHECK(re * re - im * im == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(2.0 * re * im == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("checksums see element order, sign bits, and every component") {
  std::vector<double> a{1.0, 2.0};
  std::vector<double> b{2.0, 1.0};
  CHECK(checksum(a) != checksum(b));
  CHECK(checksum(std::vector<double>{0.0}) != checksum(std::vector<double>{-0.0}));

  std::vector<DoubleDouble> mc{DoubleDouble(1.5), DoubleDouble(-2.25)};
  std::vector<double> flat{mc[0].c[0], mc[0].c[1], mc[1].c[0], mc[1].c[1]};
  CHECK(checksum(mc) == checksum(flat));

  ComplexVector<double> cv;
  cv.re = {1.0, 2.0};
  cv.im = {3.0, 4.0};
  CHECK(checksum(cv) == (checksum(cv.re) * 1099511628211ull ^ checksum(cv.im)));

  std::vector<BigFloat> bf1{BigFloat(1.5, 128), BigFloat(2.5, 128)};
  std::vector<BigFloat> bf2{BigFloat(1.5, 128), BigFloat(2.5, 128)};
  std::vector<BigFloat> bf3{BigFloat(2.5, 128), BigFloat(1.5, 128)};
  CHECK(checksum(bf1) == checksum(bf2));
  CHECK(checksum(bf1) != checksum(bf3));
}

TEST_CASE("time_kernel reports the run's shape and a reproducible checksum") {
  auto A = example5x5();
  KernelRequest req;
  req.kernel = KernelKind::Spmv;
  req.precision = PrecisionTag::dd();
  req.matrix_mode = MatrixMode::Pure;
  req.repetitions = 1;

  auto rec = time_kernel(A, "example5", req);
  CHECK(rec.matrix_name == "example5");
  CHECK(rec.n == 5);
  CHECK(rec.nnz == 8);
  CHECK(rec.kernel == KernelKind::Spmv);
  CHECK(rec.repetitions == 1);
  CHECK(rec.median_seconds > 0.0);

  KernelMode mode{PrecisionTag::dd(), MatrixMode::Pure, false, 1, true};
  auto expected = spmv(convert_csr<DoubleDouble>(A), make_vector(5, DoubleDouble{}), mode);
  CHECK(rec.checksum == checksum(expected));
  CHECK(time_kernel(A, "example5", req).checksum == rec.checksum);

  req.kernel = KernelKind::Sptmv;
  auto rect = time_kernel(A, "example5", req);
  auto expected_t = sptmv(convert_csr<DoubleDouble>(A), make_vector(5, DoubleDouble{}), mode);
  CHECK(rect.checksum == checksum(expected_t));
  CHECK(rect.checksum != rec.checksum);

  req.kernel = KernelKind::SpmvComplex;
  CHECK_THROWS_AS((void)time_kernel(A, "example5", req), std::invalid_argument);
  req.kernel = KernelKind::Spmv;
  req.repetitions = 0;
  CHECK_THROWS_AS((void)time_kernel(A, "example5", req), std::invalid_argument);

  auto qc = split_complex(test::qc324_standin());
  KernelRequest creq;
  creq.kernel = KernelKind::SpmvComplex;
  creq.precision = PrecisionTag::dd();
  creq.repetitions = 1;
  auto crec = time_kernel(qc, "qc324", creq);
  CHECK(crec.n == 324);
  CHECK(crec.nnz == 26730);
  auto cexpected =
      spmv_complex(convert_complex_csr<DoubleDouble>(qc), make_complex_vector(324, DoubleDouble{}),
                   mode);
  CHECK(crec.checksum == checksum(cexpected));
  creq.kernel = KernelKind::Spmv;
  CHECK_THROWS_AS((void)time_kernel(qc, "qc324", creq), std::invalid_argument);
}

TEST_CASE("speedup ratios compare baseline to accelerated runs") {
  auto base = stub_record("m", 500, 1, false, 2.0);
  auto fast = stub_record("m", 500, 8, true, 0.5);
  CHECK(speedup_ratio(base, fast) == 4.0);
  CHECK(speedup_ratio(base, base) == 1.0);

  auto other = stub_record("other", 500, 8, true, 0.5);
  CHECK_THROWS_AS((void)speedup_ratio(base, other), std::invalid_argument);
  auto zero = stub_record("m", 500, 8, true, 0.0);
  CHECK_THROWS_AS((void)speedup_ratio(base, zero), std::invalid_argument);
}

TEST_CASE("summaries bucket matrices by size and aggregate ratios") {
  std::vector<BenchRecord> records;
  records.push_back(stub_record("small", 500, 1, false, 2.0));
  records.push_back(stub_record("small", 500, 8, true, 1.0));
  records.push_back(stub_record("mid_a", 2000, 1, false, 1.0));
  records.push_back(stub_record("mid_a", 2000, 8, true, 2.0));
  records.push_back(stub_record("mid_b", 3000, 1, false, 2.0));
  records.push_back(stub_record("mid_b", 3000, 8, true, 1.0));

  auto summaries = summarize(records);
  REQUIRE(summaries.size() == 3);  // one combo, three buckets

  const auto* b0 = find_bucket(summaries, 101);
  REQUIRE(b0 != nullptr);
  CHECK(b0->matrix_count == 1);
  CHECK(b0->pct_speedup_gt_1 == 100.0);
  CHECK(b0->mean_speedup == 2.0);

  const auto* b1 = find_bucket(summaries, 1001);
  REQUIRE(b1 != nullptr);
  CHECK(b1->matrix_count == 2);
  CHECK(b1->pct_speedup_gt_1 == 50.0);
  CHECK(b1->mean_speedup == doctest::Approx(1.25));

  const auto* b2 = find_bucket(summaries, 5001);
  REQUIRE(b2 != nullptr);
  CHECK(b2->matrix_count == 0);
  CHECK(std::isnan(b2->pct_speedup_gt_1));
  CHECK(std::isnan(b2->mean_speedup));

  // A second precision forms its own group of three buckets.
  auto base_td = stub_record("small", 500, 1, false, 3.0);
  base_td.precision = PrecisionTag::td();
  auto fast_td = stub_record("small", 500, 6, true, 1.0);
  fast_td.precision = PrecisionTag::td();
  records.push_back(base_td);
  records.push_back(fast_td);
  CHECK(summarize(records).size() == 6);
}

TEST_CASE("record and summary files round-trip exactly") {
  std::vector<BenchRecord> records;
  records.push_back(stub_record("small", 500, 1, false, 2.0));
  records.push_back(stub_record("small", 500, 8, true, 0.5));
  auto big = stub_record("big", 6000, 1, false, 0.125);
  big.precision = PrecisionTag::mpfr(256);
  big.kernel = KernelKind::SptmvComplex;
  big.matrix_mode = MatrixMode::MixedBinary64;
  big.checksum = 0xdeadbeefcafef00dull;
  records.push_back(big);

  std::stringstream buf;
  write_records_jsonl(buf, records);
  auto back = read_records_jsonl(buf);
  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(back[i].to_json() == records[i].to_json());
    CHECK(back[i].checksum == records[i].checksum);
  }

  std::stringstream bad;
  bad << R"({"schema":"other.v9"})" << '\n';
  CHECK_THROWS_AS((void)read_records_jsonl(bad), std::invalid_argument);

  auto summaries = summarize(records);
  std::stringstream csv;
  write_summary_csv(csv, summaries);
  auto s_back = read_summary_csv(csv);
  REQUIRE(s_back.size() == summaries.size());
  for (std::size_t i = 0; i < summaries.size(); ++i) CHECK(s_back[i] == summaries[i]);

  std::stringstream bad_csv;
  bad_csv << "not a summary\n";
  CHECK_THROWS_AS((void)read_summary_csv(bad_csv), std::invalid_argument);
}

TEST_CASE("suite configs validate strictly before running") {
  auto cfg = SuiteConfig::from_json(nlohmann::json::parse(R"({"matrices": ["tub1000"]})"));
  REQUIRE(cfg.matrices.size() == 1);
  CHECK(cfg.matrices[0].name == "tub1000");
  CHECK(cfg.matrices[0].path.empty());
  CHECK(cfg.kernels.size() == 2);
  CHECK(cfg.precisions.size() == 4);
  CHECK(cfg.modes.size() == 2);
  CHECK(cfg.repetitions == 5);
  CHECK(cfg.solver_methods.empty());

  auto full = SuiteConfig::from_json(nlohmann::json::parse(R"({
    "matrices": [{"name": "ex", "path": "/tmp/ex.mtx"}, {"path": "/tmp/other.mtx"}],
    "kernels": ["spmv"],
    "precisions": ["dd", "mpfr:128"],
    "modes": ["p"],
    "repetitions": 2,
    "accelerated_threads": 2,
    "solver": {"methods": ["cg", "bicgstab"], "precisions": ["td"], "rel_tol": 1e-10}
  })"));
  CHECK(full.matrices[1].name == "other");
  CHECK(full.precisions[1].mantissa_bits == 128);
  CHECK(full.solver_methods.size() == 2);
  CHECK(full.solver_precisions.size() == 1);
  CHECK(full.solver_rel_tol == 1e-10);

  auto reject = [](const char* text) {
    CHECK_THROWS_AS((void)SuiteConfig::from_json(nlohmann::json::parse(text)),
                    std::invalid_argument);
  };
  reject(R"({"matrices": ["a"], "unknown_key": 1})");
  reject(R"({"matrices": ["a"], "kernels": ["spmvv"]})");
  reject(R"({"matrices": ["a"], "precisions": ["dd9"]})");
  reject(R"({"matrices": ["a"], "solver": {"methods": ["sor"]}})");
  reject(R"({"matrices": ["a"], "repetitions": 0})");
  reject(R"({"matrices": []})");
}

TEST_CASE("solve artifacts capture the run and its residual history") {
  Rng rng(0xbe4c0001);
  auto A = coo_to_csr(test::random_diag_dominant(rng, 30, 0.2, true));
  SolverConfig cfg;
  cfg.method = KrylovMethod::CG;
  cfg.precision = PrecisionTag::dd();
  auto art = run_matrix_solve(A, "dom30", cfg);

  CHECK(art.record.at("schema") == "mpsparse.solve.v1");
  CHECK(art.record.at("matrix") == "dom30");
  CHECK(art.record.at("method") == "cg");
  CHECK(art.record.at("precision") == "dd");
  CHECK(art.record.at("converged").get<bool>());
  CHECK(art.record.at("n") == 30);
  auto iters = art.record.at("iterations").get<std::int64_t>();
  CHECK(iters >= 1);
  CHECK(art.history_name == "dom30_cg_dd.csv");
  CHECK(art.record.at("residual_csv") == "residuals/dom30_cg_dd.csv");

  std::istringstream hist(art.history_csv);
  std::string line;
  std::getline(hist, line);
  CHECK(line == "iter,residual");
  std::int64_t rows = 0;
  while (std::getline(hist, line))
    if (!line.empty()) ++rows;
  CHECK(rows == iters + 1);

  cfg.matrix_mode = MatrixMode::MixedBinary64;
  auto mixed = run_matrix_solve(A, "dom30", cfg);
  CHECK(mixed.record.at("converged").get<bool>());
  CHECK(mixed.record.at("mode") == "m");
}

TEST_CASE("the suite writes records, solves, and a reproducible summary") {
  namespace fs = std::filesystem;
  auto dir = fs::temp_directory_path() / "mps_suite_test";
  fs::remove_all(dir);
  fs::create_directories(dir);

  write_mtx_file(ParsedMtx{csr_to_coo(example5x5())}, dir / "ex5.mtx");
  Rng rng(0xbe4c0002);
  write_mtx_file(ParsedMtx{test::random_diag_dominant(rng, 40, 0.2, true)}, dir / "dom40.mtx");

  SuiteConfig cfg = SuiteConfig::from_json(nlohmann::json::parse(R"({
    "matrices": [{"name": "ex5", "path": ""}, {"name": "dom40", "path": ""}],
    "kernels": ["spmv", "sptmv"],
    "precisions": ["dd", "mpfr:64"],
    "modes": ["p", "m"],
    "repetitions": 2,
    "accelerated_threads": 2,
    "solver": {"methods": ["bicgstab"], "precisions": ["dd"]}
  })"));
  cfg.matrices[0].path = dir / "ex5.mtx";
  cfg.matrices[1].path = dir / "dom40.mtx";

  std::ostringstream log;
  auto out = run_suite(cfg, dir / "out", nullptr, &log);
  CHECK(out.matrices_attempted == 2);
  CHECK(out.matrices_failed == 0);
  CHECK(!out.all_failed());

  std::ifstream rec_in(out.records_path);
  REQUIRE(rec_in.good());
  auto records = read_records_jsonl(rec_in);
  CHECK(records.size() == 2 * 2 * 2 * 2 * 2);

  std::ifstream sum_in(out.summary_path);
  REQUIRE(sum_in.good());
  auto summary = read_summary_csv(sum_in);
  auto recomputed = summarize(records);
  REQUIRE(summary.size() == recomputed.size());
  for (std::size_t i = 0; i < summary.size(); ++i) CHECK(summary[i] == recomputed[i]);

  std::ifstream solves_in(out.solves_path);
  REQUIRE(solves_in.good());
  std::string line;
  int solve_lines = 0;
  while (std::getline(solves_in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line);
    CHECK(j.at("schema") == "mpsparse.solve.v1");
    CHECK(j.at("method") == "bicgstab");
    CHECK(fs::exists(dir / "out" / j.at("residual_csv").get<std::string>()));
    ++solve_lines;
  }
  CHECK(solve_lines == 2);

  SuiteConfig broken = cfg;
  broken.matrices = {{"missing", dir / "missing.mtx"}};
  auto bad = run_suite(broken, dir / "out2", nullptr, &log);
  CHECK(bad.matrices_attempted == 1);
  CHECK(bad.matrices_failed == 1);
  CHECK(bad.all_failed());
  CHECK(fs::exists(bad.summary_path));
  CHECK(bad.failures.size() == 1);

  fs::remove_all(dir);
}
