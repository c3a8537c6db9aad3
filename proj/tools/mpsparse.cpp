#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "mps/bench.hpp"
#include "mps/fetch.hpp"
#include "mps/mtxio.hpp"

namespace fs = std::filesystem;

namespace {

fs::path default_cache_dir() {
  if (const char* env = std::getenv("MPSPARSE_CACHE_DIR"); env && *env) return env;
  if (const char* home = std::getenv("HOME"); home && *home)
    return fs::path(home) / ".cache" / "mpsparse";
  return fs::path("mpsparse-cache");
}

int hardware_threads() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  return n > 0 ? n : 1;
}

// CLI11 validator wrappers around the library parsers.
std::string check_precision(const std::string& s) {
  return mps::PrecisionTag::parse(s) ? "" : "unknown precision \"" + s + "\"";
}
std::string check_mode(const std::string& s) {
  return mps::parse_matrix_mode(s) ? "" : "mode must be \"p\" or \"m\", got \"" + s + "\"";
}
std::string check_method(const std::string& s) {
  return mps::parse_method(s) ? "" : "unknown solver method \"" + s + "\"";
}

struct CommonKernelArgs {
  std::string precision = "dd";
  std::string mode = "p";
  int threads = 0;  // 0: hardware concurrency
  std::string lanes = "on";
};

void add_kernel_args(CLI::App* cmd, CommonKernelArgs& args) {
  cmd->add_option("--precision", args.precision,
                  "working precision: f64, dd, td, qd, or mpfr:<bits>")
      ->check(check_precision)
      ->capture_default_str();
  cmd->add_option("--mode", args.mode, "matrix storage: p (pure) or m (mixed binary64)")
      ->check(check_mode)
      ->capture_default_str();
  cmd->add_option("--threads", args.threads, "worker threads (0 = hardware concurrency)")
      ->check(CLI::Range(0, 4096))
      ->capture_default_str();
  cmd->add_option("--lanes", args.lanes, "4-wide batched kernels: on or off")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
}

int run_fetch(const std::vector<std::string>& names, const mps::FetchOptions& options) {
  int failures = 0;
  for (const auto& name : names) {
    try {
      std::cout << mps::fetch_matrix(name, options).string() << '\n';
    } catch (const std::exception& e) {
      ++failures;
      std::cerr << "fetch: " << e.what() << '\n';
    }
  }
  return failures == 0 ? 0 : 1;
}

int run_spmv(const std::string& path, const std::string& matrix_name,
             const CommonKernelArgs& common, bool transposed, int reps) {
  auto parsed = mps::parse_mtx_file(path, /*require_square=*/true);
  mps::KernelRequest req;
  req.precision = *mps::PrecisionTag::parse(common.precision);
  req.matrix_mode = *mps::parse_matrix_mode(common.mode);
  req.threads = common.threads > 0 ? common.threads : hardware_threads();
  req.lanes_enabled = common.lanes == "on";
  req.repetitions = reps;

  std::string name = matrix_name.empty() ? fs::path(path).stem().string() : matrix_name;
  mps::BenchRecord rec;
  if (mps::is_complex(parsed)) {
    req.kernel = transposed ? mps::KernelKind::SptmvComplex : mps::KernelKind::SpmvComplex;
    auto A = mps::split_complex(std::get<mps::CooMatrix<std::complex<double>>>(parsed));
    rec = mps::time_kernel(A, name, req);
  } else {
    req.kernel = transposed ? mps::KernelKind::Sptmv : mps::KernelKind::Spmv;
    auto A = mps::coo_to_csr(std::get<mps::CooMatrix<double>>(parsed));
    rec = mps::time_kernel(A, name, req);
  }
  std::cout << rec.to_json().dump() << '\n';
  return 0;
}

int run_solve(const std::string& path, const std::string& matrix_name, const std::string& method,
              const CommonKernelArgs& common, double rtol, double atol, std::int64_t max_iters,
              const std::string& history_path) {
  auto parsed = mps::parse_mtx_file(path, /*require_square=*/true);
  if (mps::is_complex(parsed)) {
    std::cerr << "solve: complex matrices are not supported; the solvers are real\n";
    return 1;
  }
  auto A = mps::coo_to_csr(std::get<mps::CooMatrix<double>>(parsed));

  mps::SolverConfig cfg;
  cfg.method = *mps::parse_method(method);
  cfg.precision = *mps::PrecisionTag::parse(common.precision);
  cfg.matrix_mode = *mps::parse_matrix_mode(common.mode);
  cfg.rel_tol = rtol;
  cfg.abs_tol = atol;
  cfg.max_iters = max_iters;
  cfg.threads = common.threads > 0 ? common.threads : hardware_threads();
  cfg.lanes_enabled = common.lanes == "on";

  std::string name = matrix_name.empty() ? fs::path(path).stem().string() : matrix_name;
  auto art = mps::run_matrix_solve(A, name, cfg);
  if (!history_path.empty()) {
    std::ofstream hist(history_path);
    hist << art.history_csv;
    if (!hist) {
      std::cerr << "solve: cannot write " << history_path << '\n';
      return 1;
    }
    art.record["residual_csv"] = history_path;
  } else {
    art.record.erase("residual_csv");
  }
  std::cout << art.record.dump() << '\n';
  return art.record.at("converged").get<bool>() ? 0 : 3;
}

int run_suite_cmd(const std::string& config_path, const std::string& out_dir,
                  const mps::FetchOptions& fetch_options) {
  auto config = mps::SuiteConfig::load(config_path);
  auto outcome = mps::run_suite(config, out_dir, &fetch_options, &std::cerr);
  std::cerr << "suite: " << (outcome.matrices_attempted - outcome.matrices_failed) << "/"
            << outcome.matrices_attempted << " matrices succeeded\n";
  std::cout << "records: " << outcome.records_path.string() << '\n'
            << "summary: " << outcome.summary_path.string() << '\n'
            << "solves:  " << outcome.solves_path.string() << '\n';
  return outcome.matrices_failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multiple-precision sparse matrix kernels and Krylov solvers"};
  app.require_subcommand(1);

  std::string cache_dir = default_cache_dir().string();
  bool offline = false;
  std::string url_template;
  app.add_option("--cache-dir", cache_dir, "matrix cache directory (env MPSPARSE_CACHE_DIR)")
      ->capture_default_str();
  app.add_flag("--offline", offline, "never touch the network; fail on cache misses");
  app.add_option("--url-template", url_template,
                 "archive URL pattern with {group} and {name} placeholders");

  auto* fetch_cmd = app.add_subcommand("fetch", "download matrices into the local cache");
  std::vector<std::string> fetch_names;
  fetch_cmd->add_option("names", fetch_names, "matrix names (\"tub1000\" or \"Group/name\")")
      ->required();

  auto* spmv_cmd =
      app.add_subcommand("spmv", "time a sparse matrix-vector product and print the record");
  std::string spmv_path, spmv_name;
  bool spmv_transposed = false;
  int spmv_reps = 5;
  CommonKernelArgs spmv_args;
  spmv_cmd->add_option("mtx", spmv_path, "Matrix Market file")->required()
      ->check(CLI::ExistingFile);
  add_kernel_args(spmv_cmd, spmv_args);
  spmv_cmd->add_flag("--transposed", spmv_transposed, "time A^T v instead of A v");
  spmv_cmd->add_option("--reps", spmv_reps, "timed repetitions (median is reported)")
      ->check(CLI::Range(1, 1000000))
      ->capture_default_str();
  spmv_cmd->add_option("--matrix-name", spmv_name, "name recorded in the output");

  auto* solve_cmd = app.add_subcommand("solve", "run a Krylov solver on A x = A v");
  std::string solve_path, solve_name, solve_method = "bicgstab", solve_history;
  double solve_rtol = 1e-13, solve_atol = 1e-99;
  std::int64_t solve_max_iters = 20000;
  CommonKernelArgs solve_args;
  solve_cmd->add_option("mtx", solve_path, "Matrix Market file (real, square)")->required()
      ->check(CLI::ExistingFile);
  solve_cmd->add_option("--method", solve_method, "cg, bicg, cgs, bicgstab, or gpbicg")
      ->check(check_method)
      ->capture_default_str();
  add_kernel_args(solve_cmd, solve_args);
  solve_cmd->add_option("--rtol", solve_rtol, "relative tolerance")->capture_default_str();
  solve_cmd->add_option("--atol", solve_atol, "absolute tolerance")->capture_default_str();
  solve_cmd->add_option("--max-iters", solve_max_iters, "iteration cap")
      ->check(CLI::Range(std::int64_t{1}, std::int64_t{100000000}))
      ->capture_default_str();
  solve_cmd->add_option("--history", solve_history, "write the residual history CSV here");
  solve_cmd->add_option("--matrix-name", solve_name, "name recorded in the output");

  auto* suite_cmd = app.add_subcommand("suite", "run a benchmark suite from a JSON config");
  std::string suite_config, suite_out = "bench-out";
  suite_cmd->add_option("config", suite_config, "suite configuration JSON")->required()
      ->check(CLI::ExistingFile);
  suite_cmd->add_option("--out", suite_out, "output directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  mps::FetchOptions fetch_options;
  fetch_options.cache_dir = cache_dir;
  fetch_options.offline = offline;
  if (!url_template.empty()) fetch_options.url_template = url_template;

  try {
    if (fetch_cmd->parsed()) return run_fetch(fetch_names, fetch_options);
    if (spmv_cmd->parsed())
      return run_spmv(spmv_path, spmv_name, spmv_args, spmv_transposed, spmv_reps);
    if (solve_cmd->parsed())
      return run_solve(solve_path, solve_name, solve_method, solve_args, solve_rtol, solve_atol,
                       solve_max_iters, solve_history);
    if (suite_cmd->parsed()) return run_suite_cmd(suite_config, suite_out, fetch_options);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
