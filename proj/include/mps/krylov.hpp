#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mps/kernels.hpp"

// Krylov solvers for square systems, templated on the working scalar and
// on the operator (which owns the matrix representation and kernel
// execution settings). Iterations stop on
//   ||r_k||_2 <= rel_tol * ||b||_2 + abs_tol
// evaluated in the working precision on the recurrence residual; the
// returned report carries a binary64 residual history, the final true
// residual from a fresh product, and breakdown/divergence diagnostics.

namespace mps {

enum class KrylovMethod { CG, BiCG, CGS, BiCGSTAB, GPBiCG };

inline const char* to_string(KrylovMethod m) {
  switch (m) {
    case KrylovMethod::CG: return "cg";
    case KrylovMethod::BiCG: return "bicg";
    case KrylovMethod::CGS: return "cgs";
    case KrylovMethod::BiCGSTAB: return "bicgstab";
    case KrylovMethod::GPBiCG: return "gpbicg";
  }
  return "?";
}

inline std::optional<KrylovMethod> parse_method(std::string_view s) {
  if (s == "cg") return KrylovMethod::CG;
  if (s == "bicg") return KrylovMethod::BiCG;
  if (s == "cgs") return KrylovMethod::CGS;
  if (s == "bicgstab") return KrylovMethod::BiCGSTAB;
  if (s == "gpbicg") return KrylovMethod::GPBiCG;
  return std::nullopt;
}

enum class SolverStatus { Converged, MaxIterations, Breakdown, Diverged };

inline const char* to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::Converged: return "converged";
    case SolverStatus::MaxIterations: return "max_iterations";
    case SolverStatus::Breakdown: return "breakdown";
    case SolverStatus::Diverged: return "diverged";
  }
  return "?";
}

struct SolverConfig {
  KrylovMethod method = KrylovMethod::BiCGSTAB;
  PrecisionTag precision;
  MatrixMode matrix_mode = MatrixMode::Pure;
  double rel_tol = 1e-13;
  double abs_tol = 1e-99;
  std::int64_t max_iters = 10000;
  int threads = 1;
  bool lanes_enabled = true;
  std::vector<double> x0;  // empty means zero

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
      throw std::invalid_argument("solver: tolerances must be positive");
    if (max_iters < 1) throw std::invalid_argument("solver: max_iters must be at least 1");
    if (threads < 1) throw std::invalid_argument("solver: threads must be at least 1");
  }
};

struct SolverReport {
  SolverStatus status = SolverStatus::MaxIterations;
  bool converged = false;
  std::string detail;
  std::int64_t iterations = 0;
  std::vector<double> residual_history;  // ||r_k||, one entry per step, starting at k = 0
  double rhs_norm = 0.0;
  double final_recurrence_residual = 0.0;
  double final_true_residual = 0.0;
  double setup_seconds = 0.0;
  double solve_seconds = 0.0;
};

template <class E>
struct SolveResult {
  std::vector<E> x;
  SolverReport report;
};

// Observer invoked after every completed iteration with the current
// iterate and the recurrence residual norm.
template <class E>
using IterationObserver = std::function<void(std::int64_t, const std::vector<E>&, double)>;

// Matrix-side of a solve: kernels plus their execution settings.
template <class MatE>
struct CsrOperator {
  const CsrMatrix<MatE>* matrix = nullptr;
  int threads = 1;
  bool lanes_enabled = true;

  std::int64_t rows() const { return matrix->nrows; }
  std::int64_t cols() const { return matrix->ncols; }
  KernelMode mode() const { return KernelMode{{}, MatrixMode::Pure, false, threads, lanes_enabled}; }

  template <class F>
  std::vector<F> apply(const std::vector<F>& x) const {
    return spmv(*matrix, x, mode());
  }
  template <class F>
  std::vector<F> apply_transposed(const std::vector<F>& x) const {
    return sptmv(*matrix, x, mode());
  }
};

template <class E>
E dot(const std::vector<E>& u, const std::vector<E>& v) {
  if (u.size() != v.size()) throw std::invalid_argument("dot: length mismatch");
  E acc = u.empty() ? E{} : zero_like(u[0]);
  for (std::size_t i = 0; i < u.size(); ++i) acc = acc + u[i] * v[i];
  return acc;
}

template <class E>
E norm2(const std::vector<E>& v) {
  using std::sqrt;
  return sqrt(dot(v, v));
}

template <class E>
void axpy(const E& alpha, const std::vector<E>& x, std::vector<E>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = y[i] + alpha * x[i];
}

namespace detail {

template <class E>
struct SolverState {
  std::vector<E> x;
  std::vector<E> r;
  E threshold;
  double divergence_cap = 0.0;
  double breakdown_floor = 0.0;
  std::chrono::steady_clock::time_point loop_start;
  SolverReport report;
  bool done = false;  // converged before the first iteration
};

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <class E, class Op>
SolverState<E> solver_init(const Op& op, const std::vector<E>& b, const SolverConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  cfg.validate();
  if (op.rows() != op.cols())
    throw std::invalid_argument("solver: operator must be square, got " +
                                std::to_string(op.rows()) + "x" + std::to_string(op.cols()));
  if (static_cast<std::size_t>(op.cols()) != b.size())
    throw std::invalid_argument("solver: rhs length does not match the operator");

  E proto = b.empty() ? E{} : zero_like(b[0]);
  SolverState<E> st;
  st.threshold = proto;
  st.x.assign(b.size(), proto);
  if (!cfg.x0.empty()) {
    if (cfg.x0.size() != b.size())
      throw std::invalid_argument("solver: x0 length does not match the rhs");
    for (std::size_t i = 0; i < b.size(); ++i) st.x[i] = scalar_like(cfg.x0[i], proto);
    auto ax = op.apply(st.x);
    st.r.resize(b.size(), proto);
    for (std::size_t i = 0; i < b.size(); ++i) st.r[i] = b[i] - ax[i];
  } else {
    st.r = b;
  }

  E bnorm = norm2(b);
  st.threshold = bnorm * cfg.rel_tol + scalar_like(cfg.abs_tol, proto);
  st.report.rhs_norm = to_double(bnorm);
  st.divergence_cap = 1e6 * st.report.rhs_norm + 1e6 * cfg.abs_tol;
  st.breakdown_floor = 1e-3 * cfg.abs_tol;

  E r0 = norm2(st.r);
  st.report.residual_history.push_back(to_double(r0));
  if (r0 <= st.threshold) {
    st.report.status = SolverStatus::Converged;
    st.report.converged = true;
    st.done = true;
  }
  st.report.setup_seconds = seconds_since(t0);
  st.loop_start = std::chrono::steady_clock::now();
  return st;
}

enum class Step { Continue, Converged, Diverged, NonFinite };

template <class E>
Step record_step(SolverState<E>& st, const E& rnorm) {
  double rd = to_double(rnorm);
  st.report.residual_history.push_back(rd);
  if (!std::isfinite(rd)) return Step::NonFinite;
  if (rnorm <= st.threshold) return Step::Converged;
  if (rd > st.divergence_cap) return Step::Diverged;
  return Step::Continue;
}

template <class E>
void close_report(SolverState<E>& st, SolverStatus status, std::int64_t iters,
                  const std::string& detail = {}) {
  st.report.status = status;
  st.report.converged = status == SolverStatus::Converged;
  st.report.iterations = iters;
  st.report.detail = detail;
  st.report.final_recurrence_residual = st.report.residual_history.back();
  st.report.solve_seconds = seconds_since(st.loop_start);
}

// True residual from a fresh product with the final iterate.
template <class E, class Op>
void finish_true_residual(SolverState<E>& st, const Op& op, const std::vector<E>& b) {
  auto ax = op.apply(st.x);
  for (std::size_t i = 0; i < ax.size(); ++i) ax[i] = b[i] - ax[i];
  st.report.final_true_residual = to_double(norm2(ax));
}

inline bool tiny(double v, double floor) { return !std::isfinite(v) || std::fabs(v) < floor; }

}  // namespace detail

template <class E, class Op>
SolveResult<E> solve_cg(const Op& op, const std::vector<E>& b, const SolverConfig& cfg,
                        const IterationObserver<E>& observer = {}) {
  using std::sqrt;
  auto st = detail::solver_init<E, Op>(op, b, cfg);
  std::int64_t k = 0;
  if (!st.done) {
    std::vector<E> p = st.r;
    E rho = dot(st.r, st.r);
    for (k = 1; k <= cfg.max_iters; ++k) {
      auto q = op.apply(p);
      E sigma = dot(p, q);
      if (detail::tiny(to_double(sigma), st.breakdown_floor)) {
        detail::close_report(st, SolverStatus::Breakdown, k - 1, "cg: <p, Ap> vanished");
        detail::finish_true_residual(st, op, b);
        return {std::move(st.x), std::move(st.report)};
      }
      E alpha = rho / sigma;
      axpy(alpha, p, st.x);
      axpy(-alpha, q, st.r);
      E rho_next = dot(st.r, st.r);
      E rnorm = sqrt(rho_next);
      auto step = detail::record_step(st, rnorm);
      if (observer) observer(k, st.x, to_double(rnorm));
      if (step != detail::Step::Continue) {
        detail::close_report(st,
                             step == detail::Step::Converged ? SolverStatus::Converged
                             : step == detail::Step::Diverged ? SolverStatus::Diverged
                                                              : SolverStatus::Breakdown,
                             k, step == detail::Step::NonFinite ? "cg: non-finite residual" : "");
        detail::finish_true_residual(st, op, b);
        return {std::move(st.x), std::move(st.report)};
      }
      E beta = rho_next / rho;
      for (std::size_t i = 0; i < p.size(); ++i) p[i] = st.r[i] + beta * p[i];
      rho = rho_next;
    }
    detail::close_report(st, SolverStatus::MaxIterations, cfg.max_iters);
  } else {
    detail::close_report(st, SolverStatus::Converged, 0);
  }
  detail::finish_true_residual(st, op, b);
  return {std::move(st.x), std::move(st.report)};
}

template <class E, class Op>
SolveResult<E> solve_bicg(const Op& op, const std::vector<E>& b, const SolverConfig& cfg,
                          const IterationObserver<E>& observer = {}) {
  auto st = detail::solver_init<E, Op>(op, b, cfg);
  std::int64_t k = 0;
  if (!st.done) {
    std::vector<E> rt = st.r;  // shadow residual, fixed choice r~0 = r0
    std::vector<E> p = st.r;
    std::vector<E> pt = rt;
    E rho = dot(rt, st.r);
    for (k = 1; k <= cfg.max_iters; ++k) {
      if (detail::tiny(to_double(rho), st.breakdown_floor)) {
        detail::close_report(st, SolverStatus::Breakdown, k - 1, "bicg: <r~, r> vanished");
        detail::finish_true_residual(st, op, b);
        return {std::move(st.x), std::move(st.report)};
      }
      auto q = op.apply(p);
      auto qt = op.apply_transposed(pt);
      E sigma = dot(pt, q);
      if (detail::tiny(to_double(sigma), st.breakdown_floor)) {
        detail::close_report(st, SolverStatus::Breakdown, k - 1, "bicg: <p~, Ap> vanished");
        detail::finish_true_residual(st, op, b);
        return {std::move(st.x), std::move(st.report)};
      }
      E alpha = rho / sigma;
      axpy(alpha, p, st.x);
      axpy(-alpha, q, st.r);
      axpy(-alpha, qt, rt);
      E rnorm = norm2(st.r);
      auto step = detail::record_step(st, rnorm);
      if (observer) observer(k, st.x, to_double(rnorm));
      if (step != detail::Step::Continue) {
        detail::close_report(st,
                             step == detail::Step::Converged ? SolverStatus::Converged
                             : step == detail::Step::Diverged ? SolverStatus::Diverged
                                                              : SolverStatus::Breakdown,
                             k, step == detail::Step::NonFinite ? "bicg: non-finite residual" : "");
        detail::finish_true_residual(st, op, b);
        return {std::move(st.x), std::move(st.report)};
      }
      E rho_next = dot(rt, st.r);
      E beta = rho_next / rho;
      for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = st.r[i] + beta * p[i];
        pt[i] = rt[i] + beta * pt[i];
      }
      rho = rho_next;
    }
    detail::close_report(st, SolverStatus::MaxIterations, cfg.max_iters);
  } else {
    detail::close_report(st, SolverStatus::Converged, 0);
  }
  detail::finish_true_residual(st, op, b);
  return {std::move(st.x), std::move(st.report)};
}

template <class E, class Op>
SolveResult<E> solve_cgs(const Op& op, const std::vector<E>& b, const SolverConfig& cfg,
                         const IterationObserver<E>& observer = {}) {
  auto st = detail::solver_init<E, Op>(op, b, cfg);
  std::int64_t k = 0;
  if (!st.done) {
    std::vector<E> rt = st.r;
    std::vector<E> u = st.r;
    std::vector<E> p = st.r;
    E rho = dot(rt, st.r);
    std::vector<E> q(b.size(), zero_like(st.r[0]));
    for (k = 1; k <= cfg.max_iters; ++k) {
      if (detail::tiny(to_double(rho), st.breakdown_floor)) {
        detail::close_report(st, SolverStatus::Breakdown, k - 1, "cgs: <r~, r> vanished");
        detail::finish_true_residual(st, op, b);
        return {std::move(st.x), std::move(st.report)};
      }
      auto v = op.apply(p);
      E sigma = dot(rt, v);
      if (detail::tiny(to_double(sigma), st.breakdown_floor)) {
        detail::close_report(st, SolverStatus::Breakdown, k - 1, "cgs: <r~, Ap> vanished");
        detail::finish_true_residual(st, op, b);
        return {std::move(st.x), std::move(st.report)};
      }
      E alpha = rho / sigma;
      for (std::size_t i = 0; i < q.size(); ++i) q[i] = u[i] - alpha * v[i];
      std::vector<E> t(q.size(), zero_like(st.r[0]));
      for (std::size_t i = 0; i < t.size(); ++i) t[i] = u[i] + q[i];
      axpy(alpha, t, st.x);
      auto w = op.apply(t);
      axpy(-alpha, w, st.r);
      E rnorm = norm2(st.r);
      auto step = detail::record_step(st, rnorm);
      if (observer) observer(k, st.x, to_double(rnorm));
      if (step != detail::Step::Continue) {
        detail::close_report(st,
                             step == detail::Step::Converged ? SolverStatus::Converged
                             : step == detail::Step::Diverged ? SolverStatus::Diverged
                                                              : SolverStatus::Breakdown,
                             k, step == detail::Step::NonFinite ? "cgs: non-finite residual" : "");
        detail::finish_true_residual(st, op, b);
        return {std::move(st.x), std::move(st.report)};
      }
      E rho_next = dot(rt, st.r);
      E beta = rho_next / rho;
      for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = st.r[i] + beta * q[i];
        p[i] = u[i] + beta * (q[i] + beta * p[i]);
      }
      rho = rho_next;
    }
    detail::close_report(st, SolverStatus::MaxIterations, cfg.max_iters);
  } else {
    detail::close_report(st, SolverStatus::Converged, 0);
  }
  detail::finish_true_residual(st, op, b);
  return {std::move(st.x), std::move(st.report)};
}

template <class E, class Op>
SolveResult<E> solve_bicgstab(const Op& op, const std::vector<E>& b, const SolverConfig& cfg,
                              const IterationObserver<E>& observer = {}) {
  auto st = detail::solver_init<E, Op>(op, b, cfg);
  std::int64_t k = 0;
  if (!st.done) {
    std::vector<E> rt = st.r;
    std::vector<E> p = st.r;
    E rho = dot(rt, st.r);
    for (k = 1; k <= cfg.max_iters; ++k) {
      if (detail::tiny(to_double(rho), st.breakdown_floor)) {
        detail::close_report(st, SolverStatus::Breakdown, k - 1, "bicgstab: <r~, r> vanished");
        detail::finish_true_residual(st, op, b);
        return {std::move(st.x), std::move(st.report)};
      }
      auto v = op.apply(p);
      E sigma = dot(rt, v);
      if (detail::tiny(to_double(sigma), st.breakdown_floor)) {
        detail::close_report(st, SolverStatus::Breakdown, k - 1, "bicgstab: <r~, Ap> vanished");
        detail::finish_true_residual(st, op, b);
        return {std::move(st.x), std::move(st.report)};
      }
      E alpha = rho / sigma;
      std::vector<E> s = st.r;
      axpy(-alpha, v, s);
      E snorm = norm2(s);
      if (snorm <= st.threshold) {
        // Half step already converged; skip the stabilization step.
        axpy(alpha, p, st.x);
        st.r = std::move(s);
        st.report.residual_history.push_back(to_double(snorm));
        if (observer) observer(k, st.x, to_double(snorm));
        detail::close_report(st, SolverStatus::Converged, k);
        detail::finish_true_residual(st, op, b);
        return {std::move(st.x), std::move(st.report)};
      }
      auto t = op.apply(s);
      E tt = dot(t, t);
      if (detail::tiny(to_double(tt), st.breakdown_floor)) {
        detail::close_report(st, SolverStatus::Breakdown, k - 1, "bicgstab: <t, t> vanished");
        detail::finish_true_residual(st, op, b);
        return {std::move(st.x), std::move(st.report)};
      }
      E omega = dot(t, s) / tt;
      if (detail::tiny(to_double(omega), st.breakdown_floor)) {
        detail::close_report(st, SolverStatus::Breakdown, k - 1, "bicgstab: omega vanished");
        detail::finish_true_residual(st, op, b);
        return {std::move(st.x), std::move(st.report)};
      }
      axpy(alpha, p, st.x);
      axpy(omega, s, st.x);
      st.r = std::move(s);
      axpy(-omega, t, st.r);
      E rnorm = norm2(st.r);
      auto step = detail::record_step(st, rnorm);
      if (observer) observer(k, st.x, to_double(rnorm));
      if (step != detail::Step::Continue) {
        detail::close_report(st,
                             step == detail::Step::Converged ? SolverStatus::Converged
                             : step == detail::Step::Diverged ? SolverStatus::Diverged
                                                              : SolverStatus::Breakdown,
                             k,
                             step == detail::Step::NonFinite ? "bicgstab: non-finite residual" : "");
        detail::finish_true_residual(st, op, b);
        return {std::move(st.x), std::move(st.report)};
      }
      E rho_next = dot(rt, st.r);
      E beta = (rho_next / rho) * (alpha / omega);
      for (std::size_t i = 0; i < p.size(); ++i)
        p[i] = st.r[i] + beta * (p[i] - omega * v[i]);
      rho = rho_next;
    }
    detail::close_report(st, SolverStatus::MaxIterations, cfg.max_iters);
  } else {
    detail::close_report(st, SolverStatus::Converged, 0);
  }
  detail::finish_true_residual(st, op, b);
  return {std::move(st.x), std::move(st.report)};
}

template <class E, class Op>
SolveResult<E> solve_gpbicg(const Op& op, const std::vector<E>& b, const SolverConfig& cfg,
                            const IterationObserver<E>& observer = {}) {
  auto st = detail::solver_init<E, Op>(op, b, cfg);
  std::int64_t k = 0;
  if (!st.done) {
    const E zero = zero_like(st.r[0]);
    std::vector<E> rt = st.r;
    std::vector<E> p = st.r;
    std::vector<E> t_prev(b.size(), zero);
    std::vector<E> w(b.size(), zero);
    std::vector<E> u(b.size(), zero);
    std::vector<E> z(b.size(), zero);
    std::vector<E> y(b.size(), zero);
    E rho = dot(rt, st.r);
    E beta = zero;
    for (k = 1; k <= cfg.max_iters; ++k) {
      if (detail::tiny(to_double(rho), st.breakdown_floor)) {
        detail::close_report(st, SolverStatus::Breakdown, k - 1, "gpbicg: <r~, r> vanished");
        detail::finish_true_residual(st, op, b);
        return {std::move(st.x), std::move(st.report)};
      }
      auto ap = op.apply(p);
      E sigma = dot(rt, ap);
      if (detail::tiny(to_double(sigma), st.breakdown_floor)) {
        detail::close_report(st, SolverStatus::Breakdown, k - 1, "gpbicg: <r~, Ap> vanished");
        detail::finish_true_residual(st, op, b);
        return {std::move(st.x), std::move(st.report)};
      }
      E alpha = rho / sigma;
      // y = t_prev - r - alpha w + alpha Ap
      for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = (t_prev[i] - st.r[i]) + alpha * (ap[i] - w[i]);
      std::vector<E> t = st.r;
      axpy(-alpha, ap, t);
      E tnorm = norm2(t);
      if (tnorm <= st.threshold) {
        axpy(alpha, p, st.x);
        st.r = std::move(t);
        st.report.residual_history.push_back(to_double(tnorm));
        if (observer) observer(k, st.x, to_double(tnorm));
        detail::close_report(st, SolverStatus::Converged, k);
        detail::finish_true_residual(st, op, b);
        return {std::move(st.x), std::move(st.report)};
      }
      auto at = op.apply(t);
      E att = dot(at, t);
      E ata = dot(at, at);
      E zeta, eta;
      if (k == 1) {
        if (detail::tiny(to_double(ata), st.breakdown_floor)) {
          detail::close_report(st, SolverStatus::Breakdown, k - 1, "gpbicg: <At, At> vanished");
          detail::finish_true_residual(st, op, b);
          return {std::move(st.x), std::move(st.report)};
        }
        zeta = att / ata;
        eta = zero;
      } else {
        E yy = dot(y, y);
        E yat = dot(y, at);
        E yt = dot(y, t);
        E denom = ata * yy - yat * yat;
        if (detail::tiny(to_double(denom), st.breakdown_floor * st.breakdown_floor)) {
          detail::close_report(st, SolverStatus::Breakdown, k - 1,
                               "gpbicg: zeta/eta system is singular");
          detail::finish_true_residual(st, op, b);
          return {std::move(st.x), std::move(st.report)};
        }
        zeta = (yy * att - yt * yat) / denom;
        eta = (ata * yt - yat * att) / denom;
      }
      // u = zeta Ap + eta (t_prev - r + beta u)
      for (std::size_t i = 0; i < u.size(); ++i)
        u[i] = zeta * ap[i] + eta * ((t_prev[i] - st.r[i]) + beta * u[i]);
      // z = zeta r + eta z - alpha u
      for (std::size_t i = 0; i < z.size(); ++i)
        z[i] = (zeta * st.r[i] + eta * z[i]) - alpha * u[i];
      axpy(alpha, p, st.x);
      for (std::size_t i = 0; i < z.size(); ++i) st.x[i] = st.x[i] + z[i];
      // r = t - eta y - zeta At
      std::vector<E> r_next = t;
      axpy(-eta, y, r_next);
      axpy(-zeta, at, r_next);
      st.r = std::move(r_next);
      E rnorm = norm2(st.r);
      auto step = detail::record_step(st, rnorm);
      if (observer) observer(k, st.x, to_double(rnorm));
      if (step != detail::Step::Continue) {
        detail::close_report(st,
                             step == detail::Step::Converged ? SolverStatus::Converged
                             : step == detail::Step::Diverged ? SolverStatus::Diverged
                                                              : SolverStatus::Breakdown,
                             k,
                             step == detail::Step::NonFinite ? "gpbicg: non-finite residual" : "");
        detail::finish_true_residual(st, op, b);
        return {std::move(st.x), std::move(st.report)};
      }
      E rho_next = dot(rt, st.r);
      if (detail::tiny(to_double(zeta), st.breakdown_floor)) {
        detail::close_report(st, SolverStatus::Breakdown, k, "gpbicg: zeta vanished");
        detail::finish_true_residual(st, op, b);
        return {std::move(st.x), std::move(st.report)};
      }
      beta = (alpha / zeta) * (rho_next / rho);
      // w = At + beta Ap
      for (std::size_t i = 0; i < w.size(); ++i) w[i] = at[i] + beta * ap[i];
      for (std::size_t i = 0; i < p.size(); ++i) p[i] = st.r[i] + beta * (p[i] - u[i]);
      t_prev = std::move(t);
      rho = rho_next;
    }
    detail::close_report(st, SolverStatus::MaxIterations, cfg.max_iters);
  } else {
    detail::close_report(st, SolverStatus::Converged, 0);
  }
  detail::finish_true_residual(st, op, b);
  return {std::move(st.x), std::move(st.report)};
}

template <class E, class Op>
SolveResult<E> solve(const Op& op, const std::vector<E>& b, const SolverConfig& cfg,
                     const IterationObserver<E>& observer = {}) {
  switch (cfg.method) {
    case KrylovMethod::CG: return solve_cg(op, b, cfg, observer);
    case KrylovMethod::BiCG: return solve_bicg(op, b, cfg, observer);
    case KrylovMethod::CGS: return solve_cgs(op, b, cfg, observer);
    case KrylovMethod::BiCGSTAB: return solve_bicgstab(op, b, cfg, observer);
    case KrylovMethod::GPBiCG: return solve_gpbicg(op, b, cfg, observer);
  }
  throw std::invalid_argument("solver: unknown method");
}

}  // namespace mps
