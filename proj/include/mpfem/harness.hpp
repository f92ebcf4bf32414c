#ifndef MPFEM_HARNESS_HPP
#define MPFEM_HARNESS_HPP

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mpfem/elements.hpp"
#include "mpfem/problems.hpp"
#include "mpfem/semimodule.hpp"
#include "mpfem/solver.hpp"

namespace mpfem {

/** Shortest decimal representation that round-trips the value.
    -oo is rendered as the token "-inf". */
inline std::string format_number(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

/** Writes `x,v_approx[,v_exact,abs_err]` rows, one per grid node.
    +oo values are clamped to the finite cap; -oo is written as "-inf". */
inline void export_csv(const GridFunction& approx,
                       const std::optional<GridFunction>& exact,
                       const std::string& path, double cap = 1e12) {
  std::ostringstream out;
  out << (exact ? "x,v_approx,v_exact,abs_err\n" : "x,v_approx\n");
  if (exact && exact->size() != approx.size())
    throw std::invalid_argument("export_csv: grids differ");
  for (std::size_t k = 0; k < approx.size(); ++k) {
    double a = approx[k].value();
    if (a > cap) a = cap;
    out << format_number(approx.node(k)) << ',' << format_number(a);
    if (exact) {
      double e = (*exact)[k].value();
      if (e > cap) e = cap;
      double err = std::abs(a - e);
      if (err > cap) err = cap;
      out << ',' << format_number(e) << ',' << format_number(err);
    }
    out << '\n';
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("export_csv: cannot open '" + path + "'");
  f << out.str();
  if (!f) throw std::runtime_error("export_csv: write failed for '" + path + "'");
}

/** Sup-norm distances of v to its primal projection (the maximal
    element of the trial span below v) and to its dual projection
    (the minimal test-side upper hull above v). */
inline std::pair<double, double> projection_diagnostics(
    const GridFunction& v, const ElementBasis& trial, const ElementBasis& test) {
  MaxPlusMatrix b = sample_basis(trial, v.grid());
  double primal = sup_norm_diff(project_image(b, v), v);
  MaxPlusMatrix c = transpose(sample_basis(test, v.grid()));
  double dual = sup_norm_diff(project_dual(c, v), v);
  return {primal, dual};
}

/// Sup over fine-grid nodes inside [region.lo, region.hi] of
/// |reconstruction - analytic(x, t)|.
inline double sup_error(const ElementBasis& trial, const MaxPlusVector& lambda,
                        GridSpec fine, const ControlProblem& prob, double t,
                        std::optional<Interval> region = std::nullopt) {
  if (!prob.has_analytic())
    throw std::invalid_argument("sup_error: problem has no analytic solution");
  GridFunction recon = reconstruct(trial, lambda, fine);
  double m = 0;
  for (std::size_t k = 0; k < fine.n; ++k) {
    double x = fine.node(k);
    if (region && !region->contains(x)) continue;
    double err = std::abs(recon[k].value() - prob.analytic(x, t));
    m = std::max(m, err);
  }
  return m;
}

/** Outcome of one benchmark run: configuration echo, per-step sup-norm
    errors against the analytic solution (when one exists), and the
    projection errors of the analytic terminal-time solution. */
struct RunReport {
  std::string problem;
  SolverConfig config;
  std::size_t trial_size = 0;
  std::size_t test_size = 0;
  std::vector<double> step_errors;
  double final_error = std::numeric_limits<double>::quiet_NaN();
  double proj_primal = std::numeric_limits<double>::quiet_NaN();
  double proj_dual = std::numeric_limits<double>::quiet_NaN();
  double wall_seconds = 0;
};

struct RunResult {
  CoefficientTrajectory trajectory;
  Discretization disc;
  RunReport report;
};

inline RunResult run_benchmark(const ControlProblem& prob,
                               const SolverConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  Discretization disc = make_discretization(prob, cfg);
  CoefficientTrajectory traj = run_trajectory(prob, cfg);

  RunReport report;
  report.problem = prob.name;
  report.config = cfg;
  report.trial_size = disc.trial.size();
  report.test_size = disc.test.size();

  if (prob.has_analytic()) {
    for (std::size_t k = 0; k < traj.steps.size(); ++k)
      report.step_errors.push_back(sup_error(disc.trial, traj.steps[k],
                                             disc.fine, prob,
                                             static_cast<double>(k) * cfg.dt));
    report.final_error = report.step_errors.back();

    GridFunction v_t = GridFunction::sample_finite(
        disc.fine, [&](double x) { return prob.analytic(x, cfg.T); });
    auto [primal, dual] = projection_diagnostics(v_t, disc.trial, disc.test);
    report.proj_primal = primal;
    report.proj_dual = dual;
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return RunResult{std::move(traj), std::move(disc), std::move(report)};
}

struct ConvergenceRow {
  double dt;
  double dx;
  double sup_error;
  double ratio;  // sup_error / (sqrt(dt) + dx / dt)
};

/** Refinement study: level k runs with dt/2^k and dx/4^k, so the
    dx/dt term of the error bound halves along with sqrt(dt). Requires
    an analytic solution to measure against. */
inline std::vector<ConvergenceRow> convergence_study(const ControlProblem& prob,
                                                     const SolverConfig& base,
                                                     std::size_t levels) {
  if (!prob.has_analytic())
    throw std::invalid_argument(
        "convergence_study: problem has no analytic solution");
  std::vector<ConvergenceRow> rows;
  for (std::size_t k = 0; k < levels; ++k) {
    SolverConfig cfg = base;
    cfg.dt = base.dt / std::pow(2.0, static_cast<double>(k));
    cfg.dx = base.dx / std::pow(4.0, static_cast<double>(k));
    Discretization disc = make_discretization(prob, cfg);
    CoefficientTrajectory traj = run_trajectory(prob, cfg);
    double err =
        sup_error(disc.trial, traj.steps.back(), disc.fine, prob, cfg.T);
    rows.push_back(
        {cfg.dt, cfg.dx, err, err / (std::sqrt(cfg.dt) + cfg.dx / cfg.dt)});
  }
  return rows;
}

}  // namespace mpfem

#endif  // MPFEM_HARNESS_HPP
