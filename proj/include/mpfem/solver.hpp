#ifndef MPFEM_SOLVER_HPP
#define MPFEM_SOLVER_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "mpfem/elements.hpp"
#include "mpfem/maxplus.hpp"
#include "mpfem/parallel.hpp"
#include "mpfem/problems.hpp"
#include "mpfem/semimodule.hpp"

namespace mpfem {

enum class Method { fem_tilde, fem_tilde2, fem_dual, fm, limit };

inline std::string method_name(Method m) {
  switch (m) {
    case Method::fem_tilde: return "fem-tilde";
    case Method::fem_tilde2: return "fem-tilde2";
    case Method::fem_dual: return "fem-dual";
    case Method::fm: return "fm";
    case Method::limit: return "limit";
  }
  return "?";
}

inline Method method_by_name(const std::string& s) {
  if (s == "fem-tilde") return Method::fem_tilde;
  if (s == "fem-tilde2") return Method::fem_tilde2;
  if (s == "fem-dual") return Method::fem_dual;
  if (s == "fm") return Method::fm;
  if (s == "limit") return Method::limit;
  throw std::invalid_argument(
      "unknown method '" + s +
      "' (valid: fem-tilde, fem-tilde2, fem-dual, fm, limit)");
}

/** Discretization parameters of one run. T must be an integer multiple
    of dt. The trial space is always quadratic with curvature c; the test
    space is Lipschitz with slope A or quadratic with curvature c. The
    fine grid used for sups, infs and reconstructions has step
    dx / fine_factor. */
struct SolverConfig {
  double dt = 0;
  double T = 0;
  double dx = 0;
  double c = 1;
  double A = 1;
  ElementKind test_kind = ElementKind::lipschitz;
  double lipschitz_bound = 0;  // L extending the trial grid to b + cL
  std::size_t fine_factor = 10;
  Method method = Method::fem_tilde2;
};

inline SolverConfig default_config(const ControlProblem& p) {
  SolverConfig cfg;
  cfg.T = p.defaults.T;
  cfg.dt = p.defaults.dt;
  cfg.dx = p.defaults.dx;
  cfg.c = p.semiconvexity;
  cfg.A = p.defaults.test_shape;
  cfg.test_kind = p.defaults.test_kind;
  cfg.lipschitz_bound = p.lipschitz_bound;
  return cfg;
}

namespace detail {

inline void validate_config(const SolverConfig& cfg) {
  if (!(cfg.dt > 0)) throw std::invalid_argument("config: dt must be > 0");
  if (!(cfg.T >= 0)) throw std::invalid_argument("config: T must be >= 0");
  if (!(cfg.dx > 0)) throw std::invalid_argument("config: dx must be > 0");
  if (!(cfg.c > 0)) throw std::invalid_argument("config: c must be > 0");
  if (cfg.test_kind == ElementKind::lipschitz && !(cfg.A > 0))
    throw std::invalid_argument("config: A must be > 0");
  if (cfg.fine_factor < 1)
    throw std::invalid_argument("config: fine_factor must be >= 1");
  if (!(cfg.lipschitz_bound >= 0))
    throw std::invalid_argument("config: lipschitz bound must be >= 0");
}

inline std::size_t step_count(const SolverConfig& cfg) {
  auto n = static_cast<long long>(std::llround(cfg.T / cfg.dt));
  if (n < 0 || std::abs(static_cast<double>(n) * cfg.dt - cfg.T) >
                   1e-9 * std::max(1.0, cfg.T))
    throw std::invalid_argument("config: T must be an integer multiple of dt");
  return static_cast<std::size_t>(n);
}

inline double domain_half_width(const ControlProblem& prob) {
  const Interval& d = prob.domain;
  if (std::abs(d.lo + d.hi) > 1e-12 * std::max(1.0, d.width()))
    throw std::invalid_argument("solver: domain must be symmetric [-b, b]");
  return d.hi;
}

}  // namespace detail

/// Trial space, test space, and the shared fine evaluation grid.
struct Discretization {
  ElementBasis trial;
  ElementBasis test;
  GridSpec fine;
};

inline Discretization make_discretization(const ControlProblem& prob,
                                          const SolverConfig& cfg) {
  detail::validate_config(cfg);
  double b = detail::domain_half_width(prob);
  ElementBasis trial = build_primal_basis(ElementKind::quadratic, cfg.c, cfg.dx,
                                          b, cfg.lipschitz_bound);
  double test_shape = cfg.test_kind == ElementKind::lipschitz ? cfg.A : cfg.c;
  ElementBasis test = build_test_basis(cfg.test_kind, test_shape, cfg.dx, b);
  GridSpec fine =
      make_grid(prob.domain, cfg.dx / static_cast<double>(cfg.fine_factor));
  return Discretization{std::move(trial), std::move(test), fine};
}

/** First-order propagation of one finite element over a step dt:
    x -> w(x) + dt H(x, w'(x)). Requires w differentiable where
    evaluated; dt = 0 leaves w unchanged. */
class TildeFlow {
 public:
  TildeFlow(FiniteElement w, const ControlProblem& prob, double dt)
      : w_(w), hamiltonian_(prob.hamiltonian), dt_(dt) {}

  double operator()(double x) const {
    if (dt_ == 0) return w_.eval(x);
    return w_.eval(x) + dt_ * hamiltonian_(x, w_.derivative(x));
  }

  const FiniteElement& element() const { return w_; }

 private:
  FiniteElement w_;
  std::function<double(double, double)> hamiltonian_;
  double dt_;
};

inline TildeFlow semigroup_tilde(const FiniteElement& w,
                                 const ControlProblem& prob, double dt) {
  if (!(dt >= 0)) throw std::invalid_argument("semigroup_tilde: dt must be >= 0");
  return TildeFlow(w, prob, dt);
}

/// (A_h)_ji = <z_j, w_i> over the shared domain, by closed form.
inline MaxPlusMatrix assemble_A(const ElementBasis& test,
                                const ElementBasis& trial) {
  Interval x = test.domain();
  if (x.lo != trial.domain().lo || x.hi != trial.domain().hi)
    throw std::invalid_argument("assemble_A: bases live on different domains");
  MaxPlusMatrix a(test.size(), trial.size());
  detail::parallel_for(test.size(), [&](std::size_t j) {
    FiniteElement zj = test.element(j);
    for (std::size_t i = 0; i < trial.size(); ++i)
      a(j, i) = scalar_product(zj, trial.element(i), x);
  });
  return a;
}

/** (B_h~)_ji = sup_x [ z_j(x) + w_i(x) + dt H(x, w_i'(x)) ], taken over
    the fine grid with one golden-refinement pass (10 extra samples in
    the best node's neighboring cells) to cut the grid bias. Requires a
    differentiable (quadratic) trial basis. */
inline MaxPlusMatrix assemble_B_tilde(const ElementBasis& test,
                                      const ElementBasis& trial,
                                      const ControlProblem& prob, double dt,
                                      GridSpec fine) {
  if (trial.kind() != ElementKind::quadratic)
    throw std::invalid_argument("assemble_B_tilde: trial basis must be quadratic");
  std::size_t q = test.size(), p = trial.size(), n = fine.n;

  std::vector<double> z_samples(q * n);
  for (std::size_t j = 0; j < q; ++j) {
    FiniteElement zj = test.element(j);
    for (std::size_t k = 0; k < n; ++k)
      z_samples[j * n + k] = zj.eval(fine.node(k));
  }

  MaxPlusMatrix b(q, p);
  detail::parallel_for(p, [&](std::size_t i) {
    TildeFlow flow = semigroup_tilde(trial.element(i), prob, dt);
    std::vector<double> f(n);
    for (std::size_t k = 0; k < n; ++k) f[k] = flow(fine.node(k));
    for (std::size_t j = 0; j < q; ++j) {
      const double* z = z_samples.data() + j * n;
      double best = z[0] + f[0];
      std::size_t best_k = 0;
      for (std::size_t k = 1; k < n; ++k) {
        double v = z[k] + f[k];
        if (v > best) {
          best = v;
          best_k = k;
        }
      }
      // Refine inside the two cells adjacent to the best node.
      double lo = fine.node(best_k == 0 ? 0 : best_k - 1);
      double hi = fine.node(best_k + 1 >= n ? n - 1 : best_k + 1);
      FiniteElement zj = test.element(j);
      for (int s = 1; s <= 10; ++s) {
        double xs = lo + (hi - lo) * static_cast<double>(s) / 11.0;
        best = std::max(best, zj.eval(xs) + flow(xs));
      }
      b(j, i) = MaxPlusScalar(best);
    }
  });
  return b;
}

/** (B_h~~)_ji = <z_j, w_i> + dt sup H(x, w_i'(x)) over the argmax set of
    z_j + w_i. Exact closed forms for both factors; argmax segments are
    supped over their endpoints and midpoint. */
inline MaxPlusMatrix assemble_B_tilde2(const ElementBasis& test,
                                       const ElementBasis& trial,
                                       const ControlProblem& prob, double dt,
                                       double argmax_tol = 1e-9) {
  if (trial.kind() != ElementKind::quadratic)
    throw std::invalid_argument("assemble_B_tilde2: trial basis must be quadratic");
  Interval x = test.domain();
  MaxPlusMatrix b(test.size(), trial.size());
  detail::parallel_for(test.size(), [&](std::size_t j) {
    FiniteElement zj = test.element(j);
    for (std::size_t i = 0; i < trial.size(); ++i) {
      FiniteElement wi = trial.element(i);
      double a = scalar_product(zj, wi, x).value();
      double h = -std::numeric_limits<double>::infinity();
      for (double xs : argmax_points(zj, wi, x, argmax_tol))
        h = std::max(h, prob.hamiltonian(xs, wi.derivative(xs)));
      b(j, i) = MaxPlusScalar(a + dt * h);
    }
  });
  return b;
}

/** Dual assembly through the transposed semigroup:
    (B_h)_ji ~ sup_x [ z_j(x) + dt H(x, -z_j'(x)) + w_i(x) ].

    The derivative form is only first-order where z_j is smooth. Within
    one-step reach of a Lipschitz kink (|x - center| <= dt max_u |f|)
    the propagated value is taken as the direct one-step optimum
      sup_u [ l(x, u) dt + z_j(x - f(x, u) dt) ],
    which erodes the cone tip at its true rate; the pointwise
    Hamiltonian there would read a full one-sided slope and hold the
    tip up by O(dt). */
inline MaxPlusMatrix assemble_B_dual(const ElementBasis& test,
                                     const ElementBasis& trial,
                                     const ControlProblem& prob, double dt,
                                     GridSpec fine) {
  std::size_t q = test.size(), p = trial.size(), n = fine.n;

  std::vector<double> w_samples(n * p);
  for (std::size_t i = 0; i < p; ++i) {
    FiniteElement wi = trial.element(i);
    for (std::size_t k = 0; k < n; ++k)
      w_samples[k * p + i] = wi.eval(fine.node(k));
  }

  bool kinked_tests = test.kind() == ElementKind::lipschitz;
  constexpr std::size_t n_u = 65;
  std::vector<double> controls(n_u);
  for (std::size_t s = 0; s < n_u; ++s)
    controls[s] = prob.control_set.lo +
                  (prob.control_set.hi - prob.control_set.lo) *
                      static_cast<double>(s) / static_cast<double>(n_u - 1);

  // one-step reach dt * max_u |f(x_k, u)| per node
  std::vector<double> reach(n, 0.0);
  if (kinked_tests && dt > 0) {
    for (std::size_t k = 0; k < n; ++k) {
      double xk = fine.node(k);
      double m = 0;
      for (double u : controls) m = std::max(m, std::abs(prob.dynamics(xk, u)));
      reach[k] = dt * m;
    }
  }

  double kink_eps = 1e-12 * std::max(1.0, fine.domain.width());
  MaxPlusMatrix b(q, p);
  detail::parallel_for(q, [&](std::size_t j) {
    FiniteElement zj = test.element(j);
    std::vector<double> g(n);
    for (std::size_t k = 0; k < n; ++k) {
      double xk = fine.node(k);
      if (zj.kind == ElementKind::lipschitz &&
          std::abs(xk - zj.center) <= reach[k] + kink_eps) {
        // one-step optimum over a control scan plus one local refinement
        double best = -std::numeric_limits<double>::infinity();
        std::size_t best_s = 0;
        for (std::size_t s = 0; s < n_u; ++s) {
          double v = prob.lagrangian(xk, controls[s]) * dt +
                     zj.eval(xk - prob.dynamics(xk, controls[s]) * dt);
          if (v > best) {
            best = v;
            best_s = s;
          }
        }
        double lo = controls[best_s == 0 ? 0 : best_s - 1];
        double hi = controls[best_s + 1 >= n_u ? n_u - 1 : best_s + 1];
        for (int s = 1; s <= 10; ++s) {
          double u = lo + (hi - lo) * static_cast<double>(s) / 11.0;
          best = std::max(best, prob.lagrangian(xk, u) * dt +
                                    zj.eval(xk - prob.dynamics(xk, u) * dt));
        }
        g[k] = best;
      } else {
        g[k] = zj.eval(xk) + dt * prob.hamiltonian(xk, -zj.derivative(xk));
      }
    }
    for (std::size_t i = 0; i < p; ++i) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < n; ++k)
        best = std::max(best, g[k] + w_samples[k * p + i]);
      b(j, i) = MaxPlusScalar(best);
    }
  });
  return b;
}

/// The assembled pair driving the recursion, with the bases that built it.
struct AssembledOperators {
  MaxPlusMatrix a_h;
  MaxPlusMatrix b_h;
  ElementBasis trial;
  ElementBasis test;
};

/** lambda0 = W_h \ phi over the fine grid: the maximal coefficients
    whose reconstruction stays below the terminal reward. */
inline MaxPlusVector initial_coefficients(
    const ElementBasis& trial, const std::function<MaxPlusScalar(double)>& phi,
    GridSpec fine) {
  MaxPlusVector lambda(trial.size());
  for (std::size_t i = 0; i < trial.size(); ++i) {
    FiniteElement wi = trial.element(i);
    MaxPlusScalar acc = MaxPlusScalar::top();
    for (std::size_t k = 0; k < fine.n; ++k) {
      double xk = fine.node(k);
      acc = meet(acc, residual(MaxPlusScalar(wi.eval(xk)), phi(xk)));
    }
    lambda[i] = acc;
  }
  return lambda;
}

/// One recursion step: lambda' = A_h \ (B_h lambda), the maximal
/// coefficients with A_h lambda' <= B_h lambda.
inline MaxPlusVector step(const AssembledOperators& ops,
                          const MaxPlusVector& lambda) {
  return residual_solve(ops.a_h, mat_vec(ops.b_h, lambda));
}

/** The same step written as the dynamic programming equation of a
    zero-sum two-player game,
      lambda'_i = min_j [ -(A_h)_ji + max_k ((B_h)_jk + lambda_k) ],
    coded independently of step() as a cross-check. */
inline MaxPlusVector step_game(const AssembledOperators& ops,
                               const MaxPlusVector& lambda) {
  const MaxPlusMatrix& a = ops.a_h;
  const MaxPlusMatrix& b = ops.b_h;
  if (b.cols() != lambda.size() || a.rows() != b.rows())
    throw std::invalid_argument("step_game: dimension mismatch");
  std::size_t q = a.rows(), p = a.cols();

  std::vector<MaxPlusScalar> inner(q, MaxPlusScalar::bottom());
  for (std::size_t j = 0; j < q; ++j) {
    MaxPlusScalar m = MaxPlusScalar::bottom();
    for (std::size_t k = 0; k < b.cols(); ++k) {
      MaxPlusScalar bjk = b(j, k);
      MaxPlusScalar term;
      if (bjk.is_bottom() || lambda[k].is_bottom())
        term = MaxPlusScalar::bottom();
      else if (bjk.is_top() || lambda[k].is_top())
        term = MaxPlusScalar::top();
      else
        term = MaxPlusScalar(bjk.value() + lambda[k].value());
      if (term > m) m = term;
    }
    inner[j] = m;
  }

  MaxPlusVector out(p);
  for (std::size_t i = 0; i < p; ++i) {
    MaxPlusScalar best = MaxPlusScalar::top();
    for (std::size_t j = 0; j < q; ++j) {
      MaxPlusScalar aji = a(j, i);
      MaxPlusScalar term;
      if (aji.is_bottom())
        term = MaxPlusScalar::top();  // no constraint from this row
      else if (aji.is_top())
        term = inner[j].is_top() ? MaxPlusScalar::top()
                                 : MaxPlusScalar::bottom();
      else if (inner[j].is_bottom())
        term = MaxPlusScalar::bottom();
      else if (inner[j].is_top())
        term = MaxPlusScalar::top();
      else
        term = MaxPlusScalar(inner[j].value() - aji.value());
      if (term < best) best = term;
    }
    out[i] = best;
  }
  return out;
}

/** Coefficient history of a run: steps[k] holds the coefficients at
    time k dt relative to the stored trial basis. */
struct CoefficientTrajectory {
  std::vector<MaxPlusVector> steps;
  double dt;
  ElementBasis basis;

  std::size_t step_count() const { return steps.size() - 1; }
};

/** The Petrov-Galerkin recursion: build bases, assemble A_h and the
    selected B_h variant once, then iterate
      lambda^{t+dt} = A_h \ (B_h lambda^t)
    from lambda^0 = W_h \ phi for T/dt steps. */
inline CoefficientTrajectory solve(const ControlProblem& prob,
                                   const SolverConfig& cfg) {
  std::size_t n_steps = detail::step_count(cfg);
  Discretization disc = make_discretization(prob, cfg);

  MaxPlusMatrix a_h = assemble_A(disc.test, disc.trial);
  MaxPlusMatrix b_h;
  switch (cfg.method) {
    case Method::fem_tilde:
      b_h = assemble_B_tilde(disc.test, disc.trial, prob, cfg.dt, disc.fine);
      break;
    case Method::fem_tilde2:
      b_h = assemble_B_tilde2(disc.test, disc.trial, prob, cfg.dt);
      break;
    case Method::fem_dual:
      b_h = assemble_B_dual(disc.test, disc.trial, prob, cfg.dt, disc.fine);
      break;
    default:
      throw std::invalid_argument(
          "solve: method must be one of the fem variants (use fm_solve or "
          "limit_solve)");
  }
  AssembledOperators ops{std::move(a_h), std::move(b_h), disc.trial, disc.test};

  CoefficientTrajectory traj{{}, cfg.dt, disc.trial};
  traj.steps.reserve(n_steps + 1);
  traj.steps.push_back(
      initial_coefficients(disc.trial, prob.terminal, disc.fine));
  for (std::size_t k = 0; k < n_steps; ++k)
    traj.steps.push_back(step(ops, traj.steps.back()));
  return traj;
}

namespace detail {

/// Fine-grid samples of the trial basis and of its tilde propagation,
/// as plain doubles (both families are finite-valued): column i at node k
/// sits at [k * p + i].
// TODO: stream these buffers column by column; at deep refinements the
// two n x p arrays dominate memory while fm_matrix only ever scans them
// once per column pair.
struct PropagatedSamples {
  std::size_t n, p;
  std::vector<double> w;        // w_i(x_k)
  std::vector<double> flow_w;   // [S^dt w_i]~(x_k)
};

inline PropagatedSamples sample_tilde(const ElementBasis& trial,
                                      const ControlProblem& prob, double dt,
                                      GridSpec fine) {
  if (trial.kind() != ElementKind::quadratic)
    throw std::invalid_argument("fm/limit: trial basis must be quadratic");
  PropagatedSamples s{fine.n, trial.size(), {}, {}};
  s.w.resize(fine.n * trial.size());
  s.flow_w.resize(fine.n * trial.size());
  detail::parallel_for(trial.size(), [&](std::size_t i) {
    FiniteElement wi = trial.element(i);
    TildeFlow flow = semigroup_tilde(wi, prob, dt);
    for (std::size_t k = 0; k < fine.n; ++k) {
      double xk = fine.node(k);
      s.w[k * s.p + i] = wi.eval(xk);
      s.flow_w[k * s.p + i] = flow(xk);
    }
  });
  return s;
}

}  // namespace detail

/** Transition matrix of the baseline one-basis recursion:
    M_ik = (W_h \ [S^dt W_h]~)_ik = inf_x [ -w_i(x) + [S^dt w_k]~(x) ]
    over the fine grid. */
inline MaxPlusMatrix fm_matrix(const ElementBasis& trial,
                               const ControlProblem& prob, double dt,
                               GridSpec fine) {
  detail::PropagatedSamples s = detail::sample_tilde(trial, prob, dt, fine);
  MaxPlusMatrix m(s.p, s.p);
  detail::parallel_for(s.p, [&](std::size_t i) {
    for (std::size_t k = 0; k < s.p; ++k) {
      double acc = std::numeric_limits<double>::infinity();
      for (std::size_t x = 0; x < s.n; ++x)
        acc = std::min(acc, s.flow_w[x * s.p + k] - s.w[x * s.p + i]);
      m(i, k) = MaxPlusScalar(acc);
    }
  });
  return m;
}

/** Baseline recursion mu^{t+dt} = (W_h \ [S^dt W_h]~) mu^t from
    mu^0 = W_h \ phi. Residuates the propagated basis once, then applies
    the fixed transition matrix. */
inline CoefficientTrajectory fm_solve(const ControlProblem& prob,
                                      const SolverConfig& cfg) {
  std::size_t n_steps = detail::step_count(cfg);
  Discretization disc = make_discretization(prob, cfg);
  MaxPlusMatrix m = fm_matrix(disc.trial, prob, cfg.dt, disc.fine);

  CoefficientTrajectory traj{{}, cfg.dt, disc.trial};
  traj.steps.reserve(n_steps + 1);
  traj.steps.push_back(
      initial_coefficients(disc.trial, prob.terminal, disc.fine));
  for (std::size_t k = 0; k < n_steps; ++k)
    traj.steps.push_back(mat_vec(m, traj.steps.back()));
  return traj;
}

/** Limit case of the finite element method with the test space spanning
    everything: lambda^{t+dt} = W_h \ ([S^dt W_h]~ lambda^t), residuated
    against the full fine grid at every step. */
inline CoefficientTrajectory limit_solve(const ControlProblem& prob,
                                         const SolverConfig& cfg) {
  std::size_t n_steps = detail::step_count(cfg);
  Discretization disc = make_discretization(prob, cfg);
  detail::PropagatedSamples s =
      detail::sample_tilde(disc.trial, prob, cfg.dt, disc.fine);

  CoefficientTrajectory traj{{}, cfg.dt, disc.trial};
  traj.steps.reserve(n_steps + 1);
  traj.steps.push_back(
      initial_coefficients(disc.trial, prob.terminal, disc.fine));
  for (std::size_t t = 0; t < n_steps; ++t) {
    const MaxPlusVector& lam = traj.steps.back();
    // g(x) = max_k ([S^dt w_k]~(x) + lambda_k) on the fine grid
    MaxPlusVector g(s.n);
    for (std::size_t x = 0; x < s.n; ++x) {
      MaxPlusScalar acc = MaxPlusScalar::bottom();
      for (std::size_t k = 0; k < s.p; ++k)
        acc = oplus(acc, otimes(MaxPlusScalar(s.flow_w[x * s.p + k]), lam[k]));
      g[x] = acc;
    }
    MaxPlusVector next(s.p);
    for (std::size_t i = 0; i < s.p; ++i) {
      MaxPlusScalar acc = MaxPlusScalar::top();
      for (std::size_t x = 0; x < s.n; ++x)
        acc = meet(acc, residual(MaxPlusScalar(s.w[x * s.p + i]), g[x]));
      next[i] = acc;
    }
    traj.steps.push_back(std::move(next));
  }
  return traj;
}

/// Dispatch on cfg.method.
inline CoefficientTrajectory run_trajectory(const ControlProblem& prob,
                                            const SolverConfig& cfg) {
  switch (cfg.method) {
    case Method::fm: return fm_solve(prob, cfg);
    case Method::limit: return limit_solve(prob, cfg);
    default: return solve(prob, cfg);
  }
}

}  // namespace mpfem

#endif  // MPFEM_SOLVER_HPP
