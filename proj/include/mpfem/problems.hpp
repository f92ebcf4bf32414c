#ifndef MPFEM_PROBLEMS_HPP
#define MPFEM_PROBLEMS_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "mpfem/elements.hpp"
#include "mpfem/semimodule.hpp"

namespace mpfem {

/** Finite-horizon deterministic optimal control problem on X = [-b, b]:
    maximize the integral of lagrangian(x, u) plus terminal(x(T)) over
    trajectories xdot = dynamics(x, u), u in the control set.

    hamiltonian(x, p) is the closed form of
    sup_u [ lagrangian(x, u) + p * dynamics(x, u) ];
    analytic, when set, is the value function (x, t) -> v(x, t) and
    satisfies analytic(x, 0) = terminal(x). */
struct ControlProblem {
  /// Discretization defaults mirroring the benchmark's reference setup.
  struct Defaults {
    double T;
    double dt;
    double dx;
    double test_shape;       // A for Lipschitz tests, c for quadratic tests
    ElementKind test_kind;
  };

  std::string name;
  Interval domain;
  Interval control_set;  // for unbounded control sets, the window sampled
                         // by brute-force oracles
  std::function<double(double, double)> lagrangian;  // (x, u)
  std::function<double(double, double)> dynamics;    // (x, u)
  std::function<MaxPlusScalar(double)> terminal;     // phi
  std::function<double(double, double)> hamiltonian;  // (x, p)
  std::function<double(double, double)> analytic;     // (x, t); may be empty
  double lipschitz_bound = 0;  // L used to extend the trial-center grid
                               // beyond the domain (0: no extension)
  double semiconvexity = 1;    // suggested trial curvature c
  Defaults defaults{};

  bool has_analytic() const { return static_cast<bool>(analytic); }
};

/** Linear-quadratic benchmark: lagrangian -(a/2) x^2 - u^2/2, dynamics u,
    zero terminal reward, unbounded controls. Closed form
    H(x, p) = -(a/2) x^2 + p^2/2; value function v(x, t) = -q(t) x^2 / 2
    with q(t) = sqrt(a) tanh(sqrt(a) t), the solution of the scalar
    Riccati equation qdot = a - q^2, q(0) = 0. The state space is
    truncated to [-domain_half_width, domain_half_width]. */
inline ControlProblem lq_problem(double a, double domain_half_width = 10.0) {
  if (!(a > 0)) throw std::invalid_argument("lq_problem: a must be > 0");
  if (!(domain_half_width > 0))
    throw std::invalid_argument("lq_problem: domain half-width must be > 0");
  ControlProblem p;
  p.name = "lq";
  p.domain = {-domain_half_width, domain_half_width};
  p.control_set = {-30.0, 30.0};  // oracle window; the true control set is R
  p.lagrangian = [a](double x, double u) { return -(a / 2) * x * x - u * u / 2; };
  p.dynamics = [](double, double u) { return u; };
  p.terminal = [](double) { return MaxPlusScalar::unit(); };
  p.hamiltonian = [a](double x, double pv) {
    return -(a / 2) * x * x + pv * pv / 2;
  };
  double sa = std::sqrt(a);
  p.analytic = [sa](double x, double t) {
    double q = sa * std::tanh(sa * t);
    return -q * x * x / 2;
  };
  p.lipschitz_bound = 0;  // reference setup keeps trial centers in [-b, b]
  p.semiconvexity = 1.0;
  p.defaults = {5.0, 0.05, 0.05, 1.0, ElementKind::quadratic};
  return p;
}

/** Shortest-exit benchmark on X = [-1, 1]: running reward -1 inside,
    0 on the absorbing boundary where the dynamics stop. Value function
    v(x, t) = -min(t, 1 - |x|). */
inline ControlProblem distance_problem() {
  ControlProblem p;
  p.name = "distance";
  p.domain = {-1.0, 1.0};
  p.control_set = {-1.0, 1.0};
  p.lagrangian = [](double x, double) { return std::abs(x) >= 1.0 ? 0.0 : -1.0; };
  p.dynamics = [](double x, double u) { return std::abs(x) >= 1.0 ? 0.0 : u; };
  p.terminal = [](double) { return MaxPlusScalar::unit(); };
  p.hamiltonian = [](double x, double pv) {
    return std::abs(x) >= 1.0 ? 0.0 : std::abs(pv) - 1.0;
  };
  p.analytic = [](double x, double t) {
    return -std::min(t, 1.0 - std::abs(x));
  };
  p.lipschitz_bound = 1.0;
  p.semiconvexity = 1.2;
  p.defaults = {1.0, 0.05, 0.0125, 1.1, ElementKind::lipschitz};
  return p;
}

/** Benchmark with lagrangian x and dynamics -x u, controls in [0, 1]:
    drift right at full speed where x <= 0, coast where x > 0.
    v(x, t) = x t for x > 0 and x (1 - e^{-t}) otherwise. */
inline ControlProblem falcone1() {
  ControlProblem p;
  p.name = "falcone1";
  p.domain = {-1.0, 1.0};
  p.control_set = {0.0, 1.0};
  p.lagrangian = [](double x, double) { return x; };
  p.dynamics = [](double x, double u) { return -x * u; };
  p.terminal = [](double) { return MaxPlusScalar::unit(); };
  p.hamiltonian = [](double x, double pv) {
    return x + std::max(0.0, -x * pv);
  };
  p.analytic = [](double x, double t) {
    return x > 0 ? x * t : x * (1.0 - std::exp(-t));
  };
  p.lipschitz_bound = 1.0;
  p.semiconvexity = 1.4;
  p.defaults = {1.0, 0.05, 0.02, 1.3, ElementKind::lipschitz};
  return p;
}

/** Benchmark with lagrangian -3 (1 - |x|) and dynamics u (1 - |x|),
    controls in [-1, 1]: flee toward the nearest boundary.
    v(x, t) = -3 (1 - |x|) (1 - e^{-t}). */
inline ControlProblem falcone2() {
  ControlProblem p;
  p.name = "falcone2";
  p.domain = {-1.0, 1.0};
  p.control_set = {-1.0, 1.0};
  p.lagrangian = [](double x, double) { return -3.0 * (1.0 - std::abs(x)); };
  p.dynamics = [](double x, double u) { return u * (1.0 - std::abs(x)); };
  p.terminal = [](double) { return MaxPlusScalar::unit(); };
  p.hamiltonian = [](double x, double pv) {
    return (1.0 - std::abs(x)) * (std::abs(pv) - 3.0);
  };
  p.analytic = [](double x, double t) {
    return -3.0 * (1.0 - std::abs(x)) * (1.0 - std::exp(-t));
  };
  p.lipschitz_bound = 2.0;
  p.semiconvexity = 1.1;
  p.defaults = {1.0, 0.05, 0.02, 2.0, ElementKind::lipschitz};
  return p;
}

/** Brute-force Hamiltonian: max of lagrangian + p * dynamics over n_u
    uniform control samples. Exists to validate the closed forms. */
inline double hamiltonian_oracle(const ControlProblem& p, double x, double pval,
                                 std::size_t n_u) {
  if (n_u < 2) throw std::invalid_argument("hamiltonian_oracle: need n_u >= 2");
  double lo = p.control_set.lo, hi = p.control_set.hi;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n_u; ++k) {
    double u = lo + (hi - lo) * static_cast<double>(k) /
                        static_cast<double>(n_u - 1);
    best = std::max(best, p.lagrangian(x, u) + pval * p.dynamics(x, u));
  }
  return best;
}

/// Benchmark lookup for the CLI; throws listing the valid names.
inline ControlProblem problem_by_name(const std::string& name, double lq_a = 0.3,
                                      double lq_half_width = 10.0) {
  if (name == "lq") return lq_problem(lq_a, lq_half_width);
  if (name == "distance") return distance_problem();
  if (name == "falcone1") return falcone1();
  if (name == "falcone2") return falcone2();
  throw std::invalid_argument(
      "unknown problem '" + name +
      "' (valid: lq, distance, falcone1, falcone2)");
}

}  // namespace mpfem

#endif  // MPFEM_PROBLEMS_HPP
