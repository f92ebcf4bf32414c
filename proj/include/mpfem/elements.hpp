#ifndef MPFEM_ELEMENTS_HPP
#define MPFEM_ELEMENTS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mpfem/maxplus.hpp"
#include "mpfem/semimodule.hpp"

namespace mpfem {

enum class ElementKind { quadratic, lipschitz };

/** One finite element on the real line, peaking at 0 at its center:
      quadratic:  w(x) = -(x - xhat)^2 / (2c)   (shape = c, Hessian 1/c)
      lipschitz:  w(x) = -A |x - xhat|          (shape = A)
    Quadratic elements are 1/c-semiconvex with equality; Lipschitz
    elements are globally A-Lipschitz. Both are concave. */
struct FiniteElement {
  ElementKind kind;
  double center;
  double shape;  // c for quadratic, A for lipschitz; > 0

  double eval(double x) const {
    double d = x - center;
    return kind == ElementKind::quadratic ? -(d * d) / (2.0 * shape)
                                          : -shape * std::abs(d);
  }

  /// Derivative; a Lipschitz element has none at its center and the
  /// caller is expected to fall back to a dual formula there.
  double derivative(double x) const {
    double d = x - center;
    if (kind == ElementKind::quadratic) return -d / shape;
    if (d == 0)
      throw std::domain_error(
          "FiniteElement: Lipschitz element is not differentiable at its "
          "center");
    return d > 0 ? -shape : shape;
  }
};

namespace detail {

/** Candidate maximizers (x, value) of the concave, piecewise-smooth sum
    u + v on X: the interval endpoints, any Lipschitz kinks inside X, and
    the stationary point of each smooth piece that the piece contains.
    The true sup over X is the best candidate value. */
inline std::vector<std::pair<double, double>> pair_candidates(
    const FiniteElement& u, const FiniteElement& v, Interval x) {
  std::vector<double> bounds;
  bounds.push_back(x.lo);
  for (const FiniteElement* e : {&u, &v})
    if (e->kind == ElementKind::lipschitz && x.lo < e->center &&
        e->center < x.hi)
      bounds.push_back(e->center);
  bounds.push_back(x.hi);
  std::sort(bounds.begin(), bounds.end());

  std::vector<double> xs(bounds);
  for (std::size_t p = 0; p + 1 < bounds.size(); ++p) {
    double p0 = bounds[p], p1 = bounds[p + 1];
    if (!(p0 < p1)) continue;
    double mid = 0.5 * (p0 + p1);
    // Slope of the sum on this piece is lin - x * inv_c.
    double inv_c = 0, lin = 0;
    for (const FiniteElement* e : {&u, &v}) {
      if (e->kind == ElementKind::quadratic) {
        inv_c += 1.0 / e->shape;
        lin += e->center / e->shape;
      } else {
        lin += mid < e->center ? e->shape : -e->shape;
      }
    }
    if (inv_c > 0) {
      double xstar = lin / inv_c;
      if (p0 <= xstar && xstar <= p1) xs.push_back(xstar);
    }
  }

  std::vector<std::pair<double, double>> out;
  out.reserve(xs.size());
  for (double xi : xs) out.emplace_back(xi, u.eval(xi) + v.eval(xi));
  return out;
}

}  // namespace detail

/** Max-plus scalar product <u, v> = sup_{x in X} u(x) + v(x), exact.
    Interior closed forms, centers d apart:
      quad(c)-quad(c):           -d^2 / (4c)
      lipschitz(A)-quad(c):      -d^2 / (2c)        if |d| <= A c,
                                 -A |d| + A^2 c / 2 otherwise
      lipschitz(A)-lipschitz(B): -min(A, B) |d|
    When the unconstrained maximizer leaves X, concavity puts the sup at
    a clamped boundary or kink candidate instead. */
inline MaxPlusScalar scalar_product(const FiniteElement& u,
                                    const FiniteElement& v, Interval x) {
  if (!(x.lo < x.hi))
    throw std::invalid_argument("scalar_product: empty interval");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& [xi, val] : detail::pair_candidates(u, v, x))
    best = std::max(best, val);
  return MaxPlusScalar(best);
}

/** All maximizers of z + w on X up to a value tolerance. The argmax set
    of a concave piecewise-smooth sum is a point or a closed segment;
    segments are reported as {left endpoint, midpoint, right endpoint}. */
inline std::vector<double> argmax_points(const FiniteElement& z,
                                         const FiniteElement& w, Interval x,
                                         double tol = 1e-9) {
  if (!(tol > 0)) throw std::invalid_argument("argmax_points: tol must be > 0");
  auto cands = detail::pair_candidates(z, w, x);
  double sup = -std::numeric_limits<double>::infinity();
  for (const auto& [xi, val] : cands) sup = std::max(sup, val);

  double lo = x.hi, hi = x.lo;
  for (const auto& [xi, val] : cands) {
    if (val >= sup - tol) {
      lo = std::min(lo, xi);
      hi = std::max(hi, xi);
    }
  }
  double pos_eps = 1e-9 * std::max(1.0, x.width());
  if (hi - lo <= pos_eps) return {lo};
  // Concavity: every point between two near-optimal candidates is itself
  // within tol of the sup, so [lo, hi] is the argmax segment.
  return {lo, 0.5 * (lo + hi), hi};
}

/** Family of identically shaped elements with sorted centers on a
    regular grid; the trial space W_h or test space Z_h. */
class ElementBasis {
 public:
  ElementBasis(ElementKind kind, double shape, std::vector<double> centers,
               Interval domain)
      : kind_(kind),
        shape_(shape),
        centers_(std::move(centers)),
        domain_(domain) {
    if (!(shape_ > 0))
      throw std::invalid_argument("ElementBasis: shape must be > 0");
    if (centers_.empty())
      throw std::invalid_argument("ElementBasis: no elements");
    if (!std::is_sorted(centers_.begin(), centers_.end()))
      throw std::invalid_argument("ElementBasis: centers must be ascending");
    if (!(domain_.lo < domain_.hi))
      throw std::invalid_argument("ElementBasis: empty domain");
  }

  ElementKind kind() const { return kind_; }
  double shape() const { return shape_; }
  const Interval& domain() const { return domain_; }
  std::size_t size() const { return centers_.size(); }
  const std::vector<double>& centers() const { return centers_; }
  FiniteElement element(std::size_t i) const {
    return FiniteElement{kind_, centers_[i], shape_};
  }

 private:
  ElementKind kind_;
  double shape_;
  std::vector<double> centers_;
  Interval domain_;
};

namespace detail {

/// Centers of the regular grid (Z dx) intersected with [-h, h].
inline std::vector<double> regular_centers(double dx, double half_width) {
  if (!(dx > 0)) throw std::invalid_argument("basis grid: dx must be > 0");
  double eps = 1e-9 * std::max(1.0, std::abs(half_width));
  auto kmin = static_cast<long long>(std::ceil((-half_width - eps) / dx));
  auto kmax = static_cast<long long>(std::floor((half_width + eps) / dx));
  if (kmin > kmax)
    throw std::invalid_argument("basis grid: no centers in range");
  std::vector<double> centers;
  centers.reserve(static_cast<std::size_t>(kmax - kmin + 1));
  for (long long k = kmin; k <= kmax; ++k)
    centers.push_back(static_cast<double>(k) * dx);
  return centers;
}

}  // namespace detail

/** Trial basis: quadratic elements of curvature c centered on
    (Z dx) intersected with [-(b + cL), b + cL], where L bounds the
    Lipschitz constant of the functions to be represented on [-b, b].
    The extension lets the max-plus hull osculate slopes up to L at the
    domain boundary. The stored domain is [-b, b]. */
inline ElementBasis build_primal_basis(ElementKind kind, double c, double dx,
                                       double b, double lipschitz_bound) {
  if (kind != ElementKind::quadratic)
    throw std::invalid_argument("build_primal_basis: trial kind must be quadratic");
  if (!(c > 0) || !(b > 0) || !(lipschitz_bound >= 0))
    throw std::invalid_argument("build_primal_basis: bad parameters");
  return ElementBasis(kind, c, detail::regular_centers(dx, b + c * lipschitz_bound),
                      Interval{-b, b});
}

/** Test basis: elements centered on (Z dx) intersected with [-b, b].
    Lipschitz tests take shape = slope A (keep A at least the Lipschitz
    bound of the value function); quadratic tests take shape = c. */
inline ElementBasis build_test_basis(ElementKind kind, double shape, double dx,
                                     double b) {
  if (!(shape > 0) || !(b > 0))
    throw std::invalid_argument("build_test_basis: bad parameters");
  return ElementBasis(kind, shape, detail::regular_centers(dx, b),
                      Interval{-b, b});
}

/// v_h(x_k) = max_i (w_i(x_k) + lambda_i) for each grid node.
inline GridFunction reconstruct(const ElementBasis& w,
                                const MaxPlusVector& lambda, GridSpec grid) {
  if (lambda.size() != w.size())
    throw std::invalid_argument("reconstruct: coefficient count != basis size");
  MaxPlusVector out(grid.n);
  for (std::size_t k = 0; k < grid.n; ++k) {
    double xk = grid.node(k);
    MaxPlusScalar acc = MaxPlusScalar::bottom();
    for (std::size_t i = 0; i < w.size(); ++i)
      acc = oplus(acc, otimes(MaxPlusScalar(w.element(i).eval(xk)), lambda[i]));
    out[k] = acc;
  }
  return GridFunction(grid, std::move(out));
}

/// n x p matrix whose column i samples w_i on the grid. Bridges symbolic
/// bases to the kernel operators of the projector layer.
inline MaxPlusMatrix sample_basis(const ElementBasis& w, GridSpec grid) {
  MaxPlusMatrix m(grid.n, w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    FiniteElement e = w.element(i);
    for (std::size_t k = 0; k < grid.n; ++k)
      m(k, i) = MaxPlusScalar(e.eval(grid.node(k)));
  }
  return m;
}

}  // namespace mpfem

#endif  // MPFEM_ELEMENTS_HPP
