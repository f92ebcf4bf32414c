#ifndef MPFEM_SEMIMODULE_HPP
#define MPFEM_SEMIMODULE_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>

#include "mpfem/maxplus.hpp"

namespace mpfem {

/// Closed interval of states.
struct Interval {
  double lo;
  double hi;

  double width() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
};

/** Uniform grid on an interval: nodes x_k = lo + k (hi-lo)/(n-1),
    k = 0..n-1. Endpoints are exact. */
struct GridSpec {
  Interval domain;
  std::size_t n;

  double step() const { return domain.width() / static_cast<double>(n - 1); }
  double node(std::size_t k) const {
    if (k == 0) return domain.lo;
    if (k == n - 1) return domain.hi;
    return domain.lo +
           static_cast<double>(k) * domain.width() / static_cast<double>(n - 1);
  }
};

/// Grid with roughly the given step, endpoints included.
inline GridSpec make_grid(Interval domain, double step) {
  if (!(domain.lo < domain.hi))
    throw std::invalid_argument("make_grid: empty interval");
  if (!(step > 0)) throw std::invalid_argument("make_grid: step must be > 0");
  auto n = static_cast<std::size_t>(std::llround(domain.width() / step)) + 1;
  if (n < 2) n = 2;
  return GridSpec{domain, n};
}

/** Sampling of a function X -> completed max-plus reals on a uniform grid.
    Stands in for elements of the function semimodule wherever a sup or inf
    over X has to be discretized. */
class GridFunction {
 public:
  GridFunction(GridSpec grid, MaxPlusVector values)
      : grid_(grid), values_(std::move(values)) {
    if (grid_.n < 2) throw std::invalid_argument("GridFunction: need n >= 2");
    if (!(grid_.domain.lo < grid_.domain.hi))
      throw std::invalid_argument("GridFunction: empty domain");
    if (values_.size() != grid_.n)
      throw std::invalid_argument("GridFunction: value count != grid size");
  }

  static GridFunction sample(GridSpec grid,
                             const std::function<MaxPlusScalar(double)>& f) {
    MaxPlusVector v(grid.n);
    for (std::size_t k = 0; k < grid.n; ++k) v[k] = f(grid.node(k));
    return GridFunction(grid, std::move(v));
  }

  static GridFunction sample_finite(GridSpec grid,
                                    const std::function<double(double)>& f) {
    MaxPlusVector v(grid.n);
    for (std::size_t k = 0; k < grid.n; ++k)
      v[k] = MaxPlusScalar(f(grid.node(k)));
    return GridFunction(grid, std::move(v));
  }

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return grid_.n; }
  double node(std::size_t k) const { return grid_.node(k); }
  const MaxPlusScalar& operator[](std::size_t k) const { return values_[k]; }
  MaxPlusScalar& operator[](std::size_t k) { return values_[k]; }
  const MaxPlusVector& values() const { return values_; }

 private:
  GridSpec grid_;
  MaxPlusVector values_;
};

inline bool leq(const GridFunction& a, const GridFunction& b) {
  return leq(a.values(), b.values());
}

/// sup_k |a_k - b_k|, where equal infinite values count as distance 0.
inline double sup_norm_diff(const GridFunction& a, const GridFunction& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("sup_norm_diff: grids differ");
  double m = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] == b[k]) continue;
    m = std::max(m, std::abs(a[k].value() - b[k].value()));
  }
  return m;
}

/** Canonical projector onto im B: u -> B (B \ u).
    The result is the maximal element of im B below u. Column j of B is
    the grid sampling of basis function j. */
inline GridFunction project_image(const MaxPlusMatrix& b,
                                  const GridFunction& u) {
  if (b.rows() != u.size())
    throw std::invalid_argument("project_image: dimension mismatch");
  return GridFunction(u.grid(), mat_vec(b, residual_solve(b, u.values())));
}

/** Dual projector through a kernel: u -> C# (C u).
    The result is the minimal element above u of the min-plus semimodule
    spanned by the negated rows of C. Row j of C is the grid sampling of
    test function j. */
inline GridFunction project_dual(const MaxPlusMatrix& c,
                                 const GridFunction& u) {
  if (c.cols() != u.size())
    throw std::invalid_argument("project_dual: dimension mismatch");
  return GridFunction(u.grid(), residual_solve(c, mat_vec(c, u.values())));
}

/** Projection onto im B parallel to ker C: u -> B ((C B) \ (C u)),
    the maximal y in im B with C y <= C u. Factors as
    project_image(B, project_dual(C, u)). */
inline GridFunction project_parallel(const MaxPlusMatrix& b,
                                     const MaxPlusMatrix& c,
                                     const GridFunction& u) {
  if (c.cols() != u.size() || b.rows() != c.cols())
    throw std::invalid_argument("project_parallel: dimension mismatch");
  MaxPlusMatrix cb = mat_mul(c, b);
  MaxPlusVector cu = mat_vec(c, u.values());
  return GridFunction(u.grid(), mat_vec(b, residual_solve(cb, cu)));
}

}  // namespace mpfem

#endif  // MPFEM_SEMIMODULE_HPP
