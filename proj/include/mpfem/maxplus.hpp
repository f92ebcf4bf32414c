#ifndef MPFEM_MAXPLUS_HPP
#define MPFEM_MAXPLUS_HPP

#include <cassert>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <stdexcept>
#include <vector>

namespace mpfem {

/** Element of the completed max-plus semiring: the reals together with
    -oo and +oo, under (oplus, otimes) = (max, +).

    Conventions, applied by every operation in this header:
      - -oo is neutral for oplus and absorbing for otimes,
        so (-oo) otimes (+oo) = -oo;
      - residual(a, b) = sup{ l : a + l <= b }, where +oo is absorbing
        for the addition, never the IEEE sum of two infinities.
    All special cases are branched explicitly; no operation can produce
    a NaN from non-NaN inputs. */
class MaxPlusScalar {
 public:
  constexpr MaxPlusScalar() : v_(-inf_) {}
  constexpr explicit MaxPlusScalar(double v) : v_(v) { assert(v == v); }

  /// -oo, the oplus-neutral (bottom) element.
  static constexpr MaxPlusScalar bottom() { return MaxPlusScalar(-inf_); }
  /// +oo, the top element of the completed semiring.
  static constexpr MaxPlusScalar top() { return MaxPlusScalar(inf_); }
  /// 0, the otimes-neutral element.
  static constexpr MaxPlusScalar unit() { return MaxPlusScalar(0.0); }

  constexpr double value() const { return v_; }
  constexpr bool is_bottom() const { return v_ == -inf_; }
  constexpr bool is_top() const { return v_ == inf_; }
  constexpr bool is_finite() const { return !is_bottom() && !is_top(); }

  friend constexpr auto operator<=>(const MaxPlusScalar&,
                                    const MaxPlusScalar&) = default;

 private:
  static constexpr double inf_ = std::numeric_limits<double>::infinity();
  double v_;
};

/// a oplus b = max(a, b).
constexpr MaxPlusScalar oplus(MaxPlusScalar a, MaxPlusScalar b) {
  return a.value() >= b.value() ? a : b;
}

/// The dual of oplus: min(a, b). Used by residuation formulas.
constexpr MaxPlusScalar meet(MaxPlusScalar a, MaxPlusScalar b) {
  return a.value() <= b.value() ? a : b;
}

/// a otimes b = a + b, with -oo absorbing.
constexpr MaxPlusScalar otimes(MaxPlusScalar a, MaxPlusScalar b) {
  if (a.is_bottom() || b.is_bottom()) return MaxPlusScalar::bottom();
  if (a.is_top() || b.is_top()) return MaxPlusScalar::top();
  return MaxPlusScalar(a.value() + b.value());
}

/** a \ b = sup{ l : a otimes l <= b }.

    Case table:
      a = -oo            -> +oo   (no constraint)
      a = +oo, b = +oo   -> +oo
      a = +oo, b < +oo   -> -oo   (only l = -oo keeps a otimes l small)
      a finite, b = -oo  -> -oo
      a finite, b = +oo  -> +oo
      both finite        -> b - a */
constexpr MaxPlusScalar residual(MaxPlusScalar a, MaxPlusScalar b) {
  if (a.is_bottom()) return MaxPlusScalar::top();
  if (a.is_top())
    return b.is_top() ? MaxPlusScalar::top() : MaxPlusScalar::bottom();
  if (b.is_bottom()) return MaxPlusScalar::bottom();
  if (b.is_top()) return MaxPlusScalar::top();
  return MaxPlusScalar(b.value() - a.value());
}

/** Fixed-length coefficient vector over the completed max-plus semiring.
    Entries default to bottom. */
class MaxPlusVector {
 public:
  MaxPlusVector() = default;
  explicit MaxPlusVector(std::size_t n,
                         MaxPlusScalar fill = MaxPlusScalar::bottom())
      : e_(n, fill) {}

  static MaxPlusVector from(std::initializer_list<double> xs) {
    MaxPlusVector v(xs.size());
    std::size_t i = 0;
    for (double x : xs) v.e_[i++] = MaxPlusScalar(x);
    return v;
  }

  std::size_t size() const { return e_.size(); }
  MaxPlusScalar& operator[](std::size_t i) { return e_[i]; }
  const MaxPlusScalar& operator[](std::size_t i) const { return e_[i]; }

  auto begin() const { return e_.begin(); }
  auto end() const { return e_.end(); }

  friend bool operator==(const MaxPlusVector&, const MaxPlusVector&) = default;

 private:
  std::vector<MaxPlusScalar> e_;
};

/// Entrywise order on vectors of equal length.
inline bool leq(const MaxPlusVector& a, const MaxPlusVector& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("leq: vector sizes differ");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(a[i] <= b[i])) return false;
  return true;
}

/** Dense row-major matrix (kernel) over the completed max-plus semiring. */
class MaxPlusMatrix {
 public:
  MaxPlusMatrix() : rows_(0), cols_(0) {}
  MaxPlusMatrix(std::size_t rows, std::size_t cols,
                MaxPlusScalar fill = MaxPlusScalar::bottom())
      : rows_(rows), cols_(cols), e_(rows * cols, fill) {}

  static MaxPlusMatrix from(
      std::initializer_list<std::initializer_list<double>> rows) {
    std::size_t r = rows.size();
    std::size_t c = r == 0 ? 0 : rows.begin()->size();
    MaxPlusMatrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != c)
        throw std::invalid_argument("MaxPlusMatrix::from: ragged rows");
      std::size_t j = 0;
      for (double x : row) m(i, j++) = MaxPlusScalar(x);
      ++i;
    }
    return m;
  }

  /// Tropical identity: unit on the diagonal, bottom elsewhere.
  static MaxPlusMatrix identity(std::size_t n) {
    MaxPlusMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = MaxPlusScalar::unit();
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  MaxPlusScalar& operator()(std::size_t r, std::size_t c) {
    return e_[r * cols_ + c];
  }
  const MaxPlusScalar& operator()(std::size_t r, std::size_t c) const {
    return e_[r * cols_ + c];
  }

  friend bool operator==(const MaxPlusMatrix&, const MaxPlusMatrix&) = default;

 private:
  std::size_t rows_, cols_;
  std::vector<MaxPlusScalar> e_;
};

/// (A x)_r = max_c (A_rc + x_c), with tropical conventions.
inline MaxPlusVector mat_vec(const MaxPlusMatrix& a, const MaxPlusVector& x) {
  if (a.cols() != x.size())
    throw std::invalid_argument("mat_vec: dimension mismatch");
  MaxPlusVector out(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    MaxPlusScalar acc = MaxPlusScalar::bottom();
    for (std::size_t c = 0; c < a.cols(); ++c)
      acc = oplus(acc, otimes(a(r, c), x[c]));
    out[r] = acc;
  }
  return out;
}

/** A \ v: the maximal l with A l <= v, i.e.
    (A \ v)_c = min_r residual(A_rc, v_r).
    Together with mat_vec this forms a Galois connection:
    mat_vec(A, l) <= v iff l <= residual_solve(A, v). */
inline MaxPlusVector residual_solve(const MaxPlusMatrix& a,
                                    const MaxPlusVector& v) {
  if (a.rows() != v.size())
    throw std::invalid_argument("residual_solve: dimension mismatch");
  MaxPlusVector out(a.cols(), MaxPlusScalar::top());
  for (std::size_t c = 0; c < a.cols(); ++c) {
    MaxPlusScalar acc = MaxPlusScalar::top();
    for (std::size_t r = 0; r < a.rows(); ++r)
      acc = meet(acc, residual(a(r, c), v[r]));
    out[c] = acc;
  }
  return out;
}

/// Columnwise residuation: (A \ C)_ck = min_r residual(A_rc, C_rk).
inline MaxPlusMatrix residual_solve(const MaxPlusMatrix& a,
                                    const MaxPlusMatrix& c) {
  if (a.rows() != c.rows())
    throw std::invalid_argument("residual_solve: row counts differ");
  MaxPlusMatrix out(a.cols(), c.cols(), MaxPlusScalar::top());
  for (std::size_t i = 0; i < a.cols(); ++i)
    for (std::size_t k = 0; k < c.cols(); ++k) {
      MaxPlusScalar acc = MaxPlusScalar::top();
      for (std::size_t r = 0; r < a.rows(); ++r)
        acc = meet(acc, residual(a(r, i), c(r, k)));
      out(i, k) = acc;
    }
  return out;
}

inline MaxPlusMatrix transpose(const MaxPlusMatrix& a) {
  MaxPlusMatrix out(a.cols(), a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out(c, r) = a(r, c);
  return out;
}

/// Tropical matrix product: (A B)_rc = max_m (A_rm + B_mc).
inline MaxPlusMatrix mat_mul(const MaxPlusMatrix& a, const MaxPlusMatrix& b) {
  if (a.cols() != b.rows())
    throw std::invalid_argument("mat_mul: dimension mismatch");
  MaxPlusMatrix out(a.rows(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < b.cols(); ++c) {
      MaxPlusScalar acc = MaxPlusScalar::bottom();
      for (std::size_t m = 0; m < a.cols(); ++m)
        acc = oplus(acc, otimes(a(r, m), b(m, c)));
      out(r, c) = acc;
    }
  return out;
}

inline bool leq(const MaxPlusMatrix& a, const MaxPlusMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("leq: matrix shapes differ");
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c)
      if (!(a(r, c) <= b(r, c))) return false;
  return true;
}

}  // namespace mpfem

#endif  // MPFEM_MAXPLUS_HPP
