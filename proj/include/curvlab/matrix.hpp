#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <utility>
#include <vector>

#include "curvlab/common.hpp"
#include "curvlab/scalar.hpp"

namespace curvlab {

// Dense matrix of Scalars. Entries of one matrix may mix rational and
// polynomial variants (they promote); float entries must not be mixed with
// exact ones.
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(size_t rows, size_t cols, const Scalar& fill = Scalar(Rational(0)))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(size_t n, const Scalar& one = Scalar(Rational(1))) {
    Matrix m(n, n, Scalar::zero_like(one));
    for (size_t i = 0; i < n; ++i) m.at(i, i) = one;
    return m;
  }

  static Matrix diagonal(const std::vector<Scalar>& d) {
    Matrix m(d.size(), d.size(), d.empty() ? Scalar() : Scalar::zero_like(d[0]));
    for (size_t i = 0; i < d.size(); ++i) m.at(i, i) = d[i];
    return m;
  }

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  Scalar& at(size_t i, size_t j) { return data_[i * cols_ + j]; }
  const Scalar& at(size_t i, size_t j) const { return data_[i * cols_ + j]; }
  Scalar& operator()(size_t i, size_t j) { return at(i, j); }
  const Scalar& operator()(size_t i, size_t j) const { return at(i, j); }

  const Scalar& prototype() const {
    if (data_.empty()) throw DomainError("empty matrix has no prototype entry");
    return data_[0];
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_, Scalar::zero_like(prototype()));
    for (size_t i = 0; i < rows_; ++i)
      for (size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
    return t;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw DomainError("matrix product shape mismatch");
    Matrix out(a.rows_, b.cols_, Scalar::zero_like(a.prototype()));
    for (size_t i = 0; i < a.rows_; ++i)
      for (size_t j = 0; j < b.cols_; ++j) {
        Scalar acc = Scalar::zero_like(a.at(i, 0));
        for (size_t k = 0; k < a.cols_; ++k) acc += a.at(i, k) * b.at(k, j);
        out.at(i, j) = acc;
      }
    return out;
  }

  friend Matrix operator+(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
      throw DomainError("matrix sum shape mismatch");
    Matrix out = a;
    for (size_t i = 0; i < a.data_.size(); ++i) out.data_[i] += b.data_[i];
    return out;
  }

  friend Matrix operator-(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
      throw DomainError("matrix difference shape mismatch");
    Matrix out = a;
    for (size_t i = 0; i < a.data_.size(); ++i) out.data_[i] -= b.data_[i];
    return out;
  }

  friend Matrix operator*(const Scalar& c, const Matrix& m) {
    Matrix out = m;
    for (auto& e : out.data_) e = c * e;
    return out;
  }

  bool is_zero(double tol = kDefaultTol) const {
    for (const auto& e : data_)
      if (!e.is_zero(tol)) return false;
    return true;
  }

  bool equals(const Matrix& o, double tol = kDefaultTol) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) return false;
    return (*this - o).is_zero(tol);
  }

  Matrix submatrix_excluding(size_t row, size_t col) const {
    Matrix out(rows_ - 1, cols_ - 1, Scalar::zero_like(prototype()));
    for (size_t i = 0, oi = 0; i < rows_; ++i) {
      if (i == row) continue;
      for (size_t j = 0, oj = 0; j < cols_; ++j) {
        if (j == col) continue;
        out.at(oi, oj) = at(i, j);
        ++oj;
      }
      ++oi;
    }
    return out;
  }

  // Division-free determinant: Laplace expansion memoized over column
  // subsets, exact over any coefficient ring.
  Scalar determinant() const {
    if (!is_square()) throw DomainError("determinant of non-square matrix");
    if (rows_ == 0) return Scalar(Rational(1));
    if (rows_ > 63) throw DomainError("determinant: dimension too large");
    std::unordered_map<uint64_t, Scalar> memo;
    const uint64_t full = (rows_ == 64) ? ~uint64_t{0} : ((uint64_t{1} << rows_) - 1);
    return det_masked(full, memo);
  }

  // Inverse over the rational/float field, or via adjugate when entries are
  // polynomials and the determinant is an invertible (nonzero constant)
  // polynomial.
  Matrix inverse() const;

  int rank(double tol = kDefaultTol) const;
  std::pair<int, int> signature(double tol = kDefaultTol) const;

  bool has_polynomial_entry() const {
    for (const auto& e : data_)
      if (e.kind() == ScalarKind::polynomial) return true;
    return false;
  }

  bool has_float_entry() const {
    for (const auto& e : data_)
      if (e.kind() == ScalarKind::float64) return true;
    return false;
  }

 private:
  Scalar det_masked(uint64_t mask, std::unordered_map<uint64_t, Scalar>& memo) const {
    if (mask == 0) return Scalar::one_like(prototype());
    auto it = memo.find(mask);
    if (it != memo.end()) return it->second;
    const size_t row = rows_ - static_cast<size_t>(__builtin_popcountll(mask));
    Scalar acc = Scalar::zero_like(prototype());
    int parity = 0;
    for (size_t j = 0; j < cols_; ++j) {
      if (!(mask & (uint64_t{1} << j))) continue;
      const Scalar& entry = at(row, j);
      const bool skip = entry.kind() == ScalarKind::float64 ? entry.flt() == 0.0
                                                            : entry.is_zero();
      if (!skip) {
        Scalar term = entry * det_masked(mask & ~(uint64_t{1} << j), memo);
        acc = (parity % 2 == 0) ? acc + term : acc - term;
      }
      ++parity;
    }
    memo.emplace(mask, acc);
    return acc;
  }

  size_t rows_, cols_;
  std::vector<Scalar> data_;
};

inline Matrix Matrix::inverse() const {
  if (!is_square()) throw DomainError("inverse of non-square matrix");
  const size_t n = rows_;
  if (has_polynomial_entry()) {
    const Scalar det = determinant();
    Rational det_value(0);
    if (det.kind() == ScalarKind::rational) {
      det_value = det.rat();
    } else if (det.kind() == ScalarKind::polynomial && det.poly().is_constant()) {
      det_value = det.poly().constant_term();
    } else {
      throw DomainError("polynomial matrix inverse needs a constant nonzero determinant");
    }
    if (det_value.is_zero()) throw DomainError("matrix is singular");
    const Scalar inv_det = Scalar(Rational(1) / det_value);
    Matrix out(n, n, Scalar::zero_like(prototype()));
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) {
        Scalar minor = submatrix_excluding(j, i).determinant();
        Scalar cof = ((i + j) % 2 == 0) ? minor : -minor;
        out.at(i, j) = inv_det * cof;
      }
    return out;
  }

  const bool fl = has_float_entry();
  Matrix a = *this;
  Matrix inv = Matrix::identity(n, Scalar::one_like(prototype()));
  for (size_t p = 0; p < n; ++p) {
    size_t pivot = n;
    if (fl) {
      double best = 0.0;
      for (size_t r = p; r < n; ++r) {
        const double v = std::fabs(a.at(r, p).to_double());
        if (v > best) { best = v; pivot = r; }
      }
      if (best == 0.0) pivot = n;
    } else {
      for (size_t r = p; r < n; ++r)
        if (!a.at(r, p).is_zero()) { pivot = r; break; }
    }
    if (pivot == n) throw DomainError("matrix is singular");
    for (size_t j = 0; j < n; ++j) {
      std::swap(a.at(p, j), a.at(pivot, j));
      std::swap(inv.at(p, j), inv.at(pivot, j));
    }
    const Scalar d = a.at(p, p);
    for (size_t j = 0; j < n; ++j) {
      a.at(p, j) = field_div(a.at(p, j), d);
      inv.at(p, j) = field_div(inv.at(p, j), d);
    }
    for (size_t r = 0; r < n; ++r) {
      if (r == p) continue;
      const Scalar f = a.at(r, p);
      const bool skip = f.kind() == ScalarKind::float64 ? f.flt() == 0.0 : f.is_zero();
      if (skip) continue;
      for (size_t j = 0; j < n; ++j) {
        a.at(r, j) -= f * a.at(p, j);
        inv.at(r, j) -= f * inv.at(p, j);
      }
    }
  }
  return inv;
}

namespace detail {

// Unreduced fraction of ring elements; enough for exact elimination without
// polynomial division.
struct Frac {
  Scalar num, den;
  bool is_zero() const { return num.is_zero(); }
};

inline Frac frac_sub(const Frac& a, const Frac& b) {
  return {a.num * b.den - b.num * a.den, a.den * b.den};
}
inline Frac frac_mul(const Frac& a, const Frac& b) {
  return {a.num * b.num, a.den * b.den};
}
inline Frac frac_div(const Frac& a, const Frac& b) {
  return {a.num * b.den, a.den * b.num};
}

}  // namespace detail

struct RankInfo {
  int generic_rank = 0;
  std::vector<size_t> pivot_rows, pivot_cols;
  // determinants of the leading t x t pivot submatrices, t = 1..rank; a point
  // where one vanishes may have lower rank than the generic one
  std::vector<Scalar> pivot_minors;
};

// Rank by exact Gaussian elimination: straight field elimination for
// rational/float entries, fraction-field (num/den pairs) for polynomial
// entries, which yields the generic rank.
inline RankInfo rank_info(const Matrix& m, double tol = kDefaultTol) {
  RankInfo info;
  const size_t rows = m.rows(), cols = m.cols();
  if (rows == 0 || cols == 0) return info;

  std::vector<detail::Frac> a(rows * cols);
  const Scalar one = Scalar::one_like(m.prototype());
  for (size_t i = 0; i < rows; ++i)
    for (size_t j = 0; j < cols; ++j) a[i * cols + j] = {m.at(i, j), one};
  const bool fl = m.has_float_entry();

  auto entry_zero = [&](const detail::Frac& f) {
    if (!fl) return f.is_zero();
    return std::fabs(f.num.to_double()) <= tol * std::max(1.0, std::fabs(f.den.to_double()));
  };

  std::vector<size_t> perm(rows);
  for (size_t i = 0; i < rows; ++i) perm[i] = i;

  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t pivot = rows;
    if (fl) {
      double best = 0.0;
      for (size_t i = r; i < rows; ++i) {
        const detail::Frac& f = a[i * cols + c];
        const double v = std::fabs(f.num.to_double()) /
                         std::max(1.0, std::fabs(f.den.to_double()));
        if (!entry_zero(f) && v > best) { best = v; pivot = i; }
      }
    } else {
      for (size_t i = r; i < rows; ++i)
        if (!a[i * cols + c].is_zero()) { pivot = i; break; }
    }
    if (pivot == rows) continue;
    if (pivot != r) {
      for (size_t j = 0; j < cols; ++j) std::swap(a[r * cols + j], a[pivot * cols + j]);
      std::swap(perm[r], perm[pivot]);
    }
    info.pivot_rows.push_back(perm[r]);
    info.pivot_cols.push_back(c);
    const detail::Frac p = a[r * cols + c];
    for (size_t i = r + 1; i < rows; ++i) {
      const detail::Frac f = a[i * cols + c];
      if (entry_zero(f)) continue;
      const detail::Frac ratio = detail::frac_div(f, p);
      for (size_t j = c; j < cols; ++j) {
        a[i * cols + j] =
            detail::frac_sub(a[i * cols + j], detail::frac_mul(ratio, a[r * cols + j]));
      }
    }
    ++r;
  }
  info.generic_rank = static_cast<int>(r);

  // pivot minors straight from the input matrix, division-free
  if (m.has_polynomial_entry()) {
    for (size_t t = 1; t <= info.pivot_cols.size(); ++t) {
      Matrix sub(t, t, Scalar::zero_like(m.prototype()));
      for (size_t i = 0; i < t; ++i)
        for (size_t j = 0; j < t; ++j)
          sub.at(i, j) = m.at(info.pivot_rows[i], info.pivot_cols[j]);
      info.pivot_minors.push_back(sub.determinant());
    }
  }
  return info;
}

inline int Matrix::rank(double tol) const { return rank_info(*this, tol).generic_rank; }

// Rank after substituting values for every polynomial variable; the generic
// rank bounds this from above.
inline int rank_at(const Matrix& m, const std::map<std::string, Rational>& point,
                   double tol = kDefaultTol) {
  Matrix numeric(m.rows(), m.cols());
  for (size_t i = 0; i < m.rows(); ++i)
    for (size_t j = 0; j < m.cols(); ++j) numeric.at(i, j) = m.at(i, j).evaluate(point);
  return numeric.rank(tol);
}

// Sylvester signature of a symmetric matrix with numeric entries, by
// simultaneous row/column congruence reduction. No eigenvalues involved.
inline std::pair<int, int> Matrix::signature(double tol) const {
  if (!is_square()) throw DomainError("signature of non-square matrix");
  if (has_polynomial_entry())
    throw DomainError("signature requires numeric entries; evaluate symbolic forms first");
  if (!(*this - transpose()).is_zero(tol))
    throw DomainError("signature requires a symmetric matrix");

  const size_t n = rows_;
  Matrix a = *this;
  const bool fl = has_float_entry();
  auto zero = [&](const Scalar& s) { return fl ? std::fabs(s.to_double()) <= tol : s.is_zero(); };

  int pos = 0, neg = 0;
  for (size_t p = 0; p < n; ++p) {
    if (zero(a.at(p, p))) {
      size_t q = n;
      for (size_t r = p + 1; r < n; ++r)
        if (!zero(a.at(r, r))) { q = r; break; }
      if (q < n) {
        for (size_t j = 0; j < n; ++j) std::swap(a.at(p, j), a.at(q, j));
        for (size_t i = 0; i < n; ++i) std::swap(a.at(i, p), a.at(i, q));
      } else {
        for (size_t r = p + 1; r < n; ++r)
          if (!zero(a.at(p, r))) { q = r; break; }
        if (q == n) throw DomainError("signature undefined: degenerate form");
        // a_pp = a_qq = 0, a_pq != 0: make the pivot nonzero congruently
        for (size_t j = 0; j < n; ++j) a.at(p, j) += a.at(q, j);
        for (size_t i = 0; i < n; ++i) a.at(i, p) += a.at(i, q);
      }
    }
    const Scalar d = a.at(p, p);
    for (size_t r = p + 1; r < n; ++r) {
      if (zero(a.at(r, p))) continue;
      const Scalar f = field_div(a.at(r, p), d);
      for (size_t j = 0; j < n; ++j) a.at(r, j) -= f * a.at(p, j);
      for (size_t i = 0; i < n; ++i) a.at(i, r) -= f * a.at(i, p);
    }
    if (a.at(p, p).to_double() > 0)
      ++pos;
    else
      ++neg;
  }
  return {pos, neg};
}

}  // namespace curvlab
