#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "curvlab/common.hpp"
#include "curvlab/point_model.hpp"

namespace curvlab {

using IndexTuple = std::vector<uint8_t>;

inline constexpr size_t kDefaultCacheLimit = size_t{1} << 22;

// Curvature components R^l_{ijk}, meaning R(e_i,e_j)e_k = sum_l R^l_{ijk} e_l.
class CurvatureOperator {
 public:
  // Gauss-equation curvature of a point model:
  //   R^l_{ijk} = h_{jk} S^l_i - h_{ik} S^l_j
  static CurvatureOperator gauss(const PointModel& m) {
    CurvatureOperator R;
    R.dim_ = m.dim;
    R.comp_.assign(m.dim * m.dim * m.dim * m.dim, Scalar::zero_like(m.S.prototype()));
    for (size_t i = 0; i < m.dim; ++i)
      for (size_t j = 0; j < m.dim; ++j)
        for (size_t k = 0; k < m.dim; ++k)
          for (size_t l = 0; l < m.dim; ++l)
            R.comp_[R.flat(i, j, k, l)] =
                m.h.at(j, k) * m.S.at(l, i) - m.h.at(i, k) * m.S.at(l, j);
    R.build_sparsity();
    return R;
  }

  // comp laid out as [((i*dim + j)*dim + k)*dim + l]
  static CurvatureOperator from_components(size_t dim, std::vector<Scalar> comp) {
    if (comp.size() != dim * dim * dim * dim)
      throw DomainError("curvature component array has wrong size");
    CurvatureOperator R;
    R.dim_ = dim;
    R.comp_ = std::move(comp);
    R.build_sparsity();
    return R;
  }

  size_t dim() const { return dim_; }

  const Scalar& coeff(size_t i, size_t j, size_t k, size_t l) const {
    return comp_[flat(i, j, k, l)];
  }

  // (l, R^l_{ijk}) pairs with structurally nonzero coefficient
  const std::vector<std::pair<uint8_t, Scalar>>& nonzero(size_t i, size_t j,
                                                         size_t k) const {
    return nz_[(i * dim_ + j) * dim_ + k];
  }

  bool is_zero() const {
    for (const auto& entries : nz_)
      if (!entries.empty()) return false;
    return true;
  }

 private:
  size_t flat(size_t i, size_t j, size_t k, size_t l) const {
    return ((i * dim_ + j) * dim_ + k) * dim_ + l;
  }

  void build_sparsity() {
    nz_.assign(dim_ * dim_ * dim_, {});
    for (size_t i = 0; i < dim_; ++i)
      for (size_t j = 0; j < dim_; ++j)
        for (size_t k = 0; k < dim_; ++k) {
          auto& list = nz_[(i * dim_ + j) * dim_ + k];
          for (size_t l = 0; l < dim_; ++l) {
            const Scalar& c = comp_[flat(i, j, k, l)];
            const bool zero =
                c.kind() == ScalarKind::float64 ? c.flt() == 0.0 : c.is_zero();
            if (!zero) list.emplace_back(static_cast<uint8_t>(l), c);
          }
        }
  }

  size_t dim_ = 0;
  std::vector<Scalar> comp_;
  std::vector<std::vector<std::pair<uint8_t, Scalar>>> nz_;
};

// Dense (0,p)-tensor, row-major components.
class DenseTensor {
 public:
  DenseTensor(size_t dim, size_t arity, const Scalar& fill = Scalar(Rational(0)))
      : dim_(dim), arity_(arity) {
    size_t n = 1;
    for (size_t i = 0; i < arity; ++i) n *= dim;
    data_.assign(n, fill);
  }

  static DenseTensor from_matrix(const Matrix& m) {
    DenseTensor t(m.rows(), 2, Scalar::zero_like(m.prototype()));
    for (size_t i = 0; i < m.rows(); ++i)
      for (size_t j = 0; j < m.cols(); ++j) t.at({static_cast<uint8_t>(i),
                                                  static_cast<uint8_t>(j)}) = m.at(i, j);
    return t;
  }

  size_t dim() const { return dim_; }
  size_t arity() const { return arity_; }
  size_t size() const { return data_.size(); }

  size_t flat_index(const IndexTuple& idx) const {
    if (idx.size() != arity_) throw DomainError("index arity mismatch");
    size_t f = 0;
    for (uint8_t v : idx) {
      if (v >= dim_) throw DomainError("basis index out of range");
      f = f * dim_ + v;
    }
    return f;
  }

  Scalar& at(const IndexTuple& idx) { return data_[flat_index(idx)]; }
  const Scalar& at(const IndexTuple& idx) const { return data_[flat_index(idx)]; }
  Scalar& flat(size_t f) { return data_[f]; }
  const Scalar& flat(size_t f) const { return data_[f]; }

  // Odometer increment; returns false after the last tuple.
  bool next_tuple(IndexTuple& idx) const {
    for (size_t pos = idx.size(); pos-- > 0;) {
      if (++idx[pos] < dim_) return true;
      idx[pos] = 0;
    }
    return false;
  }

 private:
  size_t dim_, arity_;
  std::vector<Scalar> data_;
};

// One curvature action:
//   (R.T)(e_a, e_b, e_{c_1},...,e_{c_p})
//     = -sum_{m=1..p} sum_l R^l_{a b c_m} T(e_{c_1},..,e_l,..,e_{c_p})
inline DenseTensor curvature_action(const CurvatureOperator& R, const DenseTensor& T) {
  if (T.arity() < 1) throw DomainError("curvature action needs arity >= 1");
  if (R.dim() != T.dim()) throw DomainError("curvature/tensor dimension mismatch");
  const size_t n = T.dim(), p = T.arity();
  const Scalar zero = Scalar::zero_like(T.flat(0));
  DenseTensor out(n, p + 2, zero);

  IndexTuple c(p, 0);
  bool more = true;
  while (more) {
    IndexTuple modified = c;
    for (size_t a = 0; a < n; ++a)
      for (size_t b = 0; b < n; ++b) {
        Scalar acc = zero;
        for (size_t m = 0; m < p; ++m) {
          const uint8_t saved = modified[m];
          for (const auto& [l, coeff] : R.nonzero(a, b, saved)) {
            modified[m] = l;
            acc -= coeff * T.at(modified);
          }
          modified[m] = saved;
        }
        IndexTuple full;
        full.reserve(p + 2);
        full.push_back(static_cast<uint8_t>(a));
        full.push_back(static_cast<uint8_t>(b));
        full.insert(full.end(), c.begin(), c.end());
        out.at(full) = acc;
      }
    more = T.next_tuple(c);
  }
  return out;
}

inline DenseTensor iterated_action(const CurvatureOperator& R, DenseTensor T, size_t k) {
  for (size_t step = 0; step < k; ++step) T = curvature_action(R, T);
  return T;
}

// Memoized component evaluator for R^m . omega, any m >= 0. Component tuples
// are 0-based basis indices of length 2m+2. Thread-safe; the memo is a pure
// cache (clearing it never changes a value).
class CurvatureActionCache {
 public:
  CurvatureActionCache(CurvatureOperator R, Matrix omega,
                       size_t cache_limit = kDefaultCacheLimit)
      : R_(std::move(R)),
        omega_(std::move(omega)),
        zero_(Scalar::zero_like(omega_.prototype())),
        cache_limit_(cache_limit == 0 ? 1 : cache_limit) {
    if (omega_.rows() != R_.dim() || omega_.cols() != R_.dim())
      throw DomainError("omega shape does not match curvature dimension");
  }

  const CurvatureOperator& curvature() const { return R_; }
  const Matrix& base() const { return omega_; }

  Scalar eval(const IndexTuple& idx) const {
    if (idx.size() < 2 || idx.size() % 2 != 0)
      throw DomainError("index arity mismatch");
    for (uint8_t v : idx)
      if (v >= R_.dim()) throw DomainError("basis index out of range");
    return eval_inner(idx);
  }

  void clear_memo() const {
    std::lock_guard<std::mutex> lock(mu_);
    memo_.clear();
  }

  size_t memo_size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return memo_.size();
  }

 private:
  Scalar eval_inner(const IndexTuple& t) const {
    if (t.size() == 2) return omega_.at(t[0], t[1]);

    const std::string key(t.begin(), t.end());
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = memo_.find(key);
      if (it != memo_.end()) return it->second;
    }

    const size_t a = t[0], b = t[1];
    Scalar acc = zero_;
    IndexTuple sub(t.begin() + 2, t.end());
    for (size_t pos = 0; pos < sub.size(); ++pos) {
      const uint8_t saved = sub[pos];
      for (const auto& [l, coeff] : R_.nonzero(a, b, saved)) {
        sub[pos] = l;
        acc -= coeff * eval_inner(sub);
      }
      sub[pos] = saved;
    }

    {
      std::lock_guard<std::mutex> lock(mu_);
      // bounded cache: wholesale clear on overflow, no mid-proof eviction
      if (memo_.size() >= cache_limit_) memo_.clear();
      memo_.emplace(key, acc);
    }
    return acc;
  }

  CurvatureOperator R_;
  Matrix omega_;
  Scalar zero_;
  size_t cache_limit_;
  mutable std::unordered_map<std::string, Scalar> memo_;
  mutable std::mutex mu_;
};

// Fixed-depth view of the iterated action R^depth . omega.
class LazyTensor {
 public:
  LazyTensor(std::shared_ptr<CurvatureActionCache> cache, size_t depth)
      : cache_(std::move(cache)), depth_(depth) {}

  size_t depth() const { return depth_; }
  size_t arity() const { return 2 * depth_ + 2; }
  const std::shared_ptr<CurvatureActionCache>& cache() const { return cache_; }

  Scalar eval(const IndexTuple& idx) const {
    if (idx.size() != arity()) throw DomainError("index arity mismatch");
    return cache_->eval(idx);
  }

 private:
  std::shared_ptr<CurvatureActionCache> cache_;
  size_t depth_;
};

inline LazyTensor lazy_rk(const CurvatureOperator& R, const Matrix& omega, size_t depth,
                          size_t cache_limit = kDefaultCacheLimit) {
  return LazyTensor(std::make_shared<CurvatureActionCache>(R, omega, cache_limit), depth);
}

}  // namespace curvlab
