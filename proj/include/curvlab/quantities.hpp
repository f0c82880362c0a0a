#pragma once

#include <memory>
#include <string>
#include <utility>

#include "curvlab/curvature.hpp"

namespace curvlab {

// The bookkeeping components of R^k . omega on the canonical basis. Basis
// arguments X, Y are 1-based (e_1..e_dim).
//
//   A_k = R^k w(e1,e4, e3,e4, [e3,e4 x (k-1)])
//   B_k = R^k w(e3,e4, e1,e4, [e3,e4 x (k-1)])
//   C_k = R^k w(e1,e3, e3,e4, [e3,e4 x (k-1)])
//   D_k = R^k w(e3,e4, e1,e3, [e3,e4 x (k-1)])
//   E_k^i(X,Y)     = R^k w with (X,Y) in pair slot i of k+1 pairs, others (e3,e4)
//   T^k_{p,q,r}(X,Y) = R^k w([e3,e4 x p], e1,X, [e3,e4 x q], e1,Y, [e3,e4 x r]),
//                      p+q+r = k-1
//   U^k_{p,q,r}(X,Y)    = -l1 h(X,e3) T^k_{p,q,r}(e4,Y) + l1 h(X,e4) T^k_{p,q,r}(e3,Y)
//   Uhat^k_{p,q,r}(X,Y) = -l1 h(X,e3) T^k_{p,q,r}(Y,e4) + l1 h(X,e4) T^k_{p,q,r}(Y,e3)
struct NamedQuantity {
  enum class Tag { A, B, C, D, E, T, U, Uhat };

  Tag tag = Tag::A;
  unsigned k = 1;
  unsigned i = 1;               // E only
  unsigned p = 0, q = 0, r = 0; // T, U, Uhat only
  size_t X = 3, Y = 4;          // E, T, U, Uhat only

  static NamedQuantity a(unsigned k) { return {Tag::A, k}; }
  static NamedQuantity b(unsigned k) { return {Tag::B, k}; }
  static NamedQuantity c(unsigned k) { return {Tag::C, k}; }
  static NamedQuantity d(unsigned k) { return {Tag::D, k}; }
  static NamedQuantity e(unsigned k, unsigned i, size_t X, size_t Y) {
    NamedQuantity q{Tag::E, k};
    q.i = i;
    q.X = X;
    q.Y = Y;
    return q;
  }
  static NamedQuantity t(unsigned k, unsigned p, unsigned q, unsigned r, size_t X,
                         size_t Y) {
    NamedQuantity n{Tag::T, k};
    n.p = p;
    n.q = q;
    n.r = r;
    n.X = X;
    n.Y = Y;
    return n;
  }
  static NamedQuantity u(unsigned k, unsigned p, unsigned q, unsigned r, size_t X,
                         size_t Y) {
    NamedQuantity n = t(k, p, q, r, X, Y);
    n.tag = Tag::U;
    return n;
  }
  static NamedQuantity uhat(unsigned k, unsigned p, unsigned q, unsigned r, size_t X,
                            size_t Y) {
    NamedQuantity n = t(k, p, q, r, X, Y);
    n.tag = Tag::Uhat;
    return n;
  }
};

inline const char* tag_name(NamedQuantity::Tag t) {
  switch (t) {
    case NamedQuantity::Tag::A: return "A";
    case NamedQuantity::Tag::B: return "B";
    case NamedQuantity::Tag::C: return "C";
    case NamedQuantity::Tag::D: return "D";
    case NamedQuantity::Tag::E: return "E";
    case NamedQuantity::Tag::T: return "T";
    case NamedQuantity::Tag::U: return "U";
    case NamedQuantity::Tag::Uhat: return "Uhat";
  }
  return "?";
}

namespace detail {

inline void append_pairs(IndexTuple& t, size_t count, uint8_t a, uint8_t b) {
  for (size_t i = 0; i < count; ++i) {
    t.push_back(a);
    t.push_back(b);
  }
}

}  // namespace detail

// Defining index tuple (0-based) of a tuple-backed quantity. U/Uhat have no
// single tuple; they are linear combinations of T components.
inline IndexTuple named_quantity_tuple(const NamedQuantity& q, size_t dim) {
  using Tag = NamedQuantity::Tag;
  auto check = [&](bool ok) {
    if (!ok) throw DomainError("invalid quantity parameters");
  };
  check(q.k >= 1);
  check(dim >= 4);
  IndexTuple t;
  t.reserve(2 * q.k + 2);
  switch (q.tag) {
    case Tag::A:
      t = {0, 3};
      detail::append_pairs(t, q.k, 2, 3);
      return t;
    case Tag::B:
      t = {2, 3, 0, 3};
      detail::append_pairs(t, q.k - 1, 2, 3);
      return t;
    case Tag::C:
      t = {0, 2};
      detail::append_pairs(t, q.k, 2, 3);
      return t;
    case Tag::D:
      t = {2, 3, 0, 2};
      detail::append_pairs(t, q.k - 1, 2, 3);
      return t;
    case Tag::E: {
      check(q.i >= 1 && q.i <= q.k + 1);
      check(q.X >= 1 && q.X <= dim && q.Y >= 1 && q.Y <= dim);
      for (unsigned pair = 1; pair <= q.k + 1; ++pair) {
        if (pair == q.i) {
          t.push_back(static_cast<uint8_t>(q.X - 1));
          t.push_back(static_cast<uint8_t>(q.Y - 1));
        } else {
          t.push_back(2);
          t.push_back(3);
        }
      }
      return t;
    }
    case Tag::T: {
      check(q.p + q.q + q.r == q.k - 1);
      check(q.X >= 1 && q.X <= dim && q.Y >= 1 && q.Y <= dim);
      detail::append_pairs(t, q.p, 2, 3);
      t.push_back(0);
      t.push_back(static_cast<uint8_t>(q.X - 1));
      detail::append_pairs(t, q.q, 2, 3);
      t.push_back(0);
      t.push_back(static_cast<uint8_t>(q.Y - 1));
      detail::append_pairs(t, q.r, 2, 3);
      return t;
    }
    case Tag::U:
    case Tag::Uhat:
      throw DomainError("U quantities have no defining tuple; evaluate them");
  }
  throw DomainError("invalid quantity parameters");
}

// Evaluates named quantities against one model, sharing a memoized component
// cache across calls.
class QuantityEvaluator {
 public:
  explicit QuantityEvaluator(const PointModel& model,
                             size_t cache_limit = kDefaultCacheLimit)
      : model_(model),
        cache_(std::make_shared<CurvatureActionCache>(CurvatureOperator::gauss(model),
                                                      model.omega, cache_limit)) {}

  const PointModel& model() const { return model_; }
  const std::shared_ptr<CurvatureActionCache>& cache() const { return cache_; }

  Scalar component(const IndexTuple& zero_based) const { return cache_->eval(zero_based); }

  Scalar eval(const NamedQuantity& q) const {
    using Tag = NamedQuantity::Tag;
    if (q.tag == Tag::U || q.tag == Tag::Uhat) {
      if (q.p + q.q + q.r != q.k - 1 || q.X < 1 || q.X > model_.dim || q.Y < 1 ||
          q.Y > model_.dim)
        throw DomainError("invalid quantity parameters");
      const Scalar l1 = model_.S.at(0, 0);
      const Scalar hx3 = model_.h.at(q.X - 1, 2);
      const Scalar hx4 = model_.h.at(q.X - 1, 3);
      NamedQuantity first = NamedQuantity::t(q.k, q.p, q.q, q.r, 4, q.Y);
      NamedQuantity second = NamedQuantity::t(q.k, q.p, q.q, q.r, 3, q.Y);
      if (q.tag == Tag::Uhat) {
        first = NamedQuantity::t(q.k, q.p, q.q, q.r, q.Y, 4);
        second = NamedQuantity::t(q.k, q.p, q.q, q.r, q.Y, 3);
      }
      return -(l1 * hx3 * eval(first)) + l1 * hx4 * eval(second);
    }
    return cache_->eval(named_quantity_tuple(q, model_.dim));
  }

 private:
  PointModel model_;
  std::shared_ptr<CurvatureActionCache> cache_;
};

}  // namespace curvlab
