#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "curvlab/curvature.hpp"
#include "curvlab/report.hpp"

namespace curvlab {

// Polynomial coordinate-patch model: torsion-free connection coefficients
// Gamma^k_{ij}(x) and a (0,p)-tensor field, both truncated at a stated
// degree. Everything needed to compute covariant derivatives at the origin.
class JetModel {
 public:
  JetModel(size_t dim, unsigned order, std::vector<Polynomial> gamma,
           size_t field_arity, std::vector<Polynomial> field, uint64_t seed = 0)
      : dim_(dim),
        order_(order),
        ring_(gamma.empty() ? coordinate_ring(dim) : gamma.front().ring()),
        gamma_(std::move(gamma)),
        field_arity_(field_arity),
        field_(std::move(field)),
        seed_(seed) {
    if (dim_ == 0) throw InvariantViolation("jet dimension must be positive");
    if (gamma_.size() != dim_ * dim_ * dim_)
      throw InvariantViolation("gamma component count mismatch");
    if (field_.size() != pow_size(dim_, field_arity_))
      throw InvariantViolation("field component count mismatch");
    for (const auto& p : gamma_) {
      if (!p.ring()->same_as(*ring_)) throw KindError("jet polynomial ring mismatch");
      if (p.degree() > order_)
        throw InvariantViolation("gamma degree exceeds jet order");
    }
    for (const auto& p : field_) {
      if (!p.ring()->same_as(*ring_)) throw KindError("jet polynomial ring mismatch");
      if (p.degree() > order_)
        throw InvariantViolation("field degree exceeds jet order");
    }
    for (size_t k = 0; k < dim_; ++k)
      for (size_t i = 0; i < dim_; ++i)
        for (size_t j = i + 1; j < dim_; ++j)
          if (!(gamma_at(k, i, j) - gamma_at(k, j, i)).is_zero())
            throw InvariantViolation("connection has torsion");
  }

  static RingPtr coordinate_ring(size_t dim) {
    std::vector<std::string> names;
    names.reserve(dim);
    for (size_t i = 1; i <= dim; ++i) names.push_back("x" + std::to_string(i));
    return make_ring(std::move(names));
  }

  size_t dim() const { return dim_; }
  unsigned order() const { return order_; }
  const RingPtr& ring() const { return ring_; }
  size_t field_arity() const { return field_arity_; }
  uint64_t seed() const { return seed_; }

  const Polynomial& gamma_at(size_t k, size_t i, size_t j) const {
    return gamma_[(k * dim_ + i) * dim_ + j];
  }
  const std::vector<Polynomial>& gamma() const { return gamma_; }
  const std::vector<Polynomial>& field() const { return field_; }

  const Polynomial& field_at(const IndexTuple& idx) const {
    return field_[flat_field_index(idx)];
  }

  size_t flat_field_index(const IndexTuple& idx) const {
    if (idx.size() != field_arity_) throw DomainError("index arity mismatch");
    size_t f = 0;
    for (uint8_t v : idx) {
      if (v >= dim_) throw DomainError("coordinate index out of range");
      f = f * dim_ + v;
    }
    return f;
  }

  static size_t pow_size(size_t dim, size_t arity) {
    size_t n = 1;
    for (size_t i = 0; i < arity; ++i) n *= dim;
    return n;
  }

 private:
  size_t dim_;
  unsigned order_;
  RingPtr ring_;
  std::vector<Polynomial> gamma_;  // [(k*dim + i)*dim + j]
  size_t field_arity_;
  std::vector<Polynomial> field_;  // row-major over arity indices
  uint64_t seed_;
};

// One covariant derivative; the new first index is the derivative direction:
//   (nabla T)_{i, c_1..c_p} = d_i T_{c_1..c_p}
//                             - sum_j sum_l Gamma^l_{i c_j} T_{c_1..l..c_p}
// Accuracy drops one degree per application, so components are truncated.
inline JetModel covariant_derivative(const JetModel& jet, unsigned m = 1) {
  JetModel current = jet;
  for (unsigned step = 0; step < m; ++step) {
    if (current.order() == 0)
      throw DomainError("jet order too low for requested derivative count");
    const size_t n = current.dim();
    const size_t p = current.field_arity();
    const unsigned new_order = current.order() - 1;

    std::vector<Polynomial> out(JetModel::pow_size(n, p + 1), Polynomial(current.ring()));
    IndexTuple c(p, 0);
    bool more = true;
    const bool has_indices = p > 0;
    while (more) {
      const Polynomial& base = current.field_at(c);
      for (size_t i = 0; i < n; ++i) {
        Polynomial comp = base.derivative(i);
        IndexTuple shifted = c;
        for (size_t j = 0; j < p; ++j) {
          const uint8_t saved = shifted[j];
          for (size_t l = 0; l < n; ++l) {
            const Polynomial& g = current.gamma_at(l, i, saved);
            if (g.is_zero()) continue;
            shifted[j] = static_cast<uint8_t>(l);
            comp -= g * current.field_at(shifted);
          }
          shifted[j] = saved;
        }
        IndexTuple full;
        full.reserve(p + 1);
        full.push_back(static_cast<uint8_t>(i));
        full.insert(full.end(), c.begin(), c.end());
        size_t f = 0;
        for (uint8_t v : full) f = f * n + v;
        out[f] = comp.truncate_degree(new_order);
      }
      if (!has_indices) break;
      more = false;
      for (size_t pos = c.size(); pos-- > 0;) {
        if (++c[pos] < n) { more = true; break; }
        c[pos] = 0;
      }
    }

    std::vector<Polynomial> gamma_trunc;
    gamma_trunc.reserve(current.gamma().size());
    for (const auto& g : current.gamma()) gamma_trunc.push_back(g.truncate_degree(new_order));
    current = JetModel(n, new_order, std::move(gamma_trunc), p + 1, std::move(out),
                       current.seed());
  }
  return current;
}

// Curvature of the connection:
//   R^l_{ijk} = d_i Gamma^l_{jk} - d_j Gamma^l_{ik}
//               + sum_m (Gamma^l_{im} Gamma^m_{jk} - Gamma^l_{jm} Gamma^m_{ik})
// laid out [((i*n + j)*n + k)*n + l], truncated at order-1.
inline std::vector<Polynomial> connection_curvature(const JetModel& jet) {
  if (jet.order() == 0) throw DomainError("jet order too low for curvature");
  const size_t n = jet.dim();
  const unsigned trunc = jet.order() - 1;
  std::vector<Polynomial> R(n * n * n * n, Polynomial(jet.ring()));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      for (size_t k = 0; k < n; ++k)
        for (size_t l = 0; l < n; ++l) {
          Polynomial acc = jet.gamma_at(l, j, k).derivative(i) -
                           jet.gamma_at(l, i, k).derivative(j);
          for (size_t m = 0; m < n; ++m)
            acc += jet.gamma_at(l, i, m) * jet.gamma_at(m, j, k) -
                   jet.gamma_at(l, j, m) * jet.gamma_at(m, i, k);
          R[((i * n + j) * n + k) * n + l] = acc.truncate_degree(trunc);
        }
  return R;
}

// Curvature components at the origin as rational scalars.
inline CurvatureOperator curvature_at_origin(const JetModel& jet) {
  const size_t n = jet.dim();
  const std::vector<Polynomial> R = connection_curvature(jet);
  std::vector<Scalar> comp(n * n * n * n, Scalar(Rational(0)));
  for (size_t f = 0; f < comp.size(); ++f) comp[f] = Scalar(R[f].constant_term());
  return CurvatureOperator::from_components(n, comp);
}

inline DenseTensor field_at_origin(const JetModel& jet) {
  const size_t n = jet.dim();
  DenseTensor T(n, jet.field_arity(), Scalar(Rational(0)));
  for (size_t f = 0; f < jet.field().size(); ++f)
    T.flat(f) = Scalar(jet.field()[f].constant_term());
  return T;
}

// Signed-sum identity at the origin:
//   (R^k.T)(X^1_1, X^1_{-1}, ..., X^k_1, X^k_{-1}, Y_1..Y_p)
//     = sum over a in {-1,1}^k of sgn(a) *
//       (nabla^{2k} T)(X^1_{a1}, X^1_{-a1}, ..., Y_1..Y_p)
// The left side is algebraic in (R(0), T(0)); the right side needs the full
// 2k-jet. Both sides are exact rationals; the report carries the residual.
inline LemmaReport verify_signed_sum(const JetModel& jet, unsigned k,
                                     const std::vector<std::pair<size_t, size_t>>& xpairs,
                                     const std::vector<size_t>& ys) {
  if (k == 0) throw DomainError("signed-sum check needs k >= 1");
  if (xpairs.size() != k) throw DomainError("signed-sum check needs k index pairs");
  if (jet.order() < 2 * k)
    throw DomainError("jet order too low for requested derivative count");
  for (const auto& [u, v] : xpairs)
    if (u >= jet.dim() || v >= jet.dim())
      throw DomainError("coordinate index out of range");
  for (size_t y : ys)
    if (y >= jet.dim()) throw DomainError("coordinate index out of range");
  if (ys.size() != jet.field_arity())
    throw DomainError("Y argument count must match the field arity");

  // left side: iterated curvature action on the origin values
  DenseTensor lhs_tensor = field_at_origin(jet);
  const CurvatureOperator R0 = curvature_at_origin(jet);
  lhs_tensor = iterated_action(R0, std::move(lhs_tensor), k);
  IndexTuple lhs_idx;
  for (const auto& [u, v] : xpairs) {
    lhs_idx.push_back(static_cast<uint8_t>(u));
    lhs_idx.push_back(static_cast<uint8_t>(v));
  }
  for (size_t y : ys) lhs_idx.push_back(static_cast<uint8_t>(y));
  const Rational lhs = lhs_tensor.at(lhs_idx).rat();

  // right side: 2^k-term signed sum of nabla^{2k} T components
  const JetModel deriv = covariant_derivative(jet, 2 * k);
  Rational rhs(0);
  for (uint64_t mask = 0; mask < (uint64_t{1} << k); ++mask) {
    IndexTuple idx;
    int sign = 1;
    for (unsigned j = 0; j < k; ++j) {
      const auto& [u, v] = xpairs[j];
      if (mask & (uint64_t{1} << j)) {
        idx.push_back(static_cast<uint8_t>(v));  // a(j) = -1
        idx.push_back(static_cast<uint8_t>(u));
        sign = -sign;
      } else {
        idx.push_back(static_cast<uint8_t>(u));  // a(j) = +1
        idx.push_back(static_cast<uint8_t>(v));
      }
    }
    for (size_t y : ys) idx.push_back(static_cast<uint8_t>(y));
    const Rational term = deriv.field_at(idx).constant_term();
    rhs += (sign > 0) ? term : -term;
  }

  LemmaReport report;
  report.lemma = "signed-sum";
  report.params["k"] = std::to_string(k);
  report.params["dim"] = std::to_string(jet.dim());
  report.params["order"] = std::to_string(jet.order());
  report.params["seed"] = std::to_string(jet.seed());
  std::string desc = "R^k.T - signed sum, pairs";
  for (const auto& [u, v] : xpairs)
    desc += " (x" + std::to_string(u + 1) + ",x" + std::to_string(v + 1) + ")";
  report.add_residual(desc, Scalar(lhs - rhs));
  return report;
}

// Jet whose (0,2) field has nabla^2 T = 0 at the origin: T(0) = 0 makes the
// antisymmetric part of nabla^2 T(0) vanish (it equals -(R.T)(0), linear in
// T(0)), and the quadratic Taylor coefficients are then solved to cancel the
// symmetric part.
inline JetModel make_second_order_parallel_jet(size_t dim, std::mt19937_64& rng,
                                               uint64_t seed_tag = 0);

// Random torsion-free jet with integer coefficients in {-3..3}.
inline JetModel random_jet(size_t dim, unsigned order, size_t field_arity,
                           std::mt19937_64& rng, uint64_t seed_tag = 0) {
  const RingPtr ring = JetModel::coordinate_ring(dim);
  auto coeff = [&]() { return Rational(static_cast<long>(rng() % 7) - 3); };

  auto random_poly = [&]() {
    Polynomial p(ring);
    ExponentVec e(dim, 0);
    // iterate all monomials of total degree <= order
    std::vector<ExponentVec> monos;
    std::function<void(size_t, uint32_t)> build = [&](size_t pos, uint32_t left) {
      if (pos == dim) {
        monos.push_back(e);
        return;
      }
      for (uint32_t d = 0; d <= left; ++d) {
        e[pos] = d;
        build(pos + 1, left - d);
      }
      e[pos] = 0;
    };
    build(0, order);
    for (const auto& mono : monos)
      p += Polynomial::monomial(ring, mono, coeff());
    return p;
  };

  std::vector<Polynomial> gamma(dim * dim * dim, Polynomial(ring));
  for (size_t k = 0; k < dim; ++k)
    for (size_t i = 0; i < dim; ++i)
      for (size_t j = i; j < dim; ++j) {
        Polynomial g = random_poly();
        gamma[(k * dim + i) * dim + j] = g;
        gamma[(k * dim + j) * dim + i] = g;
      }
  std::vector<Polynomial> field(JetModel::pow_size(dim, field_arity), Polynomial(ring));
  for (auto& f : field) f = random_poly();
  return JetModel(dim, order, std::move(gamma), field_arity, std::move(field), seed_tag);
}

inline JetModel make_second_order_parallel_jet(size_t dim, std::mt19937_64& rng,
                                               uint64_t seed_tag) {
  const RingPtr ring = JetModel::coordinate_ring(dim);
  auto coeff = [&]() { return Rational(static_cast<long>(rng() % 7) - 3); };

  const JetModel skeleton = random_jet(dim, 2, 2, rng, seed_tag);
  std::vector<Polynomial> gamma = skeleton.gamma();

  // field with zero constant part and random linear part
  std::vector<Polynomial> field(JetModel::pow_size(dim, 2), Polynomial(ring));
  for (auto& comp : field)
    for (size_t i = 0; i < dim; ++i) {
      ExponentVec e(dim, 0);
      e[i] = 1;
      comp += Polynomial::monomial(ring, e, coeff());
    }

  const JetModel draft(dim, 2, gamma, 2, field, seed_tag);
  const JetModel second = covariant_derivative(draft, 2);

  // cancel the symmetric part with quadratic coefficients
  for (size_t c1 = 0; c1 < dim; ++c1)
    for (size_t c2 = 0; c2 < dim; ++c2) {
      Polynomial& comp = field[c1 * dim + c2];
      for (size_t i = 0; i < dim; ++i)
        for (size_t j = i; j < dim; ++j) {
          const Rational f =
              second
                  .field_at({static_cast<uint8_t>(i), static_cast<uint8_t>(j),
                             static_cast<uint8_t>(c1), static_cast<uint8_t>(c2)})
                  .constant_term();
          if (f.is_zero()) continue;
          ExponentVec e(dim, 0);
          e[i] += 1;
          e[j] += 1;
          const Rational fix = (i == j) ? -f / Rational(2) : -f;
          comp += Polynomial::monomial(ring, e, fix);
        }
    }
  return JetModel(dim, 2, std::move(gamma), 2, std::move(field), seed_tag);
}

}  // namespace curvlab
