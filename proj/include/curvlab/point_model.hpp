#pragma once

#include <cmath>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "curvlab/common.hpp"
#include "curvlab/matrix.hpp"

namespace curvlab {

// One tangent space: dimension, second fundamental form h, shape operator S,
// almost symplectic form omega. Immutable after validation.
struct PointModel {
  size_t dim = 0;
  Matrix h, S, omega;
  ScalarKind kind = ScalarKind::rational;  // float64 or the exact family
  RingPtr ring;                            // shared ring of polynomial entries, if any
};

namespace detail {

struct KindScan {
  bool any_float = false, any_exact = false;
  RingPtr ring;
};

inline void scan_matrix(const Matrix& m, KindScan& scan) {
  for (size_t i = 0; i < m.rows(); ++i)
    for (size_t j = 0; j < m.cols(); ++j) {
      const Scalar& s = m.at(i, j);
      switch (s.kind()) {
        case ScalarKind::float64:
          scan.any_float = true;
          break;
        case ScalarKind::rational:
          scan.any_exact = true;
          break;
        case ScalarKind::polynomial:
          scan.any_exact = true;
          if (!scan.ring)
            scan.ring = s.poly().ring();
          else if (!scan.ring->same_as(*s.poly().ring()))
            throw KindError("model entries use different polynomial rings");
          break;
      }
    }
}

}  // namespace detail

// Validates every structural invariant and returns the model. Throws
// InvariantViolation naming the violated invariant.
inline PointModel make_point_model(size_t dim, Matrix h, Matrix S, Matrix omega,
                                   double tol = kDefaultTol) {
  if (dim < 2) throw InvariantViolation("model dimension must be at least 2");
  for (const Matrix* m : {&h, &S, &omega})
    if (m->rows() != dim || m->cols() != dim)
      throw InvariantViolation("matrix shape does not match model dimension");

  detail::KindScan scan;
  detail::scan_matrix(h, scan);
  detail::scan_matrix(S, scan);
  detail::scan_matrix(omega, scan);
  if (scan.any_float && scan.any_exact)
    throw KindError("model mixes float and exact entries");

  if (!(h - h.transpose()).is_zero(tol)) throw InvariantViolation("h not symmetric");
  if (h.determinant().is_zero(tol)) throw InvariantViolation("h degenerate");
  if (!(omega + omega.transpose()).is_zero(tol))
    throw InvariantViolation("omega not antisymmetric");
  if (omega.determinant().is_zero(tol)) throw InvariantViolation("omega degenerate");
  // Ricci condition with d(tau) = 0: h(SX, Y) = h(X, SY), i.e. S^T h = h S
  if (!(S.transpose() * h - h * S).is_zero(tol))
    throw InvariantViolation("S not h-self-adjoint");

  PointModel m;
  m.dim = dim;
  m.h = std::move(h);
  m.S = std::move(S);
  m.omega = std::move(omega);
  m.kind = scan.any_float ? ScalarKind::float64
                          : (scan.ring ? ScalarKind::polynomial : ScalarKind::rational);
  m.ring = scan.ring;
  return m;
}

// Antisymmetric matrix with entries w12..w34 from the ring (dim 4).
inline Matrix symbolic_omega(const RingPtr& ring) {
  Matrix w(4, 4, Scalar(Polynomial(ring)));
  static const char* names[4][4] = {{nullptr, "w12", "w13", "w14"},
                                    {nullptr, nullptr, "w23", "w24"},
                                    {nullptr, nullptr, nullptr, "w34"},
                                    {nullptr, nullptr, nullptr, nullptr}};
  for (size_t i = 0; i < 4; ++i)
    for (size_t j = i + 1; j < 4; ++j) {
      Polynomial v = Polynomial::variable(ring, names[i][j]);
      w.at(i, j) = Scalar(v);
      w.at(j, i) = Scalar(-v);
    }
  return w;
}

namespace detail {

inline RingPtr ring_for_default_omega(std::initializer_list<const Scalar*> params) {
  for (const Scalar* s : params)
    if (s->kind() == ScalarKind::polynomial) {
      const RingPtr& r = s->poly().ring();
      for (const char* w : {"w12", "w13", "w14", "w23", "w24", "w34"})
        if (r->index_of(w) < 0)
          throw UsageError(std::string("parameter ring lacks variable '") + w +
                           "' needed for the default symbolic omega");
      return r;
    }
  return make_ring({"w12", "w13", "w14", "w23", "w24", "w34"});
}

// diag(1,1,1,-1) with entries of the same float/exact family as the proto
inline Matrix lorentz_h(const Scalar& proto) {
  const bool fl = proto.kind() == ScalarKind::float64;
  Matrix h(4, 4, fl ? Scalar(0.0) : Scalar(Rational(0)));
  h.at(0, 0) = fl ? Scalar(1.0) : Scalar(Rational(1));
  h.at(1, 1) = h.at(0, 0);
  h.at(2, 2) = h.at(0, 0);
  h.at(3, 3) = fl ? Scalar(-1.0) : Scalar(Rational(-1));
  return h;
}

}  // namespace detail

// Diagonal canonical pair: S = diag(l1..l4), h = diag(1,1,1,-1). Omega
// defaults to the six-variable symbolic form.
inline PointModel canonical_form_a(const Scalar& l1, const Scalar& l2, const Scalar& l3,
                                   const Scalar& l4,
                                   std::optional<Matrix> omega = std::nullopt,
                                   double tol = kDefaultTol) {
  Matrix S(4, 4, Scalar::zero_like(l1));
  S.at(0, 0) = l1;
  S.at(1, 1) = l2;
  S.at(2, 2) = l3;
  S.at(3, 3) = l4;
  Matrix w = omega ? std::move(*omega)
                   : symbolic_omega(detail::ring_for_default_omega({&l1, &l2, &l3, &l4}));
  return make_point_model(4, detail::lorentz_h(l1), std::move(S), std::move(w), tol);
}

// Non-diagonalizable canonical pair with free block parameters:
//   S = [l1, l2, [alpha, gamma; -gamma, beta]],  h = diag(1,1,1,-1).
inline PointModel canonical_form_b_free(const Scalar& l1, const Scalar& l2,
                                        const Scalar& alpha, const Scalar& beta,
                                        const Scalar& gamma,
                                        std::optional<Matrix> omega = std::nullopt,
                                        double tol = kDefaultTol) {
  if (gamma.is_zero()) throw InvariantViolation("gamma must be nonzero");
  Matrix S(4, 4, Scalar::zero_like(gamma));
  S.at(0, 0) = l1;
  S.at(1, 1) = l2;
  S.at(2, 2) = alpha;
  S.at(2, 3) = gamma;
  S.at(3, 2) = -gamma;
  S.at(3, 3) = beta;
  Matrix w = omega ? std::move(*omega)
                   : symbolic_omega(detail::ring_for_default_omega(
                         {&l1, &l2, &alpha, &beta, &gamma}));
  return make_point_model(4, detail::lorentz_h(gamma), std::move(S), std::move(w), tol);
}

// Sign-specialized block: alpha = s*gamma, beta = -s*gamma (the coupled-sign
// branch where alpha*beta + gamma^2 = 0).
inline PointModel canonical_form_b(const Scalar& l1, const Scalar& l2, const Scalar& gamma,
                                   int sign_s,
                                   std::optional<Matrix> omega = std::nullopt,
                                   double tol = kDefaultTol) {
  if (sign_s != 1 && sign_s != -1) throw UsageError("sign must be +1 or -1");
  const Scalar alpha = sign_s == 1 ? gamma : -gamma;
  return canonical_form_b_free(l1, l2, alpha, -alpha, gamma, std::move(omega), tol);
}

// Congruence for the bilinear forms, conjugation for the operator:
//   h' = P^T h P,  omega' = P^T omega P,  S' = P^-1 S P.
inline PointModel apply_basis_change(const PointModel& m, const Matrix& P,
                                     double tol = kDefaultTol) {
  if (P.rows() != m.dim || P.cols() != m.dim)
    throw InvariantViolation("basis change shape mismatch");
  if (P.determinant().is_zero(tol))
    throw InvariantViolation("basis change not invertible");
  const Matrix Pt = P.transpose();
  const Matrix Pinv = P.inverse();
  return make_point_model(m.dim, Pt * (m.h * P), Pinv * (m.S * P), Pt * (m.omega * P), tol);
}

// The specific basis change that diagonalizes the form-B block when
// beta^2 != gamma^2: identity on e1, e2 and [gamma, beta; beta, gamma]
// / sqrt(|beta^2 - gamma^2|) on e3, e4. Exact entries exist only when
// |beta^2 - gamma^2| is a perfect rational square.
inline Matrix block_split_basis(const Scalar& beta, const Scalar& gamma) {
  if (beta.kind() == ScalarKind::float64) {
    const double b = beta.flt(), g = gamma.flt();
    const double d = b * b - g * g;
    if (d == 0.0) throw DomainError("basis change requires beta^2 != gamma^2");
    const double root = std::sqrt(std::fabs(d));
    Matrix P = Matrix::identity(4, Scalar(1.0));
    P.at(2, 2) = Scalar(g / root);
    P.at(2, 3) = Scalar(b / root);
    P.at(3, 2) = Scalar(b / root);
    P.at(3, 3) = Scalar(g / root);
    return P;
  }
  const Rational b = beta.rat(), g = gamma.rat();
  const Rational d = b * b - g * g;
  if (d.is_zero()) throw DomainError("basis change requires beta^2 != gamma^2");
  const auto root = d.abs().sqrt_exact();
  if (!root)
    throw DomainError("|beta^2 - gamma^2| is not a perfect rational square; "
                      "use float mode or supply P explicitly");
  Matrix P = Matrix::identity(4);
  P.at(2, 2) = Scalar(g / *root);
  P.at(2, 3) = Scalar(b / *root);
  P.at(3, 2) = Scalar(b / *root);
  P.at(3, 3) = Scalar(g / *root);
  return P;
}

// Same transformation computed without the square root: the 1/sqrt(|d|)
// factors cancel in P^-1 S P and appear squared on the 3-4 block of P^T h P,
// so (S', h') are exact for any rational block parameters with
// beta^2 != gamma^2. Omega's mixed blocks pick up a bare 1/sqrt(|d|) and stay
// out of the exact ring, so only the pair (S', h') is returned. Requires the
// 3-4 block of S to be numeric.
inline std::pair<Matrix, Matrix> block_diagonalize(const PointModel& m,
                                                   double tol = kDefaultTol) {
  if (m.dim != 4) throw DomainError("block diagonalization is defined for dim 4");
  const Scalar& beta = m.S.at(3, 3);
  const Scalar& gamma = m.S.at(2, 3);
  if (beta.kind() == ScalarKind::polynomial || gamma.kind() == ScalarKind::polynomial)
    throw DomainError("block diagonalization needs numeric block parameters");

  Matrix Q = Matrix::identity(4, Scalar::one_like(beta));
  Q.at(2, 2) = gamma;
  Q.at(2, 3) = beta;
  Q.at(3, 2) = beta;
  Q.at(3, 3) = gamma;
  const Scalar d = beta * beta - gamma * gamma;  // det Q = g^2 - b^2 = -d
  if (d.is_zero(tol)) throw DomainError("basis change requires beta^2 != gamma^2");

  const Matrix Sp = Q.inverse() * (m.S * Q);
  const Scalar scale = beta.kind() == ScalarKind::float64
                           ? Scalar(1.0 / std::fabs(d.flt()))
                           : Scalar(Rational(1) / d.rat().abs());
  Matrix hp = Q.transpose() * (m.h * Q);
  for (size_t i = 2; i < 4; ++i)
    for (size_t j = 2; j < 4; ++j) hp.at(i, j) = scale * hp.at(i, j);
  return {Sp, hp};
}

// w12*w34 - w13*w24 + w14*w23; its square is det(omega) in dim 4.
inline Scalar pfaffian4(const Matrix& w) {
  if (w.rows() != 4 || w.cols() != 4)
    throw DomainError("pfaffian implemented for dim 4 only");
  return w.at(0, 1) * w.at(2, 3) - w.at(0, 2) * w.at(1, 3) + w.at(0, 3) * w.at(1, 2);
}

inline Scalar omega_pfaffian(const PointModel& m) {
  if (m.dim != 4) throw DomainError("pfaffian implemented for dim 4 only");
  return pfaffian4(m.omega);
}

inline std::pair<int, int> signature(const Matrix& h, double tol = kDefaultTol) {
  return h.signature(tol);
}

// Evaluate every polynomial entry at the assignment, producing a rational
// model at that parameter point.
inline PointModel evaluate_model(const PointModel& m,
                                 const std::map<std::string, Rational>& assignment) {
  auto eval_matrix = [&](const Matrix& src) {
    Matrix out(src.rows(), src.cols());
    for (size_t i = 0; i < src.rows(); ++i)
      for (size_t j = 0; j < src.cols(); ++j) out.at(i, j) = src.at(i, j).evaluate(assignment);
    return out;
  };
  return make_point_model(m.dim, eval_matrix(m.h), eval_matrix(m.S), eval_matrix(m.omega));
}

}  // namespace curvlab
