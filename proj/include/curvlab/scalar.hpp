#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <variant>

#include "curvlab/common.hpp"
#include "curvlab/polynomial.hpp"
#include "curvlab/rational.hpp"

namespace curvlab {

enum class ScalarKind { rational, polynomial, float64 };

inline const char* kind_name(ScalarKind k) {
  switch (k) {
    case ScalarKind::rational: return "rational";
    case ScalarKind::polynomial: return "poly";
    case ScalarKind::float64: return "float";
  }
  return "?";
}

// Coefficient-ring element: exact rational, sparse polynomial over the
// rationals, or IEEE double. Arithmetic requires matching variants; the only
// silent promotion is Rational -> Polynomial over the polynomial's ring.
class Scalar {
 public:
  Scalar() : v_(Rational(0)) {}
  Scalar(Rational r) : v_(std::move(r)) {}        // NOLINT: implicit by design
  Scalar(Polynomial p) : v_(std::move(p)) {}      // NOLINT
  Scalar(double d) : v_(d) {}                     // NOLINT
  Scalar(long n) : v_(Rational(n)) {}             // NOLINT
  Scalar(int n) : v_(Rational(n)) {}              // NOLINT

  ScalarKind kind() const {
    if (std::holds_alternative<Rational>(v_)) return ScalarKind::rational;
    if (std::holds_alternative<Polynomial>(v_)) return ScalarKind::polynomial;
    return ScalarKind::float64;
  }

  const Rational& rat() const {
    if (auto* p = std::get_if<Rational>(&v_)) return *p;
    throw KindError("scalar is not rational");
  }
  const Polynomial& poly() const {
    if (auto* p = std::get_if<Polynomial>(&v_)) return *p;
    throw KindError("scalar is not a polynomial");
  }
  double flt() const {
    if (auto* p = std::get_if<double>(&v_)) return *p;
    throw KindError("scalar is not a float");
  }

  bool is_zero(double tol = kDefaultTol) const {
    switch (kind()) {
      case ScalarKind::rational: return rat().is_zero();
      case ScalarKind::polynomial: return poly().is_zero();
      case ScalarKind::float64: return std::fabs(flt()) <= tol;
    }
    return false;
  }

  friend Scalar operator+(const Scalar& a, const Scalar& b) {
    return combine(a, b, Op::add);
  }
  friend Scalar operator-(const Scalar& a, const Scalar& b) {
    return combine(a, b, Op::sub);
  }
  friend Scalar operator*(const Scalar& a, const Scalar& b) {
    return combine(a, b, Op::mul);
  }
  Scalar operator-() const {
    switch (kind()) {
      case ScalarKind::rational: return Scalar(-rat());
      case ScalarKind::polynomial: return Scalar(-poly());
      case ScalarKind::float64: return Scalar(-flt());
    }
    return {};
  }
  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
  Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
  Scalar& operator*=(const Scalar& o) { return *this = *this * o; }

  Scalar pow(unsigned k) const {
    Scalar acc = one_like(*this);
    Scalar base = *this;
    while (k > 0) {
      if (k & 1u) acc = acc * base;
      base = base * base;
      k >>= 1u;
    }
    return acc;
  }

  // Field division; defined for rational and float variants only.
  friend Scalar field_div(const Scalar& a, const Scalar& b) {
    if (a.kind() == ScalarKind::rational && b.kind() == ScalarKind::rational)
      return Scalar(a.rat() / b.rat());
    if (a.kind() == ScalarKind::float64 && b.kind() == ScalarKind::float64) {
      if (b.flt() == 0.0) throw DomainError("float division by zero");
      return Scalar(a.flt() / b.flt());
    }
    throw KindError("field division needs rational or float operands");
  }

  // Zero / one of the same variant (and ring) as the prototype.
  static Scalar zero_like(const Scalar& proto) {
    switch (proto.kind()) {
      case ScalarKind::rational: return Scalar(Rational(0));
      case ScalarKind::polynomial: return Scalar(Polynomial(proto.poly().ring()));
      case ScalarKind::float64: return Scalar(0.0);
    }
    return {};
  }
  static Scalar one_like(const Scalar& proto) {
    switch (proto.kind()) {
      case ScalarKind::rational: return Scalar(Rational(1));
      case ScalarKind::polynomial:
        return Scalar(Polynomial::constant(proto.poly().ring(), Rational(1)));
      case ScalarKind::float64: return Scalar(1.0);
    }
    return {};
  }

  // Polynomial scalars evaluate to rationals; rational/float pass through.
  Scalar evaluate(const std::map<std::string, Rational>& assignment) const {
    if (kind() == ScalarKind::polynomial) return Scalar(poly().evaluate(assignment));
    return *this;
  }

  double to_double() const {
    switch (kind()) {
      case ScalarKind::rational: return rat().to_double();
      case ScalarKind::polynomial:
        if (poly().is_constant()) return poly().constant_term().to_double();
        throw KindError("non-constant polynomial has no float value");
      case ScalarKind::float64: return flt();
    }
    return 0.0;
  }

  std::string str() const {
    switch (kind()) {
      case ScalarKind::rational: return rat().str();
      case ScalarKind::polynomial: return poly().str();
      case ScalarKind::float64: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", flt());
        return buf;
      }
    }
    return {};
  }

 private:
  enum class Op { add, sub, mul };

  static Scalar combine(const Scalar& a, const Scalar& b, Op op) {
    const ScalarKind ka = a.kind(), kb = b.kind();
    if (ka == ScalarKind::rational && kb == ScalarKind::rational) {
      const Rational &x = a.rat(), &y = b.rat();
      switch (op) {
        case Op::add: return Scalar(x + y);
        case Op::sub: return Scalar(x - y);
        case Op::mul: return Scalar(x * y);
      }
    }
    if (ka == ScalarKind::float64 && kb == ScalarKind::float64) {
      const double x = a.flt(), y = b.flt();
      switch (op) {
        case Op::add: return Scalar(x + y);
        case Op::sub: return Scalar(x - y);
        case Op::mul: return Scalar(x * y);
      }
    }
    if ((ka == ScalarKind::polynomial || ka == ScalarKind::rational) &&
        (kb == ScalarKind::polynomial || kb == ScalarKind::rational)) {
      const RingPtr ring =
          ka == ScalarKind::polynomial ? a.poly().ring() : b.poly().ring();
      const Polynomial x = ka == ScalarKind::polynomial
                               ? a.poly()
                               : Polynomial::constant(ring, a.rat());
      const Polynomial y = kb == ScalarKind::polynomial
                               ? b.poly()
                               : Polynomial::constant(ring, b.rat());
      switch (op) {
        case Op::add: return Scalar(x + y);
        case Op::sub: return Scalar(x - y);
        case Op::mul: return Scalar(x * y);
      }
    }
    throw KindError("incompatible scalar kinds");
  }

  std::variant<Rational, Polynomial, double> v_;
};

inline bool scalar_equal(const Scalar& a, const Scalar& b, double tol = kDefaultTol) {
  return (a - b).is_zero(tol);
}

}  // namespace curvlab
