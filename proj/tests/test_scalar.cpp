#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "curvlab/scalar.hpp"

using namespace curvlab;

namespace {

Rational random_rational(std::mt19937_64& rng) {
  const long num = static_cast<long>(rng() % 19) - 9;
  const long den = 1 + static_cast<long>(rng() % 7);
  return Rational(num, den);
}

Polynomial random_poly(const RingPtr& ring, std::mt19937_64& rng) {
  Polynomial p(ring);
  const size_t terms = 1 + rng() % 4;
  for (size_t t = 0; t < terms; ++t) {
    ExponentVec e(ring->size(), 0);
    for (auto& exp : e) exp = static_cast<uint32_t>(rng() % 3);
    p += Polynomial::monomial(ring, e, random_rational(rng));
  }
  return p;
}

}  // namespace

TEST_CASE("rational arithmetic is exact and canonical") {
  CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
  CHECK((Rational(2, 4)).str() == "1/2");
  CHECK(Rational(3, -6) == Rational(-1, 2));
  CHECK(Rational(-1, 2).denominator() == 2);
  CHECK(Rational(0, 5).str() == "0");
  CHECK(Rational::parse("7/21") == Rational(1, 3));
  CHECK(Rational::parse("-4") == Rational(-4));
  CHECK_THROWS_AS(Rational(1, 0), DomainError);
  CHECK_THROWS_AS(Rational::parse("x"), UsageError);
  CHECK_THROWS_AS(Rational(1, 2) / Rational(0), DomainError);
}

TEST_CASE("rational perfect squares") {
  CHECK(Rational(16).sqrt_exact().value() == Rational(4));
  CHECK(Rational(9, 4).sqrt_exact().value() == Rational(3, 2));
  CHECK_FALSE(Rational(3).sqrt_exact().has_value());
  CHECK_FALSE(Rational(-4).sqrt_exact().has_value());
}

TEST_CASE("polynomial cancellation yields the canonical zero") {
  const RingPtr ring = make_ring({"l1", "g"});
  const Polynomial l1 = Polynomial::variable(ring, "l1");
  const Polynomial diff = l1 - l1;
  CHECK(diff.is_zero());
  CHECK(diff.term_count() == 0);
}

TEST_CASE("sign specialization kills the block determinant") {
  // g*g + a*b with a = g, b = -g is the zero polynomial
  const RingPtr ring = make_ring({"a", "b", "g"});
  const Polynomial a = Polynomial::variable(ring, "a");
  const Polynomial b = Polynomial::variable(ring, "b");
  const Polynomial g = Polynomial::variable(ring, "g");
  const Polynomial det = g * g + a * b;
  CHECK_FALSE(det.is_zero());
  CHECK(det.substitute({{"a", Rational(0)}}).is_zero() == false);
  const Polynomial specialized = g * g + g * (-g);
  CHECK(specialized.is_zero());
  CHECK(det.evaluate({{"a", Rational(1)}, {"b", Rational(-1)}, {"g", Rational(1)}}) ==
        Rational(0));
}

TEST_CASE("scalar variants and promotion rules") {
  const RingPtr ring = make_ring({"g"});
  const Scalar r(Rational(2, 3));
  const Scalar p(Polynomial::variable(ring, "g"));
  const Scalar f(0.5);
  CHECK((r + Scalar(Rational(1, 3))).rat() == Rational(1));
  CHECK((r * p).kind() == ScalarKind::polynomial);  // rational promotes
  CHECK((f * f).flt() == doctest::Approx(0.25));
  CHECK_THROWS_AS(r + f, KindError);
  CHECK_THROWS_AS(p + f, KindError);
  CHECK_THROWS_AS(field_div(p, p), KindError);
  const RingPtr other = make_ring({"z"});
  CHECK_THROWS_AS(Scalar(Polynomial::variable(other, "z")) + p, KindError);
}

TEST_CASE("is-zero across variants") {
  const RingPtr ring = make_ring({"a", "b", "g"});
  CHECK(Scalar(Polynomial(ring)).is_zero());
  const Polynomial nonzero = Polynomial::variable(ring, "a") * Polynomial::variable(ring, "b") +
                             Polynomial::variable(ring, "g").pow(2);
  CHECK_FALSE(Scalar(nonzero).is_zero());
  CHECK(Scalar(1e-12).is_zero());        // below the default 1e-9
  CHECK_FALSE(Scalar(1e-6).is_zero());
  CHECK(Scalar(Rational(0)).is_zero(0.0));
}

TEST_CASE("evaluate: exact substitution and errors") {
  const RingPtr ring = make_ring({"l1"});
  const Polynomial l1 = Polynomial::variable(ring, "l1");
  CHECK(l1.evaluate({{"l1", Rational(7)}}) == Rational(7));
  CHECK_THROWS_WITH_AS(l1.evaluate({}), "evaluate: missing value for variable 'l1'",
                       DomainError);
}

TEST_CASE("frozen closed-form value at k = 3") {
  // 2^(k-2) * (-l1)^(k-1) * g * w34 at k = 3, l1 = 2, g = 1, w34 = 1.
  // The independent brute-force oracle for this value lives in the curvature
  // suite (dense iterated action); here the polynomial itself is pinned.
  const RingPtr ring = make_ring({"l1", "g", "w34"});
  const Polynomial l1 = Polynomial::variable(ring, "l1");
  const Polynomial g = Polynomial::variable(ring, "g");
  const Polynomial w34 = Polynomial::variable(ring, "w34");
  const Polynomial closed =
      Rational(2) * ((-l1).pow(2) * g * w34);
  CHECK(closed.evaluate({{"l1", Rational(2)}, {"g", Rational(1)}, {"w34", Rational(1)}}) ==
        Rational(8));
}

TEST_CASE("ring axioms on randomized triples") {
  std::mt19937_64 rng(20240817);
  const RingPtr ring = make_ring({"x", "y", "z"});
  for (int trial = 0; trial < 200; ++trial) {
    const Rational a = random_rational(rng), b = random_rational(rng),
                   c = random_rational(rng);
    CHECK((a + b) + c == a + (b + c));
    CHECK(a * b == b * a);
    CHECK(a * (b + c) == a * b + a * c);
  }
  for (int trial = 0; trial < 50; ++trial) {
    const Polynomial p = random_poly(ring, rng), q = random_poly(ring, rng),
                     r = random_poly(ring, rng);
    CHECK((p + q) + r == p + (q + r));
    CHECK(p * q == q * p);
    CHECK(p * (q + r) == p * q + p * r);
    CHECK((p * q) * r == p * (q * r));
  }
}

TEST_CASE("canonicality: difference zero iff identical term maps") {
  std::mt19937_64 rng(99);
  const RingPtr ring = make_ring({"x", "y"});
  for (int trial = 0; trial < 100; ++trial) {
    const Polynomial p = random_poly(ring, rng), q = random_poly(ring, rng);
    CHECK((p - q).is_zero() == (p == q));
  }
}

TEST_CASE("evaluate is a ring homomorphism") {
  std::mt19937_64 rng(4242);
  const RingPtr ring = make_ring({"x", "y", "z"});
  for (int trial = 0; trial < 50; ++trial) {
    const Polynomial p = random_poly(ring, rng), q = random_poly(ring, rng);
    const std::map<std::string, Rational> point{{"x", random_rational(rng)},
                                                {"y", random_rational(rng)},
                                                {"z", random_rational(rng)}};
    CHECK((p * q).evaluate(point) == p.evaluate(point) * q.evaluate(point));
    CHECK((p + q).evaluate(point) == p.evaluate(point) + q.evaluate(point));
  }
}

TEST_CASE("polynomial printing uses descending graded-lex order") {
  const RingPtr ring = make_ring({"l1", "w13"});
  const Polynomial p = -(Polynomial::variable(ring, "l1") * Polynomial::variable(ring, "w13"));
  CHECK(p.str() == "-l1*w13");
  const Polynomial q =
      Polynomial::variable(ring, "l1").pow(3) - Polynomial::constant(ring, Rational(2));
  CHECK(q.str() == "l1^3 - 2");
  CHECK(Polynomial(ring).str() == "0");
}
