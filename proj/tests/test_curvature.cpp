#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <thread>

#include "curvlab/quantities.hpp"

using namespace curvlab;

namespace {

const RingPtr& bench_ring() {
  static const RingPtr ring =
      make_ring({"l1", "l2", "g", "w12", "w13", "w14", "w23", "w24", "w34"});
  return ring;
}

Scalar var(const char* name) { return Scalar(Polynomial::variable(bench_ring(), name)); }

PointModel sign_model(int s) {
  return canonical_form_b(var("l1"), var("l2"), var("g"), s);
}

Matrix standard_omega() {
  Matrix w(4, 4);
  w.at(0, 1) = Scalar(Rational(1));
  w.at(1, 0) = Scalar(Rational(-1));
  w.at(2, 3) = Scalar(Rational(1));
  w.at(3, 2) = Scalar(Rational(-1));
  return w;
}

// random valid rational model: h diagonal +-1, S = h^-1 M with M symmetric
// (so S is h-self-adjoint), omega random antisymmetric non-degenerate
PointModel random_rational_model(std::mt19937_64& rng) {
  while (true) {
    std::vector<Scalar> hd;
    for (int i = 0; i < 4; ++i) hd.push_back(Scalar(Rational(rng() % 2 == 0 ? 1 : -1)));
    Matrix h = Matrix::diagonal(hd);
    Matrix sym(4, 4);
    for (size_t i = 0; i < 4; ++i)
      for (size_t j = i; j < 4; ++j) {
        const Scalar v = Scalar(Rational(static_cast<long>(rng() % 7) - 3));
        sym.at(i, j) = v;
        sym.at(j, i) = v;
      }
    Matrix S = h.inverse() * sym;
    Matrix w(4, 4);
    for (size_t i = 0; i < 4; ++i)
      for (size_t j = i + 1; j < 4; ++j) {
        const Scalar v = Scalar(Rational(static_cast<long>(rng() % 7) - 3));
        w.at(i, j) = v;
        w.at(j, i) = -v;
      }
    if (w.determinant().is_zero()) continue;
    return make_point_model(4, h, S, w);
  }
}

}  // namespace

TEST_CASE("gauss curvature of the flat model vanishes") {
  Matrix h = Matrix::diagonal({Scalar(Rational(1)), Scalar(Rational(1)),
                               Scalar(Rational(1)), Scalar(Rational(-1))});
  const PointModel m = make_point_model(4, h, Matrix(4, 4), standard_omega());
  CHECK(CurvatureOperator::gauss(m).is_zero());
}

TEST_CASE("gauss curvature of form B matches the hand-computed components") {
  for (int s : {1, -1}) {
    const PointModel m = sign_model(s);
    const CurvatureOperator R = CurvatureOperator::gauss(m);
    const Scalar g = var("g");
    const Scalar sg = s == 1 ? g : -g;
    // R(e3,e4)e3 = -g e3 + s g e4
    CHECK((R.coeff(2, 3, 2, 2) + g).is_zero());
    CHECK((R.coeff(2, 3, 2, 3) - sg).is_zero());
    // R(e3,e4)e4 = -s g e3 + g e4
    CHECK((R.coeff(2, 3, 3, 2) + sg).is_zero());
    CHECK((R.coeff(2, 3, 3, 3) - g).is_zero());
    // R(e3,e4)e1 = R(e3,e4)e2 = 0
    for (size_t l = 0; l < 4; ++l) {
      CHECK(R.coeff(2, 3, 0, l).is_zero());
      CHECK(R.coeff(2, 3, 1, l).is_zero());
    }
  }
}

TEST_CASE("curvature action: zero curvature annihilates") {
  Matrix h = Matrix::diagonal({Scalar(Rational(1)), Scalar(Rational(1)),
                               Scalar(Rational(1)), Scalar(Rational(-1))});
  const PointModel m = make_point_model(4, h, Matrix(4, 4), standard_omega());
  const CurvatureOperator R = CurvatureOperator::gauss(m);
  const DenseTensor out = curvature_action(R, DenseTensor::from_matrix(m.omega));
  CHECK(out.arity() == 4);
  for (size_t f = 0; f < out.size(); ++f) CHECK(out.flat(f).is_zero());
}

TEST_CASE("first-action corner components A1 and C1") {
  const PointModel m = sign_model(1);
  const CurvatureOperator R = CurvatureOperator::gauss(m);
  const DenseTensor rw = curvature_action(R, DenseTensor::from_matrix(m.omega));
  // (R.w)(e1,e4,e3,e4) = -l1 w13 and (R.w)(e1,e3,e3,e4) = -l1 w14
  CHECK((rw.at({0, 3, 2, 3}) + var("l1") * var("w13")).is_zero());
  CHECK((rw.at({0, 2, 2, 3}) + var("l1") * var("w14")).is_zero());
}

TEST_CASE("lazy evaluation: depth zero returns omega verbatim") {
  const PointModel m = sign_model(1);
  const LazyTensor t =
      lazy_rk(CurvatureOperator::gauss(m), m.omega, 0);
  CHECK((t.eval({0, 1}) - var("w12")).is_zero());
  CHECK((t.eval({1, 0}) + var("w12")).is_zero());
  CHECK_THROWS_WITH_AS(t.eval({0, 1, 2}), "index arity mismatch", DomainError);
}

TEST_CASE("lazy equals dense on every component for depths 1 and 2") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 3; ++trial) {
    const PointModel m = random_rational_model(rng);
    const CurvatureOperator R = CurvatureOperator::gauss(m);
    DenseTensor dense = DenseTensor::from_matrix(m.omega);
    for (unsigned k = 1; k <= 2; ++k) {
      dense = curvature_action(R, dense);
      const LazyTensor lazy = lazy_rk(R, m.omega, k);
      IndexTuple idx(2 * k + 2, 0);
      bool more = true;
      while (more) {
        CHECK((lazy.eval(idx) - dense.at(idx)).is_zero());
        more = dense.next_tuple(idx);
      }
    }
  }
}

TEST_CASE("antisymmetry under swapping a curvature pair") {
  std::mt19937_64 rng(77);
  const PointModel m = random_rational_model(rng);
  const LazyTensor t = lazy_rk(CurvatureOperator::gauss(m), m.omega, 2);
  for (int trial = 0; trial < 40; ++trial) {
    IndexTuple idx(6);
    for (auto& v : idx) v = static_cast<uint8_t>(rng() % 4);
    for (size_t pair = 0; pair + 1 < 2; ++pair) {
      IndexTuple swapped = idx;
      std::swap(swapped[2 * pair], swapped[2 * pair + 1]);
      CHECK((t.eval(idx) + t.eval(swapped)).is_zero());
    }
    IndexTuple equal = idx;
    equal[1] = equal[0];
    CHECK(t.eval(equal).is_zero());
  }
}

TEST_CASE("flatness: S = 0 kills every depth") {
  std::mt19937_64 rng(5150);
  Matrix h = Matrix::diagonal({Scalar(Rational(1)), Scalar(Rational(1)),
                               Scalar(Rational(1)), Scalar(Rational(-1))});
  for (int trial = 0; trial < 2; ++trial) {
    Matrix w(4, 4);
    for (size_t i = 0; i < 4; ++i)
      for (size_t j = i + 1; j < 4; ++j) {
        const Scalar v = Scalar(Rational(static_cast<long>(rng() % 5) + 1));
        w.at(i, j) = v;
        w.at(j, i) = -v;
      }
    const PointModel m = make_point_model(4, h, Matrix(4, 4), w);
    const CurvatureOperator R = CurvatureOperator::gauss(m);
    for (unsigned k = 1; k <= 4; ++k) {
      const LazyTensor t = lazy_rk(R, m.omega, k);
      IndexTuple idx(2 * k + 2);
      for (int probe = 0; probe < 25; ++probe) {
        for (auto& v : idx) v = static_cast<uint8_t>(rng() % 4);
        CHECK(t.eval(idx).is_zero());
      }
    }
  }
}

TEST_CASE("the action is linear in omega") {
  std::mt19937_64 rng(31337);
  const PointModel m1 = random_rational_model(rng);
  // same h, S; different omega
  Matrix w2(4, 4);
  for (size_t i = 0; i < 4; ++i)
    for (size_t j = i + 1; j < 4; ++j) {
      const Scalar v = Scalar(Rational(static_cast<long>(rng() % 7) - 3));
      w2.at(i, j) = v;
      w2.at(j, i) = -v;
    }
  const CurvatureOperator R = CurvatureOperator::gauss(m1);
  Matrix sum = m1.omega + w2;
  const LazyTensor ta = lazy_rk(R, m1.omega, 2);
  const LazyTensor tb = lazy_rk(R, w2, 2);
  const LazyTensor tsum = lazy_rk(R, sum, 2);
  IndexTuple idx(6);
  for (int probe = 0; probe < 30; ++probe) {
    for (auto& v : idx) v = static_cast<uint8_t>(rng() % 4);
    CHECK((tsum.eval(idx) - ta.eval(idx) - tb.eval(idx)).is_zero());
  }
}

TEST_CASE("memo transparency: clearing changes no value") {
  const PointModel m = sign_model(-1);
  const LazyTensor t = lazy_rk(CurvatureOperator::gauss(m), m.omega, 3);
  const IndexTuple idx{0, 3, 2, 3, 2, 3, 2, 3};
  const Scalar first = t.eval(idx);
  const Scalar again = t.eval(idx);
  CHECK((first - again).is_zero());
  CHECK(t.cache()->memo_size() > 0);
  t.cache()->clear_memo();
  CHECK((t.eval(idx) - first).is_zero());
}

TEST_CASE("concurrent evaluation returns identical values") {
  const PointModel m = sign_model(1);
  const LazyTensor t = lazy_rk(CurvatureOperator::gauss(m), m.omega, 3);
  // reference values, computed single-threaded on a separate cache
  const LazyTensor ref = lazy_rk(CurvatureOperator::gauss(m), m.omega, 3);
  std::vector<IndexTuple> tuples;
  std::mt19937_64 rng(404);
  for (int n = 0; n < 24; ++n) {
    IndexTuple idx(8);
    for (auto& v : idx) v = static_cast<uint8_t>(rng() % 4);
    tuples.push_back(idx);
  }
  std::vector<Scalar> expected;
  for (const auto& idx : tuples) expected.push_back(ref.eval(idx));

  std::vector<std::vector<Scalar>> got(4);
  std::vector<std::thread> workers;
  for (int w = 0; w < 4; ++w)
    workers.emplace_back([&, w]() {
      for (const auto& idx : tuples) got[w].push_back(t.eval(idx));
    });
  for (auto& th : workers) th.join();
  for (int w = 0; w < 4; ++w)
    for (size_t i = 0; i < tuples.size(); ++i)
      CHECK((got[w][i] - expected[i]).is_zero());
}

TEST_CASE("tiny cache limit still evaluates correctly") {
  const PointModel m = sign_model(1);
  const LazyTensor small = lazy_rk(CurvatureOperator::gauss(m), m.omega, 3, 4);
  const LazyTensor big = lazy_rk(CurvatureOperator::gauss(m), m.omega, 3);
  const IndexTuple idx{0, 3, 2, 3, 2, 3, 2, 3};
  CHECK((small.eval(idx) - big.eval(idx)).is_zero());
}

TEST_CASE("named quantities reproduce the base displays") {
  for (int s : {1, -1}) {
    const QuantityEvaluator eval(sign_model(s));
    const Scalar g = var("g"), l1 = var("l1");
    const Scalar sg = s == 1 ? g : -g;
    // B1 = s g (w13 - s w14), D1 = g (w13 - s w14)
    const Scalar b1_expect =
        sg * (var("w13") - (s == 1 ? var("w14") : -var("w14")));
    CHECK((eval.eval(NamedQuantity::b(1)) - b1_expect).is_zero());
    CHECK((eval.eval(NamedQuantity::a(1)) + l1 * var("w13")).is_zero());
    CHECK((eval.eval(NamedQuantity::c(1)) + l1 * var("w14")).is_zero());
    // T^1_{0,0,0}(e3,e3) = g w34
    CHECK((eval.eval(NamedQuantity::t(1, 0, 0, 0, 3, 3)) - g * var("w34")).is_zero());
    // T^2_{0,0,1}(e3,e3) = -s l1 g w34
    const Scalar t2_expect = (s == 1 ? -(l1 * g * var("w34")) : l1 * g * var("w34"));
    CHECK((eval.eval(NamedQuantity::t(2, 0, 0, 1, 3, 3)) - t2_expect).is_zero());
    // E_1^i(e3,e4) = 0 for i = 1, 2
    CHECK(eval.eval(NamedQuantity::e(1, 1, 3, 4)).is_zero());
    CHECK(eval.eval(NamedQuantity::e(1, 2, 3, 4)).is_zero());
  }
}

TEST_CASE("frozen value 8: closed form vs dense brute force at k = 3") {
  // rational model: l1 = 2, l2 = -1, g = 1, s = +1, standard omega
  const PointModel m = canonical_form_b(Scalar(Rational(2)), Scalar(Rational(-1)),
                                        Scalar(Rational(1)), 1, standard_omega());
  const CurvatureOperator R = CurvatureOperator::gauss(m);
  DenseTensor dense = DenseTensor::from_matrix(m.omega);
  for (int step = 0; step < 3; ++step) dense = curvature_action(R, dense);
  // T^3_{0,0,2}(e3,e3) with tuple (e1,e3, e1,e3, e3,e4, e3,e4)
  const IndexTuple idx{0, 2, 0, 2, 2, 3, 2, 3};
  CHECK((dense.at(idx) - Scalar(Rational(8))).is_zero());
  const QuantityEvaluator eval(m);
  CHECK((eval.eval(NamedQuantity::t(3, 0, 0, 2, 3, 3)) - Scalar(Rational(8))).is_zero());
}

TEST_CASE("the engine is dimension-generic: a 2-dimensional model") {
  Matrix h = Matrix::diagonal({Scalar(Rational(1)), Scalar(Rational(-1))});
  Matrix S(2, 2);
  S.at(0, 0) = Scalar(Rational(2));  // diagonal, trivially h-self-adjoint
  Matrix w(2, 2);
  w.at(0, 1) = Scalar(Rational(1));
  w.at(1, 0) = Scalar(Rational(-1));
  const PointModel m = make_point_model(2, h, S, w);
  const CurvatureOperator R = CurvatureOperator::gauss(m);
  // R(e1,e2)e2 = h(e2,e2) S e1 = -2 e1
  CHECK((R.coeff(0, 1, 1, 0) + Scalar(Rational(2))).is_zero());
  const LazyTensor t = lazy_rk(R, m.omega, 1);
  const DenseTensor dense = curvature_action(R, DenseTensor::from_matrix(m.omega));
  IndexTuple idx(4, 0);
  bool more = true;
  while (more) {
    CHECK((t.eval(idx) - dense.at(idx)).is_zero());
    more = dense.next_tuple(idx);
  }
}

TEST_CASE("named quantity parameter validation") {
  const QuantityEvaluator eval(sign_model(1));
  CHECK_THROWS_WITH_AS(eval.eval(NamedQuantity::e(2, 4, 3, 4)),
                       "invalid quantity parameters", DomainError);
  CHECK_THROWS_WITH_AS(eval.eval(NamedQuantity::t(2, 1, 1, 1, 3, 3)),
                       "invalid quantity parameters", DomainError);
  CHECK_THROWS_WITH_AS(eval.eval(NamedQuantity::e(2, 1, 0, 4)),
                       "invalid quantity parameters", DomainError);
}

TEST_CASE("U quantities match their defining combination") {
  const QuantityEvaluator eval(sign_model(1));
  const Scalar l1 = var("l1");
  // U^k(e3,Y) = -l1 T(e4,Y) since h(e3,e3) = 1, h(e3,e4) = 0
  const Scalar u = eval.eval(NamedQuantity::u(2, 0, 1, 0, 3, 4));
  const Scalar t = eval.eval(NamedQuantity::t(2, 0, 1, 0, 4, 4));
  CHECK((u + l1 * t).is_zero());
  // Uhat^k(e4,Y): h(e4,e4) = -1, so Uhat = -l1 T(Y,e3)
  const Scalar uh = eval.eval(NamedQuantity::uhat(2, 0, 1, 0, 4, 3));
  const Scalar t2 = eval.eval(NamedQuantity::t(2, 0, 1, 0, 3, 3));
  CHECK((uh + l1 * t2).is_zero());
}
