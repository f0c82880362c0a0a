#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "curvlab/jet.hpp"

using namespace curvlab;

namespace {

JetModel flat_constant_jet() {
  const size_t dim = 2;
  const RingPtr ring = JetModel::coordinate_ring(dim);
  std::vector<Polynomial> gamma(dim * dim * dim, Polynomial(ring));
  std::vector<Polynomial> field(dim * dim, Polynomial(ring));
  field[1] = Polynomial::constant(ring, Rational(3));
  field[2] = Polynomial::constant(ring, Rational(-3));
  return JetModel(dim, 3, std::move(gamma), 2, std::move(field));
}

}  // namespace

TEST_CASE("flat connection, constant tensor: nabla T = 0") {
  const JetModel d = covariant_derivative(flat_constant_jet());
  CHECK(d.field_arity() == 3);
  CHECK(d.order() == 2);
  for (const auto& comp : d.field()) CHECK(comp.is_zero());
}

TEST_CASE("flat connection differentiates componentwise") {
  // T_{12} = x1, everything else zero: (nabla T)_{1,1,2} = 1 only
  const size_t dim = 2;
  const RingPtr ring = JetModel::coordinate_ring(dim);
  std::vector<Polynomial> gamma(dim * dim * dim, Polynomial(ring));
  std::vector<Polynomial> field(dim * dim, Polynomial(ring));
  field[0 * dim + 1] = Polynomial::variable(ring, "x1");
  const JetModel jet(dim, 2, std::move(gamma), 2, std::move(field));
  const JetModel d = covariant_derivative(jet);
  IndexTuple idx(3, 0);
  bool more = true;
  while (more) {
    const Polynomial& comp = d.field_at(idx);
    if (idx == IndexTuple{0, 0, 1})
      CHECK(comp == Polynomial::constant(d.ring(), Rational(1)));
    else
      CHECK(comp.is_zero());
    more = false;
    for (size_t pos = idx.size(); pos-- > 0;) {
      if (++idx[pos] < dim) { more = true; break; }
      idx[pos] = 0;
    }
  }
}

TEST_CASE("derivative order bookkeeping and exhaustion") {
  const JetModel jet = flat_constant_jet();  // order 3
  CHECK_THROWS_WITH_AS(covariant_derivative(jet, 4),
                       "jet order too low for requested derivative count", DomainError);
  CHECK(covariant_derivative(jet, 3).order() == 0);
}

TEST_CASE("torsion is rejected at construction") {
  const size_t dim = 2;
  const RingPtr ring = JetModel::coordinate_ring(dim);
  std::vector<Polynomial> gamma(dim * dim * dim, Polynomial(ring));
  gamma[(0 * dim + 0) * dim + 1] = Polynomial::variable(ring, "x1");  // G^1_{12}
  // mirrored entry left at zero: torsion
  std::vector<Polynomial> field(dim, Polynomial(ring));
  CHECK_THROWS_WITH_AS(JetModel(dim, 2, gamma, 1, field, 0), "connection has torsion",
                       InvariantViolation);
}

TEST_CASE("connection curvature: flat and linear examples") {
  const size_t dim = 2;
  const RingPtr ring = JetModel::coordinate_ring(dim);
  {
    std::vector<Polynomial> gamma(dim * dim * dim, Polynomial(ring));
    std::vector<Polynomial> field(dim, Polynomial(ring));
    const JetModel jet(dim, 2, std::move(gamma), 1, std::move(field));
    for (const auto& comp : connection_curvature(jet)) CHECK(comp.is_zero());
  }
  {
    // G^1_{22} = x1: R^1_{122}(0) = d_1 G^1_{22} = 1
    std::vector<Polynomial> gamma(dim * dim * dim, Polynomial(ring));
    gamma[(0 * dim + 1) * dim + 1] = Polynomial::variable(ring, "x1");
    std::vector<Polynomial> field(dim, Polynomial(ring));
    const JetModel jet(dim, 2, std::move(gamma), 1, std::move(field));
    const auto R = connection_curvature(jet);
    const size_t flat_1122 = ((0 * dim + 1) * dim + 1) * dim + 0;
    CHECK(R[flat_1122].constant_term() == Rational(1));
  }
}

TEST_CASE("curvature components are antisymmetric in the leading pair") {
  std::mt19937_64 rng(17);
  const JetModel jet = random_jet(2, 3, 1, rng);
  const auto R = connection_curvature(jet);
  const size_t n = jet.dim();
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      for (size_t k = 0; k < n; ++k)
        for (size_t l = 0; l < n; ++l)
          CHECK((R[((i * n + j) * n + k) * n + l] + R[((j * n + i) * n + k) * n + l])
                    .is_zero());
}

TEST_CASE("covariant derivative is additive in the field") {
  std::mt19937_64 rng(19);
  const JetModel a = random_jet(2, 3, 2, rng);
  const JetModel b_raw = random_jet(2, 3, 2, rng);
  // same connection as a, field from b
  JetModel b(a.dim(), a.order(), a.gamma(), 2, b_raw.field());
  std::vector<Polynomial> sum_field;
  for (size_t f = 0; f < a.field().size(); ++f)
    sum_field.push_back(a.field()[f] + b.field()[f]);
  const JetModel sum(a.dim(), a.order(), a.gamma(), 2, std::move(sum_field));
  const JetModel da = covariant_derivative(a), db = covariant_derivative(b),
                 dsum = covariant_derivative(sum);
  for (size_t f = 0; f < dsum.field().size(); ++f)
    CHECK((dsum.field()[f] - da.field()[f] - db.field()[f]).is_zero());
}

TEST_CASE("signed-sum identity, k = 1: the classical antisymmetrized second derivative") {
  std::mt19937_64 rng(20240817);
  for (int trial = 0; trial < 12; ++trial) {
    const size_t dim = 2 + trial % 3;
    const JetModel jet = random_jet(dim, 2, 1 + trial % 2, rng, trial);
    std::vector<std::pair<size_t, size_t>> pairs{{trial % dim, (trial + 1) % dim}};
    std::vector<size_t> ys(jet.field_arity(), trial % dim);
    const LemmaReport rep = verify_signed_sum(jet, 1, pairs, ys);
    CHECK(rep.pass);
  }
}

TEST_CASE("signed-sum identity, k = 2 on degree-4 jets") {
  std::mt19937_64 rng(555);
  for (int trial = 0; trial < 3; ++trial) {
    const JetModel jet = random_jet(2, 4, 2, rng, trial);
    const LemmaReport rep =
        verify_signed_sum(jet, 2, {{0, 1}, {1, 0}}, {0, 1});
    CHECK(rep.pass);
  }
}

TEST_CASE("signed-sum argument validation") {
  std::mt19937_64 rng(1);
  const JetModel jet = random_jet(2, 2, 1, rng);
  CHECK_THROWS_WITH_AS(verify_signed_sum(jet, 2, {{0, 1}, {0, 1}}, {0}),
                       "jet order too low for requested derivative count", DomainError);
  CHECK_THROWS_AS(verify_signed_sum(jet, 1, {}, {0}), DomainError);
  CHECK_THROWS_AS(verify_signed_sum(jet, 1, {{0, 1}}, {0, 1}), DomainError);
}

TEST_CASE("engineered jets: nabla^2 T(0) = 0 and R.T(0) = 0 follow together") {
  std::mt19937_64 rng(2718);
  for (int trial = 0; trial < 4; ++trial) {
    const size_t dim = 2 + trial % 2;
    const JetModel jet = make_second_order_parallel_jet(dim, rng, trial);
    const JetModel dd = covariant_derivative(jet, 2);
    for (const auto& comp : dd.field()) CHECK(comp.constant_term().is_zero());
    const DenseTensor rt =
        iterated_action(curvature_at_origin(jet), field_at_origin(jet), 1);
    for (size_t f = 0; f < rt.size(); ++f) CHECK(rt.flat(f).is_zero());
  }
}
