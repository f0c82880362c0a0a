#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "curvlab/checks.hpp"

using namespace curvlab;

TEST_CASE("determinant-lemma identities hold with free block parameters") {
  const Bench b = make_free_bench();
  const LemmaReport rep = check_det_formulas(b, 3);
  CHECK(rep.pass);
  CHECK(rep.residuals.size() == 18);  // 6 cases per k
}

TEST_CASE("corollary: closed forms factor through the block determinant") {
  const Bench b = make_free_bench();
  const LemmaReport rep = check_corollary_detzero(b, 2);
  CHECK(rep.pass);
}

TEST_CASE("sign-coupled identity suites pass for both signs") {
  for (int s : {1, -1}) {
    const Bench b = make_sign_bench(s);
    CHECK(check_abcd(b, 4).pass);
    CHECK(check_eki(b, 4).pass);
    CHECK(check_akck_closed_forms(b, 5).pass);
    CHECK(check_t_family(b, 4).pass);
    CHECK(theorem_search_symbolic(b, 4).pass);
  }
}

TEST_CASE("float benches satisfy the same identities at tolerance") {
  for (int s : {1, -1}) {
    const Bench b = make_float_bench(s, false, 424242, 1e-9);
    CHECK(b.mode == "float");
    CHECK(check_abcd(b, 4).pass);
    CHECK(check_eki(b, 3).pass);
    CHECK(check_t_family(b, 4).pass);
    CHECK(theorem_search_symbolic(b, 3).pass);
  }
  const Bench free_b = make_float_bench(1, true, 77, 1e-9);
  CHECK(check_det_formulas(free_b, 2).pass);
}

TEST_CASE("exact and float pipelines agree at the float bench's point") {
  const Bench fb = make_float_bench(1, false, 31415, 1e-9);
  const Bench eb = make_sign_bench(1);
  std::map<std::string, double> point = fb.point;
  // compare a spread of quantities symbolically evaluated at the point
  const std::vector<NamedQuantity> probes{
      NamedQuantity::a(3), NamedQuantity::b(2), NamedQuantity::c(3),
      NamedQuantity::d(2), NamedQuantity::e(2, 3, 1, 3),
      NamedQuantity::t(3, 0, 0, 2, 3, 3), NamedQuantity::t(2, 1, 0, 0, 3, 4)};
  for (const auto& q : probes) {
    const double symbolic_at_point = eb.q(q).poly().evaluate_double(point);
    const double floating = fb.q(q).flt();
    CHECK(std::fabs(symbolic_at_point - floating) <= 1e-9);
  }
}

TEST_CASE("basis-change lemma: exact and float legs") {
  const auto reports = check_basis_change(5, 20, 2024, 1e-9);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].mode == "exact");
  CHECK(reports[0].pass);
  CHECK(reports[0].residuals.size() >= 15);  // 3 conditions per exact sample
  CHECK(reports[1].mode == "float");
  CHECK(reports[1].pass);
  CHECK(reports[1].residuals.size() == 20);
}

TEST_CASE("numeric sweep finds no violators and certifies its locus") {
  SweepSpec spec;  // default grids
  const LemmaReport rep = theorem_search_sweep(spec, 1);
  CHECK(rep.pass);
  REQUIRE(!rep.notes.empty());
  CHECK(rep.notes.back().find("violators=0") != std::string::npos);
}

TEST_CASE("single-point sweep reports the rank-1 locus") {
  SweepSpec spec;
  spec.lambda1 = {0, 0, 1};
  spec.lambda2 = {0, 0, 1};
  spec.gamma = {1, 1, 1};
  spec.signs = {1};
  spec.omega_samples = 1;
  spec.diagonal_form = false;
  const LemmaReport rep = theorem_search_sweep(spec, 1);
  CHECK(rep.pass);
  bool found_rank1 = false;
  for (const auto& note : rep.notes)
    if (note.find("rank=1") != std::string::npos) found_rank1 = true;
  CHECK(found_rank1);
}

TEST_CASE("sweep guards: absurd tolerance and empty grids") {
  SweepSpec absurd;
  absurd.tolerance = 10.0;
  CHECK_THROWS_WITH_AS(validate_sweep(absurd), "tolerance exceeds signal", UsageError);

  SweepSpec empty;
  empty.gamma = {0.4, 0.4, 1.0};  // snaps to zero, which gamma excludes
  CHECK_THROWS_WITH_AS(validate_sweep(empty), "sweep specification selects no points",
                       UsageError);

  SweepSpec no_forms;
  no_forms.block_form = false;
  no_forms.diagonal_form = false;
  CHECK_THROWS_AS(validate_sweep(no_forms), UsageError);
}

TEST_CASE("nabla corollary at jet level") {
  const LemmaReport rep = check_nabla_corollary(4, 123);
  CHECK(rep.pass);
  REQUIRE(!rep.notes.empty());
  CHECK(rep.notes.back().find("nonzero") != std::string::npos);
}

TEST_CASE("registry: ids, unknown id, and parallel equivalence") {
  CHECK(check_ids().size() == 9);
  CheckOptions opt;
  opt.k_max = 2;
  CHECK_THROWS_AS(run_check("bogus-id", opt), UsageError);
  try {
    run_check("bogus-id", opt);
  } catch (const UsageError& e) {
    CHECK(std::string(e.what()).find("abcd") != std::string::npos);
  }

  const auto serial = run_check("abcd", opt);
  CHECK(serial.size() == 2);  // one report per sign
  CHECK(all_pass(serial));

  CheckOptions par = opt;
  par.parallelism = 3;
  const auto reports_serial = run_all_checks(opt);
  const auto reports_parallel = run_all_checks(par);
  REQUIRE(reports_serial.size() == reports_parallel.size());
  for (size_t i = 0; i < reports_serial.size(); ++i) {
    CHECK(reports_serial[i].lemma == reports_parallel[i].lemma);
    CHECK(reports_serial[i].pass == reports_parallel[i].pass);
    CHECK(reports_serial[i].residuals.size() == reports_parallel[i].residuals.size());
  }
  CHECK(all_pass(reports_serial));
}

TEST_CASE("the verdict machinery detects violations (negative controls)") {
  const Bench b = make_sign_bench(1);
  LemmaReport rep;
  rep.lemma = "negative-control";
  // wrong sign: A1 - l1*w13 is -2*l1*w13, not zero
  rep.add_residual("A1 - l1*w13", b.A(1) - b.l1 * b.w(1, 3));
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(rep.residuals[0].zero);
  CHECK(rep.residuals[0].value == "-2*l1*w13");

  // the sign-coupled recursions genuinely need alpha = s*g, beta = -s*g:
  // on the free bench they fail
  const Bench free_b = make_free_bench();
  Bench forced = free_b;
  forced.s = 1;  // pretend the coupling holds
  const LemmaReport ab = check_abcd(forced, 2);
  CHECK_FALSE(ab.pass);
}

TEST_CASE("sweep results are independent of the worker count") {
  SweepSpec spec;
  spec.lambda1 = {-1, 1, 1};
  spec.lambda2 = {-1, 1, 1};
  spec.gamma = {-1, 1, 1};
  spec.omega_samples = 2;
  const LemmaReport serial = theorem_search_sweep(spec, 1);
  const LemmaReport parallel = theorem_search_sweep(spec, 3);
  CHECK(serial.pass == parallel.pass);
  CHECK(serial.residuals.size() == parallel.residuals.size());
  REQUIRE(!serial.notes.empty());
  CHECK(serial.notes == parallel.notes);
}

TEST_CASE("operation-style check aliases resolve") {
  CheckOptions opt;
  opt.k_max = 2;
  CHECK(all_pass(run_check("check-abcd", opt)));
  CHECK(all_pass(run_check("check-akck-and-closed-forms", opt)));
  CHECK(all_pass(run_check("check-basis-change-lemma", opt)));
  CheckOptions zero = opt;
  zero.k_max = 0;
  CHECK_THROWS_AS(run_check("abcd", zero), UsageError);
}

TEST_CASE("float verify mode passes across the registry") {
  CheckOptions opt;
  opt.k_max = 3;
  opt.mode = "float";
  opt.seed = 99;
  for (const auto& id : check_ids()) {
    const auto reports = run_check(id, opt);
    CHECK(all_pass(reports));
  }
}
