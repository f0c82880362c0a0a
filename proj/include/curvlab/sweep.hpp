#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "curvlab/quantities.hpp"
#include "curvlab/report.hpp"

namespace curvlab {

struct GridRange {
  double lo = 0.0, hi = 0.0, step = 1.0;

  std::vector<double> values(bool exclude_zero = false) const {
    if (step <= 0.0) throw UsageError("grid step must be positive");
    if (hi < lo) throw UsageError("grid range is empty");
    std::vector<double> out;
    for (double x = lo; x <= hi + step * 1e-9; x += step) {
      double v = x;
      if (std::fabs(v) < step * 0.5) v = 0.0;  // snap to an exact zero
      if (exclude_zero && v == 0.0) continue;
      out.push_back(v);
    }
    if (out.empty()) throw UsageError("sweep specification selects no points");
    return out;
  }
};

// Numeric companion of the rank theorem: sweep model parameters, find points
// whose depth-k components vanish at the witness set, and assert the rank
// bound there.
struct SweepSpec {
  GridRange lambda1{-2, 2, 1}, lambda2{-2, 2, 1};
  GridRange gamma{-2, 2, 1};      // zero is excluded by construction
  GridRange lambda34{0, 0, 1};    // extra eigenvalues of the diagonal form
  std::vector<int> signs{1, -1};
  unsigned k_max = 3;
  double tolerance = kDefaultTol;
  uint64_t seed = 1;
  size_t omega_samples = 3;       // standard omega + seeded random draws
  double omega_lo = -2.0, omega_hi = 2.0;
  size_t random_tuples = 200;     // random witness tuples per (k, point)
  bool block_form = true, diagonal_form = true;
};

inline void validate_sweep(const SweepSpec& spec) {
  if (spec.k_max < 1) throw UsageError("sweep k_max must be at least 1");
  if (spec.tolerance <= 0) throw UsageError("sweep tolerance must be positive");
  if (spec.omega_samples < 1) throw UsageError("sweep needs at least one omega sample");
  if (spec.signs.empty()) throw UsageError("sweep needs at least one sign");
  if (!spec.block_form && !spec.diagonal_form)
    throw UsageError("sweep specification selects no points");
  const auto l1 = spec.lambda1.values();
  const auto l2 = spec.lambda2.values();
  const auto g = spec.gamma.values(true);
  // the smallest nonzero magnitude the grid can produce bounds the signal the
  // tolerance has to resolve
  double signal = 1.0;
  for (double v : g) signal = std::min(signal, std::fabs(v));
  for (const auto& vals : {l1, l2})
    for (double v : vals)
      if (v != 0.0) signal = std::min(signal, std::fabs(v));
  if (spec.tolerance >= 0.5 * signal) throw UsageError("tolerance exceeds signal");
}

namespace detail_sweep {

inline IndexTuple mirror12(IndexTuple t) {
  for (auto& v : t) {
    if (v == 0)
      v = 1;
    else if (v == 1)
      v = 0;
  }
  return t;
}

// Witness tuples for the block form at depth exactly k: every named-quantity
// tuple, its e1<->e2 mirror, and seeded random tuples. The closed-form T
// component (the strongest discriminator) comes first.
inline std::vector<IndexTuple> block_witnesses(unsigned k, size_t random_count,
                                               std::mt19937_64& rng) {
  std::vector<IndexTuple> out;
  auto push_with_mirror = [&](const IndexTuple& t) {
    out.push_back(t);
    out.push_back(mirror12(t));
  };
  if (k >= 2)
    push_with_mirror(named_quantity_tuple(NamedQuantity::t(k, 0, 0, k - 1, 3, 3), 4));
  push_with_mirror(named_quantity_tuple(NamedQuantity::a(k), 4));
  push_with_mirror(named_quantity_tuple(NamedQuantity::b(k), 4));
  push_with_mirror(named_quantity_tuple(NamedQuantity::c(k), 4));
  push_with_mirror(named_quantity_tuple(NamedQuantity::d(k), 4));
  for (unsigned i = 1; i <= k + 1; ++i)
    for (size_t X : {size_t{1}, size_t{3}, size_t{4}})
      for (size_t Y : {size_t{1}, size_t{3}, size_t{4}}) {
        if (X == Y) continue;
        push_with_mirror(named_quantity_tuple(NamedQuantity::e(k, i, X, Y), 4));
      }
  for (unsigned p = 0; p + 1 <= k; ++p)
    for (unsigned q = 0; p + q + 1 <= k; ++q)
      for (size_t X : {size_t{3}, size_t{4}})
        for (size_t Y : {size_t{3}, size_t{4}})
          push_with_mirror(named_quantity_tuple(
              NamedQuantity::t(k, p, q, k - 1 - p - q, X, Y), 4));
  for (size_t n = 0; n < random_count; ++n) {
    IndexTuple t(2 * k + 2);
    for (auto& v : t) v = static_cast<uint8_t>(rng() % 4);
    out.push_back(std::move(t));
  }
  return out;
}

// Witness tuples for the diagonal form: depth 1 is enumerated completely;
// higher depths use the discriminating family (x,j) + k x (j,m) plus random
// tuples.
inline std::vector<IndexTuple> diagonal_witnesses(unsigned k, size_t random_count,
                                                  std::mt19937_64& rng) {
  std::vector<IndexTuple> out;
  if (k == 1) {
    IndexTuple t(4, 0);
    bool more = true;
    while (more) {
      out.push_back(t);
      more = false;
      for (size_t pos = t.size(); pos-- > 0;) {
        if (++t[pos] < 4) { more = true; break; }
        t[pos] = 0;
      }
    }
    return out;
  }
  for (uint8_t x = 0; x < 4; ++x)
    for (uint8_t j = 0; j < 4; ++j)
      for (uint8_t m = 0; m < 4; ++m) {
        if (x == j || j == m || x == m) continue;
        IndexTuple t{x, j};
        for (unsigned rep = 0; rep < k; ++rep) {
          t.push_back(j);
          t.push_back(m);
        }
        out.push_back(std::move(t));
      }
  for (size_t n = 0; n < random_count; ++n) {
    IndexTuple t(2 * k + 2);
    for (auto& v : t) v = static_cast<uint8_t>(rng() % 4);
    out.push_back(std::move(t));
  }
  return out;
}

inline Matrix standard_float_omega() {
  Matrix w(4, 4, Scalar(0.0));
  w.at(0, 1) = Scalar(1.0);
  w.at(1, 0) = Scalar(-1.0);
  w.at(2, 3) = Scalar(1.0);
  w.at(3, 2) = Scalar(-1.0);
  return w;
}

inline Matrix random_sweep_omega(std::mt19937_64& rng, double lo, double hi, double tol) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    Matrix w(4, 4, Scalar(0.0));
    for (size_t i = 0; i < 4; ++i)
      for (size_t j = i + 1; j < 4; ++j) {
        const double u = static_cast<double>(rng() % 1000000) / 1000000.0;
        const double v = lo + (hi - lo) * u;
        w.at(i, j) = Scalar(v);
        w.at(j, i) = Scalar(-v);
      }
    const double pf = w.at(0, 1).flt() * w.at(2, 3).flt() -
                      w.at(0, 2).flt() * w.at(1, 3).flt() +
                      w.at(0, 3).flt() * w.at(1, 2).flt();
    if (std::fabs(pf) > 10 * tol) return w;
  }
  throw UsageError("sweep omega range produces only degenerate forms");
}

struct PointOutcome {
  bool in_locus = false;
  unsigned locus_k = 0;
  int rank = -1;
  bool violator = false;
  bool certified = false;  // locus confirmed by complete component enumeration
};

// Every component of R^k.omega, with early exit: exact (to tolerance) locus
// membership. 4^{2k+2} tuples, so only called on points that survive the
// cheap screening witnesses.
inline bool all_components_vanish(const QuantityEvaluator& eval, unsigned k,
                                  double tol) {
  IndexTuple t(2 * k + 2, 0);
  bool more = true;
  while (more) {
    if (std::fabs(eval.component(t).flt()) > tol) return false;
    more = false;
    for (size_t pos = t.size(); pos-- > 0;) {
      if (++t[pos] < 4) { more = true; break; }
      t[pos] = 0;
    }
  }
  return true;
}

inline PointOutcome examine_point(const PointModel& model, bool diagonal,
                                  const SweepSpec& spec, uint64_t point_seed) {
  PointOutcome outcome;
  QuantityEvaluator eval(model);
  for (unsigned k = 1; k <= spec.k_max; ++k) {
    std::mt19937_64 rng(point_seed ^ (uint64_t{k} << 32));
    const std::vector<IndexTuple> witnesses =
        diagonal ? diagonal_witnesses(k, spec.random_tuples, rng)
                 : block_witnesses(k, spec.random_tuples, rng);
    bool vanishes = true;
    for (const IndexTuple& t : witnesses) {
      if (std::fabs(eval.component(t).flt()) > spec.tolerance) {
        vanishes = false;
        break;
      }
    }
    if (!vanishes) continue;
    // screening passed; certify by complete enumeration where affordable
    const bool certifiable = k <= 3;
    if (certifiable && !all_components_vanish(eval, k, spec.tolerance)) continue;
    const double pf = omega_pfaffian(model).flt();
    if (std::fabs(pf) <= spec.tolerance) continue;  // degenerate omega, reject
    outcome.in_locus = true;
    outcome.locus_k = k;
    outcome.certified = certifiable;
    outcome.rank = model.S.rank(spec.tolerance);
    if (diagonal) {
      for (size_t i = 0; i < 4; ++i)
        if (std::fabs(model.S.at(i, i).flt()) > spec.tolerance) outcome.violator = true;
    } else if (outcome.rank > 1) {
      outcome.violator = true;
    }
    break;  // the rank bound is settled at the first locus depth
  }
  return outcome;
}

}  // namespace detail_sweep

// Numeric campaign. Every grid point whose witness components of R^k.omega
// all vanish (some k <= k_max) with omega non-degenerate must satisfy the
// rank bound: rank S <= 1 for the block form, S = 0 for the diagonal form.
inline LemmaReport theorem_search_sweep(const SweepSpec& spec, unsigned parallelism = 1) {
  validate_sweep(spec);
  LemmaReport rep;
  rep.lemma = "theorem-search";
  rep.mode = "float";
  rep.params["k_max"] = std::to_string(spec.k_max);
  rep.params["seed"] = std::to_string(spec.seed);

  struct Point {
    PointModel model;
    bool diagonal;
    std::string desc;
    uint64_t seed;
  };
  std::vector<Point> points;

  std::mt19937_64 omega_rng(spec.seed);
  std::vector<Matrix> omegas{detail_sweep::standard_float_omega()};
  for (size_t i = 1; i < spec.omega_samples; ++i)
    omegas.push_back(detail_sweep::random_sweep_omega(omega_rng, spec.omega_lo,
                                                      spec.omega_hi, spec.tolerance));

  const auto l1v = spec.lambda1.values();
  const auto l2v = spec.lambda2.values();
  const auto gv = spec.gamma.values(true);
  const auto l34v = spec.lambda34.values();

  if (spec.block_form) {
    for (double l1 : l1v)
      for (double l2 : l2v)
        for (double g : gv)
          for (int s : spec.signs)
            for (size_t wi = 0; wi < omegas.size(); ++wi) {
              Point p{canonical_form_b(Scalar(l1), Scalar(l2), Scalar(g), s,
                                       omegas[wi], spec.tolerance),
                      false,
                      "block l1=" + std::to_string(l1) + " l2=" + std::to_string(l2) +
                          " g=" + std::to_string(g) + " s=" + std::to_string(s) +
                          " omega#" + std::to_string(wi),
                      spec.seed + points.size()};
              points.push_back(std::move(p));
            }
  }
  if (spec.diagonal_form) {
    for (double l1 : l1v)
      for (double l2 : l2v)
        for (double l3 : l34v)
          for (double l4 : l34v)
            for (size_t wi = 0; wi < omegas.size(); ++wi) {
              Point p{canonical_form_a(Scalar(l1), Scalar(l2), Scalar(l3), Scalar(l4),
                                       omegas[wi]),
                      true,
                      "diagonal l=(" + std::to_string(l1) + "," + std::to_string(l2) +
                          "," + std::to_string(l3) + "," + std::to_string(l4) +
                          ") omega#" + std::to_string(wi),
                      spec.seed + points.size()};
              points.push_back(std::move(p));
            }
  }
  if (points.empty()) throw UsageError("sweep specification selects no points");

  std::vector<detail_sweep::PointOutcome> outcomes(points.size());
  const unsigned workers = std::max(1u, parallelism);
  if (workers == 1) {
    for (size_t i = 0; i < points.size(); ++i)
      outcomes[i] =
          detail_sweep::examine_point(points[i].model, points[i].diagonal, spec,
                                      points[i].seed);
  } else {
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    for (unsigned wkr = 0; wkr < workers; ++wkr)
      pool.emplace_back([&]() {
        while (true) {
          const size_t i = next.fetch_add(1);
          if (i >= points.size()) return;
          outcomes[i] = detail_sweep::examine_point(points[i].model,
                                                    points[i].diagonal, spec,
                                                    points[i].seed);
        }
      });
    for (auto& t : pool) t.join();
  }

  size_t locus_hits = 0, violators = 0, certified = 0, examples = 0;
  for (size_t i = 0; i < points.size(); ++i) {
    if (outcomes[i].in_locus) ++locus_hits;
    if (outcomes[i].certified) ++certified;
    if (outcomes[i].violator) {
      ++violators;
      rep.add_condition("rank bound violated at " + points[i].desc +
                            " (locus k=" + std::to_string(outcomes[i].locus_k) +
                            ", rank=" + std::to_string(outcomes[i].rank) + ")",
                        false);
    } else if (outcomes[i].in_locus && examples < 8) {
      ++examples;
      rep.note("locus: " + points[i].desc + " k=" + std::to_string(outcomes[i].locus_k) +
               " rank=" + std::to_string(outcomes[i].rank) +
               (outcomes[i].certified ? " (certified)" : " (screened)"));
    }
  }
  rep.add_condition("no rank violators on " + std::to_string(points.size()) + " points",
                    violators == 0);
  rep.note("points=" + std::to_string(points.size()) +
           " locus_hits=" + std::to_string(locus_hits) + " (certified " +
           std::to_string(certified) + ") violators=" + std::to_string(violators));
  return rep;
}

}  // namespace curvlab
