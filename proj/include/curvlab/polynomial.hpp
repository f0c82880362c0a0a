#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "curvlab/common.hpp"
#include "curvlab/rational.hpp"

namespace curvlab {

// Ordered list of variable names shared by all polynomials of one ring.
class PolyRing {
 public:
  explicit PolyRing(std::vector<std::string> names) : names_(std::move(names)) {
    for (size_t i = 0; i < names_.size(); ++i) {
      for (size_t j = i + 1; j < names_.size(); ++j) {
        if (names_[i] == names_[j])
          throw UsageError("duplicate ring variable '" + names_[i] + "'");
      }
    }
  }

  size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(size_t i) const { return names_.at(i); }

  // -1 when the name is not a ring variable.
  int index_of(const std::string& name) const {
    for (size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return static_cast<int>(i);
    return -1;
  }

  bool same_as(const PolyRing& o) const { return names_ == o.names_; }

 private:
  std::vector<std::string> names_;
};

using RingPtr = std::shared_ptr<const PolyRing>;

inline RingPtr make_ring(std::vector<std::string> names) {
  return std::make_shared<const PolyRing>(std::move(names));
}

using ExponentVec = std::vector<uint32_t>;

inline uint32_t total_degree(const ExponentVec& e) {
  return std::accumulate(e.begin(), e.end(), uint32_t{0});
}

// Graded lexicographic monomial order: total degree first, then lex.
struct GradedLexLess {
  bool operator()(const ExponentVec& a, const ExponentVec& b) const {
    const uint32_t da = total_degree(a), db = total_degree(b);
    if (da != db) return da < db;
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }
};

// Sparse multivariate polynomial over Rational. Canonical form: no stored
// coefficient is zero, every exponent vector has ring().size() entries.
class Polynomial {
 public:
  using TermMap = std::map<ExponentVec, Rational, GradedLexLess>;

  Polynomial() : ring_(make_ring({})) {}
  explicit Polynomial(RingPtr ring) : ring_(std::move(ring)) {
    if (!ring_) throw UsageError("polynomial requires a ring");
  }

  static Polynomial constant(RingPtr ring, const Rational& c) {
    Polynomial p(std::move(ring));
    if (!c.is_zero()) p.terms_.emplace(ExponentVec(p.ring_->size(), 0), c);
    return p;
  }

  static Polynomial variable(RingPtr ring, const std::string& name) {
    Polynomial p(std::move(ring));
    const int idx = p.ring_->index_of(name);
    if (idx < 0) throw UsageError("unknown ring variable '" + name + "'");
    ExponentVec e(p.ring_->size(), 0);
    e[static_cast<size_t>(idx)] = 1;
    p.terms_.emplace(std::move(e), Rational(1));
    return p;
  }

  static Polynomial monomial(RingPtr ring, ExponentVec exps, const Rational& c) {
    Polynomial p(std::move(ring));
    if (exps.size() != p.ring_->size())
      throw KindError("monomial exponent arity mismatch");
    if (!c.is_zero()) p.terms_.emplace(std::move(exps), c);
    return p;
  }

  const RingPtr& ring() const { return ring_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  size_t term_count() const { return terms_.size(); }

  bool is_constant() const {
    return terms_.empty() ||
           (terms_.size() == 1 && total_degree(terms_.begin()->first) == 0);
  }

  Rational constant_term() const {
    ExponentVec zero(ring_->size(), 0);
    auto it = terms_.find(zero);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  uint32_t degree() const {
    uint32_t d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, total_degree(e));
    return d;
  }

  bool uses_variable(const std::string& name) const {
    const int idx = ring_->index_of(name);
    if (idx < 0) return false;
    for (const auto& [e, c] : terms_)
      if (e[static_cast<size_t>(idx)] > 0) return true;
    return false;
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    check_rings(a, b);
    Polynomial out = a;
    for (const auto& [e, c] : b.terms_) out.add_term(e, c);
    return out;
  }

  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    check_rings(a, b);
    Polynomial out = a;
    for (const auto& [e, c] : b.terms_) out.add_term(e, -c);
    return out;
  }

  Polynomial operator-() const {
    Polynomial out(*this);
    for (auto& [e, c] : out.terms_) c = -c;
    return out;
  }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    check_rings(a, b);
    Polynomial out(a.ring_);
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        ExponentVec e(ea.size());
        for (size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
        out.add_term(std::move(e), ca * cb);
      }
    }
    return out;
  }

  friend Polynomial operator*(const Rational& c, const Polynomial& p) {
    Polynomial out(p.ring_);
    if (c.is_zero()) return out;
    out.terms_ = p.terms_;
    for (auto& [e, pc] : out.terms_) pc = pc * c;
    return out;
  }

  Polynomial& operator+=(const Polynomial& o) { return *this = *this + o; }
  Polynomial& operator-=(const Polynomial& o) { return *this = *this - o; }
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  Polynomial pow(unsigned k) const {
    Polynomial acc = constant(ring_, Rational(1));
    Polynomial base = *this;
    while (k > 0) {
      if (k & 1u) acc = acc * base;
      base = base * base;
      k >>= 1u;
    }
    return acc;
  }

  // Canonical equality: same ring and identical term maps.
  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    if (!a.ring_->same_as(*b.ring_)) return false;
    return a.terms_ == b.terms_;
  }
  friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

  // Exact substitution of every variable appearing in the polynomial.
  Rational evaluate(const std::map<std::string, Rational>& assignment) const {
    std::vector<std::optional<Rational>> vals(ring_->size());
    for (size_t i = 0; i < ring_->size(); ++i) {
      auto it = assignment.find(ring_->name(i));
      if (it != assignment.end()) vals[i] = it->second;
    }
    Rational acc(0);
    for (const auto& [e, c] : terms_) {
      Rational term = c;
      for (size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) continue;
        if (!vals[i])
          throw DomainError("evaluate: missing value for variable '" +
                            ring_->name(i) + "'");
        term = term * vals[i]->pow(e[i]);
      }
      acc += term;
    }
    return acc;
  }

  double evaluate_double(const std::map<std::string, double>& assignment) const {
    double acc = 0.0;
    for (const auto& [e, c] : terms_) {
      double term = c.to_double();
      for (size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) continue;
        auto it = assignment.find(ring_->name(i));
        if (it == assignment.end())
          throw DomainError("evaluate: missing value for variable '" +
                            ring_->name(i) + "'");
        for (uint32_t r = 0; r < e[i]; ++r) term *= it->second;
      }
      acc += term;
    }
    return acc;
  }

  // Partial substitution; the result lives in the same ring.
  Polynomial substitute(const std::map<std::string, Rational>& assignment) const {
    std::vector<std::optional<Rational>> vals(ring_->size());
    for (const auto& [name, v] : assignment) {
      const int idx = ring_->index_of(name);
      if (idx >= 0) vals[static_cast<size_t>(idx)] = v;
    }
    Polynomial out(ring_);
    for (const auto& [e, c] : terms_) {
      Rational coeff = c;
      ExponentVec kept(e.size(), 0);
      for (size_t i = 0; i < e.size(); ++i) {
        if (vals[i] && e[i] > 0)
          coeff = coeff * vals[i]->pow(e[i]);
        else
          kept[i] = e[i];
      }
      out.add_term(std::move(kept), coeff);
    }
    return out;
  }

  Polynomial truncate_degree(uint32_t max_degree) const {
    Polynomial out(ring_);
    for (const auto& [e, c] : terms_)
      if (total_degree(e) <= max_degree) out.terms_.emplace(e, c);
    return out;
  }

  Polynomial derivative(size_t var_index) const {
    if (var_index >= ring_->size()) throw DomainError("derivative: bad variable index");
    Polynomial out(ring_);
    for (const auto& [e, c] : terms_) {
      if (e[var_index] == 0) continue;
      ExponentVec d = e;
      d[var_index] -= 1;
      out.add_term(std::move(d), Rational(static_cast<long>(e[var_index])) * c);
    }
    return out;
  }

  // Terms printed in descending graded-lex order, e.g. "-l1^3*w13 + 2*g".
  std::string str() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto& [e, c] = *it;
      std::string mono;
      for (size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) continue;
        if (!mono.empty()) mono += "*";
        mono += ring_->name(i);
        if (e[i] > 1) mono += "^" + std::to_string(e[i]);
      }
      std::string coeff;
      const Rational a = c.abs();
      if (mono.empty())
        coeff = a.str();
      else if (a == Rational(1))
        coeff = mono;
      else
        coeff = a.str() + "*" + mono;
      if (out.empty())
        out = (c.sign() < 0 ? "-" : "") + coeff;
      else
        out += (c.sign() < 0 ? " - " : " + ") + coeff;
    }
    return out;
  }

 private:
  static void check_rings(const Polynomial& a, const Polynomial& b) {
    if (a.ring_ == b.ring_) return;
    if (!a.ring_->same_as(*b.ring_))
      throw KindError("polynomial ring mismatch");
  }

  void add_term(ExponentVec e, const Rational& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.emplace(std::move(e), c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  RingPtr ring_;
  TermMap terms_;
};

}  // namespace curvlab
