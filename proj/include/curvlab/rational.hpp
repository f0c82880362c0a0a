#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>

#include "curvlab/common.hpp"

namespace curvlab {

// Exact rational number. Always stored canonically: gcd(|num|, den) = 1,
// den > 0, zero is 0/1.
class Rational {
 public:
  Rational() : v_(0) {}
  Rational(long n) : v_(n) {}  // NOLINT: implicit by design, 2 + r should work
  Rational(long num, long den) {
    if (den == 0) throw DomainError("rational with zero denominator");
    v_ = mpq_class(num, den);
    v_.canonicalize();
  }
  explicit Rational(const mpq_class& q) : v_(q) { v_.canonicalize(); }

  // Accepts "a", "-a" or "a/b" in base 10.
  static Rational parse(const std::string& text) {
    try {
      mpq_class q(text, 10);
      if (q.get_den() == 0) throw DomainError("rational with zero denominator");
      q.canonicalize();
      return Rational(std::move(q), already_canonical{});
    } catch (const std::invalid_argument&) {
      throw UsageError("not a rational literal: '" + text + "'");
    }
  }

  bool is_zero() const { return sgn(v_) == 0; }
  int sign() const { return sgn(v_); }
  const mpq_class& value() const { return v_; }
  mpz_class numerator() const { return v_.get_num(); }
  mpz_class denominator() const { return v_.get_den(); }
  bool is_integer() const { return v_.get_den() == 1; }
  double to_double() const { return v_.get_d(); }

  std::string str() const {
    if (is_integer()) return v_.get_num().get_str();
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
  }

  Rational pow(unsigned k) const {
    Rational acc(1);
    Rational base = *this;
    while (k > 0) {
      if (k & 1u) acc = acc * base;
      base = base * base;
      k >>= 1u;
    }
    return acc;
  }

  Rational abs() const { return sign() < 0 ? -*this : *this; }

  // Exact square root when *this is a perfect square of a rational.
  std::optional<Rational> sqrt_exact() const {
    if (sign() < 0) return std::nullopt;
    mpz_class num = numerator(), den = denominator();
    if (mpz_perfect_square_p(num.get_mpz_t()) == 0) return std::nullopt;
    if (mpz_perfect_square_p(den.get_mpz_t()) == 0) return std::nullopt;
    mpz_class rn, rd;
    mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
    return Rational(mpq_class(rn, rd), already_canonical{});
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return Rational(mpq_class(a.v_ + b.v_), already_canonical{});
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return Rational(mpq_class(a.v_ - b.v_), already_canonical{});
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return Rational(mpq_class(a.v_ * b.v_), already_canonical{});
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.is_zero()) throw DomainError("rational division by zero");
    return Rational(mpq_class(a.v_ / b.v_), already_canonical{});
  }
  Rational operator-() const {
    return Rational(mpq_class(-v_), already_canonical{});
  }
  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
  friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
  friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
  friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

 private:
  struct already_canonical {};
  Rational(mpq_class q, already_canonical) : v_(std::move(q)) {}

  mpq_class v_;  // GMP keeps canonical form through arithmetic
};

}  // namespace curvlab
