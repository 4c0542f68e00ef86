// Exact arithmetic in Q(p1,...,pk): multivariate polynomials over GMP rationals
// and gcd-reduced rational functions in a global registry of named parameters.
#pragma once

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace scr {

using Rational = mpq_class;

inline constexpr int kMaxParams = 24;

class ScalarError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Append-only registry of formal parameters. Ids index exponent vectors.
class ParameterContext {
 public:
  static ParameterContext& global();

  int id(std::string_view name);  // registers on first use
  std::optional<int> find(std::string_view name) const;
  std::string name(int id) const;
  int size() const;
  void declare_nonzero(std::string_view name);
  bool must_be_nonzero(int id) const;

 private:
  ParameterContext() = default;
  struct Impl;
  Impl& impl() const;
};

struct Monomial {
  uint16_t deg = 0;
  std::array<uint16_t, kMaxParams> e{};

  bool is_one() const { return deg == 0; }
  bool divides(const Monomial& o) const;
  Monomial operator*(const Monomial& o) const;
  Monomial operator/(const Monomial& o) const;  // requires divides
  static Monomial var(int id, int power = 1);
};

// Graded lex: larger monomials first.
inline bool mono_greater(const Monomial& a, const Monomial& b) {
  if (a.deg != b.deg) return a.deg > b.deg;
  return a.e > b.e;
}
inline bool operator==(const Monomial& a, const Monomial& b) { return a.e == b.e; }

class Poly {
 public:
  using Term = std::pair<Monomial, Rational>;

  Poly() = default;
  explicit Poly(const Rational& c);
  static Poly var(int id, int power = 1);
  static Poly from_terms(std::vector<Term> terms);  // sorts and combines

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].first.is_one()); }
  bool is_monomial() const { return terms_.size() == 1; }
  Rational constant_value() const;  // requires is_constant
  const Term& lead() const { return terms_.front(); }
  int degree_in(int id) const;
  int max_var() const;  // -1 for constants
  bool uses(int id) const { return degree_in(id) > 0; }

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator-() const;
  Poly operator*(const Poly& o) const;
  Poly scaled(const Rational& c) const;
  Poly times_monomial(const Monomial& m, const Rational& c) const;

  // Exact division; throws ScalarError if o does not divide *this.
  Poly divexact(const Poly& o) const;
  Poly monic() const;

  bool operator==(const Poly& o) const;
  bool operator!=(const Poly& o) const { return !(*this == o); }
  int compare(const Poly& o) const;

  std::string str() const;

 private:
  std::vector<Term> terms_;
};

Poly poly_gcd(const Poly& a, const Poly& b);

enum class EqualityPolicy { Reduced, Lazy };
void set_equality_policy(EqualityPolicy p);
EqualityPolicy equality_policy();

// Element of Q(params). Immutable; copies share storage.
class ParamScalar {
 public:
  ParamScalar() = default;
  ParamScalar(long v);  // NOLINT(google-explicit-constructor)
  ParamScalar(const Rational& v);  // NOLINT(google-explicit-constructor)
  static ParamScalar rational(long num, long den);
  static ParamScalar param(std::string_view name);
  static ParamScalar from_polys(Poly num, Poly den);
  static ParamScalar parse(std::string_view text);

  const Poly& num() const;
  const Poly& den() const;

  bool is_zero() const { return !rep_; }
  bool is_constant() const;
  Rational constant_value() const;  // requires is_constant
  bool is_integer() const;

  ParamScalar operator+(const ParamScalar& o) const;
  ParamScalar operator-(const ParamScalar& o) const;
  ParamScalar operator-() const;
  ParamScalar operator*(const ParamScalar& o) const;
  ParamScalar operator/(const ParamScalar& o) const;
  ParamScalar& operator+=(const ParamScalar& o) { return *this = *this + o; }
  ParamScalar& operator-=(const ParamScalar& o) { return *this = *this - o; }
  ParamScalar& operator*=(const ParamScalar& o) { return *this = *this * o; }
  ParamScalar pow(int k) const;

  bool operator==(const ParamScalar& o) const;
  bool operator!=(const ParamScalar& o) const { return !(*this == o); }
  // Structural total order (for use as a map key); consistent with == in Reduced mode.
  bool operator<(const ParamScalar& o) const;

  std::string str() const;

 private:
  struct Rep {
    Poly num;
    Poly den;
  };
  explicit ParamScalar(std::shared_ptr<const Rep> r) : rep_(std::move(r)) {}
  static ParamScalar make(Poly num, Poly den, bool reduce);
  std::shared_ptr<const Rep> rep_;
};

using Bindings = std::map<std::string, ParamScalar>;

// Throws ScalarError naming a parameter when a denominator vanishes.
ParamScalar substitute(const ParamScalar& s, const Bindings& b);
Rational evaluate(const ParamScalar& s, const std::map<int, Rational>& point);

// Deterministic draw per (seed, parameter); retries with subseeds on poles.
Rational random_specialize(const ParamScalar& s, uint64_t seed);
std::map<int, Rational> random_point(uint64_t seed, uint64_t subseed);

// Binomial coefficient with arbitrary rational upper argument.
Rational binomial(const Rational& top, int k);
Rational factorial(int n);

}  // namespace scr
