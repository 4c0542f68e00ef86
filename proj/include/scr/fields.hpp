// Free-field expressions: normal-ordered products of derivatives of p, beta,
// gamma and vertex factors :exp(-mu . phi):, their Wick OPEs and mode
// expansions acting on Fock modules.
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scr/fock.hpp"
#include "scr/forms.hpp"

namespace scr::fields {

using fock::FockSpace;
using fock::ModeOperator;
using fock::OscSpec;

class FieldError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Kind : uint8_t { P, Beta, Gamma };

struct FieldSym {
  uint8_t point = 0;
  Kind kind = Kind::P;
  uint8_t family = 0;
  uint8_t deriv = 0;
  auto operator<=>(const FieldSym&) const = default;
  int weight() const { return (kind == Kind::Gamma ? 0 : 1) + deriv; }
};

struct VertexFactor {
  uint8_t point = 0;
  std::vector<ParamScalar> mu;  // exp(-sum_i mu_i phi^i)
};

struct FieldTerm {
  std::vector<FieldSym> factors;        // sorted
  std::vector<VertexFactor> vertices;   // sorted by point, nonzero mu
  bool operator<(const FieldTerm& o) const;
  bool operator==(const FieldTerm& o) const { return !(*this < o) && !(o < *this); }
  int weight() const;
  const VertexFactor* vertex_at(int point) const;
};

class FieldExpr {
 public:
  using Terms = std::map<FieldTerm, ParamScalar>;

  FieldExpr() = default;
  static FieldExpr scalar(const ParamScalar& c);
  static FieldExpr field(Kind kind, int deriv = 0, int family = 0, int point = 0);
  static FieldExpr vertex(std::vector<ParamScalar> mu, int point = 0);

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::optional<ParamScalar> scalar_value() const;  // when a multiple of 1
  void add(const FieldTerm& t, const ParamScalar& c);

  FieldExpr operator+(const FieldExpr& o) const;
  FieldExpr operator-(const FieldExpr& o) const;
  FieldExpr operator-() const { return scaled(ParamScalar(-1)); }
  FieldExpr scaled(const ParamScalar& c) const;
  bool operator==(const FieldExpr& o) const;

  // Weight under z^{-n-weight} mode expansions; throws if not homogeneous.
  int weight() const;
  FieldExpr at_point(int point) const;  // moves every insertion to `point`
  FieldExpr substitute(const Bindings& b) const;

  std::string str() const;

 private:
  Terms terms_;
};

FieldExpr normal_product(const FieldExpr& x, const FieldExpr& y);
FieldExpr derivative(const FieldExpr& x, int point = 0);

// Recursive-descent parser. Grammar:
//   expr   := ['-'] prod (('+' | '-') prod)*
//   prod   := unary (['*' | '/'] unary)*      (at most one non-scalar factor)
//   unary  := number | ident | '(' expr ')' | ':' unary+ ':' | D['^'k] '(' expr ')'
//           | 'V[' expr (',' expr)* ']' | unary '^' int (scalars only)
// Identifiers p, beta, gamma (optionally _i for family i) are fields, phi is
// allowed under D, names in `macros` expand, anything else is a parameter.
using Macros = std::map<std::string, FieldExpr>;
FieldExpr parse_field(const std::string& text, const Macros& macros = {});

// Singular part of A(z) B(w_0, ..., w_{p-1}): (point, pole order) -> coefficient.
// Multi-point coefficients are rational in parameters w1, w2, ...
struct OpeResult {
  std::map<std::pair<int, int>, FieldExpr> poles;
  FieldExpr at(int order, int point = 0) const;
  int max_order() const;
  bool operator==(const OpeResult& o) const;
  std::string str() const;  // "c/(z-w)^k + ..."
};

OpeResult wick_ope(const OscSpec& spec, const FieldExpr& left, const FieldExpr& right);

// Mode expansion. For a field X of weight D whose vertex factors carry
// mu_i, X(z_1..z_p) = prod z_i^{mu_i . b_0} sum_n X_n prod z_i^{-n_i-D_i}
// with b_0 acting on the source; X_n is the coefficient below.
class FieldModes {
 public:
  FieldModes(FieldExpr f, int npoints = 1);

  const FieldExpr& expr() const { return f_; }
  int weight() const { return weight_; }
  std::vector<ParamScalar> label_shift() const;

  // All coefficients X_n v with target energy <= the space cap.
  const std::map<std::vector<int>, Vec>& expand(const FockSpace& src, const BasisKey& v) const;
  Vec mode(const FockSpace& src, const Vec& v, const std::vector<int>& n) const;
  ModeOperator op(int n) const;

 private:
  FieldExpr f_;
  int npoints_;
  int weight_;
  struct Memo;
  std::shared_ptr<Memo> memo_;
};

// Coefficient of z^{-k} in V_+(mu;z) = exp(-sum_{n>0} mu.b_n z^{-n}/n) (plus)
// or of z^{k} in V_-(mu;z) = exp(sum_{n>0} mu.b_{-n} z^n/n), applied to v.
Vec vertex_half(const FockSpace& s, const std::vector<ParamScalar>& mu, const Vec& v, int k, bool plus);
ModeOperator vertex_half_op(const std::vector<ParamScalar>& mu, int k, bool plus);

// [X_n, Y_m] predicted by the OPE of X (weight dx) with Y:
// sum_k binom(n + dx - 1, k - 1) (C_k)_{n+m}.
ModeOperator ope_bracket(const OpeResult& ope, int dx, int n, int m);

// Mode-matrix commutators [X_n, Y_m] against ope_bracket for |n|, |m| <= nmax.
dg::Residual check_ope_against_modes(const OscSpec& spec, const FieldExpr& x, const FieldExpr& y, const FockSpace& src,
                                     const std::vector<BasisKey>& keys, int nmax);
OpeResult ope_difference(const OpeResult& a, const OpeResult& b);

}  // namespace scr::fields
