// Differential forms on (C^*)^p minus diagonals with Laurent-polynomial
// coefficients, optionally operator-valued, and the twisted de Rham
// differential d + sum k_j dz_j/z_j + sum k_jl (dz_j - dz_l)/(z_j - z_l).
// Formal prefactors z^k and (z_j - z_l)^k are never expanded; they enter only
// through the connection.
#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "scr/linear.hpp"
#include "scr/scalar.hpp"

namespace scr::dg {

inline constexpr int kMaxVars = 4;
inline constexpr int kMaxPairs = kMaxVars * (kMaxVars - 1) / 2;

class FormError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using ZExp = std::array<int16_t, kMaxVars>;
using Laurent = std::map<ZExp, ParamScalar>;

int pair_index(int i, int j);  // i < j
ZExp unit_exp(int var, int power = 1);
ZExp operator+(const ZExp& a, const ZExp& b);

Laurent laurent_mul(const Laurent& a, const Laurent& b);
Laurent laurent_derivative(const Laurent& f, int var);
void laurent_add(Laurent& f, const ZExp& e, const ParamScalar& c);

struct FormKey {
  uint8_t mask = 0;  // bit j set <=> dz_j present, wedge taken in increasing order
  ZExp z{};
  BasisKey target;   // empty for scalar-valued forms
  auto operator<=>(const FormKey&) const = default;
};

// Sign of dz_k wedge dz_mask moved into increasing order; 0 if k is present.
int wedge_sign(int k, uint8_t mask);

class TwistedForm {
 public:
  using Den = std::array<int8_t, kMaxPairs>;

  explicit TwistedForm(int nvars = 1);
  static TwistedForm monomial(int nvars, uint8_t mask, const ZExp& z, const ParamScalar& c, const BasisKey& target = {});

  int nvars() const { return nvars_; }
  const Den& den() const { return den_; }
  const std::map<FormKey, ParamScalar>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add(const FormKey& k, const ParamScalar& c);
  TwistedForm& operator+=(const TwistedForm& o);
  TwistedForm operator+(const TwistedForm& o) const;
  TwistedForm operator-(const TwistedForm& o) const;
  TwistedForm operator-() const { return scaled(ParamScalar(-1)); }
  TwistedForm scaled(const ParamScalar& c) const;
  bool operator==(const TwistedForm& o) const { return (*this - o).is_zero(); }

  // Multiply the numerator by (z_i - z_j)^e for each pair so that den() == d.
  TwistedForm lifted(const Den& d) const;
  TwistedForm times(const Laurent& f) const;
  TwistedForm wedge_dz(int var) const;                // dz_var ^ this
  TwistedForm with_den_increment(int i, int j) const;  // divide by (z_i - z_j)

  // Apply a linear map to the target vector of every coefficient.
  TwistedForm map_target(const std::function<Vec(const BasisKey&)>& f) const;
  TwistedForm filtered(const std::function<bool(const FormKey&)>& keep) const;
  // Coefficient of a given (mask, z) as a vector; requires den() == 0.
  Vec coefficient(uint8_t mask, const ZExp& z) const;

  std::string str() const;

 private:
  int nvars_;
  Den den_{};
  std::map<FormKey, ParamScalar> terms_;
};

struct Connection {
  int nvars = 1;
  std::vector<ParamScalar> var;                   // k_j
  std::map<std::pair<int, int>, ParamScalar> pair;  // k_jl, j < l

  static Connection zero(int nvars);
  static Connection uniform(int nvars, const ParamScalar& kvar, const ParamScalar& kpair);
};

TwistedForm d_dr(const TwistedForm& f);
TwistedForm d_twisted(const TwistedForm& f, const Connection& c);

// Polynomial vector field sum_k comp[k](z) d/dz_k.
struct VectorField {
  int nvars = 1;
  std::vector<Laurent> comp;

  static VectorField diagonal(int nvars, const std::map<int, ParamScalar>& mu);  // mu(z_k) d/dz_k for all k
  static VectorField witt(int nvars, int n);  // e_n = -z^{n+1} d/dz, [e_n, e_m] = (n - m) e_{n+m}
  VectorField operator+(const VectorField& o) const;
  VectorField scaled(const ParamScalar& c) const;
  bool operator==(const VectorField& o) const;
};

VectorField bracket(const VectorField& a, const VectorField& b);
TwistedForm contract(const VectorField& v, const TwistedForm& f);
TwistedForm lie_derivative(const VectorField& v, const TwistedForm& f, const Connection& c);

// H^0 and H^1 of d + k dz/z on span{z^e, z^e dz/z : lo <= e <= hi}.
struct OneVarCohomology {
  int h0 = 0, h1 = 0;
  std::vector<int> h0_exponents;  // representatives z^e
  std::vector<int> h1_exponents;  // representatives z^e dz/z
  bool inconclusive = false;      // kappa integral but -kappa outside the window
};
OneVarCohomology one_var_cohomology(const ParamScalar& kappa, int lo, int hi);

// ---------------------------------------------------------------- cochains

struct Residual {
  bool ok = true;
  long checked = 0;
  std::string witness;
};

// A cochain phi = (phi^0..phi^n), phi^m in C^m(g; Hom(M', M (x) Omega^{n-m})),
// described by callbacks. Elements of g are values of type E.
template <class E>
struct CochainSystem {
  int degree = 0;
  int nvars = 1;
  Connection conn;
  std::function<std::vector<std::pair<ParamScalar, E>>(const E&, const E&)> bracket;
  std::function<Vec(const E&, const BasisKey&)> act_source;
  std::function<Vec(const E&, const BasisKey&)> act_target;
  std::function<TwistedForm(int, const std::vector<E>&, const BasisKey&)> value;
  std::function<bool(const FormKey&)> reliable = [](const FormKey&) { return true; };
  std::function<std::string(const E&)> name = [](const E&) { return std::string("x"); };
  int sign_exponent = 1;  // D = d' + (-1)^{sign_exponent * m} d''
};

template <class E>
TwistedForm apply_on_vec(const CochainSystem<E>& s, int m, const std::vector<E>& args, const Vec& v) {
  TwistedForm r(s.nvars);
  for (const auto& [k, c] : v) r += s.value(m, args, k).scaled(c);
  return r;
}

// (d' phi^{m-1})(args)(v) with the Koszul differential of the commutator action.
template <class E>
TwistedForm koszul(const CochainSystem<E>& s, int m, const std::vector<E>& args, const BasisKey& v) {
  TwistedForm r(s.nvars);
  if (m == 0) return r;
  const int a = static_cast<int>(args.size());
  for (int p = 0; p < a; ++p) {
    std::vector<E> rest;
    for (int q = 0; q < a; ++q)
      if (q != p) rest.push_back(args[static_cast<size_t>(q)]);
    const E& x = args[static_cast<size_t>(p)];
    TwistedForm t = s.value(m - 1, rest, v).map_target([&](const BasisKey& w) { return s.act_target(x, w); });
    t = t - apply_on_vec(s, m - 1, rest, s.act_source(x, v));
    r += p % 2 ? -t : t;
  }
  for (int p = 0; p < a; ++p)
    for (int q = p + 1; q < a; ++q) {
      std::vector<E> rest;
      for (int o = 0; o < a; ++o)
        if (o != p && o != q) rest.push_back(args[static_cast<size_t>(o)]);
      for (const auto& [c, br] : s.bracket(args[static_cast<size_t>(p)], args[static_cast<size_t>(q)])) {
        std::vector<E> full{br};
        full.insert(full.end(), rest.begin(), rest.end());
        // (p+1)+(q+1) with 1-based positions
        TwistedForm t = s.value(m - 1, full, v).scaled(c);
        r += (p + q) % 2 ? -t : t;
      }
    }
  return r;
}

// Residual of D phi on bidegree (m, n+1-m) for all m, all increasing tuples of
// test elements and all test vectors.
template <class E>
Residual total_cocycle_check(const CochainSystem<E>& s, const std::vector<E>& elems, const std::vector<BasisKey>& vectors) {
  Residual res;
  const int n = s.degree;
  for (int m = 0; m <= n + 1; ++m) {
    std::vector<int> idx(static_cast<size_t>(m));
    std::function<bool(int, int)> rec = [&](int pos, int start) -> bool {
      if (pos == m) {
        std::vector<E> args;
        for (int i : idx) args.push_back(elems[static_cast<size_t>(i)]);
        for (const BasisKey& v : vectors) {
          TwistedForm total(s.nvars);
          if (m >= 1) total += koszul(s, m, args, v);
          if (m <= n) {
            TwistedForm dd = d_twisted(s.value(m, args, v), s.conn);
            total += (s.sign_exponent * m) % 2 ? -dd : dd;
          }
          total = total.filtered(s.reliable);
          ++res.checked;
          if (!total.is_zero()) {
            res.ok = false;
            std::string who;
            for (const E& x : args) who += (who.empty() ? "" : ",") + s.name(x);
            res.witness = "bidegree (" + std::to_string(m) + "," + std::to_string(n + 1 - m) + ") args (" + who +
                          ") vector " + key_str(v) + ": " + total.str();
            return false;
          }
        }
        return true;
      }
      for (int i = start; i < static_cast<int>(elems.size()); ++i) {
        idx[static_cast<size_t>(pos)] = i;
        if (!rec(pos + 1, i + 1)) return false;
      }
      return true;
    };
    if (!rec(0, 0)) return res;
  }
  return res;
}

// Cartan cocycle: phi^a(x_1..x_a) = eps_a i_{x_1} ... i_{x_a} omega with
// eps_a = (-1)^{a(a+1)/2}, the normalization that makes d' + (-1)^m d'' vanish.
int cartan_sign(int a);

template <class E>
std::function<TwistedForm(int, const std::vector<E>&, const BasisKey&)> cartan_cochain(
    std::function<TwistedForm(const BasisKey&)> omega, std::function<TwistedForm(const E&, const TwistedForm&)> contraction) {
  return [omega, contraction](int a, const std::vector<E>& args, const BasisKey& v) {
    TwistedForm f = omega(v);
    for (int p = static_cast<int>(args.size()) - 1; p >= 0; --p) f = contraction(args[static_cast<size_t>(p)], f);
    return cartan_sign(a) == 1 ? f : -f;
  };
}

}  // namespace scr::dg
