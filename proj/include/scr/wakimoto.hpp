// Free-field realization of affine sl2 on beta-gamma plus boson Fock modules,
// the screening current S(z) with its companions S(x;z), their cochains on
// configuration spaces, and the inductive extension of S(x;z) to bracket trees.
#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "scr/fields.hpp"
#include "scr/fock.hpp"
#include "scr/forms.hpp"

namespace scr::wak {

using dg::Residual;
using fields::FieldExpr;
using fields::FieldModes;
using fields::OpeResult;
using fock::FockSpace;
using fock::ModeOperator;

class WakimotoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// nu is free, the level is k = nu^2 - 2 and chi labels W_{chi;nu}.
struct AffineParams {
  ParamScalar nu;
  ParamScalar chi;

  static AffineParams generic();  // symbolic nu, chi
  ParamScalar level() const;
  ParamScalar zero_mode() const;  // b_0 eigenvalue -chi/nu on W_{chi;nu}
  ParamScalar twist() const;      // -chi/nu^2, exponent of z carried by S(z) on W_{chi;nu}
};

std::shared_ptr<const fock::OscSpec> wakimoto_spec();
FockSpace wakimoto_module(const AffineParams& p, int energy_cap);

// Named fields in the field grammar: currents, the screening current "S" and
// companion seeds "S(X)". Names not of these kinds are scalar macros.
struct ScreeningData {
  fields::Macros macros;
  std::map<std::string, FieldExpr> currents;
  FieldExpr screening;
  std::map<std::string, FieldExpr> seeds;

  ScreeningData substitute(const Bindings& b) const;
};
ScreeningData parse_screening_data(const std::string& text);
ScreeningData load_screening_data(const std::string& path);
ScreeningData sl2_screening_data();  // parameter nu

// Element X_n of the loop algebra (X in E, H, F) or the central element '1',
// acting as the identity; [X_n, Y_m] = [X,Y]_{n+m} + n k (X,Y) delta_{n+m,0} 1.
struct AffElem {
  char x = 'E';
  int n = 0;
  static AffElem central() { return {'1', 0}; }
  auto operator<=>(const AffElem&) const = default;
  std::string str() const;
};
std::vector<std::pair<ParamScalar, AffElem>> affine_bracket(const AffElem& a, const AffElem& b, const ParamScalar& level);
ParamScalar killing_trace(char x, char y);  // (X, Y) = tr(XY)

class Wakimoto {
 public:
  explicit Wakimoto(AffineParams p, const ScreeningData& data = sl2_screening_data());

  const AffineParams& params() const { return p_; }
  ParamScalar level() const { return p_.level(); }
  const FieldExpr& current(char x) const;
  const FieldExpr& screening() const { return s_; }
  const FieldExpr& screening_seed() const { return sf_; }  // S(F;z)
  FockSpace module(int energy_cap) const { return wakimoto_module(p_, energy_cap); }

  ModeOperator mode(const AffElem& x) const;
  ModeOperator screening_mode(int k) const;  // S(z) = z^t sum S_k z^{-k-1}
  // Coefficient of z^{t-k} in S(x;z), so S(F_n)[k] = S(F)_{k+n}.
  ModeOperator companion_mode(const AffElem& x, int k) const;

 private:
  AffineParams p_;
  std::map<char, FieldModes> currents_;
  FieldExpr s_, sf_;
  FieldModes s_modes_, sf_modes_;
  mutable std::mutex mu_;
  mutable std::map<AffElem, ModeOperator> mode_cache_;
};

// The six current OPEs, compared exactly with the affine display.
Residual verify_current_opes(const Wakimoto& w);
// Affine relations on blocks of energy <= energy and |charge| <= charge.
// `level_shift` is added to k on the right-hand side.
Residual verify_current_modes(const Wakimoto& w, const FockSpace& src, int energy, int charge, int nmax,
                              const ParamScalar& level_shift = ParamScalar());

// F(z)(-beta V(alpha)(w)).
OpeResult screening_family_ope(const Wakimoto& w, const ParamScalar& alpha);
Residual check_screening_family(const Wakimoto& w, const ParamScalar& alpha);
// X(z) S(w) = d/dw (S(X;w)/(z - w)) + regular for X in E, H, F.
Residual check_screening_opes(const Wakimoto& w);
// [x, S_k] = (t - k) S(x)[k] for x = X_n (|n| <= nmax) and 1, |k| <= kmax.
Residual check_screening_modes(const Wakimoto& w, const FockSpace& src, int energy, int charge, int nmax, int kmax);
// E(z)S(F;w) regular, H(z)S(F;w) = -2 S(F;w)/(z - w), F(z)S(F;w) = 2 :gamma S(F): (w)/(z - w).
Residual check_seed_opes(const Wakimoto& w);
// X(z) S(Y;w) - Y(z) S(X;w) = S([X,Y];w)/(z - w) + regular; also every
// X(z) S(Y;w) has at most first-order poles.
Residual check_companion_opes(const Wakimoto& w);
// [x, S(y)[k]] - [y, S(x)[k]] = S([x,y])[k].
Residual check_companion_modes(const Wakimoto& w, const std::vector<AffElem>& elems, int kmax, const FockSpace& src,
                               const std::vector<BasisKey>& keys);

// V^{a,p-a}(x_1..x_a) = sum over positions and permutations of
// :S(z_1) .. S(x;z_i) .. S(z_p): on W_{chi;nu} -> W_{chi-2p;nu}.
struct WakimotoComplex {
  std::shared_ptr<const Wakimoto> w;
  int p = 1;
  FockSpace source, target;
  dg::CochainSystem<AffElem> system;
};
WakimotoComplex wakimoto_complex(std::shared_ptr<const Wakimoto> w, int p, int energy_cap, int reliable_energy,
                                 bool drop_pairs = false, bool seeded_sign_bug = false);

// S_t : W_{chi;nu} -> W_{chi-2;nu} for integral t = -chi/nu^2 commutes with
// every current; checked on blocks of energy <= energy, |charge| <= charge.
struct WakimotoIntertwiner {
  int mode = 0;
  ModeOperator op;
  FockSpace source, target;
  Residual homomorphism;
  Vec image_of_vacuum;
};
WakimotoIntertwiner wakimoto_intertwiner(const Wakimoto& w, int energy, int charge, int nmax);

// ---------------------------------------------------------------- bracket trees

class LoopTree {
 public:
  static LoopTree leaf(const AffElem& x);
  static LoopTree bracket(const LoopTree& a, const LoopTree& b);
  bool is_leaf() const { return !node_->left; }
  const AffElem& elem() const { return node_->x; }
  LoopTree left() const { return LoopTree(node_->left); }
  LoopTree right() const { return LoopTree(node_->right); }
  const std::string& str() const { return node_->s; }

 private:
  struct Node {
    AffElem x;
    std::shared_ptr<const Node> left, right;
    std::string s;
  };
  explicit LoopTree(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

using TreeCombo = std::vector<std::pair<ParamScalar, LoopTree>>;
std::string combo_str(const TreeCombo& c);

// S(x)[k] for trees through [x, S(y)] - [y, S(x)] = S([x,y]) from the seeds.
// `seeded_bug` also seeds S(H;z) = S(F;z).
class TreeCompanions {
 public:
  explicit TreeCompanions(std::shared_ptr<const Wakimoto> w, bool seeded_bug = false) : w_(std::move(w)), bug_(seeded_bug) {}
  ModeOperator action(const LoopTree& x) const;
  ModeOperator companion(const LoopTree& x, int k) const;
  ModeOperator action(const TreeCombo& x) const;
  ModeOperator companion(const TreeCombo& x, int k) const;

 private:
  std::shared_ptr<const Wakimoto> w_;
  bool bug_;
};

struct TreePair {
  TreeCombo lhs, rhs;
};
// Pairs with equal image in the affine algebra at level k.
std::vector<TreePair> standard_tree_pairs(const ParamScalar& k);
// Action agreement and companion agreement S(x)[k] = S(x')[k] for |k| <= kmax.
Residual check_descent(const TreeCompanions& tc, const std::vector<TreePair>& pairs, int kmax, const FockSpace& src,
                       const std::vector<BasisKey>& keys);

}  // namespace scr::wak
