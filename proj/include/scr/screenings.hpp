// Screening operators between highest-weight modules: the rank-one toy
// operators V_n : M(-lambda-1) -> M(lambda-1), the Kac-Moody operators
// V_{i;n} : M(r_i lambda) -> M(lambda) with companions V_{i;n}(X), their
// multi-point cochains along a Weyl word, and residue intertwiners.
#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "scr/forms.hpp"
#include "scr/kacmoody.hpp"

namespace scr::screen {

using km::Gen;

class ScreeningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Element of the Lie algebra given as a bracket tree over Chevalley generators.
class LieElem {
 public:
  static LieElem gen(Gen g, int i);
  static LieElem bracket(const LieElem& x, const LieElem& y);

  bool is_generator() const { return !node_->left; }
  Gen generator() const { return node_->g; }
  int index() const { return node_->i; }
  LieElem left() const { return LieElem(node_->left); }
  LieElem right() const { return LieElem(node_->right); }
  int e_count() const { return node_->e; }
  int f_count() const { return node_->f; }
  const std::string& str() const { return node_->s; }

 private:
  struct Node {
    Gen g = Gen::H;
    int i = 0;
    std::shared_ptr<const Node> left, right;
    int e = 0, f = 0;
    std::string s;
  };
  explicit LieElem(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

std::vector<LieElem> chevalley_generators(int rank);

class HwModule {
 public:
  virtual ~HwModule() = default;
  virtual int rank() const = 0;
  virtual Vec apply(Gen g, int i, const Vec& v) const = 0;
  virtual int height(const BasisKey& k) const = 0;
  virtual std::vector<BasisKey> basis_upto(int h) const = 0;
  virtual std::string vec_str(const Vec& v) const;
};

Vec act(const HwModule& m, const LieElem& x, const Vec& v);

// sl2 Verma module in the unshifted convention: H v = mu v, basis F^a v.
class ToyModule final : public HwModule {
 public:
  explicit ToyModule(ParamScalar mu) : mu_(std::move(mu)) {}
  const ParamScalar& mu() const { return mu_; }
  int rank() const override { return 1; }
  Vec apply(Gen g, int i, const Vec& v) const override;
  int height(const BasisKey& k) const override { return k.at(0); }
  std::vector<BasisKey> basis_upto(int h) const override;
  std::string vec_str(const Vec& v) const override;
  static BasisKey key(int a) { return BasisKey{a}; }

 private:
  ParamScalar mu_;
};

class KmModule final : public HwModule {
 public:
  explicit KmModule(std::shared_ptr<const km::VermaModule> m) : m_(std::move(m)) {}
  const km::VermaModule& verma() const { return *m_; }
  int rank() const override { return m_->rank(); }
  Vec apply(Gen g, int i, const Vec& v) const override { return m_->apply(g, i, v); }
  int height(const BasisKey& k) const override { return km::height(km::key_weight(k, m_->rank())); }
  std::vector<BasisKey> basis_upto(int h) const override { return m_->basis_upto(h); }
  std::string vec_str(const Vec& v) const override;

 private:
  std::shared_ptr<const km::VermaModule> m_;
};

// A screening V(z) = sum_n V_n z^{-n-1} dz from source to target, with the
// companions V_n(X) satisfying [X, V_n] = (-n + pairing) V_n(X).
class Screening {
 public:
  Screening(std::shared_ptr<const HwModule> source, std::shared_ptr<const HwModule> target, ParamScalar pairing)
      : source_(std::move(source)), target_(std::move(target)), pairing_(std::move(pairing)) {}
  virtual ~Screening() = default;

  const HwModule& source() const { return *source_; }
  const HwModule& target() const { return *target_; }
  std::shared_ptr<const HwModule> source_ptr() const { return source_; }
  std::shared_ptr<const HwModule> target_ptr() const { return target_; }
  const ParamScalar& pairing() const { return pairing_; }

  Vec mode(int n, const Vec& v) const;
  // V_n(X) for a bracket tree X, extended from generators by
  // V_n([X,Y]) = [X, V_n(Y)] - [Y, V_n(X)].
  Vec companion(const LieElem& x, int n, const Vec& v) const;

 protected:
  virtual Vec mode_basis(int n, const BasisKey& k) const = 0;
  virtual Vec companion_basis(Gen g, int j, int n, const BasisKey& k) const = 0;

 private:
  Vec companion_on_basis(const LieElem& x, int n, const BasisKey& k) const;
  std::shared_ptr<const HwModule> source_, target_;
  ParamScalar pairing_;
  mutable std::mutex mu_;
  mutable std::map<std::tuple<std::string, int, BasisKey>, Vec> memo_;
};

// V_n : M(lambda'-1) -> M(lambda-1), F^a v -> F^{a+n} v, companion
// V_n(E) F^a v = (n + 2a) F^{a+n-1} v. `perturb` adds 1 to n + 2a.
class ToyScreening final : public Screening {
 public:
  ToyScreening(const ParamScalar& lambda, const ParamScalar& lambda_prime, bool perturb = false);
  static std::shared_ptr<ToyScreening> standard(const ParamScalar& lambda, bool perturb = false);

 protected:
  Vec mode_basis(int n, const BasisKey& k) const override;
  Vec companion_basis(Gen g, int j, int n, const BasisKey& k) const override;

 private:
  bool perturb_;
};

// V_{i;n} : M(r_i lambda) -> M(lambda), x v -> x F_i^n v, with
// V_{i;n}(E_j) x v = a_ji d_j(x) F_i^n v + delta_ij n x F_i^{n-1} v.
// `transpose` uses a_ij instead of a_ji in the E companion.
class KmScreening final : public Screening {
 public:
  KmScreening(std::shared_ptr<const KmModule> source, std::shared_ptr<const KmModule> target, int i, bool transpose = false);
  int index() const { return i_; }

 protected:
  Vec mode_basis(int n, const BasisKey& k) const override;
  Vec companion_basis(Gen g, int j, int n, const BasisKey& k) const override;

 private:
  const KmModule& src() const { return static_cast<const KmModule&>(source()); }
  const KmModule& tgt() const { return static_cast<const KmModule&>(target()); }
  int i_;
  bool transpose_;
};

// <H_j, r_i lambda> = <H_j, lambda> - <H_i, lambda> a_ji
std::vector<ParamScalar> reflect(const km::CartanData& cd, int i, const std::vector<ParamScalar>& label);

// ---------------------------------------------------------------- toy analysis

struct ToyScan {
  ParamScalar alpha;                     // forced twist exponent
  std::vector<ParamScalar> beta;         // beta(a), a = 0..amax
  std::vector<ParamScalar> compat;       // alpha (alpha - c1(a)) - c0(a), divided by a, a = 1..amax
  std::vector<ParamScalar> constraints;  // alpha - lambda, beta(a) - 2a, ..., lambda' + lambda
};
// Solve [E, V_n] = (-n + alpha) V_n(E) with V_n(E) F^a v = (n + beta(a)) F^{a+n-1} v.
ToyScan toy_uniqueness_scan(const ParamScalar& lambda, const ParamScalar& lambda_prime, int amax = 6);

// [X, V_n] - (-n + pairing) V_n(X) for X in {E, H, F}, all n <= nmax, source height <= hmax.
dg::Residual check_mode_identities(const Screening& s, int nmax, int hmax);

// ---------------------------------------------------------------- cochains

// sgn(p_1..p_m) = sgn(p_1..p_{m-1}) + p_m + m, positions 1-based.
int sgn_exponent(const std::vector<int>& positions);

// omega_1 ... omega_a along a chain of screenings (omega_p : M_{p+1} -> M_p).
class ScreeningChain {
 public:
  ScreeningChain(std::vector<std::shared_ptr<const Screening>> stages, int cap);

  int length() const { return static_cast<int>(stages_.size()); }
  int cap() const { return cap_; }
  const Screening& stage(int p) const { return *stages_.at(static_cast<size_t>(p)); }
  const HwModule& source() const { return stages_.back()->source(); }
  const HwModule& target() const { return stages_.front()->target(); }

  // V^{m, a-m}(args)(v) truncated to target height <= cap.
  dg::TwistedForm cochain(const std::vector<LieElem>& args, const BasisKey& v) const;
  dg::Connection connection() const;
  // Cochain system for the total-cocycle checker; `reliable_height` bounds
  // the target heights compared.
  dg::CochainSystem<LieElem> system(int reliable_height) const;

  bool seeded_sign_bug = false;

 private:
  std::vector<std::shared_ptr<const Screening>> stages_;
  int cap_;
};

// Screenings along the Weyl word (i_1..i_a) starting at lambda (Kac-Moody labels).
struct KmChain {
  std::vector<std::vector<ParamScalar>> labels;  // lambda_1 .. lambda_{a+1}
  std::vector<std::shared_ptr<const KmModule>> modules;
  std::shared_ptr<ScreeningChain> chain;
};
KmChain make_km_chain(std::shared_ptr<const km::SerreQuotient> q, const std::vector<int>& word,
                      const std::vector<ParamScalar>& lambda, int cap, bool transpose = false);

// Residue of V^{0a} against z_1^{k_1} ... z_a^{k_a}, k_p = pairing of stage p:
// the composite V_{i_1;k_1} ... V_{i_a;k_a}.
struct Intertwiner {
  std::vector<int> exponents;
  Vec image_of_vacuum;
  dg::Residual homomorphism;
};
Intertwiner residue_intertwiner(const ScreeningChain& chain, int check_height);
Vec apply_intertwiner(const ScreeningChain& chain, const std::vector<int>& exponents, const Vec& v);

}  // namespace scr::screen
