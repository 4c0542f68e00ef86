// Virasoro modes of the free boson with background charge, bosonic vertex
// operators, their multi-point normal products, screening cochains on
// configuration spaces and Feigin-Fuchs intertwiners.
#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "scr/fields.hpp"
#include "scr/fock.hpp"
#include "scr/forms.hpp"

namespace scr::vir {

using dg::Residual;
using fields::FieldExpr;
using fields::FieldModes;
using fock::FockSpace;
using fock::ModeOperator;

class VirasoroError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// alpha0 free, or derived from the screening exponent beta through
// beta^2 - 2 alpha0 beta = 1.
struct VirasoroParams {
  ParamScalar alpha0;
  std::optional<ParamScalar> beta;

  static VirasoroParams free(ParamScalar alpha0);
  static VirasoroParams screening(ParamScalar beta);
  ParamScalar central_charge() const;                           // 1 - 24 alpha0^2
  ParamScalar conformal_weight(const ParamScalar& beta) const;  // beta^2 - 2 alpha0 beta
};

std::shared_ptr<const fock::OscSpec> boson();
// F_alpha: b_0 v = 2 alpha v.
FockSpace ff_module(const ParamScalar& alpha, int energy_cap);
ParamScalar module_label(const FockSpace& f);  // alpha

// T = 1/4 :p p: - alpha0 p'; the background term is dropped for negative controls.
FieldExpr stress_tensor(const ParamScalar& alpha0, bool drop_background = false);

// L_n on every Feigin-Fuchs module, sharing one memoized mode expansion.
class Virasoro {
 public:
  explicit Virasoro(ParamScalar alpha0, bool drop_background = false);
  const ParamScalar& alpha0() const { return alpha0_; }
  const FieldExpr& field() const { return modes_.expr(); }
  ModeOperator L(int n) const;

 private:
  ParamScalar alpha0_;
  FieldModes modes_;
  mutable std::mutex mu_;
  mutable std::map<int, ModeOperator> cache_;
};

ModeOperator virasoro_mode(int n, const ParamScalar& alpha0);

Residual verify_virasoro_ope(const ParamScalar& alpha0, bool drop_background = false);
// [L_n, L_m] = (n - m) L_{n+m} + c (n^3 - n)/12 delta on source energy <= energy.
Residual verify_virasoro_modes(const Virasoro& vir, const ParamScalar& central, const FockSpace& src, int energy, int nmax);
// [b_n, L_m] = n b_{n+m} + 2 n (n - 1) alpha0 delta_{n,-m}.
Residual check_heisenberg_virasoro(const Virasoro& vir, const FockSpace& src, int energy, int nmax);

ModeOperator vertex_mode(const ParamScalar& beta, int n);
// [b_n, V_m(beta)] = 2 beta V_{n+m}(beta).
Residual check_heisenberg_vertex(const ParamScalar& beta, const FockSpace& src, int energy, int nmax);
// Coefficients of V_- commute with b_n (n <= 0) and those of V_+ with b_n (n >= 0).
Residual check_vertex_halves(const ParamScalar& beta, const FockSpace& src, int energy, int nmax);
// [L_n, V_m] = (-(m + n) + h (n + 1) + 2 alpha beta) V_{m+n}, h = beta^2 - 2 alpha0 beta;
// `perturb` is added to alpha0 on the right-hand side.
Residual check_L_vertex(const Virasoro& vir, const ParamScalar& beta, const FockSpace& src, int energy, int nmax,
                        const ParamScalar& perturb = ParamScalar());
// V_+(b1;z1) V_-(b2;z2) = exp(-2 b1 b2 sum z1^{-n} z2^n / n) V_-(b2;z2) V_+(b1;z1), orders <= order.
Residual product_formula_check(const ParamScalar& b1, const ParamScalar& b2, const FockSpace& src, int energy, int order);
// V(b1;z1) V(b2;z2) = (1 - z2/z1)^{2 b1 b2} :V(b1;z1) V(b2;z2):, modes |n_i| <= order.
Residual product_corollary_check(const ParamScalar& b1, const ParamScalar& b2, const FockSpace& src, int energy, int order);

// :V(beta_1;z_1) ... V(beta_p;z_p): with the prefactor
// prod z_i^{2 alpha beta_i} prod (z_i - z_j)^{2 beta_i beta_j} kept as a connection.
class MultiVertex {
 public:
  explicit MultiVertex(std::vector<ParamScalar> betas);
  int points() const { return static_cast<int>(betas_.size()); }
  const std::vector<ParamScalar>& betas() const { return betas_; }
  const FieldModes& modes() const { return modes_; }
  std::vector<ParamScalar> total_shift() const;
  dg::Connection connection(const ParamScalar& alpha, bool drop_pairs = false) const;
  // Top form with coefficient N_n at z^{-n}, target energies <= the space cap.
  dg::TwistedForm form(const FockSpace& src, const BasisKey& v) const;
  Vec coefficient(const FockSpace& src, const Vec& v, const std::vector<int>& n) const;

 private:
  std::vector<ParamScalar> betas_;
  FieldModes modes_;
};

Residual check_multi_symmetry(const std::vector<ParamScalar>& betas, const FockSpace& src, int energy);
Residual check_6_12(const Virasoro& vir, const std::vector<ParamScalar>& betas, const FockSpace& src, int energy, int nmin,
                    int nmax, bool drop_pairs = false);

// The screening cochain V^{a,p-a} = eps_a i_{e_1} ... i_{e_a} V^{0p} for Witt
// elements e_n, acting on F_alpha -> F_{alpha + p beta}.
struct ScreeningComplex {
  std::shared_ptr<const Virasoro> vir;
  ParamScalar beta, alpha;
  int p = 1;
  FockSpace source, target;
  std::shared_ptr<const MultiVertex> omega;
  dg::CochainSystem<int> system;
};
ScreeningComplex screening_complex(const ParamScalar& beta, const ParamScalar& alpha, int p, int energy_cap,
                                   int reliable_energy, bool drop_pairs = false);
// First action plus Lie derivative of V^{0p} along e_n vanishes.
Residual check_invariance(const ScreeningComplex& c, const std::vector<int>& elems, const std::vector<BasisKey>& vectors);
// z^{n+1} T(z) w^m V(w) - (n <-> m) = (n - m) w^{n+m} V(w)/(z - w) + regular.
Residual check_cocycle_ope(const ParamScalar& beta, int nmax);

struct FfIntertwiner {
  ModeOperator op;
  FockSpace source, target;
  Residual homomorphism;
  Vec image_of_vacuum;
};
// Iterated residue of prod z_i^{2 alpha beta} prod_{i<j} (z_i - z_j)^{2 beta^2}
// :V...V: dz_1..dz_p, expanded for |z_1| > ... > |z_p|.
FfIntertwiner ff_intertwiner(int p, const ParamScalar& alpha, const ParamScalar& beta, int check_energy, int nmax);

}  // namespace scr::vir
