// Heisenberg and beta-gamma oscillator algebras, their Fock modules and
// operators acting blockwise on them.
#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "scr/linear.hpp"
#include "scr/scalar.hpp"

namespace scr::fock {

class FockError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bosons b^i_n with [b^i_n, b^j_m] = n G_ij delta_{n+m,0}; beta-gamma pairs
// (a^s_n, a^{s*}_n) with [a_n, a*_m] = delta_{n+m,0}.
struct OscSpec {
  int nboson = 1;
  std::vector<std::vector<ParamScalar>> gram{{ParamScalar(2)}};
  int npairs = 0;

  static OscSpec heisenberg();  // one boson, G = 2
  static OscSpec wakimoto();    // one boson, G = 2, one pair
  bool operator==(const OscSpec&) const = default;
};

// b^i_n, a^s_n, a^{s*}_n, and the zero-mode partner q^i (symbolic only).
enum class Osc : uint8_t { B, A, AStar, Q };
struct Mode {
  Osc kind = Osc::B;
  int family = 0;
  int n = 0;
  auto operator<=>(const Mode&) const = default;
};
Mode b(int n, int family = 0);
Mode a(int n, int family = 0);
Mode astar(int n, int family = 0);
Mode q(int family = 0);

// b_n (n > 0), a_n (n >= 0), a*_n (n > 0).
bool is_annihilation(const Mode& m);
bool is_creation(const Mode& m);  // b_n, a_n (n < 0), a*_n (n <= 0)
// [x, y] as a multiple of the identity.
ParamScalar bracket(const OscSpec& spec, const Mode& x, const Mode& y);
std::string mode_str(const Mode& m);

// Normal ordering of an oscillator word: annihilators (and b_0) moved to the
// right keeping their order, q moved to the left. The ledger lists the
// contractions {x_i x_j} = [x_i, x_j] of each pair passed over.
struct Contraction {
  int left = 0, right = 0;  // positions in the input word
  ParamScalar value;
};
struct NormalOrdered {
  std::vector<Mode> word;
  std::vector<Contraction> ledger;
};
NormalOrdered normal_order(const OscSpec& spec, const std::vector<Mode>& word);

// Fock basis vectors are keyed by the sorted codes of their creation modes.
int32_t creation_code(const Mode& m);
Mode decode(int32_t code);

// Fock module generated by v with a_+ v = 0 and b^i_0 v = zero_modes[i] v.
// Energies above energy_cap are refused.
class FockSpace {
 public:
  FockSpace(std::shared_ptr<const OscSpec> spec, std::vector<ParamScalar> zero_modes, int energy_cap = 12);

  const OscSpec& spec() const { return *spec_; }
  std::shared_ptr<const OscSpec> spec_ptr() const { return spec_; }
  const std::vector<ParamScalar>& zero_modes() const { return zero_modes_; }
  int energy_cap() const { return cap_; }

  static int energy(const BasisKey& k);
  static int charge(const BasisKey& k);  // #a* - #a
  static BasisKey vacuum() { return {}; }

  std::vector<BasisKey> block(int energy, int charge) const;
  std::vector<BasisKey> basis_upto(int energy, int charge_abs) const;

  Vec apply(const Mode& m, const Vec& v) const;
  Vec apply_word(const std::vector<Mode>& word, const Vec& v) const;  // rightmost first

  // Zero modes shifted by G mu: the target of a vertex factor exp(-mu . phi).
  FockSpace shifted(const std::vector<ParamScalar>& mu) const;
  // b^i_0 eigenvalue contracted with mu: the exponent of z in z^{mu . b_0}.
  ParamScalar twist(const std::vector<ParamScalar>& mu) const;

  bool operator==(const FockSpace& o) const { return *spec_ == *o.spec_ && zero_modes_ == o.zero_modes_; }
  std::string vec_str(const Vec& v) const;

 private:
  std::shared_ptr<const OscSpec> spec_;
  std::vector<ParamScalar> zero_modes_;
  int cap_;
};

// Generating-function count of the (energy, charge) block.
long block_dimension_oracle(const OscSpec& spec, int energy, int charge);

// T_mu : F -> F shifted, the H^- -linear map fixing creation monomials.
Vec shift_operator(const Vec& v);

// ---------------------------------------------------------------- operators

using Matrix = std::map<BasisKey, Vec>;  // columns indexed by source basis keys

// A linear operator from any Fock space of a given spec to the space whose
// zero modes are shifted by `label_shift` (through the Gram matrix).
// Results are memoized per (source zero modes, basis key).
class ModeOperator {
 public:
  using Fn = std::function<Vec(const FockSpace&, const BasisKey&)>;
  ModeOperator(std::string name, std::vector<ParamScalar> label_shift, Fn fn);

  const std::string& name() const { return impl_->name; }
  const std::vector<ParamScalar>& label_shift() const { return impl_->shift; }
  FockSpace target(const FockSpace& src) const;
  Vec apply(const FockSpace& src, const Vec& v) const;
  Matrix block(const FockSpace& src, const std::vector<BasisKey>& keys) const;

  ModeOperator operator+(const ModeOperator& o) const;
  ModeOperator operator-(const ModeOperator& o) const;
  ModeOperator scaled(const ParamScalar& c) const;
  ModeOperator then(const ModeOperator& after) const;  // after o this

  static ModeOperator oscillator(const Mode& m);
  static ModeOperator zero(std::vector<ParamScalar> label_shift);

 private:
  struct Impl {
    std::string name;
    std::vector<ParamScalar> shift;
    Fn fn;
    mutable std::mutex mu;
    mutable std::map<std::vector<ParamScalar>, std::map<BasisKey, Vec>> memo;
  };
  std::shared_ptr<Impl> impl_;
};

// [A, B] on the given source basis.
Matrix commutator_blocks(const ModeOperator& a, const ModeOperator& b, const FockSpace& src, const std::vector<BasisKey>& keys);
Matrix matrix_sub(const Matrix& x, const Matrix& y);
bool matrix_is_zero(const Matrix& m);
std::string matrix_witness(const FockSpace& space, const Matrix& m);

}  // namespace scr::fock
