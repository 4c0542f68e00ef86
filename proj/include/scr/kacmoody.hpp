// Generalized Cartan data, the free algebra on theta_1..theta_r, the
// weight-truncated Serre quotient U(n_-), and Verma modules with rho-shifted
// highest weight (H_i v = <H_i, lambda - rho> v).
#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include "scr/linear.hpp"
#include "scr/scalar.hpp"

namespace scr::km {

class KmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CartanData {
  int rank = 0;
  std::vector<std::vector<int>> a;  // a[i][j] = <H_i, alpha_j>
  std::vector<Rational> sym;        // d_i with d_i a_ij = d_j a_ji

  static CartanData finite(const std::string& type);  // A1, A2, B2, G2
  static CartanData from_matrix(std::vector<std::vector<int>> a);
  void validate() const;
};

using Word = std::vector<int>;    // letters are generator indices 0..r-1
using Weight = std::vector<int>;  // k with weight -sum k_i alpha_i

int height(const Weight& w);
Weight weight_of(const Word& w, int rank);

// Positive roots of a finite type in simple-root coordinates.
std::vector<Weight> positive_roots(const CartanData& cd);
// Number of multisets of positive roots summing to k.
long pbw_dimension(const std::vector<Weight>& roots, const Weight& k);

using NcPoly = std::map<Word, ParamScalar>;

NcPoly nc_mul(const NcPoly& x, const NcPoly& y);
NcPoly nc_word(const Word& w, const ParamScalar& c = ParamScalar(1));
NcPoly partial_derivation(int i, const NcPoly& x);
// C(j,k;a) = sum_p (-1)^p binom(a,p) theta_j^{a-p} theta_k theta_j^p
NcPoly serre_element(int j, int k, int a);

struct WeightSpace {
  Weight weight;
  std::vector<Word> words;                  // all free words of this weight
  std::vector<Word> basis;                  // echelon (non-pivot) representatives
  std::vector<std::map<Word, Rational>> ideal_rows;  // reduced ideal basis
  std::map<Word, std::vector<std::pair<int, Rational>>> reduction;  // word -> basis combination
  int free_dim() const { return static_cast<int>(words.size()); }
  int ideal_dim() const { return static_cast<int>(ideal_rows.size()); }
  int dim() const { return static_cast<int>(basis.size()); }
};

// Memoized per-weight quotients of the free algebra by the Serre ideal.
class SerreQuotient {
 public:
  SerreQuotient(CartanData cd, int height_cutoff);

  const CartanData& cartan() const { return cd_; }
  int cutoff() const { return cutoff_; }
  const WeightSpace& space(const Weight& w) const;

  // Coefficients of the normal form over space(weight).basis.
  std::vector<ParamScalar> normal_form(const NcPoly& x) const;
  NcPoly lift(const Weight& w, const std::vector<ParamScalar>& coeffs) const;

 private:
  WeightSpace build(const Weight& w) const;
  CartanData cd_;
  int cutoff_;
  mutable std::shared_mutex mu_;
  mutable std::map<Weight, std::unique_ptr<WeightSpace>> cache_;
};

// Basis key of a Verma vector: (k_1..k_r, basis index).
BasisKey verma_key(const Weight& w, int idx);
Weight key_weight(const BasisKey& k, int rank);
int key_index(const BasisKey& k);

enum class Gen { E, H, F };

class VermaModule {
 public:
  VermaModule(std::shared_ptr<const SerreQuotient> q, std::vector<ParamScalar> label);

  const SerreQuotient& quotient() const { return *q_; }
  const std::vector<ParamScalar>& label() const { return label_; }
  int rank() const { return q_->cartan().rank; }

  Vec vacuum() const;
  // x v_lambda for x a free-algebra element (normal form taken).
  Vec from_nc(const NcPoly& x) const;
  Vec from_word(const Word& w) const { return from_nc(nc_word(w)); }
  const Word& word_of(const BasisKey& k) const;
  std::vector<BasisKey> basis_upto(int max_height) const;

  ParamScalar h_eigenvalue(int i, const Weight& w) const;

  Vec apply(Gen g, int i, const Vec& v) const;
  // E_i evaluated through the derivation formula [E_j, x] = d_j(x) H_j + x_1.
  Vec apply_e_via_derivation(int i, const Vec& v) const;
  // Left multiplication by a free-algebra element.
  Vec left_mul(const NcPoly& x, const Vec& v) const;

 private:
  const Vec& e_on_word(int i, const Word& w) const;
  std::shared_ptr<const SerreQuotient> q_;
  std::vector<ParamScalar> label_;
  mutable std::mutex mu_;
  mutable std::map<std::pair<int, Word>, Vec> e_cache_;
};

bool verma_equal(const Vec& u, const Vec& v);

}  // namespace scr::km
