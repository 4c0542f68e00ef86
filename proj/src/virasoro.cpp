#include "scr/virasoro.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace scr::vir {

using fields::parse_field;
using fock::Matrix;

namespace {

ModeOperator identity() {
  return ModeOperator("1", {}, [](const FockSpace&, const BasisKey& k) { return basis_vec(k); });
}

// Records one comparison; returns false once the residual has failed.
bool record(Residual& r, const FockSpace& f, const Matrix& diff, const std::string& what) {
  ++r.checked;
  if (fock::matrix_is_zero(diff)) return true;
  r.ok = false;
  r.witness = what + " " + fock::matrix_witness(f, diff);
  return false;
}

bool record_vec(Residual& r, const FockSpace& f, const Vec& diff, const std::string& what) {
  ++r.checked;
  if (diff.empty()) return true;
  r.ok = false;
  r.witness = what + ": " + f.vec_str(diff);
  return false;
}

std::string pair_str(int n, int m) { return "(" + std::to_string(n) + "," + std::to_string(m) + ")"; }

void require_cap(const FockSpace& f, int need) {
  if (f.energy_cap() < need)
    throw fock::FockError("window exceeded: energy cap " + std::to_string(f.energy_cap()) + " below required " + std::to_string(need));
}

}  // namespace

VirasoroParams VirasoroParams::free(ParamScalar alpha0) { return {std::move(alpha0), std::nullopt}; }

VirasoroParams VirasoroParams::screening(ParamScalar beta) {
  if (beta.is_zero()) throw VirasoroError("screening exponent must be nonzero");
  ParamScalar a0 = (beta * beta - ParamScalar(1)) / (ParamScalar(2) * beta);
  return {a0, std::move(beta)};
}

ParamScalar VirasoroParams::central_charge() const { return ParamScalar(1) - ParamScalar(24) * alpha0 * alpha0; }

ParamScalar VirasoroParams::conformal_weight(const ParamScalar& b) const { return b * b - ParamScalar(2) * alpha0 * b; }

std::shared_ptr<const fock::OscSpec> boson() {
  static const auto spec = std::make_shared<const fock::OscSpec>(fock::OscSpec::heisenberg());
  return spec;
}

FockSpace ff_module(const ParamScalar& alpha, int energy_cap) { return FockSpace(boson(), {ParamScalar(2) * alpha}, energy_cap); }

ParamScalar module_label(const FockSpace& f) { return f.zero_modes().at(0) / ParamScalar(2); }

FieldExpr stress_tensor(const ParamScalar& alpha0, bool drop_background) {
  FieldExpr t = parse_field("1/4 :p p:");
  if (!drop_background) t = t - parse_field("D(p)").scaled(alpha0);
  return t;
}

Virasoro::Virasoro(ParamScalar alpha0, bool drop_background)
    : alpha0_(std::move(alpha0)), modes_(stress_tensor(alpha0_, drop_background)) {}

ModeOperator Virasoro::L(int n) const {
  std::lock_guard lock(mu_);
  auto it = cache_.find(n);
  if (it == cache_.end()) it = cache_.emplace(n, modes_.op(n)).first;
  return it->second;
}

ModeOperator virasoro_mode(int n, const ParamScalar& alpha0) { return Virasoro(alpha0).L(n); }

Residual verify_virasoro_ope(const ParamScalar& alpha0, bool drop_background) {
  FieldExpr t = stress_tensor(alpha0, drop_background);
  auto ope = fields::wick_ope(*boson(), t, t);
  fields::OpeResult expected;
  expected.poles[{0, 4}] = FieldExpr::scalar((ParamScalar(1) - ParamScalar(24) * alpha0 * alpha0) / ParamScalar(2));
  expected.poles[{0, 2}] = stress_tensor(alpha0).scaled(ParamScalar(2));
  expected.poles[{0, 1}] = fields::derivative(stress_tensor(alpha0));
  Residual r;
  r.checked = 1;
  if (!(ope == expected)) {
    r.ok = false;
    r.witness = "T(z)T(w) = " + ope.str() + ", expected " + expected.str();
  }
  return r;
}

Residual verify_virasoro_modes(const Virasoro& vir, const ParamScalar& central, const FockSpace& src, int energy, int nmax) {
  require_cap(src, energy + 2 * nmax);
  Residual r;
  auto keys = src.basis_upto(energy, 0);
  for (int n = -nmax; n <= nmax; ++n)
    for (int m = -nmax; m <= nmax; ++m) {
      Matrix lhs = fock::commutator_blocks(vir.L(n), vir.L(m), src, keys);
      ModeOperator rhs = vir.L(n + m).scaled(ParamScalar(n - m));
      if (n + m == 0) rhs = rhs + identity().scaled(central * ParamScalar(static_cast<long>(n) * n * n - n) / ParamScalar(12));
      if (!record(r, src, fock::matrix_sub(lhs, rhs.block(src, keys)), "[L_n, L_m] at " + pair_str(n, m))) return r;
    }
  return r;
}

Residual check_heisenberg_virasoro(const Virasoro& vir, const FockSpace& src, int energy, int nmax) {
  require_cap(src, energy + 2 * nmax);
  Residual r;
  auto keys = src.basis_upto(energy, 0);
  for (int n = -nmax; n <= nmax; ++n)
    for (int m = -nmax; m <= nmax; ++m) {
      Matrix lhs = fock::commutator_blocks(ModeOperator::oscillator(fock::b(n)), vir.L(m), src, keys);
      ModeOperator rhs = ModeOperator::oscillator(fock::b(n + m)).scaled(ParamScalar(n));
      if (n + m == 0) rhs = rhs + identity().scaled(ParamScalar(2L * n * (n - 1)) * vir.alpha0());
      if (!record(r, src, fock::matrix_sub(lhs, rhs.block(src, keys)), "[b_n, L_m] at " + pair_str(n, m))) return r;
    }
  return r;
}

ModeOperator vertex_mode(const ParamScalar& beta, int n) { return FieldModes(FieldExpr::vertex({beta})).op(n); }

Residual check_heisenberg_vertex(const ParamScalar& beta, const FockSpace& src, int energy, int nmax) {
  require_cap(src, energy + 2 * nmax);
  FieldModes v(FieldExpr::vertex({beta}));
  Residual r;
  auto keys = src.basis_upto(energy, 0);
  for (int n = -nmax; n <= nmax; ++n)
    for (int m = -nmax; m <= nmax; ++m) {
      Matrix lhs = fock::commutator_blocks(ModeOperator::oscillator(fock::b(n)), v.op(m), src, keys);
      Matrix rhs = v.op(n + m).scaled(ParamScalar(2) * beta).block(src, keys);
      if (!record(r, src, fock::matrix_sub(lhs, rhs), "[b_n, V_m] at " + pair_str(n, m))) return r;
    }
  return r;
}

Residual check_vertex_halves(const ParamScalar& beta, const FockSpace& src, int energy, int nmax) {
  require_cap(src, energy + 2 * nmax);
  Residual r;
  auto keys = src.basis_upto(energy, 0);
  for (int k = 0; k <= nmax; ++k)
    for (int n = 0; n <= nmax; ++n) {
      auto bm = ModeOperator::oscillator(fock::b(-n)), bp = ModeOperator::oscillator(fock::b(n));
      if (!record(r, src, fock::commutator_blocks(bm, fields::vertex_half_op({beta}, k, false), src, keys),
                  "[b_-n, V-_k] at " + pair_str(n, k)))
        return r;
      if (!record(r, src, fock::commutator_blocks(bp, fields::vertex_half_op({beta}, k, true), src, keys),
                  "[b_n, V+_k] at " + pair_str(n, k)))
        return r;
    }
  return r;
}

Residual check_L_vertex(const Virasoro& vir, const ParamScalar& beta, const FockSpace& src, int energy, int nmax,
                        const ParamScalar& perturb) {
  require_cap(src, energy + 2 * nmax);
  FieldModes v(FieldExpr::vertex({beta}));
  ParamScalar a0 = vir.alpha0() + perturb;
  ParamScalar h = beta * beta - ParamScalar(2) * a0 * beta;
  ParamScalar twist = ParamScalar(2) * module_label(src) * beta;
  Residual r;
  auto keys = src.basis_upto(energy, 0);
  for (int n = -nmax; n <= nmax; ++n)
    for (int m = -nmax; m <= nmax; ++m) {
      Matrix lhs = fock::commutator_blocks(vir.L(n), v.op(m), src, keys);
      ParamScalar c = ParamScalar(-(m + n)) + h * ParamScalar(n + 1) + twist;
      Matrix rhs = v.op(m + n).scaled(c).block(src, keys);
      if (!record(r, src, fock::matrix_sub(lhs, rhs), "[L_n, V_m] at " + pair_str(n, m))) return r;
    }
  return r;
}

namespace {

// Coefficients of exp(-2 b1 b2 sum_{n>0} x^n / n) = (1 - x)^{2 b1 b2}.
std::vector<ParamScalar> contraction_series(const ParamScalar& b1, const ParamScalar& b2, int order) {
  std::vector<ParamScalar> c(static_cast<size_t>(order + 1));
  c[0] = ParamScalar(1);
  ParamScalar s = ParamScalar(-2) * b1 * b2;
  for (int j = 1; j <= order; ++j) {
    ParamScalar acc;
    for (int n = 1; n <= j; ++n) acc += s * c[static_cast<size_t>(j - n)];
    c[static_cast<size_t>(j)] = acc / ParamScalar(j);
  }
  return c;
}

}  // namespace

Residual product_formula_check(const ParamScalar& b1, const ParamScalar& b2, const FockSpace& src, int energy, int order) {
  require_cap(src, energy + order);
  auto c = contraction_series(b1, b2, order);
  Residual r;
  for (const auto& key : src.basis_upto(energy, 0)) {
    Vec v = basis_vec(key);
    for (int a = 0; a <= order; ++a)
      for (int bb = 0; bb <= order; ++bb) {
        Vec lhs = fields::vertex_half(src, {b1}, fields::vertex_half(src, {b2}, v, bb, false), a, true);
        Vec rhs;
        for (int j = 0; j <= std::min(a, bb); ++j)
          axpy(rhs, c[static_cast<size_t>(j)],
               fields::vertex_half(src, {b2}, fields::vertex_half(src, {b1}, v, a - j, true), bb - j, false));
        if (!record_vec(r, src, sub(lhs, rhs), "V+V- order " + pair_str(a, bb) + " on " + key_str(key))) return r;
      }
  }
  return r;
}

Residual product_corollary_check(const ParamScalar& b1, const ParamScalar& b2, const FockSpace& src, int energy, int order) {
  require_cap(src, energy + 2 * order);
  FieldModes v1(FieldExpr::vertex({b1})), v2(FieldExpr::vertex({b2}));
  MultiVertex nv({b1, b2});
  FockSpace mid = src.shifted({b2});
  auto c = contraction_series(b1, b2, energy + 2 * order + 2);
  Residual r;
  for (const auto& key : src.basis_upto(energy, 0)) {
    Vec v = basis_vec(key);
    int e = FockSpace::energy(key);
    for (int n1 = -order; n1 <= order; ++n1)
      for (int n2 = -order; n2 <= order; ++n2) {
        if (e - n1 - n2 < 0) continue;
        Vec lhs = v1.mode(mid, v2.mode(src, v, {n2}), {n1});
        Vec rhs;
        for (int j = 0; n2 + j <= e; ++j) axpy(rhs, c[static_cast<size_t>(j)], nv.coefficient(src, v, {n1 - j, n2 + j}));
        if (!record_vec(r, src, sub(lhs, rhs), "V V vs :V V: at " + pair_str(n1, n2) + " on " + key_str(key))) return r;
      }
  }
  return r;
}

// ---------------------------------------------------------------- multi-point

namespace {

FieldExpr multi_vertex_field(const std::vector<ParamScalar>& betas) {
  if (betas.empty() || static_cast<int>(betas.size()) > 3) throw VirasoroError("multi-point products support 1 to 3 points");
  FieldExpr f = FieldExpr::scalar(ParamScalar(1));
  for (size_t i = 0; i < betas.size(); ++i) f = fields::normal_product(f, FieldExpr::vertex({betas[i]}, static_cast<int>(i)));
  return f;
}

}  // namespace

MultiVertex::MultiVertex(std::vector<ParamScalar> betas)
    : betas_(std::move(betas)), modes_(multi_vertex_field(betas_), static_cast<int>(betas_.size())) {}

std::vector<ParamScalar> MultiVertex::total_shift() const {
  return {std::accumulate(betas_.begin(), betas_.end(), ParamScalar())};
}

dg::Connection MultiVertex::connection(const ParamScalar& alpha, bool drop_pairs) const {
  dg::Connection c = dg::Connection::zero(points());
  for (int i = 0; i < points(); ++i) c.var[static_cast<size_t>(i)] = ParamScalar(2) * alpha * betas_[static_cast<size_t>(i)];
  if (!drop_pairs)
    for (int i = 0; i < points(); ++i)
      for (int j = i + 1; j < points(); ++j)
        c.pair[{i, j}] = ParamScalar(2) * betas_[static_cast<size_t>(i)] * betas_[static_cast<size_t>(j)];
  return c;
}

dg::TwistedForm MultiVertex::form(const FockSpace& src, const BasisKey& v) const {
  dg::TwistedForm f(points());
  const uint8_t mask = static_cast<uint8_t>((1u << points()) - 1);
  for (const auto& [n, vec] : modes_.expand(src, v)) {
    dg::ZExp z{};
    for (int i = 0; i < points(); ++i) z[static_cast<size_t>(i)] = static_cast<int16_t>(-n[static_cast<size_t>(i)]);
    for (const auto& [k, c] : vec) f.add(dg::FormKey{mask, z, k}, c);
  }
  return f;
}

Vec MultiVertex::coefficient(const FockSpace& src, const Vec& v, const std::vector<int>& n) const { return modes_.mode(src, v, n); }

Residual check_multi_symmetry(const std::vector<ParamScalar>& betas, const FockSpace& src, int energy) {
  MultiVertex base(betas);
  std::vector<int> perm(betas.size());
  std::iota(perm.begin(), perm.end(), 0);
  Residual r;
  while (std::next_permutation(perm.begin(), perm.end())) {
    std::vector<ParamScalar> pb;
    for (int i : perm) pb.push_back(betas[static_cast<size_t>(i)]);
    MultiVertex other(pb);
    for (const auto& key : src.basis_upto(energy, 0)) {
      const auto& a = base.modes().expand(src, key);
      const auto& b = other.modes().expand(src, key);
      ++r.checked;
      bool same = a.size() == b.size();
      for (const auto& [n, vec] : b) {
        if (!same) break;
        std::vector<int> back(n.size());
        for (size_t i = 0; i < perm.size(); ++i) back[static_cast<size_t>(perm[i])] = n[i];
        auto it = a.find(back);
        same = it != a.end() && it->second == vec;
      }
      if (!same) {
        r.ok = false;
        r.witness = "permutation changes the coefficients on " + key_str(key);
        return r;
      }
    }
  }
  return r;
}

Residual check_6_12(const Virasoro& vir, const std::vector<ParamScalar>& betas, const FockSpace& src, int energy, int nmin,
                    int nmax, bool drop_pairs) {
  MultiVertex nv(betas);
  const int p = nv.points();
  FockSpace tgt = src.shifted(nv.total_shift());
  const ParamScalar alpha = module_label(src);
  const int nabs = std::max(std::abs(nmin), std::abs(nmax));
  const int reliable = src.energy_cap() - nabs - 1;
  if (reliable < 0) throw fock::FockError("window exceeded: energy cap too small for the requested range");
  Residual r;
  for (int n = nmin; n <= nmax; ++n) {
    ModeOperator ln = vir.L(n);
    // (z_i^{n+1} - z_j^{n+1})/(z_i - z_j) = sum s z_i^a z_j^b
    std::vector<std::tuple<int, int, int>> pair_terms;
    if (n >= 0)
      for (int a = 0; a <= n; ++a) pair_terms.emplace_back(a, n - a, 1);
    if (n <= -2) {
      int k = -(n + 1);
      for (int a = 0; a <= k - 1; ++a) pair_terms.emplace_back(a - k, k - 1 - a - k, -1);
    }
    for (const auto& key : src.basis_upto(energy, 0)) {
      if (FockSpace::energy(key) - n > src.energy_cap()) continue;
      Vec v = basis_vec(key);
      const int e = FockSpace::energy(key);
      Vec lv = ln.apply(src, v);
      std::set<std::vector<int>> cands;
      for (const auto& [m, vec] : nv.modes().expand(src, key)) {
        cands.insert(m);
        for (int i = 0; i < p; ++i) {
          auto x = m;
          x[static_cast<size_t>(i)] -= n;
          cands.insert(x);
          for (int j = i + 1; j < p; ++j)
            for (const auto& [a, b, s] : pair_terms) {
              auto y = m;
              y[static_cast<size_t>(i)] -= a;
              y[static_cast<size_t>(j)] -= b;
              cands.insert(y);
            }
        }
      }
      for (const auto& [k2, c2] : lv)
        for (const auto& [m, vec] : nv.modes().expand(src, k2)) cands.insert(m);
      for (const auto& m : cands) {
        int total = std::accumulate(m.begin(), m.end(), 0);
        int final_energy = e - n - total;
        if (final_energy < 0 || final_energy > reliable) continue;
        Vec lhs = sub(ln.apply(tgt, nv.coefficient(src, v, m)), nv.coefficient(src, lv, m));
        Vec rhs;
        for (int i = 0; i < p; ++i) {
          const ParamScalar& bi = betas[static_cast<size_t>(i)];
          ParamScalar h = bi * bi - ParamScalar(2) * vir.alpha0() * bi;
          auto x = m;
          x[static_cast<size_t>(i)] += n;
          ParamScalar c = ParamScalar(-(m[static_cast<size_t>(i)] + n)) + h * ParamScalar(n + 1) + ParamScalar(2) * bi * alpha;
          axpy(rhs, c, nv.coefficient(src, v, x));
          if (drop_pairs) continue;
          for (int j = i + 1; j < p; ++j)
            for (const auto& [a, b, s] : pair_terms) {
              auto y = m;
              y[static_cast<size_t>(i)] += a;
              y[static_cast<size_t>(j)] += b;
              axpy(rhs, ParamScalar(2 * s) * bi * betas[static_cast<size_t>(j)], nv.coefficient(src, v, y));
            }
        }
        std::string where = "n=" + std::to_string(n) + " coefficient " + key_str(BasisKey(m.begin(), m.end())) + " on " + key_str(key);
        if (!record_vec(r, tgt, sub(lhs, rhs), where)) return r;
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------- screening cochains

ScreeningComplex screening_complex(const ParamScalar& beta, const ParamScalar& alpha, int p, int energy_cap, int reliable_energy,
                                   bool drop_pairs) {
  if (p < 1 || p > 3) throw VirasoroError("screening cochains support p = 1..3");
  if (reliable_energy > energy_cap) throw VirasoroError("reliable energy exceeds the energy cap");
  auto params = VirasoroParams::screening(beta);
  auto vir = std::make_shared<const Virasoro>(params.alpha0);
  auto omega = std::make_shared<const MultiVertex>(std::vector<ParamScalar>(static_cast<size_t>(p), beta));
  FockSpace src = ff_module(alpha, energy_cap);
  FockSpace tgt = src.shifted(omega->total_shift());
  ScreeningComplex c{vir, beta, alpha, p, src, tgt, omega, {}};
  auto& s = c.system;
  s.degree = p;
  s.nvars = p;
  s.conn = omega->connection(alpha, drop_pairs);
  s.bracket = [](const int& n, const int& m) {
    std::vector<std::pair<ParamScalar, int>> out;
    if (n != m) out.emplace_back(ParamScalar(n - m), n + m);
    return out;
  };
  // Images beyond the window only feed coefficients above the reliable energy.
  auto act = [vir](const FockSpace& f) {
    return [vir, f](const int& n, const BasisKey& k) {
      if (FockSpace::energy(k) - n > f.energy_cap()) return Vec{};
      return vir->L(n).apply(f, basis_vec(k));
    };
  };
  s.act_source = act(src);
  s.act_target = act(tgt);
  s.value = dg::cartan_cochain<int>([omega, src](const BasisKey& k) { return omega->form(src, k); },
                                    [p](const int& n, const dg::TwistedForm& f) { return dg::contract(dg::VectorField::witt(p, n), f); });
  s.reliable = [reliable_energy](const dg::FormKey& k) { return FockSpace::energy(k.target) <= reliable_energy; };
  s.name = [](const int& n) { return "e_" + std::to_string(n); };
  return c;
}

Residual check_invariance(const ScreeningComplex& c, const std::vector<int>& elems, const std::vector<BasisKey>& vectors) {
  Residual r;
  for (int n : elems)
    for (const auto& k : vectors) {
      dg::TwistedForm w = c.omega->form(c.source, k);
      dg::TwistedForm first = w.map_target([&](const BasisKey& t) { return c.system.act_target(n, t); }) -
                              dg::apply_on_vec(c.system, 0, {}, c.system.act_source(n, k));
      dg::TwistedForm total = (first + dg::lie_derivative(dg::VectorField::witt(c.p, n), w, c.system.conn)).filtered(c.system.reliable);
      ++r.checked;
      if (!total.is_zero()) {
        r.ok = false;
        r.witness = "e_" + std::to_string(n) + " on " + key_str(k) + ": " + total.str();
        return r;
      }
    }
  return r;
}

Residual check_cocycle_ope(const ParamScalar& beta, int nmax) {
  auto params = VirasoroParams::screening(beta);
  FieldExpr v = FieldExpr::vertex({beta});
  auto ope = fields::wick_ope(*boson(), stress_tensor(params.alpha0), v);
  ParamScalar w = ParamScalar::param("w");
  // principal part of z^{n+1} w^m T(z) V(w), pole order -> coefficient
  auto principal = [&](int n, int m) {
    std::map<int, FieldExpr> out;
    for (int order = 1; order <= ope.max_order(); ++order)
      for (int k = order; k <= ope.max_order(); ++k) {
        ParamScalar c(binomial(Rational(n + 1), k - order));
        if (c.is_zero()) continue;
        int power = n + 1 - (k - order) + m;
        ParamScalar wp = power >= 0 ? w.pow(power) : ParamScalar(1) / w.pow(-power);
        out[order] = out[order] + ope.at(k).scaled(c * wp);
      }
    return out;
  };
  Residual r;
  for (int n = -nmax; n <= nmax; ++n)
    for (int m = -nmax; m <= nmax; ++m) {
      auto a = principal(n, m), b = principal(m, n);
      int power = n + m;
      ParamScalar wp = power >= 0 ? w.pow(power) : ParamScalar(1) / w.pow(-power);
      ++r.checked;
      for (int order = 1; order <= ope.max_order(); ++order) {
        FieldExpr expected = order == 1 ? v.scaled(ParamScalar(n - m) * wp) : FieldExpr{};
        FieldExpr got = a[order] - b[order];
        if (!(got == expected)) {
          r.ok = false;
          r.witness = "e_" + std::to_string(n) + ", e_" + std::to_string(m) + " order " + std::to_string(order) + ": " + got.str();
          return r;
        }
      }
    }
  return r;
}

// ---------------------------------------------------------------- intertwiners

namespace {

long require_integer(const ParamScalar& x, const std::string& what) {
  if (!x.is_integer()) throw VirasoroError("non-integral exponent " + what + " = " + x.str());
  Rational q = x.constant_value();
  return q.get_num().get_si();
}

// Coefficient of N_n in the iterated residue; the pair factors are expanded
// for |z_i| > |z_j| (i < j).
ParamScalar residue_weight(const std::vector<int>& n, long kappa, long K) {
  const int p = static_cast<int>(n.size());
  auto bin = [K](long j) { return ParamScalar(binomial(Rational(K), static_cast<int>(j))) * ParamScalar(j % 2 ? -1 : 1); };
  if (p == 1) return n[0] == kappa + 1 ? ParamScalar(1) : ParamScalar();
  if (p == 2) {
    long j = n[1] - kappa - 1;
    if (j < 0 || n[0] != kappa + K - j + 1) return {};
    return bin(j);
  }
  ParamScalar acc;
  for (long j12 = 0; j12 <= 2 * K + kappa + 1 - n[0]; ++j12) {
    long j13 = 2 * K + kappa + 1 - j12 - n[0];
    long j23 = K + kappa + 1 + j12 - n[1];
    if (j13 < 0 || j23 < 0 || n[2] != kappa + 1 + j13 + j23) continue;
    acc += bin(j12) * bin(j13) * bin(j23);
  }
  return acc;
}

}  // namespace

FfIntertwiner ff_intertwiner(int p, const ParamScalar& alpha, const ParamScalar& beta, int check_energy, int nmax) {
  if (p < 1 || p > 3) throw VirasoroError("intertwiners support p = 1..3");
  const long kappa = require_integer(ParamScalar(2) * alpha * beta, "2 alpha beta");
  const long K = p > 1 ? require_integer(ParamScalar(2) * beta * beta, "2 beta^2") : 0;
  auto params = VirasoroParams::screening(beta);
  const long shift = p * (kappa + 1) + K * p * (p - 1) / 2;  // sum of mode indices
  const int cap = static_cast<int>(check_energy + nmax + std::max(0L, -shift) + 2);
  FockSpace src = ff_module(alpha, cap);
  auto nv = std::make_shared<const MultiVertex>(std::vector<ParamScalar>(static_cast<size_t>(p), beta));
  ModeOperator op("f_" + std::to_string(p), nv->total_shift(), [nv, kappa, K](const FockSpace& s, const BasisKey& k) {
    Vec out;
    for (const auto& [n, vec] : nv->modes().expand(s, k)) axpy(out, residue_weight(n, kappa, K), vec);
    return out;
  });
  Virasoro vir(params.alpha0);
  Residual hom;
  auto keys = src.basis_upto(check_energy, 0);
  for (int n = -nmax; n <= nmax && hom.ok; ++n)
    record(hom, src, fock::commutator_blocks(vir.L(n), op, src, keys), "[L_n, f] at n=" + std::to_string(n));
  Vec img = op.apply(src, basis_vec(FockSpace::vacuum()));
  return FfIntertwiner{op, src, op.target(src), hom, img};
}

}  // namespace scr::vir
