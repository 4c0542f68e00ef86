#include "scr/forms.hpp"

#include <bit>

namespace scr::dg {

int pair_index(int i, int j) {
  static constexpr int idx[kMaxVars][kMaxVars] = {{-1, 0, 1, 2}, {0, -1, 3, 4}, {1, 3, -1, 5}, {2, 4, 5, -1}};
  if (i < 0 || j < 0 || i >= kMaxVars || j >= kMaxVars || i == j) throw FormError("bad variable pair");
  return idx[i][j];
}

ZExp unit_exp(int var, int power) {
  ZExp e{};
  e[static_cast<size_t>(var)] = static_cast<int16_t>(power);
  return e;
}

ZExp operator+(const ZExp& a, const ZExp& b) {
  ZExp r;
  for (size_t i = 0; i < r.size(); ++i) r[i] = static_cast<int16_t>(a[i] + b[i]);
  return r;
}

void laurent_add(Laurent& f, const ZExp& e, const ParamScalar& c) {
  if (c.is_zero()) return;
  auto [it, fresh] = f.try_emplace(e, c);
  if (!fresh) {
    it->second += c;
    if (it->second.is_zero()) f.erase(it);
  }
}

Laurent laurent_mul(const Laurent& a, const Laurent& b) {
  Laurent r;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) laurent_add(r, ea + eb, ca * cb);
  return r;
}

Laurent laurent_derivative(const Laurent& f, int var) {
  Laurent r;
  for (const auto& [e, c] : f) {
    int k = e[static_cast<size_t>(var)];
    if (k == 0) continue;
    laurent_add(r, e + unit_exp(var, -1), c * ParamScalar(k));
  }
  return r;
}

int wedge_sign(int k, uint8_t mask) {
  if (mask & (1u << k)) return 0;
  int below = std::popcount(static_cast<unsigned>(mask & ((1u << k) - 1)));
  return below % 2 ? -1 : 1;
}

// ---------------------------------------------------------------- TwistedForm

TwistedForm::TwistedForm(int nvars) : nvars_(nvars) {
  if (nvars < 1 || nvars > kMaxVars) throw FormError("unsupported number of variables");
}

TwistedForm TwistedForm::monomial(int nvars, uint8_t mask, const ZExp& z, const ParamScalar& c, const BasisKey& target) {
  TwistedForm f(nvars);
  f.add(FormKey{mask, z, target}, c);
  return f;
}

void TwistedForm::add(const FormKey& k, const ParamScalar& c) {
  if (c.is_zero()) return;
  auto [it, fresh] = terms_.try_emplace(k, c);
  if (!fresh) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

TwistedForm TwistedForm::lifted(const Den& d) const {
  TwistedForm r = *this;
  for (int i = 0; i < nvars_; ++i)
    for (int j = i + 1; j < nvars_; ++j) {
      int p = pair_index(i, j);
      int diff = d[static_cast<size_t>(p)] - r.den_[static_cast<size_t>(p)];
      if (diff < 0) throw FormError("cannot lower a denominator");
      for (int s = 0; s < diff; ++s) {
        TwistedForm next(nvars_);
        next.den_ = r.den_;
        for (const auto& [k, c] : r.terms_) {
          FormKey a = k, b = k;
          a.z = k.z + unit_exp(i);
          b.z = k.z + unit_exp(j);
          next.add(a, c);
          next.add(b, -c);
        }
        ++next.den_[static_cast<size_t>(p)];
        r = std::move(next);
      }
    }
  return r;
}

TwistedForm& TwistedForm::operator+=(const TwistedForm& o) {
  if (o.nvars_ != nvars_) throw FormError("adding forms in different numbers of variables");
  if (o.terms_.empty()) return *this;
  if (terms_.empty()) return *this = o;
  if (o.den_ != den_) {
    Den m;
    for (size_t i = 0; i < m.size(); ++i) m[i] = std::max(den_[i], o.den_[i]);
    TwistedForm a = lifted(m), b = o.lifted(m);
    for (const auto& [k, c] : b.terms_) a.add(k, c);
    return *this = std::move(a);
  }
  for (const auto& [k, c] : o.terms_) add(k, c);
  return *this;
}

TwistedForm TwistedForm::operator+(const TwistedForm& o) const {
  TwistedForm r = *this;
  r += o;
  return r;
}

TwistedForm TwistedForm::operator-(const TwistedForm& o) const { return *this + o.scaled(ParamScalar(-1)); }

TwistedForm TwistedForm::scaled(const ParamScalar& c) const {
  TwistedForm r(nvars_);
  if (c.is_zero()) return r;
  r.den_ = den_;
  for (const auto& [k, v] : terms_) r.terms_.emplace(k, v * c);
  return r;
}

TwistedForm TwistedForm::times(const Laurent& f) const {
  TwistedForm r(nvars_);
  r.den_ = den_;
  for (const auto& [k, c] : terms_)
    for (const auto& [e, a] : f) {
      FormKey nk = k;
      nk.z = k.z + e;
      r.add(nk, c * a);
    }
  return r;
}

TwistedForm TwistedForm::wedge_dz(int var) const {
  TwistedForm r(nvars_);
  r.den_ = den_;
  for (const auto& [k, c] : terms_) {
    int s = wedge_sign(var, k.mask);
    if (!s) continue;
    FormKey nk = k;
    nk.mask = static_cast<uint8_t>(k.mask | (1u << var));
    r.add(nk, s > 0 ? c : -c);
  }
  return r;
}

TwistedForm TwistedForm::with_den_increment(int i, int j) const {
  TwistedForm r = *this;
  ++r.den_[static_cast<size_t>(pair_index(i, j))];
  return r;
}

TwistedForm TwistedForm::map_target(const std::function<Vec(const BasisKey&)>& f) const {
  TwistedForm r(nvars_);
  r.den_ = den_;
  for (const auto& [k, c] : terms_)
    for (const auto& [w, a] : f(k.target)) r.add(FormKey{k.mask, k.z, w}, c * a);
  return r;
}

TwistedForm TwistedForm::filtered(const std::function<bool(const FormKey&)>& keep) const {
  TwistedForm r(nvars_);
  r.den_ = den_;
  for (const auto& [k, c] : terms_)
    if (keep(k)) r.terms_.emplace(k, c);
  return r;
}

Vec TwistedForm::coefficient(uint8_t mask, const ZExp& z) const {
  for (int8_t d : den_)
    if (d) throw FormError("coefficient extraction needs a polynomial form");
  Vec v;
  for (const auto& [k, c] : terms_)
    if (k.mask == mask && k.z == z) add_to(v, k.target, c);
  return v;
}

std::string TwistedForm::str() const {
  if (terms_.empty()) return "0";
  std::string s;
  int shown = 0;
  for (const auto& [k, c] : terms_) {
    if (shown++ == 6) {
      s += " + ... (" + std::to_string(terms_.size()) + " terms)";
      break;
    }
    if (!s.empty()) s += " + ";
    s += "(" + c.str() + ")";
    for (int i = 0; i < nvars_; ++i)
      if (k.z[static_cast<size_t>(i)]) s += "*z" + std::to_string(i + 1) + "^" + std::to_string(k.z[static_cast<size_t>(i)]);
    for (int i = 0; i < nvars_; ++i)
      if (k.mask & (1u << i)) s += " dz" + std::to_string(i + 1);
    if (!k.target.empty()) s += " " + key_str(k.target);
  }
  bool any = false;
  for (int8_t d : den_) any |= d != 0;
  if (any) {
    s = "(" + s + ")/(";
    for (int i = 0; i < nvars_; ++i)
      for (int j = i + 1; j < nvars_; ++j)
        if (int d = den_[static_cast<size_t>(pair_index(i, j))])
          s += "(z" + std::to_string(i + 1) + "-z" + std::to_string(j + 1) + ")^" + std::to_string(d);
    s += ")";
  }
  return s;
}

// ---------------------------------------------------------------- differentials

Connection Connection::zero(int nvars) {
  Connection c;
  c.nvars = nvars;
  c.var.assign(static_cast<size_t>(nvars), ParamScalar());
  return c;
}

Connection Connection::uniform(int nvars, const ParamScalar& kvar, const ParamScalar& kpair) {
  Connection c = zero(nvars);
  for (auto& k : c.var) k = kvar;
  for (int i = 0; i < nvars; ++i)
    for (int j = i + 1; j < nvars; ++j) c.pair[{i, j}] = kpair;
  return c;
}

namespace {

// k (dz_i - dz_j) ^ f / (z_i - z_j)
TwistedForm pair_term(const TwistedForm& f, int i, int j, const ParamScalar& k) {
  if (k.is_zero() || f.is_zero()) return TwistedForm(f.nvars());
  return (f.wedge_dz(i) - f.wedge_dz(j)).scaled(k).with_den_increment(i, j);
}

}  // namespace

TwistedForm d_dr(const TwistedForm& f) {
  const int n = f.nvars();
  // d(N / prod (z_i - z_j)^m) = dN / prod - sum m (dz_i - dz_j) ^ N / ((z_i - z_j) prod)
  TwistedForm r = f.filtered([](const FormKey&) { return false; });
  for (const auto& [k, c] : f.terms())
    for (int v = 0; v < n; ++v) {
      int e = k.z[static_cast<size_t>(v)];
      int s = wedge_sign(v, k.mask);
      if (!e || !s) continue;
      FormKey nk = k;
      nk.z = k.z + unit_exp(v, -1);
      nk.mask = static_cast<uint8_t>(k.mask | (1u << v));
      r.add(nk, c * ParamScalar(e * s));
    }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      int d = f.den()[static_cast<size_t>(pair_index(i, j))];
      if (d) r += pair_term(f, i, j, ParamScalar(-d));
    }
  return r;
}

TwistedForm d_twisted(const TwistedForm& f, const Connection& c) {
  TwistedForm r = d_dr(f);
  for (int v = 0; v < f.nvars() && v < static_cast<int>(c.var.size()); ++v) {
    const ParamScalar& k = c.var[static_cast<size_t>(v)];
    if (k.is_zero()) continue;
    r += f.wedge_dz(v).times(Laurent{{unit_exp(v, -1), k}});
  }
  for (const auto& [ij, k] : c.pair) r += pair_term(f, ij.first, ij.second, k);
  return r;
}

// ---------------------------------------------------------------- vector fields

VectorField VectorField::diagonal(int nvars, const std::map<int, ParamScalar>& mu) {
  VectorField v;
  v.nvars = nvars;
  v.comp.resize(static_cast<size_t>(nvars));
  for (int k = 0; k < nvars; ++k)
    for (const auto& [p, c] : mu) laurent_add(v.comp[static_cast<size_t>(k)], unit_exp(k, p), c);
  return v;
}

VectorField VectorField::witt(int nvars, int n) { return diagonal(nvars, {{n + 1, ParamScalar(-1)}}); }

VectorField VectorField::operator+(const VectorField& o) const {
  VectorField r = *this;
  for (size_t k = 0; k < comp.size(); ++k)
    for (const auto& [e, c] : o.comp[k]) laurent_add(r.comp[k], e, c);
  return r;
}

VectorField VectorField::scaled(const ParamScalar& c) const {
  VectorField r = *this;
  for (auto& f : r.comp) {
    Laurent g;
    for (const auto& [e, a] : f) laurent_add(g, e, a * c);
    f = std::move(g);
  }
  return r;
}

bool VectorField::operator==(const VectorField& o) const {
  VectorField d = *this + o.scaled(ParamScalar(-1));
  for (const auto& f : d.comp)
    if (!f.empty()) return false;
  return true;
}

VectorField bracket(const VectorField& a, const VectorField& b) {
  VectorField r;
  r.nvars = a.nvars;
  r.comp.resize(static_cast<size_t>(a.nvars));
  for (int k = 0; k < a.nvars; ++k)
    for (int l = 0; l < a.nvars; ++l) {
      for (const auto& [e, c] : laurent_mul(a.comp[static_cast<size_t>(l)], laurent_derivative(b.comp[static_cast<size_t>(k)], l)))
        laurent_add(r.comp[static_cast<size_t>(k)], e, c);
      for (const auto& [e, c] : laurent_mul(b.comp[static_cast<size_t>(l)], laurent_derivative(a.comp[static_cast<size_t>(k)], l)))
        laurent_add(r.comp[static_cast<size_t>(k)], e, -c);
    }
  return r;
}

TwistedForm contract(const VectorField& v, const TwistedForm& f) {
  TwistedForm r = f.filtered([](const FormKey&) { return false; });
  for (const auto& [k, c] : f.terms()) {
    int pos = 0;
    for (int b = 0; b < f.nvars(); ++b) {
      if (!(k.mask & (1u << b))) continue;
      FormKey nk = k;
      nk.mask = static_cast<uint8_t>(k.mask & ~(1u << b));
      ParamScalar sc = pos % 2 ? -c : c;
      for (const auto& [e, a] : v.comp[static_cast<size_t>(b)]) {
        FormKey t = nk;
        t.z = nk.z + e;
        r.add(t, sc * a);
      }
      ++pos;
    }
  }
  return r;
}

TwistedForm lie_derivative(const VectorField& v, const TwistedForm& f, const Connection& c) {
  return d_twisted(contract(v, f), c) + contract(v, d_twisted(f, c));
}

// ---------------------------------------------------------------- cohomology

OneVarCohomology one_var_cohomology(const ParamScalar& kappa, int lo, int hi) {
  if (lo > hi) throw FormError("empty window");
  OneVarCohomology h;
  // d(z^e) = (e + kappa) z^e dz/z is diagonal in the monomial basis.
  for (int e = lo; e <= hi; ++e) {
    if (!(ParamScalar(e) + kappa).is_zero()) continue;
    h.h0_exponents.push_back(e);
    h.h1_exponents.push_back(e);
  }
  h.h0 = static_cast<int>(h.h0_exponents.size());
  h.h1 = static_cast<int>(h.h1_exponents.size());
  if (kappa.is_integer()) {
    Rational mk = -kappa.constant_value();
    h.inconclusive = mk < lo || mk > hi;
  }
  return h;
}

int cartan_sign(int a) { return (a * (a + 1) / 2) % 2 ? -1 : 1; }

}  // namespace scr::dg
