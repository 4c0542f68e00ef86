#include "scr/scalar.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <sstream>
#include <unordered_map>

namespace scr {

// ---------------------------------------------------------------- registry

struct ParameterContext::Impl {
  mutable std::shared_mutex mu;
  std::vector<std::string> names;
  std::vector<bool> nonzero;
  std::unordered_map<std::string, int> index;
};

ParameterContext& ParameterContext::global() {
  static ParameterContext ctx;
  return ctx;
}

ParameterContext::Impl& ParameterContext::impl() const {
  static Impl impl;
  return impl;
}

int ParameterContext::id(std::string_view name) {
  auto& im = impl();
  {
    std::shared_lock lock(im.mu);
    auto it = im.index.find(std::string(name));
    if (it != im.index.end()) return it->second;
  }
  std::unique_lock lock(im.mu);
  auto it = im.index.find(std::string(name));
  if (it != im.index.end()) return it->second;
  if (static_cast<int>(im.names.size()) >= kMaxParams)
    throw ScalarError("too many parameters registered (max " + std::to_string(kMaxParams) + ")");
  int id = static_cast<int>(im.names.size());
  im.names.emplace_back(name);
  im.nonzero.push_back(false);
  im.index.emplace(std::string(name), id);
  return id;
}

std::optional<int> ParameterContext::find(std::string_view name) const {
  auto& im = impl();
  std::shared_lock lock(im.mu);
  auto it = im.index.find(std::string(name));
  if (it == im.index.end()) return std::nullopt;
  return it->second;
}

std::string ParameterContext::name(int id) const {
  auto& im = impl();
  std::shared_lock lock(im.mu);
  return im.names.at(static_cast<size_t>(id));
}

int ParameterContext::size() const {
  auto& im = impl();
  std::shared_lock lock(im.mu);
  return static_cast<int>(im.names.size());
}

void ParameterContext::declare_nonzero(std::string_view name) {
  int i = id(name);
  auto& im = impl();
  std::unique_lock lock(im.mu);
  im.nonzero[static_cast<size_t>(i)] = true;
}

bool ParameterContext::must_be_nonzero(int id) const {
  auto& im = impl();
  std::shared_lock lock(im.mu);
  return im.nonzero.at(static_cast<size_t>(id));
}

// ---------------------------------------------------------------- monomials

bool Monomial::divides(const Monomial& o) const {
  for (int i = 0; i < kMaxParams; ++i)
    if (e[i] > o.e[i]) return false;
  return true;
}

Monomial Monomial::operator*(const Monomial& o) const {
  Monomial r;
  for (int i = 0; i < kMaxParams; ++i) {
    int s = e[i] + o.e[i];
    if (s > 65535) throw ScalarError("parameter exponent overflow");
    r.e[i] = static_cast<uint16_t>(s);
  }
  r.deg = static_cast<uint16_t>(deg + o.deg);
  return r;
}

Monomial Monomial::operator/(const Monomial& o) const {
  Monomial r;
  for (int i = 0; i < kMaxParams; ++i) r.e[i] = static_cast<uint16_t>(e[i] - o.e[i]);
  r.deg = static_cast<uint16_t>(deg - o.deg);
  return r;
}

Monomial Monomial::var(int id, int power) {
  Monomial m;
  if (power > 65535) throw ScalarError("parameter exponent overflow");
  m.e[static_cast<size_t>(id)] = static_cast<uint16_t>(power);
  m.deg = static_cast<uint16_t>(power);
  return m;
}

// ---------------------------------------------------------------- polynomials

namespace {

bool term_greater(const Poly::Term& a, const Poly::Term& b) { return mono_greater(a.first, b.first); }

std::vector<Poly::Term> combine_sorted(std::vector<Poly::Term> v) {
  std::sort(v.begin(), v.end(), term_greater);
  std::vector<Poly::Term> out;
  out.reserve(v.size());
  for (auto& t : v) {
    if (!out.empty() && out.back().first == t.first) {
      out.back().second += t.second;
    } else {
      if (!out.empty() && sgn(out.back().second) == 0) out.pop_back();
      out.push_back(std::move(t));
    }
  }
  if (!out.empty() && sgn(out.back().second) == 0) out.pop_back();
  return out;
}

}  // namespace

Poly::Poly(const Rational& c) {
  if (sgn(c) != 0) terms_.emplace_back(Monomial{}, c);
}

Poly Poly::var(int id, int power) {
  Poly p;
  p.terms_.emplace_back(Monomial::var(id, power), Rational(1));
  return p;
}

Poly Poly::from_terms(std::vector<Term> terms) {
  Poly p;
  p.terms_ = combine_sorted(std::move(terms));
  return p;
}

Rational Poly::constant_value() const {
  if (terms_.empty()) return 0;
  if (!is_constant()) throw ScalarError("polynomial is not constant");
  return terms_[0].second;
}

int Poly::degree_in(int id) const {
  int d = 0;
  for (const auto& t : terms_) d = std::max<int>(d, t.first.e[static_cast<size_t>(id)]);
  return d;
}

int Poly::max_var() const {
  int m = -1;
  for (const auto& t : terms_)
    for (int i = kMaxParams - 1; i > m; --i)
      if (t.first.e[static_cast<size_t>(i)] != 0) {
        m = i;
        break;
      }
  return m;
}

Poly Poly::operator+(const Poly& o) const {
  Poly r;
  r.terms_.reserve(terms_.size() + o.terms_.size());
  size_t i = 0, j = 0;
  while (i < terms_.size() || j < o.terms_.size()) {
    if (j == o.terms_.size() || (i < terms_.size() && mono_greater(terms_[i].first, o.terms_[j].first))) {
      r.terms_.push_back(terms_[i++]);
    } else if (i == terms_.size() || mono_greater(o.terms_[j].first, terms_[i].first)) {
      r.terms_.push_back(o.terms_[j++]);
    } else {
      Rational c = terms_[i].second + o.terms_[j].second;
      if (sgn(c) != 0) r.terms_.emplace_back(terms_[i].first, std::move(c));
      ++i;
      ++j;
    }
  }
  return r;
}

Poly Poly::operator-() const {
  Poly r = *this;
  for (auto& t : r.terms_) t.second = -t.second;
  return r;
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly Poly::operator*(const Poly& o) const {
  if (is_zero() || o.is_zero()) return {};
  if (o.is_constant()) return scaled(o.terms_[0].second);
  if (is_constant()) return o.scaled(terms_[0].second);
  std::vector<Term> v;
  v.reserve(terms_.size() * o.terms_.size());
  for (const auto& a : terms_)
    for (const auto& b : o.terms_) v.emplace_back(a.first * b.first, a.second * b.second);
  Poly r;
  r.terms_ = combine_sorted(std::move(v));
  return r;
}

Poly Poly::scaled(const Rational& c) const {
  if (sgn(c) == 0) return {};
  Poly r = *this;
  for (auto& t : r.terms_) t.second *= c;
  return r;
}

Poly Poly::times_monomial(const Monomial& m, const Rational& c) const {
  if (sgn(c) == 0) return {};
  Poly r;
  r.terms_.reserve(terms_.size());
  for (const auto& t : terms_) r.terms_.emplace_back(t.first * m, t.second * c);
  return r;
}

Poly Poly::divexact(const Poly& o) const {
  if (o.is_zero()) throw ScalarError("division by zero polynomial");
  if (o.is_constant()) return scaled(1 / o.terms_[0].second);
  const auto& [lm, lc] = o.lead();
  std::vector<Term> q;
  Poly r = *this;
  while (!r.is_zero()) {
    const auto& [rm, rc] = r.lead();
    if (!lm.divides(rm)) throw ScalarError("inexact polynomial division");
    Monomial m = rm / lm;
    Rational c = rc / lc;
    q.emplace_back(m, c);
    r = r - o.times_monomial(m, c);
  }
  Poly out;
  out.terms_ = std::move(q);  // produced in decreasing order
  return out;
}

Poly Poly::monic() const {
  if (is_zero()) return {};
  return scaled(1 / lead().second);
}

bool Poly::operator==(const Poly& o) const {
  if (terms_.size() != o.terms_.size()) return false;
  for (size_t i = 0; i < terms_.size(); ++i)
    if (!(terms_[i].first == o.terms_[i].first) || terms_[i].second != o.terms_[i].second) return false;
  return true;
}

int Poly::compare(const Poly& o) const {
  size_t n = std::min(terms_.size(), o.terms_.size());
  for (size_t i = 0; i < n; ++i) {
    if (!(terms_[i].first == o.terms_[i].first)) return mono_greater(terms_[i].first, o.terms_[i].first) ? 1 : -1;
    int c = cmp(terms_[i].second, o.terms_[i].second);
    if (c != 0) return c < 0 ? -1 : 1;
  }
  if (terms_.size() == o.terms_.size()) return 0;
  return terms_.size() < o.terms_.size() ? -1 : 1;
}

std::string Poly::str() const {
  if (terms_.empty()) return "0";
  auto& ctx = ParameterContext::global();
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    Rational a = abs(c);
    if (first) {
      if (sgn(c) < 0) os << "-";
    } else {
      os << (sgn(c) < 0 ? " - " : " + ");
    }
    first = false;
    bool coef_shown = false;
    if (a != 1 || m.is_one()) {
      os << a.get_str();
      coef_shown = true;
    }
    for (int i = 0; i < kMaxParams; ++i) {
      int e = m.e[static_cast<size_t>(i)];
      if (e == 0) continue;
      if (coef_shown) os << "*";
      os << ctx.name(i);
      if (e > 1) os << "^" << e;
      coef_shown = true;
    }
  }
  return os.str();
}

// ---------------------------------------------------------------- gcd

namespace {

using UPoly = std::vector<Poly>;  // coefficient of x^d at index d

UPoly to_upoly(const Poly& p, int x) {
  UPoly u(static_cast<size_t>(p.degree_in(x)) + 1);
  std::vector<std::vector<Poly::Term>> buckets(u.size());
  for (const auto& [m, c] : p.terms()) {
    int d = m.e[static_cast<size_t>(x)];
    Monomial r = m;
    r.e[static_cast<size_t>(x)] = 0;
    r.deg = static_cast<uint16_t>(r.deg - d);
    buckets[static_cast<size_t>(d)].emplace_back(r, c);
  }
  for (size_t d = 0; d < u.size(); ++d) u[d] = Poly::from_terms(std::move(buckets[d]));
  return u;
}

Poly from_upoly(const UPoly& u, int x) {
  std::vector<Poly::Term> v;
  for (size_t d = 0; d < u.size(); ++d)
    for (const auto& [m, c] : u[d].terms()) v.emplace_back(m * Monomial::var(x, static_cast<int>(d)), c);
  return Poly::from_terms(std::move(v));
}

void trim(UPoly& u) {
  while (!u.empty() && u.back().is_zero()) u.pop_back();
}

Poly gcd_rec(const Poly& a, const Poly& b);

Poly content(const UPoly& u) {
  Poly g;
  for (const auto& c : u) {
    if (c.is_zero()) continue;
    g = g.is_zero() ? c.monic() : gcd_rec(g, c);
    if (g.is_constant()) return Poly(1);
  }
  return g;
}

UPoly primitive(UPoly u) {
  trim(u);
  if (u.empty()) return u;
  Poly c = content(u);
  if (!c.is_constant()) {
    for (auto& t : u) t = t.divexact(c);
  } else {
    Rational lc = u.back().lead().second;
    for (auto& t : u) t = t.scaled(1 / lc);
  }
  return u;
}

UPoly prem(UPoly a, const UPoly& b) {
  const Poly& lc = b.back();
  size_t db = b.size() - 1;
  trim(a);
  while (!a.empty() && a.size() - 1 >= db) {
    size_t d = a.size() - 1 - db;
    Poly t = a.back();
    for (auto& c : a) c = c * lc;
    for (size_t k = 0; k < b.size(); ++k) a[k + d] = a[k + d] - t * b[k];
    trim(a);
  }
  return a;
}

// Degree in x of gcd of the images of a and b modulo a prime, after evaluating
// all other parameters at pseudo-random residues. This bounds the true gcd
// degree from above whenever both leading coefficients survive the reduction;
// returns -1 if no admissible point was found.
int modular_gcd_degree_bound(const Poly& a, const Poly& b, int x) {
  constexpr uint64_t kP = 2147483647ULL;
  auto mulmod = [](uint64_t u, uint64_t v) { return (u * v) % kP; };
  auto powmod = [&](uint64_t u, uint64_t e) {
    uint64_t r = 1;
    while (e) {
      if (e & 1) r = mulmod(r, u);
      u = mulmod(u, u);
      e >>= 1;
    }
    return r;
  };
  auto inv = [&](uint64_t u) { return powmod(u, kP - 2); };
  auto reduce = [&](const Rational& q) -> std::optional<uint64_t> {
    mpz_class n = q.get_num() % mpz_class(static_cast<unsigned long>(kP));
    mpz_class d = q.get_den() % mpz_class(static_cast<unsigned long>(kP));
    if (n < 0) n += static_cast<unsigned long>(kP);
    if (d == 0) return std::nullopt;
    return mulmod(n.get_ui(), inv(d.get_ui()));
  };
  std::mt19937_64 rng(0x5eedULL + static_cast<uint64_t>(x));
  for (int attempt = 0; attempt < 4; ++attempt) {
    std::array<uint64_t, kMaxParams> pt{};
    for (auto& v : pt) v = 2 + rng() % (kP - 3);
    auto image = [&](const Poly& f) -> std::optional<std::vector<uint64_t>> {
      std::vector<uint64_t> u(static_cast<size_t>(f.degree_in(x)) + 1, 0);
      for (const auto& [m, c] : f.terms()) {
        auto r = reduce(c);
        if (!r) return std::nullopt;
        uint64_t t = *r;
        for (int i = 0; i < kMaxParams; ++i)
          if (i != x && m.e[static_cast<size_t>(i)] != 0) t = mulmod(t, powmod(pt[static_cast<size_t>(i)], m.e[static_cast<size_t>(i)]));
        auto& slot = u[m.e[static_cast<size_t>(x)]];
        slot = (slot + t) % kP;
      }
      return u;
    };
    auto ia = image(a), ib = image(b);
    if (!ia || !ib || ia->back() == 0 || ib->back() == 0) continue;
    std::vector<uint64_t> f = *ia, g = *ib;
    auto strip = [](std::vector<uint64_t>& v) {
      while (!v.empty() && v.back() == 0) v.pop_back();
    };
    while (!g.empty()) {
      while (f.size() >= g.size() && !f.empty()) {
        uint64_t q = mulmod(f.back(), inv(g.back()));
        size_t d = f.size() - g.size();
        for (size_t k = 0; k < g.size(); ++k) f[k + d] = (f[k + d] + kP - mulmod(q, g[k])) % kP;
        strip(f);
      }
      std::swap(f, g);
    }
    return static_cast<int>(f.size()) - 1;
  }
  return -1;
}

Poly monomial_gcd(const Monomial& m, const Poly& p) {
  Monomial r = m;
  for (const auto& t : p.terms())
    for (int i = 0; i < kMaxParams; ++i) r.e[static_cast<size_t>(i)] = std::min(r.e[static_cast<size_t>(i)], t.first.e[static_cast<size_t>(i)]);
  int deg = 0;
  for (auto v : r.e) deg += v;
  r.deg = static_cast<uint16_t>(deg);
  return Poly::from_terms({{r, Rational(1)}});
}

Poly gcd_rec(const Poly& a, const Poly& b) {
  if (a.is_zero()) return b.monic();
  if (b.is_zero()) return a.monic();
  if (a.is_constant() || b.is_constant()) return Poly(1);
  if (a.is_monomial()) return monomial_gcd(a.lead().first, b);
  if (b.is_monomial()) return monomial_gcd(b.lead().first, a);
  if (a == b) return a.monic();
  int x = std::max(a.max_var(), b.max_var());
  if (!a.uses(x)) return gcd_rec(a, content(to_upoly(b, x)));
  if (!b.uses(x)) return gcd_rec(content(to_upoly(a, x)), b);
  UPoly ua = to_upoly(a, x), ub = to_upoly(b, x);
  Poly c = gcd_rec(content(ua), content(ub));
  if (modular_gcd_degree_bound(a, b, x) == 0) return c;
  if (a.terms().size() <= b.terms().size()) {
    try {
      (void)b.divexact(a);
      return a.monic();
    } catch (const ScalarError&) {
    }
  } else {
    try {
      (void)a.divexact(b);
      return b.monic();
    } catch (const ScalarError&) {
    }
  }
  UPoly pa = primitive(ua), pb = primitive(ub);
  if (pa.size() < pb.size()) std::swap(pa, pb);
  Poly g(1);
  for (;;) {
    if (pb.empty()) {
      g = from_upoly(primitive(pa), x);
      break;
    }
    if (pb.size() == 1) break;  // primitive parts coprime in x
    UPoly r = prem(pa, pb);
    pa = std::move(pb);
    pb = primitive(std::move(r));
  }
  return (c * g).monic();
}

}  // namespace

Poly poly_gcd(const Poly& a, const Poly& b) { return gcd_rec(a, b); }

// ---------------------------------------------------------------- rational functions

namespace {
std::atomic<EqualityPolicy> g_policy{EqualityPolicy::Reduced};
}

void set_equality_policy(EqualityPolicy p) { g_policy = p; }
EqualityPolicy equality_policy() { return g_policy; }

namespace {
const Poly& poly_one() {
  static const Poly one(Rational(1));
  return one;
}
const Poly& poly_zero() {
  static const Poly zero;
  return zero;
}
}  // namespace

ParamScalar::ParamScalar(long v) {
  if (v != 0) rep_ = std::make_shared<const Rep>(Rep{Poly(Rational(v)), poly_one()});
}

ParamScalar::ParamScalar(const Rational& v) {
  if (sgn(v) != 0) rep_ = std::make_shared<const Rep>(Rep{Poly(v), poly_one()});
}

ParamScalar ParamScalar::rational(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return ParamScalar(r);
}

ParamScalar ParamScalar::param(std::string_view name) {
  int id = ParameterContext::global().id(name);
  return ParamScalar(std::make_shared<const Rep>(Rep{Poly::var(id), poly_one()}));
}

ParamScalar ParamScalar::from_polys(Poly num, Poly den) { return make(std::move(num), std::move(den), true); }

ParamScalar ParamScalar::make(Poly num, Poly den, bool reduce) {
  if (den.is_zero()) throw ScalarError("division by zero");
  if (num.is_zero()) return {};
  if (den.is_constant()) {
    Rational c = den.constant_value();
    if (c != 1) num = num.scaled(1 / c);
    return ParamScalar(std::make_shared<const Rep>(Rep{std::move(num), poly_one()}));
  }
  if (reduce && g_policy.load(std::memory_order_relaxed) == EqualityPolicy::Reduced) {
    Poly g = poly_gcd(num, den);
    if (!g.is_constant()) {
      num = num.divexact(g);
      den = den.divexact(g);
    }
  }
  Rational lc = den.lead().second;
  if (lc != 1) {
    num = num.scaled(1 / lc);
    den = den.scaled(1 / lc);
  }
  if (den.is_constant()) return ParamScalar(std::make_shared<const Rep>(Rep{std::move(num), poly_one()}));
  return ParamScalar(std::make_shared<const Rep>(Rep{std::move(num), std::move(den)}));
}

const Poly& ParamScalar::num() const { return rep_ ? rep_->num : poly_zero(); }
const Poly& ParamScalar::den() const { return rep_ ? rep_->den : poly_one(); }

bool ParamScalar::is_constant() const { return !rep_ || (rep_->num.is_constant() && rep_->den.is_constant()); }

Rational ParamScalar::constant_value() const {
  if (!rep_) return 0;
  if (!is_constant()) throw ScalarError("scalar is not constant: " + str());
  return rep_->num.constant_value() / rep_->den.constant_value();
}

bool ParamScalar::is_integer() const {
  if (!is_constant()) return false;
  return constant_value().get_den() == 1;
}

ParamScalar ParamScalar::operator+(const ParamScalar& o) const {
  if (!rep_) return o;
  if (!o.rep_) return *this;
  const Poly& d1 = rep_->den;
  const Poly& d2 = o.rep_->den;
  bool one1 = d1.is_constant(), one2 = d2.is_constant();
  if (one1 && one2) return make(rep_->num + o.rep_->num, poly_one(), false);
  if (d1 == d2) return make(rep_->num + o.rep_->num, d1, true);
  if (one2) return make(rep_->num + o.rep_->num * d1, d1, true);
  if (one1) return make(rep_->num * d2 + o.rep_->num, d2, true);
  if (g_policy.load(std::memory_order_relaxed) == EqualityPolicy::Reduced) {
    Poly g = poly_gcd(d1, d2);
    Poly c1 = d2.divexact(g), c2 = d1.divexact(g);
    return make(rep_->num * c1 + o.rep_->num * c2, d1 * c1, true);
  }
  return make(rep_->num * d2 + o.rep_->num * d1, d1 * d2, true);
}

ParamScalar ParamScalar::operator-() const {
  if (!rep_) return {};
  return ParamScalar(std::make_shared<const Rep>(Rep{-rep_->num, rep_->den}));
}

ParamScalar ParamScalar::operator-(const ParamScalar& o) const { return *this + (-o); }

namespace {
bool is_unit(const Poly& num, const Poly& den) {
  return den.is_constant() && num.terms().size() == 1 && num.lead().first.is_one() && num.lead().second == 1;
}
}  // namespace

ParamScalar ParamScalar::operator*(const ParamScalar& o) const {
  if (!rep_ || !o.rep_) return {};
  if (is_unit(rep_->num, rep_->den)) return o;
  if (is_unit(o.rep_->num, o.rep_->den)) return *this;
  const Poly& d1 = rep_->den;
  const Poly& d2 = o.rep_->den;
  if (d1.is_constant() && d2.is_constant()) return make(rep_->num * o.rep_->num, poly_one(), false);
  if (g_policy.load(std::memory_order_relaxed) == EqualityPolicy::Lazy)
    return make(rep_->num * o.rep_->num, d1 * d2, false);
  Poly n1 = rep_->num, n2 = o.rep_->num, e1 = d1, e2 = d2;
  if (!e2.is_constant()) {
    Poly g = poly_gcd(n1, e2);
    if (!g.is_constant()) {
      n1 = n1.divexact(g);
      e2 = e2.divexact(g);
    }
  }
  if (!e1.is_constant()) {
    Poly g = poly_gcd(n2, e1);
    if (!g.is_constant()) {
      n2 = n2.divexact(g);
      e1 = e1.divexact(g);
    }
  }
  return make(n1 * n2, e1 * e2, false);
}

ParamScalar ParamScalar::operator/(const ParamScalar& o) const {
  if (!o.rep_) throw ScalarError("division by zero");
  if (!rep_) return {};
  ParamScalar inv = make(o.rep_->den, o.rep_->num, false);
  return *this * inv;
}

ParamScalar ParamScalar::pow(int k) const {
  if (k < 0) return ParamScalar(1) / pow(-k);
  ParamScalar r(1), b = *this;
  while (k > 0) {
    if (k & 1) r *= b;
    b *= b;
    k >>= 1;
  }
  return r;
}

bool ParamScalar::operator==(const ParamScalar& o) const {
  if (!rep_ || !o.rep_) return !rep_ && !o.rep_;
  if (g_policy.load(std::memory_order_relaxed) == EqualityPolicy::Lazy)
    return rep_->num * o.rep_->den == o.rep_->num * rep_->den;
  return rep_->num == o.rep_->num && rep_->den == o.rep_->den;
}

bool ParamScalar::operator<(const ParamScalar& o) const {
  int c = num().compare(o.num());
  if (c != 0) return c < 0;
  return den().compare(o.den()) < 0;
}

std::string ParamScalar::str() const {
  if (!rep_) return "0";
  if (rep_->den.is_constant()) return rep_->num.str();
  std::string n = rep_->num.str(), d = rep_->den.str();
  if (!rep_->num.is_monomial()) n = "(" + n + ")";
  if (!rep_->den.is_monomial()) d = "(" + d + ")";
  return n + "/" + d;
}

// ---------------------------------------------------------------- substitution

namespace {

template <class T, class PowFn>
T eval_poly(const Poly& p, PowFn&& power) {
  T acc{};
  for (const auto& [m, c] : p.terms()) {
    T t{c};
    for (int i = 0; i < kMaxParams; ++i)
      if (m.e[static_cast<size_t>(i)] != 0) t = t * power(i, m.e[static_cast<size_t>(i)]);
    acc = acc + t;
  }
  return acc;
}

}  // namespace

ParamScalar substitute(const ParamScalar& s, const Bindings& b) {
  if (s.is_zero() || b.empty()) return s;
  auto& ctx = ParameterContext::global();
  std::map<int, ParamScalar> val;
  for (const auto& [name, v] : b) val.emplace(ctx.id(name), v);
  std::map<std::pair<int, int>, ParamScalar> cache;
  auto power = [&](int i, int e) -> ParamScalar {
    auto it = val.find(i);
    ParamScalar base = it == val.end() ? ParamScalar(ParamScalar::from_polys(Poly::var(i), Poly(1))) : it->second;
    auto key = std::make_pair(i, e);
    auto c = cache.find(key);
    if (c != cache.end()) return c->second;
    ParamScalar r = base.pow(e);
    cache.emplace(key, r);
    return r;
  };
  ParamScalar n = eval_poly<ParamScalar>(s.num(), power);
  ParamScalar d = eval_poly<ParamScalar>(s.den(), power);
  if (d.is_zero()) {
    std::string who;
    for (int i = 0; i < kMaxParams; ++i)
      if (s.den().uses(i) && val.count(i)) {
        who = ctx.name(i);
        break;
      }
    throw ScalarError("pole: substitution makes a denominator vanish (parameter " + who + ")");
  }
  return n / d;
}

Rational evaluate(const ParamScalar& s, const std::map<int, Rational>& point) {
  auto power = [&](int i, int e) -> Rational {
    auto it = point.find(i);
    if (it == point.end()) throw ScalarError("unbound parameter " + ParameterContext::global().name(i));
    Rational r = 1;
    for (int k = 0; k < e; ++k) r *= it->second;
    return r;
  };
  Rational n = eval_poly<Rational>(s.num(), power);
  Rational d = eval_poly<Rational>(s.den(), power);
  if (sgn(d) == 0) throw ScalarError("pole at sampled point");
  return n / d;
}

std::map<int, Rational> random_point(uint64_t seed, uint64_t subseed) {
  auto& ctx = ParameterContext::global();
  std::map<int, Rational> pt;
  int n = ctx.size();
  for (int i = 0; i < n; ++i) {
    std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32), static_cast<uint32_t>(subseed),
                      static_cast<uint32_t>(i)};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<long> num(-1000000, 1000000), den(1, 1000000);
    long a = num(rng);
    while (a == 0 && ctx.must_be_nonzero(i)) a = num(rng);
    Rational r(a, den(rng));
    r.canonicalize();
    pt.emplace(i, r);
  }
  return pt;
}

Rational random_specialize(const ParamScalar& s, uint64_t seed) {
  if (s.is_zero()) return 0;
  constexpr int kRetries = 16;
  for (int sub = 0; sub < kRetries; ++sub) {
    try {
      return evaluate(s, random_point(seed, static_cast<uint64_t>(sub)));
    } catch (const ScalarError&) {
    }
  }
  throw ScalarError("random_specialize: every draw hit a pole");
}

Rational binomial(const Rational& top, int k) {
  if (k < 0) return 0;
  Rational r = 1;
  for (int i = 0; i < k; ++i) r = r * (top - i) / (i + 1);
  return r;
}

Rational factorial(int n) {
  Rational r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// ---------------------------------------------------------------- parsing

namespace {

class ScalarParser {
 public:
  explicit ScalarParser(std::string_view s) : s_(s) {}

  ParamScalar run() {
    ParamScalar v = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ScalarError("scalar parse error at position " + std::to_string(pos_) + ": " + what);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  ParamScalar expr() {
    ParamScalar v;
    bool neg = eat('-');
    if (!neg) eat('+');
    v = term();
    if (neg) v = -v;
    for (;;) {
      if (eat('+')) v += term();
      else if (eat('-')) v -= term();
      else return v;
    }
  }
  ParamScalar term() {
    ParamScalar v = power();
    for (;;) {
      if (eat('*')) v *= power();
      else if (eat('/')) v = v / power();
      else return v;
    }
  }
  ParamScalar power() {
    ParamScalar b = atom();
    if (eat('^')) {
      skip();
      bool neg = eat('-');
      size_t st = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (st == pos_) fail("expected integer exponent");
      int e = std::stoi(std::string(s_.substr(st, pos_ - st)));
      b = b.pow(neg ? -e : e);
    }
    return b;
  }
  ParamScalar atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      ParamScalar v = expr();
      if (!eat(')')) fail("expected ')'");
      return v;
    }
    if (c == '-') {
      ++pos_;
      return -atom();
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t st = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return ParamScalar(Rational(std::string(s_.substr(st, pos_ - st))));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t st = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      return ParamScalar::param(s_.substr(st, pos_ - st));
    }
    fail(std::string("unexpected '") + c + "'");
  }

  std::string_view s_;
  size_t pos_ = 0;
};

}  // namespace

ParamScalar ParamScalar::parse(std::string_view text) { return ScalarParser(text).run(); }

}  // namespace scr
