#include "scr/screenings.hpp"

#include <algorithm>
#include <numeric>

namespace scr::screen {

namespace {
const char* gen_name(Gen g) { return g == Gen::E ? "E" : g == Gen::H ? "H" : "F"; }
}  // namespace

LieElem LieElem::gen(Gen g, int i) {
  auto n = std::make_shared<Node>();
  n->g = g;
  n->i = i;
  n->e = g == Gen::E;
  n->f = g == Gen::F;
  n->s = std::string(gen_name(g)) + std::to_string(i + 1);
  return LieElem(n);
}

LieElem LieElem::bracket(const LieElem& x, const LieElem& y) {
  auto n = std::make_shared<Node>();
  n->left = x.node_;
  n->right = y.node_;
  n->e = x.e_count() + y.e_count();
  n->f = x.f_count() + y.f_count();
  n->s = "[" + x.str() + "," + y.str() + "]";
  return LieElem(n);
}

std::vector<LieElem> chevalley_generators(int rank) {
  std::vector<LieElem> out;
  for (Gen g : {Gen::E, Gen::H, Gen::F})
    for (int i = 0; i < rank; ++i) out.push_back(LieElem::gen(g, i));
  return out;
}

std::string HwModule::vec_str(const Vec& v) const {
  if (v.empty()) return "0";
  std::string s;
  for (const auto& [k, c] : v) s += (s.empty() ? "" : " + ") + ("(" + c.str() + ")" + key_str(k));
  return s;
}

Vec act(const HwModule& m, const LieElem& x, const Vec& v) {
  if (x.is_generator()) return m.apply(x.generator(), x.index(), v);
  LieElem a = x.left(), b = x.right();
  return sub(act(m, a, act(m, b, v)), act(m, b, act(m, a, v)));
}

// ---------------------------------------------------------------- toy module

Vec ToyModule::apply(Gen g, int i, const Vec& v) const {
  if (i != 0) throw ScreeningError("toy module has rank one");
  Vec r;
  for (const auto& [k, c] : v) {
    int a = k.at(0);
    switch (g) {
      case Gen::F:
        add_to(r, key(a + 1), c);
        break;
      case Gen::H:
        add_to(r, k, c * (mu_ - ParamScalar(2 * a)));
        break;
      case Gen::E:
        if (a > 0) add_to(r, key(a - 1), c * ParamScalar(a) * (mu_ - ParamScalar(a - 1)));
        break;
    }
  }
  return r;
}

std::vector<BasisKey> ToyModule::basis_upto(int h) const {
  std::vector<BasisKey> out;
  for (int a = 0; a <= h; ++a) out.push_back(key(a));
  return out;
}

std::string ToyModule::vec_str(const Vec& v) const {
  if (v.empty()) return "0";
  std::string s;
  for (const auto& [k, c] : v) {
    if (!s.empty()) s += " + ";
    if (c != ParamScalar(1)) s += "(" + c.str() + ")*";
    int a = k.at(0);
    s += a == 0 ? "v" : a == 1 ? "F v" : "F^" + std::to_string(a) + " v";
  }
  return s;
}

std::string KmModule::vec_str(const Vec& v) const {
  if (v.empty()) return "0";
  std::string s;
  for (const auto& [k, c] : v) {
    if (!s.empty()) s += " + ";
    if (c != ParamScalar(1)) s += "(" + c.str() + ")*";
    const km::Word& w = m_->word_of(k);
    for (size_t p = 0; p < w.size();) {
      size_t q = p;
      while (q < w.size() && w[q] == w[p]) ++q;
      s += "F" + std::to_string(w[p] + 1);
      if (q - p > 1) s += "^" + std::to_string(q - p);
      s += " ";
      p = q;
    }
    s += "v";
  }
  return s;
}

// ---------------------------------------------------------------- screenings

Vec Screening::mode(int n, const Vec& v) const {
  Vec r;
  for (const auto& [k, c] : v) axpy(r, c, mode_basis(n, k));
  return r;
}

Vec Screening::companion(const LieElem& x, int n, const Vec& v) const {
  Vec r;
  for (const auto& [k, c] : v) axpy(r, c, companion_on_basis(x, n, k));
  return r;
}

Vec Screening::companion_on_basis(const LieElem& x, int n, const BasisKey& k) const {
  if (x.is_generator()) return companion_basis(x.generator(), x.index(), n, k);
  auto key = std::make_tuple(x.str(), n, k);
  {
    std::lock_guard lock(mu_);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }
  LieElem a = x.left(), b = x.right();
  Vec v = basis_vec(k);
  // [a, V(b)] - [b, V(a)]
  Vec r = act(target(), a, companion(b, n, v));
  r = sub(r, companion(b, n, act(source(), a, v)));
  r = sub(r, act(target(), b, companion(a, n, v)));
  axpy(r, ParamScalar(1), companion(a, n, act(source(), b, v)));
  std::lock_guard lock(mu_);
  memo_.emplace(key, r);
  return r;
}

ToyScreening::ToyScreening(const ParamScalar& lambda, const ParamScalar& lambda_prime, bool perturb)
    : Screening(std::make_shared<ToyModule>(lambda_prime - ParamScalar(1)), std::make_shared<ToyModule>(lambda - ParamScalar(1)), lambda),
      perturb_(perturb) {}

std::shared_ptr<ToyScreening> ToyScreening::standard(const ParamScalar& lambda, bool perturb) {
  return std::make_shared<ToyScreening>(lambda, -lambda, perturb);
}

Vec ToyScreening::mode_basis(int n, const BasisKey& k) const { return basis_vec(ToyModule::key(k.at(0) + n)); }

Vec ToyScreening::companion_basis(Gen g, int j, int n, const BasisKey& k) const {
  if (j != 0) throw ScreeningError("toy module has rank one");
  int a = k.at(0);
  switch (g) {
    case Gen::E: {
      if (a + n - 1 < 0) return {};
      ParamScalar c(n + 2 * a + (perturb_ ? 1 : 0));
      Vec r;
      add_to(r, ToyModule::key(a + n - 1), c);
      return r;
    }
    case Gen::H:
      return scaled(mode_basis(n, k), ParamScalar(2));
    case Gen::F:
      return {};
  }
  return {};
}

std::vector<ParamScalar> reflect(const km::CartanData& cd, int i, const std::vector<ParamScalar>& label) {
  std::vector<ParamScalar> r = label;
  for (int j = 0; j < cd.rank; ++j) r[static_cast<size_t>(j)] -= label[static_cast<size_t>(i)] * ParamScalar(cd.a[static_cast<size_t>(j)][static_cast<size_t>(i)]);
  return r;
}

KmScreening::KmScreening(std::shared_ptr<const KmModule> source, std::shared_ptr<const KmModule> target, int i, bool transpose)
    : Screening(source, target, target->verma().label().at(static_cast<size_t>(i))), i_(i), transpose_(transpose) {
  const auto& cd = target->verma().quotient().cartan();
  auto expect = reflect(cd, i, target->verma().label());
  if (expect != source->verma().label()) throw ScreeningError("source label is not the reflected target label");
}

Vec KmScreening::mode_basis(int n, const BasisKey& k) const {
  km::Word w = src().verma().word_of(k);
  w.insert(w.end(), static_cast<size_t>(n), i_);
  return tgt().verma().from_word(w);
}

Vec KmScreening::companion_basis(Gen g, int j, int n, const BasisKey& k) const {
  const auto& a = tgt().verma().quotient().cartan().a;
  switch (g) {
    case Gen::E: {
      int coef = transpose_ ? a[static_cast<size_t>(i_)][static_cast<size_t>(j)] : a[static_cast<size_t>(j)][static_cast<size_t>(i_)];
      const km::Word& x = src().verma().word_of(k);
      km::NcPoly acc;
      km::Word tail(static_cast<size_t>(n), i_);
      for (const auto& [u, c] : km::partial_derivation(j, km::nc_word(x))) {
        km::Word w = u;
        w.insert(w.end(), tail.begin(), tail.end());
        acc[w] += c * ParamScalar(coef);
      }
      if (j == i_ && n > 0) {
        km::Word w = x;
        w.insert(w.end(), static_cast<size_t>(n - 1), i_);
        acc[w] += ParamScalar(n);
      }
      std::erase_if(acc, [](const auto& kv) { return kv.second.is_zero(); });
      return tgt().verma().from_nc(acc);
    }
    case Gen::H:
      return scaled(mode_basis(n, k), ParamScalar(a[static_cast<size_t>(j)][static_cast<size_t>(i_)]));
    case Gen::F:
      return {};
  }
  return {};
}

// ---------------------------------------------------------------- toy analysis

ToyScan toy_uniqueness_scan(const ParamScalar& lambda, const ParamScalar& lambda_prime, int amax) {
  if ((lambda - lambda_prime).is_zero()) throw ScreeningError("degenerate branch lambda = lambda' is not solved");
  ToyScreening v(lambda, lambda_prime);
  // c(n, a): [E, V_n] F^a v' = c(n, a) F^{a+n-1} v.
  auto c = [&](int n, int a) {
    Vec x = basis_vec(ToyModule::key(a));
    Vec r = sub(v.target().apply(Gen::E, 0, v.mode(n, x)), v.mode(n, v.source().apply(Gen::E, 0, x)));
    auto it = r.find(ToyModule::key(a + n - 1));
    if (r.size() > (it == r.end() ? 0u : 1u)) throw ScreeningError("[E, V_n] leaves the expected weight space");
    return it == r.end() ? ParamScalar() : it->second;
  };
  std::vector<ParamScalar> c1, c0;
  for (int a = 0; a <= amax; ++a) {
    ParamScalar y1 = c(1, a), y2 = c(2, a), y3 = c(3, a);
    ParamScalar q2 = (y3 - y2 * ParamScalar(2) + y1) / ParamScalar(2);
    ParamScalar q1 = y2 - y1 - q2 * ParamScalar(3);
    ParamScalar q0 = y1 - q1 - q2;
    if (q2 != ParamScalar(-1)) throw ScreeningError("leading coefficient of [E, V_n] is not -n^2");
    for (int n = 4; n <= 6; ++n)
      if (c(n, a) != q0 + q1 * ParamScalar(n) + q2 * ParamScalar(n * n)) throw ScreeningError("[E, V_n] is not quadratic in n");
    c1.push_back(q1);
    c0.push_back(q0);
  }
  // a = 0: alpha (alpha - c1) = c0 = 0, roots 0 and c1(0); the root 0 fails at a = 1.
  if (!c0[0].is_zero()) throw ScreeningError("no twist exponent at a = 0");
  ToyScan out;
  out.alpha = c1[0];
  out.constraints.push_back(out.alpha - lambda);
  for (int a = 0; a <= amax; ++a) {
    out.beta.push_back(out.alpha - c1[static_cast<size_t>(a)]);
    out.constraints.push_back(out.beta.back() - ParamScalar(2 * a));
  }
  for (int a = 1; a <= amax; ++a) {
    ParamScalar r = out.alpha * (out.alpha - c1[static_cast<size_t>(a)]) - c0[static_cast<size_t>(a)];
    out.compat.push_back(r / ParamScalar(a));
  }
  out.constraints.push_back(out.compat.empty() ? ParamScalar() : out.compat.front());
  return out;
}

dg::Residual check_mode_identities(const Screening& s, int nmax, int hmax) {
  dg::Residual res;
  const int rank = s.target().rank();
  for (const BasisKey& k : s.source().basis_upto(hmax)) {
    Vec v = basis_vec(k);
    for (int n = 0; n <= nmax; ++n)
      for (Gen g : {Gen::E, Gen::H, Gen::F})
        for (int j = 0; j < rank; ++j) {
          LieElem x = LieElem::gen(g, j);
          Vec lhs = sub(s.target().apply(g, j, s.mode(n, v)), s.mode(n, s.source().apply(g, j, v)));
          Vec rhs = scaled(s.companion(x, n, v), s.pairing() - ParamScalar(n));
          ++res.checked;
          Vec diff = sub(lhs, rhs);
          if (!diff.empty()) {
            res.ok = false;
            res.witness = "[" + x.str() + ", V_" + std::to_string(n) + "] on " + s.source().vec_str(v) + ": residual " +
                          s.target().vec_str(diff);
            return res;
          }
        }
  }
  return res;
}

// ---------------------------------------------------------------- cochains

int sgn_exponent(const std::vector<int>& positions) {
  int s = 0;
  for (size_t m = 1; m <= positions.size(); ++m) s += positions[m - 1] + static_cast<int>(m);
  return s;
}

ScreeningChain::ScreeningChain(std::vector<std::shared_ptr<const Screening>> stages, int cap)
    : stages_(std::move(stages)), cap_(cap) {
  if (stages_.empty() || static_cast<int>(stages_.size()) > dg::kMaxVars) throw ScreeningError("chain length out of range");
  for (size_t p = 0; p + 1 < stages_.size(); ++p)
    if (stages_[p]->source_ptr() != stages_[p + 1]->target_ptr()) throw ScreeningError("chain stages do not compose");
}

dg::TwistedForm ScreeningChain::cochain(const std::vector<LieElem>& args, const BasisKey& v) const {
  const int a = length();
  const int m = static_cast<int>(args.size());
  dg::TwistedForm out(a);
  if (m > a) return out;
  std::vector<int> pos(static_cast<size_t>(m));
  std::function<void(int, int)> subsets = [&](int j, int start) {
    if (j < m) {
      for (int p = start; p < a; ++p) {
        pos[static_cast<size_t>(j)] = p;
        subsets(j + 1, p + 1);
      }
      return;
    }
    std::vector<int> one_based;
    uint8_t mask = static_cast<uint8_t>((1u << a) - 1);
    for (int p : pos) {
      one_based.push_back(p + 1);
      mask = static_cast<uint8_t>(mask & ~(1u << p));
    }
    int sg = sgn_exponent(one_based);
    if (seeded_sign_bug) sg -= m * (m + 1) / 2;
    std::vector<int> perm(static_cast<size_t>(m));
    std::iota(perm.begin(), perm.end(), 0);
    do {
      int inv = 0;
      for (int x = 0; x < m; ++x)
        for (int y = x + 1; y < m; ++y) inv += perm[static_cast<size_t>(x)] > perm[static_cast<size_t>(y)];
      std::vector<const LieElem*> slot(static_cast<size_t>(a), nullptr);
      for (int j = 0; j < m; ++j) slot[static_cast<size_t>(pos[static_cast<size_t>(j)])] = &args[static_cast<size_t>(perm[static_cast<size_t>(j)])];
      std::vector<int> e_before(static_cast<size_t>(a) + 1, 0);  // E count at positions < p
      for (int p = 0; p < a; ++p) e_before[static_cast<size_t>(p) + 1] = e_before[static_cast<size_t>(p)] + (slot[static_cast<size_t>(p)] ? slot[static_cast<size_t>(p)]->e_count() : 0);

      std::map<dg::ZExp, Vec> state{{dg::ZExp{}, basis_vec(v)}};
      for (int p = a - 1; p >= 0; --p) {
        const Screening& st = stage(p);
        const LieElem* x = slot[static_cast<size_t>(p)];
        const int bound = cap_ + e_before[static_cast<size_t>(p)];
        std::map<dg::ZExp, Vec> next;
        for (const auto& [z, vec] : state)
          for (const auto& [k, c] : vec) {
            int h = st.source().height(k);
            int nmax = bound - h + (x ? x->e_count() - x->f_count() : 0);
            for (int n = 0; n <= nmax; ++n) {
              Vec img = x ? st.companion(*x, n, basis_vec(k)) : st.mode(n, basis_vec(k));
              std::erase_if(img, [&](const auto& kv) { return st.target().height(kv.first) > bound; });
              if (img.empty()) continue;
              dg::ZExp z2 = z;
              z2[static_cast<size_t>(p)] = static_cast<int16_t>(x ? -n : -n - 1);
              axpy(next[z2], c, img);
            }
          }
        std::erase_if(next, [](const auto& kv) { return kv.second.empty(); });
        state = std::move(next);
      }
      const bool negative = (sg + inv) % 2 != 0;
      for (const auto& [z, vec] : state)
        for (const auto& [k, c] : vec) out.add(dg::FormKey{mask, z, k}, negative ? -c : c);
    } while (std::next_permutation(perm.begin(), perm.end()));
  };
  subsets(0, 0);
  return out;
}

dg::Connection ScreeningChain::connection() const {
  dg::Connection c = dg::Connection::zero(length());
  for (int p = 0; p < length(); ++p) c.var[static_cast<size_t>(p)] = stage(p).pairing();
  return c;
}

dg::CochainSystem<LieElem> ScreeningChain::system(int reliable_height) const {
  dg::CochainSystem<LieElem> s;
  s.degree = length();
  s.nvars = length();
  s.conn = connection();
  s.bracket = [](const LieElem& x, const LieElem& y) {
    return std::vector<std::pair<ParamScalar, LieElem>>{{ParamScalar(1), LieElem::bracket(x, y)}};
  };
  s.act_source = [this](const LieElem& x, const BasisKey& k) { return act(source(), x, basis_vec(k)); };
  s.act_target = [this](const LieElem& x, const BasisKey& k) { return act(target(), x, basis_vec(k)); };
  s.value = [this](int, const std::vector<LieElem>& args, const BasisKey& v) { return cochain(args, v); };
  s.reliable = [this, reliable_height](const dg::FormKey& k) { return target().height(k.target) <= reliable_height; };
  s.name = [](const LieElem& x) { return x.str(); };
  return s;
}

KmChain make_km_chain(std::shared_ptr<const km::SerreQuotient> q, const std::vector<int>& word,
                      const std::vector<ParamScalar>& lambda, int cap, bool transpose) {
  KmChain out;
  out.labels.push_back(lambda);
  for (int i : word) out.labels.push_back(reflect(q->cartan(), i, out.labels.back()));
  for (const auto& l : out.labels) out.modules.push_back(std::make_shared<KmModule>(std::make_shared<km::VermaModule>(q, l)));
  std::vector<std::shared_ptr<const Screening>> stages;
  for (size_t p = 0; p < word.size(); ++p)
    stages.push_back(std::make_shared<KmScreening>(out.modules[p + 1], out.modules[p], word[p], transpose));
  out.chain = std::make_shared<ScreeningChain>(std::move(stages), cap);
  return out;
}

Vec apply_intertwiner(const ScreeningChain& chain, const std::vector<int>& exponents, const Vec& v) {
  Vec r = v;
  for (int p = chain.length() - 1; p >= 0; --p) r = chain.stage(p).mode(exponents.at(static_cast<size_t>(p)), r);
  return r;
}

Intertwiner residue_intertwiner(const ScreeningChain& chain, int check_height) {
  Intertwiner out;
  for (int p = 0; p < chain.length(); ++p) {
    const ParamScalar& k = chain.stage(p).pairing();
    if (!k.is_integer() || k.constant_value() < 0)
      throw ScreeningError("non-integral exponent " + k.str() + " at stage " + std::to_string(p + 1));
    out.exponents.push_back(static_cast<int>(k.constant_value().get_num().get_si()));
  }
  const HwModule& src = chain.source();
  const HwModule& tgt = chain.target();
  out.image_of_vacuum = apply_intertwiner(chain, out.exponents, basis_vec(src.basis_upto(0).front()));
  for (const BasisKey& k : src.basis_upto(check_height)) {
    Vec v = basis_vec(k);
    for (Gen g : {Gen::E, Gen::H, Gen::F})
      for (int j = 0; j < tgt.rank(); ++j) {
        Vec diff = sub(apply_intertwiner(chain, out.exponents, src.apply(g, j, v)),
                       tgt.apply(g, j, apply_intertwiner(chain, out.exponents, v)));
        ++out.homomorphism.checked;
        if (!diff.empty()) {
          out.homomorphism.ok = false;
          out.homomorphism.witness = LieElem::gen(g, j).str() + " on " + src.vec_str(v) + ": " + tgt.vec_str(diff);
          return out;
        }
      }
  }
  return out;
}

}  // namespace scr::screen
