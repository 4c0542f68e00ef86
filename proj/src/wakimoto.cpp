#include "scr/wakimoto.hpp"

#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>

#include "scr/screenings.hpp"

namespace scr::wak {

using fields::parse_field;
using fields::wick_ope;
using fock::Matrix;

namespace {

const char* kSl2Data = R"(# Affine sl2 free-field data. nu is free; the level is k = nu^2 - 2.
let k = nu^2 - 2
current E = beta
current H = 2 :gamma beta: + nu p
current F = -:gamma gamma beta: - nu :gamma p: - k D(gamma)
screening S = -:beta V[1/nu]:
seed F = -nu^2 V[1/nu]
)";

ModeOperator identity() {
  return ModeOperator("1", {}, [](const FockSpace&, const BasisKey& k) { return basis_vec(k); });
}

ModeOperator commutator(const ModeOperator& a, const ModeOperator& b) { return b.then(a) - a.then(b); }

bool record(Residual& r, const FockSpace& f, const Matrix& diff, const std::string& what) {
  ++r.checked;
  if (fock::matrix_is_zero(diff)) return true;
  r.ok = false;
  r.witness = what + " " + fock::matrix_witness(f, diff);
  return false;
}

bool record_ope(Residual& r, const OpeResult& got, const OpeResult& expected, const std::string& what) {
  ++r.checked;
  if (got == expected) return true;
  r.ok = false;
  r.witness = what + " = " + got.str() + ", expected " + (expected.poles.empty() ? std::string("regular") : expected.str());
  return false;
}

OpeResult poles(std::initializer_list<std::pair<int, FieldExpr>> list) {
  OpeResult r;
  for (const auto& [k, e] : list)
    if (!e.is_zero()) r.poles[{0, k}] = e;
  return r;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<BasisKey> keys_for(const FockSpace& src, int energy, int charge) { return src.basis_upto(energy, charge); }

}  // namespace

// ---------------------------------------------------------------- parameters and data

AffineParams AffineParams::generic() { return {ParamScalar::param("nu"), ParamScalar::param("chi")}; }
ParamScalar AffineParams::level() const { return nu * nu - ParamScalar(2); }
ParamScalar AffineParams::zero_mode() const { return -chi / nu; }
ParamScalar AffineParams::twist() const { return -chi / (nu * nu); }

std::shared_ptr<const fock::OscSpec> wakimoto_spec() {
  static const auto spec = std::make_shared<const fock::OscSpec>(fock::OscSpec::wakimoto());
  return spec;
}

FockSpace wakimoto_module(const AffineParams& p, int energy_cap) {
  if (p.nu.is_zero()) throw WakimotoError("critical level: nu = 0");
  return FockSpace(wakimoto_spec(), {p.zero_mode()}, energy_cap);
}

ScreeningData ScreeningData::substitute(const Bindings& b) const {
  ScreeningData out;
  for (const auto& [k, v] : macros) out.macros[k] = v.substitute(b);
  for (const auto& [k, v] : currents) out.currents[k] = v.substitute(b);
  for (const auto& [k, v] : seeds) out.seeds[k] = v.substitute(b);
  out.screening = screening.substitute(b);
  return out;
}

ScreeningData parse_screening_data(const std::string& text) {
  ScreeningData d;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool have_screening = false;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto fail = [&](const std::string& msg) { return WakimotoError("line " + std::to_string(lineno) + ": " + msg); };
    auto eq = line.find('=');
    if (eq == std::string::npos) throw fail("expected 'kind name = expression'");
    std::istringstream head(line.substr(0, eq));
    std::string kind, name, extra;
    head >> kind >> name >> extra;
    if (name.empty() || !extra.empty()) throw fail("expected 'kind name = expression'");
    FieldExpr e;
    try {
      e = parse_field(trim(line.substr(eq + 1)), d.macros);
    } catch (const fields::FieldError& err) {
      throw fail(err.what());
    }
    if (kind == "let") {
      d.macros[name] = e;
    } else if (kind == "current") {
      d.currents[name] = e;
      d.macros[name] = e;
    } else if (kind == "screening") {
      d.screening = e;
      d.macros[name] = e;
      have_screening = true;
    } else if (kind == "seed") {
      if (!d.currents.count(name)) throw fail("seed for unknown current " + name);
      d.seeds[name] = e;
    } else {
      throw fail("unknown declaration '" + kind + "'");
    }
  }
  if (!have_screening) throw WakimotoError("no screening current declared");
  return d;
}

ScreeningData load_screening_data(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw WakimotoError("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_screening_data(ss.str());
}

ScreeningData sl2_screening_data() {
  static const ScreeningData d = parse_screening_data(kSl2Data);
  return d;
}

// ---------------------------------------------------------------- affine algebra

std::string AffElem::str() const { return x == '1' ? std::string("1") : std::string(1, x) + "_" + std::to_string(n); }

ParamScalar killing_trace(char x, char y) {
  if (x > y) std::swap(x, y);
  if (x == 'H' && y == 'H') return ParamScalar(2);
  if (x == 'E' && y == 'F') return ParamScalar(1);
  return {};
}

std::vector<std::pair<ParamScalar, AffElem>> affine_bracket(const AffElem& a, const AffElem& b, const ParamScalar& level) {
  std::vector<std::pair<ParamScalar, AffElem>> out;
  if (a.x == '1' || b.x == '1') return out;
  const int s = a.n + b.n;
  auto add = [&](long c, char x) { out.emplace_back(ParamScalar(c), AffElem{x, s}); };
  const std::string xy{a.x, b.x};
  if (xy == "EF") add(1, 'H');
  if (xy == "FE") add(-1, 'H');
  if (xy == "HE") add(2, 'E');
  if (xy == "EH") add(-2, 'E');
  if (xy == "HF") add(-2, 'F');
  if (xy == "FH") add(2, 'F');
  if (s == 0) {
    ParamScalar c = ParamScalar(a.n) * level * killing_trace(a.x, b.x);
    if (!c.is_zero()) out.emplace_back(c, AffElem::central());
  }
  return out;
}

namespace {
AffineParams noncritical(AffineParams p) {
  if (p.nu.is_zero()) throw WakimotoError("critical level: nu = 0");
  return p;
}
}  // namespace

Wakimoto::Wakimoto(AffineParams p, const ScreeningData& data)
    : p_(noncritical(std::move(p))),
      s_(data.screening.substitute({{"nu", p_.nu}})),
      sf_(data.seeds.count("F") ? data.seeds.at("F").substitute({{"nu", p_.nu}}) : FieldExpr{}),
      s_modes_(s_),
      sf_modes_(sf_) {
  for (char x : {'E', 'H', 'F'}) {
    auto it = data.currents.find(std::string(1, x));
    if (it == data.currents.end()) throw WakimotoError(std::string("missing current ") + x);
    currents_.emplace(x, FieldModes(it->second.substitute({{"nu", p_.nu}})));
  }
}

const FieldExpr& Wakimoto::current(char x) const {
  auto it = currents_.find(x);
  if (it == currents_.end()) throw WakimotoError(std::string("unknown current ") + x);
  return it->second.expr();
}

ModeOperator Wakimoto::mode(const AffElem& x) const {
  std::lock_guard lock(mu_);
  auto it = mode_cache_.find(x);
  if (it == mode_cache_.end()) {
    ModeOperator op = x.x == '1' ? identity() : currents_.at(x.x).op(x.n);
    it = mode_cache_.emplace(x, op).first;
  }
  return it->second;
}

ModeOperator Wakimoto::screening_mode(int k) const { return s_modes_.op(k); }

ModeOperator Wakimoto::companion_mode(const AffElem& x, int k) const {
  if (x.x == 'F') return sf_modes_.op(k + x.n);
  return ModeOperator::zero(s_modes_.label_shift());
}

// ---------------------------------------------------------------- currents

Residual verify_current_opes(const Wakimoto& w) {
  const auto& spec = *wakimoto_spec();
  const ParamScalar k = w.level();
  const FieldExpr &E = w.current('E'), &H = w.current('H'), &F = w.current('F');
  Residual r;
  record_ope(r, wick_ope(spec, H, H), poles({{2, FieldExpr::scalar(ParamScalar(2) * k)}}), "H(z)H(w)") &&
      record_ope(r, wick_ope(spec, H, E), poles({{1, E.scaled(ParamScalar(2))}}), "H(z)E(w)") &&
      record_ope(r, wick_ope(spec, H, F), poles({{1, F.scaled(ParamScalar(-2))}}), "H(z)F(w)") &&
      record_ope(r, wick_ope(spec, E, E), {}, "E(z)E(w)") &&
      record_ope(r, wick_ope(spec, E, F), poles({{2, FieldExpr::scalar(k)}, {1, H}}), "E(z)F(w)") &&
      record_ope(r, wick_ope(spec, F, F), {}, "F(z)F(w)");
  return r;
}

Residual verify_current_modes(const Wakimoto& w, const FockSpace& src, int energy, int charge, int nmax,
                              const ParamScalar& level_shift) {
  auto keys = keys_for(src, energy, charge);
  const ParamScalar k = w.level() + level_shift;
  const char names[] = {'E', 'H', 'F'};
  Residual r;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j)
      for (int n = -nmax; n <= nmax; ++n)
        for (int m = -nmax; m <= nmax; ++m) {
          AffElem x{names[i], n}, y{names[j], m};
          ModeOperator rhs = ModeOperator::zero({});
          for (const auto& [c, z] : affine_bracket(x, y, k)) rhs = rhs + w.mode(z).scaled(c);
          Matrix lhs = fock::commutator_blocks(w.mode(x), w.mode(y), src, keys);
          if (!record(r, src, fock::matrix_sub(lhs, rhs.block(src, keys)), "[" + x.str() + ", " + y.str() + "]")) return r;
        }
  return r;
}

// ---------------------------------------------------------------- screening currents

OpeResult screening_family_ope(const Wakimoto& w, const ParamScalar& alpha) {
  FieldExpr s = fields::normal_product(FieldExpr::field(fields::Kind::Beta), FieldExpr::vertex({alpha})).scaled(ParamScalar(-1));
  return wick_ope(*wakimoto_spec(), w.current('F'), s);
}

Residual check_screening_family(const Wakimoto& w, const ParamScalar& alpha) {
  const ParamScalar nu = w.params().nu;
  FieldExpr v = FieldExpr::vertex({alpha});
  FieldExpr gbv = fields::normal_product(parse_field(":gamma beta:"), v);
  FieldExpr pv = fields::normal_product(parse_field("p"), v);
  OpeResult expected = poles({{2, v.scaled(-(ParamScalar(2) * alpha * nu + w.level()))},
                              {1, gbv.scaled(ParamScalar(2) - ParamScalar(2) * alpha * nu) + pv.scaled(nu)}});
  Residual r;
  record_ope(r, screening_family_ope(w, alpha), expected, "F(z)(-beta V)(w)");
  return r;
}

Residual check_screening_opes(const Wakimoto& w) {
  const auto& spec = *wakimoto_spec();
  const FieldExpr& s = w.screening();
  Residual r;
  record_ope(r, wick_ope(spec, w.current('E'), s), {}, "E(z)S(w)") &&
      record_ope(r, wick_ope(spec, w.current('H'), s), {}, "H(z)S(w)") &&
      record_ope(r, wick_ope(spec, w.current('F'), s),
                 poles({{2, w.screening_seed()}, {1, fields::derivative(w.screening_seed())}}), "F(z)S(w)");
  return r;
}

Residual check_screening_modes(const Wakimoto& w, const FockSpace& src, int energy, int charge, int nmax, int kmax) {
  auto keys = keys_for(src, energy, charge);
  const ParamScalar t = w.params().twist();
  std::vector<AffElem> elems{AffElem::central()};
  for (char x : {'E', 'H', 'F'})
    for (int n = -nmax; n <= nmax; ++n) elems.push_back({x, n});
  Residual r;
  for (const auto& x : elems)
    for (int k = -kmax; k <= kmax; ++k) {
      Matrix lhs = fock::commutator_blocks(w.mode(x), w.screening_mode(k), src, keys);
      Matrix rhs = w.companion_mode(x, k).scaled(t - ParamScalar(k)).block(src, keys);
      if (!record(r, src, fock::matrix_sub(lhs, rhs), "[" + x.str() + ", S_" + std::to_string(k) + "]")) return r;
    }
  return r;
}

WakimotoIntertwiner wakimoto_intertwiner(const Wakimoto& w, int energy, int charge, int nmax) {
  const ParamScalar t = w.params().twist();
  if (!t.is_integer()) throw WakimotoError("non-integral exponent: -chi/nu^2 = " + t.str());
  const int k = static_cast<int>(t.constant_value().get_num().get_si());
  FockSpace src = w.module(energy + nmax + std::abs(k) + 2);
  ModeOperator op = w.screening_mode(k);
  auto keys = keys_for(src, energy, charge);
  Residual r;
  for (char x : {'E', 'H', 'F'})
    for (int n = -nmax; n <= nmax && r.ok; ++n)
      record(r, src, fock::commutator_blocks(w.mode({x, n}), op, src, keys), "[" + AffElem{x, n}.str() + ", S_" + std::to_string(k) + "]");
  auto images = op.block(src, keys);
  if (r.ok && std::all_of(images.begin(), images.end(), [](const auto& kv) { return kv.second.empty(); })) {
    r.ok = false;
    r.witness = "S_" + std::to_string(k) + " vanishes on the checked blocks";
  }
  Vec image = op.apply(src, basis_vec(FockSpace::vacuum()));
  return {k, op, src, op.target(src), r, image};
}

Residual check_seed_opes(const Wakimoto& w) {
  const auto& spec = *wakimoto_spec();
  const FieldExpr& sf = w.screening_seed();
  Residual r;
  record_ope(r, wick_ope(spec, w.current('E'), sf), {}, "E(z)S(F;w)") &&
      record_ope(r, wick_ope(spec, w.current('H'), sf), poles({{1, sf.scaled(ParamScalar(-2))}}), "H(z)S(F;w)") &&
      record_ope(r, wick_ope(spec, w.current('F'), sf), poles({{1, fields::normal_product(parse_field("gamma"), sf).scaled(ParamScalar(2))}}),
                 "F(z)S(F;w)");
  return r;
}

Residual check_companion_opes(const Wakimoto& w) {
  const auto& spec = *wakimoto_spec();
  auto field_of = [&](char x) { return x == 'F' ? w.screening_seed() : FieldExpr{}; };
  const char names[] = {'E', 'H', 'F'};
  Residual r;
  for (char x : names)
    for (char y : names) {
      OpeResult xy = wick_ope(spec, w.current(x), field_of(y));
      ++r.checked;
      if (xy.max_order() > 1) {
        r.ok = false;
        r.witness = std::string(1, x) + "(z)S(" + y + ";w) has a pole of order " + std::to_string(xy.max_order());
        return r;
      }
      OpeResult lhs = fields::ope_difference(xy, wick_ope(spec, w.current(y), field_of(x)));
      FieldExpr s_xy;
      for (const auto& [c, z] : affine_bracket({x, 0}, {y, 0}, w.level()))
        if (z.x == 'F') s_xy = s_xy + field_of('F').scaled(c);
      std::string what = std::string(1, x) + "(z)S(" + y + ";w) - " + y + "(z)S(" + x + ";w)";
      if (!record_ope(r, lhs, poles({{1, s_xy}}), what)) return r;
    }
  return r;
}

Residual check_companion_modes(const Wakimoto& w, const std::vector<AffElem>& elems, int kmax, const FockSpace& src,
                               const std::vector<BasisKey>& keys) {
  Residual r;
  for (size_t i = 0; i < elems.size(); ++i)
    for (size_t j = i + 1; j < elems.size(); ++j)
      for (int k = -kmax; k <= kmax; ++k) {
        const AffElem &x = elems[i], &y = elems[j];
        ModeOperator lhs = commutator(w.mode(x), w.companion_mode(y, k)) - commutator(w.mode(y), w.companion_mode(x, k));
        ModeOperator rhs = ModeOperator::zero(w.companion_mode(x, k).label_shift());
        for (const auto& [c, z] : affine_bracket(x, y, w.level())) rhs = rhs + w.companion_mode(z, k).scaled(c);
        std::string what = "[" + x.str() + ", S(" + y.str() + ")] - [" + y.str() + ", S(" + x.str() + ")] at k=" + std::to_string(k);
        if (!record(r, src, fock::matrix_sub(lhs.block(src, keys), rhs.block(src, keys)), what)) return r;
      }
  return r;
}

// ---------------------------------------------------------------- cochains

namespace {

// :S(z_1) .. S(F;z_i) .. S(z_p): for each subset of seed positions.
class ProductFamily {
 public:
  ProductFamily(const Wakimoto& w, int p) : p_(p) {
    for (uint32_t mask = 0; mask < (1u << p); ++mask) {
      FieldExpr f = FieldExpr::scalar(ParamScalar(1));
      std::vector<int> weights;
      for (int i = 0; i < p; ++i) {
        const FieldExpr& g = (mask >> i) & 1 ? w.screening_seed() : w.screening();
        weights.push_back(g.weight());
        f = fields::normal_product(f, g.at_point(i));
      }
      modes_.emplace_back(f, p);
      weights_.push_back(std::move(weights));
    }
  }
  const FieldModes& modes(uint32_t mask) const { return modes_[mask]; }
  int weight(uint32_t mask, int point) const { return weights_[mask][static_cast<size_t>(point)]; }
  int points() const { return p_; }

 private:
  int p_;
  std::vector<FieldModes> modes_;
  std::vector<std::vector<int>> weights_;
};

}  // namespace

WakimotoComplex wakimoto_complex(std::shared_ptr<const Wakimoto> w, int p, int energy_cap, int reliable_energy, bool drop_pairs,
                                 bool seeded_sign_bug) {
  if (p < 1 || p > 3) throw WakimotoError("cochains support p = 1..3");
  if (reliable_energy > energy_cap) throw WakimotoError("reliable energy exceeds the energy cap");
  FockSpace src = w->module(energy_cap);
  auto family = std::make_shared<const ProductFamily>(*w, p);
  FockSpace tgt = src.shifted(family->modes(0).label_shift());
  WakimotoComplex c{w, p, src, tgt, {}};
  auto& s = c.system;
  s.degree = p;
  s.nvars = p;
  const ParamScalar nu2 = w->params().nu * w->params().nu;
  s.conn = drop_pairs ? dg::Connection::uniform(p, w->params().twist(), ParamScalar())
                      : dg::Connection::uniform(p, w->params().twist(), ParamScalar(2) / nu2);
  const ParamScalar level = w->level();
  s.bracket = [level](const AffElem& a, const AffElem& b) { return affine_bracket(a, b, level); };
  auto act = [w](const FockSpace& f) {
    return [w, f](const AffElem& x, const BasisKey& k) {
      if (FockSpace::energy(k) - x.n > f.energy_cap()) return Vec{};
      return w->mode(x).apply(f, basis_vec(k));
    };
  };
  s.act_source = act(src);
  s.act_target = act(tgt);
  s.value = [family, src, p, seeded_sign_bug](int, const std::vector<AffElem>& args, const BasisKey& v) {
    const int m = static_cast<int>(args.size());
    dg::TwistedForm out(p);
    if (m > p) return out;
    for (const auto& x : args)
      if (x.x != 'F') return out;
    std::vector<int> pos(static_cast<size_t>(m));
    std::function<void(int, int)> subsets = [&](int j, int start) {
      if (j < m) {
        for (int q = start; q < p; ++q) {
          pos[static_cast<size_t>(j)] = q;
          subsets(j + 1, q + 1);
        }
        return;
      }
      std::vector<int> one_based;
      uint32_t seeds = 0;
      for (int q : pos) {
        one_based.push_back(q + 1);
        seeds |= 1u << q;
      }
      const uint8_t mask = static_cast<uint8_t>(((1u << p) - 1) & ~seeds);
      int sg = screen::sgn_exponent(one_based);
      if (seeded_sign_bug) sg -= m * (m + 1) / 2;
      const FieldModes& modes = family->modes(seeds);
      const auto& expansion = modes.expand(src, v);
      std::vector<int> perm(static_cast<size_t>(m));
      std::iota(perm.begin(), perm.end(), 0);
      do {
        int inv = 0;
        for (int a = 0; a < m; ++a)
          for (int b = a + 1; b < m; ++b) inv += perm[static_cast<size_t>(a)] > perm[static_cast<size_t>(b)];
        dg::ZExp shift{};
        for (int j = 0; j < m; ++j)
          shift[static_cast<size_t>(pos[static_cast<size_t>(j)])] =
              static_cast<int16_t>(args[static_cast<size_t>(perm[static_cast<size_t>(j)])].n);
        const bool negative = (sg + inv) % 2 != 0;
        for (const auto& [n, vec] : expansion) {
          dg::ZExp z{};
          for (int i = 0; i < p; ++i)
            z[static_cast<size_t>(i)] = static_cast<int16_t>(-n[static_cast<size_t>(i)] - family->weight(seeds, i) + shift[static_cast<size_t>(i)]);
          for (const auto& [k, coef] : vec) out.add(dg::FormKey{mask, z, k}, negative ? -coef : coef);
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
    };
    subsets(0, 0);
    return out;
  };
  s.reliable = [reliable_energy](const dg::FormKey& k) { return FockSpace::energy(k.target) <= reliable_energy; };
  s.name = [](const AffElem& x) { return x.str(); };
  return c;
}

// ---------------------------------------------------------------- bracket trees

LoopTree LoopTree::leaf(const AffElem& x) {
  auto n = std::make_shared<Node>();
  n->x = x;
  n->s = x.str();
  return LoopTree(n);
}

LoopTree LoopTree::bracket(const LoopTree& a, const LoopTree& b) {
  auto n = std::make_shared<Node>();
  n->left = a.node_;
  n->right = b.node_;
  n->s = "[" + a.str() + "," + b.str() + "]";
  return LoopTree(n);
}

std::string combo_str(const TreeCombo& c) {
  if (c.empty()) return "0";
  std::string s;
  for (const auto& [k, t] : c) {
    if (!s.empty()) s += " + ";
    s += k == ParamScalar(1) ? t.str() : "(" + k.str() + ")*" + t.str();
  }
  return s;
}

ModeOperator TreeCompanions::action(const LoopTree& x) const {
  if (x.is_leaf()) return w_->mode(x.elem());
  return commutator(action(x.left()), action(x.right()));
}

ModeOperator TreeCompanions::companion(const LoopTree& x, int k) const {
  if (x.is_leaf()) {
    AffElem e = x.elem();
    if (bug_ && e.x == 'H') e.x = 'F';
    return w_->companion_mode(e, k);
  }
  return commutator(action(x.left()), companion(x.right(), k)) - commutator(action(x.right()), companion(x.left(), k));
}

ModeOperator TreeCompanions::action(const TreeCombo& x) const {
  ModeOperator out = ModeOperator::zero({});
  for (const auto& [c, t] : x) out = out + action(t).scaled(c);
  return out;
}

ModeOperator TreeCompanions::companion(const TreeCombo& x, int k) const {
  ModeOperator out = w_->companion_mode(AffElem::central(), k);
  for (const auto& [c, t] : x) out = out + companion(t, k).scaled(c);
  return out;
}

std::vector<TreePair> standard_tree_pairs(const ParamScalar& k) {
  auto L = [](char x, int n) { return LoopTree::leaf({x, n}); };
  auto B = [](const LoopTree& a, const LoopTree& b) { return LoopTree::bracket(a, b); };
  auto one = [](const LoopTree& t) { return TreeCombo{{ParamScalar(1), t}}; };
  auto times = [](long c, const LoopTree& t) { return TreeCombo{{ParamScalar(c), t}}; };
  const LoopTree central = L('1', 0);
  return {
      {one(B(L('E', 0), L('F', 0))), one(L('H', 0))},
      {one(B(L('E', 1), L('F', -1))), {{ParamScalar(1), L('H', 0)}, {k, central}}},
      {one(B(L('H', 1), L('F', 0))), times(-2, L('F', 1))},
      {one(B(L('H', 0), L('F', -1))), times(-2, L('F', -1))},
      {one(B(L('H', -1), L('E', 1))), times(2, L('E', 0))},
      {one(B(L('F', 1), L('F', 0))), {}},
      {one(B(L('E', 0), B(L('E', 1), L('F', -1)))), times(-2, L('E', 0))},
      {one(B(L('F', 0), B(L('E', 1), L('F', -1)))), times(2, L('F', 0))},
      {one(B(L('H', 1), B(L('H', 0), L('F', -1)))), times(4, L('F', 0))},
      {one(B(B(L('E', 0), L('F', 1)), L('F', 0))), times(-2, L('F', 1))},
      {one(B(L('E', 0), B(L('F', 1), L('F', 0)))), {}},
      {one(B(B(L('E', 1), L('F', 0)), L('F', -1))), times(-2, L('F', 0))},
      {one(B(B(L('H', 1), L('E', 0)), L('F', -1))),
       {{ParamScalar(1), B(L('H', 1), B(L('E', 0), L('F', -1)))}, {ParamScalar(-1), B(L('E', 0), B(L('H', 1), L('F', -1)))}}},
      {one(B(L('H', 1), L('H', -1))), {{ParamScalar(2) * k, central}}},
  };
}

Residual check_descent(const TreeCompanions& tc, const std::vector<TreePair>& pairs, int kmax, const FockSpace& src,
                       const std::vector<BasisKey>& keys) {
  Residual r;
  for (const auto& pr : pairs) {
    const std::string what = combo_str(pr.lhs) + " vs " + combo_str(pr.rhs);
    if (!record(r, src, fock::matrix_sub(tc.action(pr.lhs).block(src, keys), tc.action(pr.rhs).block(src, keys)), "action " + what))
      return r;
    for (int k = -kmax; k <= kmax; ++k)
      if (!record(r, src, fock::matrix_sub(tc.companion(pr.lhs, k).block(src, keys), tc.companion(pr.rhs, k).block(src, keys)),
                  "S(x)[" + std::to_string(k) + "] " + what))
        return r;
  }
  return r;
}

}  // namespace scr::wak
