#include "scr/fock.hpp"

#include <algorithm>
#include <map>

namespace scr::fock {

OscSpec OscSpec::heisenberg() { return OscSpec{}; }

OscSpec OscSpec::wakimoto() {
  OscSpec s;
  s.npairs = 1;
  return s;
}

Mode b(int n, int family) { return {Osc::B, family, n}; }
Mode a(int n, int family) { return {Osc::A, family, n}; }
Mode astar(int n, int family) { return {Osc::AStar, family, n}; }
Mode q(int family) { return {Osc::Q, family, 0}; }

bool is_annihilation(const Mode& m) {
  switch (m.kind) {
    case Osc::B: return m.n > 0;
    case Osc::A: return m.n >= 0;
    case Osc::AStar: return m.n > 0;
    case Osc::Q: return false;
  }
  return false;
}

bool is_creation(const Mode& m) {
  switch (m.kind) {
    case Osc::B: return m.n < 0;
    case Osc::A: return m.n < 0;
    case Osc::AStar: return m.n <= 0;
    case Osc::Q: return false;
  }
  return false;
}

ParamScalar bracket(const OscSpec& spec, const Mode& x, const Mode& y) {
  if (x.kind == Osc::B && y.kind == Osc::B) {
    if (x.n + y.n != 0) return {};
    return ParamScalar(x.n) * spec.gram.at(x.family).at(y.family);
  }
  if (x.family != y.family && !(x.kind == Osc::Q || y.kind == Osc::Q)) return {};
  if (x.kind == Osc::A && y.kind == Osc::AStar) return x.n + y.n == 0 ? ParamScalar(1) : ParamScalar();
  if (x.kind == Osc::AStar && y.kind == Osc::A) return x.n + y.n == 0 ? ParamScalar(-1) : ParamScalar();
  if (x.kind == Osc::Q && y.kind == Osc::B && y.n == 0) return spec.gram.at(x.family).at(y.family);
  if (x.kind == Osc::B && x.n == 0 && y.kind == Osc::Q) return -spec.gram.at(y.family).at(x.family);
  return {};
}

std::string mode_str(const Mode& m) {
  std::string fam = m.family ? std::to_string(m.family + 1) : "";
  switch (m.kind) {
    case Osc::B: return "b" + fam + "_{" + std::to_string(m.n) + "}";
    case Osc::A: return "a" + fam + "_{" + std::to_string(m.n) + "}";
    case Osc::AStar: return "a*" + fam + "_{" + std::to_string(m.n) + "}";
    case Osc::Q: return "q" + fam;
  }
  return "?";
}

namespace {

int order_rank(const Mode& m) {
  if (m.kind == Osc::Q) return 0;
  if (is_annihilation(m) || (m.kind == Osc::B && m.n == 0)) return 2;
  return 1;
}

constexpr int32_t kKindShift = 1 << 20;
constexpr int32_t kFamilyShift = 1 << 12;

}  // namespace

NormalOrdered normal_order(const OscSpec& spec, const std::vector<Mode>& word) {
  NormalOrdered out;
  std::vector<int> idx(word.size());
  for (size_t i = 0; i < word.size(); ++i) idx[i] = static_cast<int>(i);
  std::stable_sort(idx.begin(), idx.end(), [&](int x, int y) { return order_rank(word[x]) < order_rank(word[y]); });
  for (int i : idx) out.word.push_back(word[i]);
  for (size_t i = 0; i < word.size(); ++i)
    for (size_t j = i + 1; j < word.size(); ++j) {
      if (order_rank(word[i]) <= order_rank(word[j])) continue;
      ParamScalar v = bracket(spec, word[i], word[j]);
      if (!v.is_zero()) out.ledger.push_back({static_cast<int>(i), static_cast<int>(j), v});
    }
  return out;
}

int32_t creation_code(const Mode& m) {
  if (!is_creation(m)) throw FockError("not a creation mode: " + mode_str(m));
  return static_cast<int32_t>(m.kind) * kKindShift + m.family * kFamilyShift + (-m.n);
}

Mode decode(int32_t code) {
  Mode m;
  m.kind = static_cast<Osc>(code / kKindShift);
  m.family = (code % kKindShift) / kFamilyShift;
  m.n = -(code % kFamilyShift);
  return m;
}

FockSpace::FockSpace(std::shared_ptr<const OscSpec> spec, std::vector<ParamScalar> zero_modes, int energy_cap)
    : spec_(std::move(spec)), zero_modes_(std::move(zero_modes)), cap_(energy_cap) {
  if (static_cast<int>(zero_modes_.size()) != spec_->nboson)
    throw FockError("expected " + std::to_string(spec_->nboson) + " zero-mode eigenvalues");
}

int FockSpace::energy(const BasisKey& k) {
  int e = 0;
  for (int32_t c : k) e += c % kFamilyShift;
  return e;
}

int FockSpace::charge(const BasisKey& k) {
  int c = 0;
  for (int32_t code : k) {
    Osc kind = static_cast<Osc>(code / kKindShift);
    if (kind == Osc::AStar) ++c;
    if (kind == Osc::A) --c;
  }
  return c;
}

std::vector<BasisKey> FockSpace::block(int energy, int charge) const {
  std::vector<Mode> ops;
  for (int i = 0; i < spec_->nboson; ++i)
    for (int d = 1; d <= energy; ++d) ops.push_back(b(-d, i));
  for (int s = 0; s < spec_->npairs; ++s) {
    for (int d = 1; d <= energy; ++d) ops.push_back(a(-d, s));
    for (int d = 0; d <= energy; ++d) ops.push_back(astar(-d, s));
  }
  std::vector<int32_t> codes;
  for (const auto& m : ops) codes.push_back(creation_code(m));
  std::sort(codes.begin(), codes.end());
  const int star_cap = charge + energy;
  std::vector<BasisKey> out;
  BasisKey cur;
  auto rec = [&](auto&& self, size_t from, int e_left, int c_now, int stars) -> void {
    if (e_left == 0 && c_now == charge) out.push_back(cur);
    for (size_t j = from; j < codes.size(); ++j) {
      Mode m = decode(codes[j]);
      int d = -m.n;
      if (d > e_left) continue;
      int dc = m.kind == Osc::AStar ? 1 : (m.kind == Osc::A ? -1 : 0);
      if (m.kind == Osc::AStar && stars + 1 > star_cap) continue;
      cur.push_back(codes[j]);
      self(self, j, e_left - d, c_now + dc, stars + (dc > 0));
      cur.pop_back();
    }
  };
  if (spec_->npairs == 0 && charge != 0) return out;
  rec(rec, 0, energy, 0, 0);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<BasisKey> FockSpace::basis_upto(int energy, int charge_abs) const {
  std::vector<BasisKey> out;
  int cmax = spec_->npairs ? charge_abs : 0;
  for (int e = 0; e <= energy; ++e)
    for (int c = -cmax; c <= cmax; ++c) {
      auto blk = block(e, c);
      out.insert(out.end(), blk.begin(), blk.end());
    }
  return out;
}

Vec FockSpace::apply(const Mode& m, const Vec& v) const {
  Vec out;
  if (m.kind == Osc::Q) throw FockError("q has no action on a single Fock module");
  if (m.kind == Osc::B && m.n == 0) return scaled(v, zero_modes_.at(m.family));
  if (is_creation(m)) {
    int32_t code = creation_code(m);
    for (const auto& [k, c] : v) {
      if (energy(k) - m.n > cap_) throw FockError("window exceeded: energy " + std::to_string(energy(k) - m.n));
      BasisKey nk = k;
      nk.insert(std::upper_bound(nk.begin(), nk.end(), code), code);
      add_to(out, nk, c);
    }
    return out;
  }
  for (const auto& [k, c] : v)
    for (size_t j = 0; j < k.size(); ++j) {
      ParamScalar br = bracket(*spec_, m, decode(k[j]));
      if (br.is_zero()) continue;
      BasisKey nk = k;
      nk.erase(nk.begin() + static_cast<long>(j));
      add_to(out, nk, c * br);
    }
  return out;
}

Vec FockSpace::apply_word(const std::vector<Mode>& word, const Vec& v) const {
  Vec cur = v;
  for (auto it = word.rbegin(); it != word.rend(); ++it) cur = apply(*it, cur);
  return cur;
}

FockSpace FockSpace::shifted(const std::vector<ParamScalar>& mu) const {
  std::vector<ParamScalar> z = zero_modes_;
  for (size_t i = 0; i < mu.size(); ++i)
    for (size_t j = 0; j < z.size(); ++j) z[j] += mu[i] * spec_->gram[i][j];
  return FockSpace(spec_, std::move(z), cap_);
}

ParamScalar FockSpace::twist(const std::vector<ParamScalar>& mu) const {
  ParamScalar t;
  for (size_t i = 0; i < mu.size(); ++i) t += mu[i] * zero_modes_.at(i);
  return t;
}

std::string FockSpace::vec_str(const Vec& v) const {
  if (v.empty()) return "0";
  std::string s;
  for (const auto& [k, c] : v) {
    if (!s.empty()) s += " + ";
    s += "(" + c.str() + ")*";
    for (int32_t code : k) s += mode_str(decode(code));
    s += k.empty() ? "v" : " v";
  }
  return s;
}

long block_dimension_oracle(const OscSpec& spec, int energy, int charge) {
  if (energy < 0) return 0;
  const int cmin = -energy, cmax = std::max(charge, 0) + energy;
  const int width = cmax - cmin + 1;
  std::vector<long> series(static_cast<size_t>((energy + 1) * width), 0);
  auto at = [&](int e, int c) -> long& { return series[static_cast<size_t>(e * width + (c - cmin))]; };
  at(0, 0) = 1;
  // multiply by 1 / (1 - q^d t^dc)
  auto geometric = [&](int d, int dc) {
    for (int e = 0; e <= energy; ++e)
      for (int c = cmin; c <= cmax; ++c) {
        int pe = e - d, pc = c - dc;
        if (pe < 0 || pc < cmin || pc > cmax) continue;
        at(e, c) += at(pe, pc);
      }
  };
  for (int i = 0; i < spec.nboson; ++i)
    for (int d = 1; d <= energy; ++d) geometric(d, 0);
  for (int s = 0; s < spec.npairs; ++s) {
    for (int d = 1; d <= energy; ++d) geometric(d, -1);
    for (int d = 0; d <= energy; ++d) geometric(d, 1);
  }
  if (charge < cmin || charge > cmax) return 0;
  return at(energy, charge);
}

Vec shift_operator(const Vec& v) { return v; }

ModeOperator::ModeOperator(std::string name, std::vector<ParamScalar> label_shift, Fn fn) : impl_(std::make_shared<Impl>()) {
  impl_->name = std::move(name);
  impl_->shift = std::move(label_shift);
  impl_->fn = std::move(fn);
}

FockSpace ModeOperator::target(const FockSpace& src) const { return src.shifted(impl_->shift); }

Vec ModeOperator::apply(const FockSpace& src, const Vec& v) const {
  Vec out;
  std::map<BasisKey, Vec>* bucket = nullptr;
  {
    std::lock_guard lock(impl_->mu);
    bucket = &impl_->memo[src.zero_modes()];
  }
  for (const auto& [k, c] : v) {
    const Vec* hit = nullptr;
    {
      std::lock_guard lock(impl_->mu);
      auto it = bucket->find(k);
      if (it != bucket->end()) hit = &it->second;
    }
    if (!hit) {
      Vec r = impl_->fn(src, k);
      std::lock_guard lock(impl_->mu);
      hit = &bucket->emplace(k, std::move(r)).first->second;
    }
    axpy(out, c, *hit);
  }
  return out;
}

Matrix ModeOperator::block(const FockSpace& src, const std::vector<BasisKey>& keys) const {
  Matrix m;
  for (const auto& k : keys) m[k] = apply(src, basis_vec(k));
  return m;
}

namespace {

void require_same_shift(const ModeOperator& x, const ModeOperator& y) {
  std::vector<ParamScalar> s = x.label_shift(), t = y.label_shift();
  size_t n = std::max(s.size(), t.size());
  s.resize(n);
  t.resize(n);
  if (s != t) throw FockError("operators " + x.name() + " and " + y.name() + " have different targets");
}

std::vector<ParamScalar> add_shifts(std::vector<ParamScalar> x, const std::vector<ParamScalar>& y) {
  if (x.size() < y.size()) x.resize(y.size());
  for (size_t i = 0; i < y.size(); ++i) x[i] += y[i];
  return x;
}

}  // namespace

ModeOperator ModeOperator::operator+(const ModeOperator& o) const {
  require_same_shift(*this, o);
  auto x = *this, y = o;
  return ModeOperator("(" + name() + " + " + o.name() + ")", label_shift(),
                      [x, y](const FockSpace& s, const BasisKey& k) {
                        Vec r = x.apply(s, basis_vec(k));
                        axpy(r, ParamScalar(1), y.apply(s, basis_vec(k)));
                        return r;
                      });
}

ModeOperator ModeOperator::operator-(const ModeOperator& o) const { return *this + o.scaled(ParamScalar(-1)); }

ModeOperator ModeOperator::scaled(const ParamScalar& c) const {
  auto x = *this;
  return ModeOperator("(" + c.str() + ")*" + name(), label_shift(),
                      [x, c](const FockSpace& s, const BasisKey& k) { return scr::scaled(x.apply(s, basis_vec(k)), c); });
}

ModeOperator ModeOperator::then(const ModeOperator& after) const {
  auto x = *this, y = after;
  return ModeOperator(after.name() + " " + name(), add_shifts(label_shift(), after.label_shift()),
                      [x, y](const FockSpace& s, const BasisKey& k) { return y.apply(x.target(s), x.apply(s, basis_vec(k))); });
}

ModeOperator ModeOperator::oscillator(const Mode& m) {
  return ModeOperator(mode_str(m), {}, [m](const FockSpace& s, const BasisKey& k) { return s.apply(m, basis_vec(k)); });
}

ModeOperator ModeOperator::zero(std::vector<ParamScalar> label_shift) {
  return ModeOperator("0", std::move(label_shift), [](const FockSpace&, const BasisKey&) { return Vec{}; });
}

Matrix commutator_blocks(const ModeOperator& x, const ModeOperator& y, const FockSpace& src, const std::vector<BasisKey>& keys) {
  Matrix m;
  for (const auto& k : keys) {
    Vec v = basis_vec(k);
    Vec xy = x.apply(y.target(src), y.apply(src, v));
    Vec yx = y.apply(x.target(src), x.apply(src, v));
    m[k] = sub(xy, yx);
  }
  return m;
}

Matrix matrix_sub(const Matrix& x, const Matrix& y) {
  Matrix m = x;
  for (const auto& [k, v] : y) m[k] = sub(m[k], v);
  return m;
}

bool matrix_is_zero(const Matrix& m) {
  return std::all_of(m.begin(), m.end(), [](const auto& kv) { return kv.second.empty(); });
}

std::string matrix_witness(const FockSpace& space, const Matrix& m) {
  for (const auto& [k, v] : m)
    if (!v.empty()) return "on " + space.vec_str(basis_vec(k)) + ": " + space.vec_str(v);
  return "";
}

}  // namespace scr::fock
