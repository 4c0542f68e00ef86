#include "scr/kacmoody.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

namespace scr::km {

CartanData CartanData::finite(const std::string& type) {
  if (type == "A1") return from_matrix({{2}});
  if (type == "A2") return from_matrix({{2, -1}, {-1, 2}});
  if (type == "B2") return from_matrix({{2, -2}, {-1, 2}});
  if (type == "G2") return from_matrix({{2, -3}, {-1, 2}});
  throw KmError("unknown finite type " + type);
}

CartanData CartanData::from_matrix(std::vector<std::vector<int>> a) {
  CartanData cd;
  cd.rank = static_cast<int>(a.size());
  cd.a = std::move(a);
  cd.sym.assign(static_cast<size_t>(cd.rank), Rational(0));
  // Propagate d_j = d_i a_ij / a_ji along the Dynkin graph.
  for (int root = 0; root < cd.rank; ++root) {
    if (cd.sym[static_cast<size_t>(root)] != 0) continue;
    cd.sym[static_cast<size_t>(root)] = 1;
    std::vector<int> stack{root};
    while (!stack.empty()) {
      int i = stack.back();
      stack.pop_back();
      for (int j = 0; j < cd.rank; ++j) {
        int aij = cd.a[static_cast<size_t>(i)][static_cast<size_t>(j)];
        int aji = cd.a[static_cast<size_t>(j)][static_cast<size_t>(i)];
        if (i == j || aij == 0 || aji == 0 || cd.sym[static_cast<size_t>(j)] != 0) continue;
        cd.sym[static_cast<size_t>(j)] = cd.sym[static_cast<size_t>(i)] * aij / aji;
        stack.push_back(j);
      }
    }
  }
  cd.validate();
  return cd;
}

void CartanData::validate() const {
  if (rank <= 0 || static_cast<int>(a.size()) != rank) throw KmError("bad Cartan matrix shape");
  for (int i = 0; i < rank; ++i) {
    if (static_cast<int>(a[static_cast<size_t>(i)].size()) != rank) throw KmError("bad Cartan matrix shape");
    if (a[static_cast<size_t>(i)][static_cast<size_t>(i)] != 2) throw KmError("diagonal entry is not 2");
    for (int j = 0; j < rank; ++j) {
      int aij = a[static_cast<size_t>(i)][static_cast<size_t>(j)];
      int aji = a[static_cast<size_t>(j)][static_cast<size_t>(i)];
      if (i == j) continue;
      if (aij > 0) throw KmError("positive off-diagonal entry");
      if ((aij == 0) != (aji == 0)) throw KmError("a_ij = 0 without a_ji = 0");
      if (sym[static_cast<size_t>(i)] * aij != sym[static_cast<size_t>(j)] * aji) throw KmError("matrix is not symmetrizable");
    }
  }
}

int height(const Weight& w) { return std::accumulate(w.begin(), w.end(), 0); }

Weight weight_of(const Word& w, int rank) {
  Weight k(static_cast<size_t>(rank), 0);
  for (int l : w) ++k[static_cast<size_t>(l)];
  return k;
}

std::vector<Weight> positive_roots(const CartanData& cd) {
  std::set<Weight> roots;
  std::vector<Weight> todo;
  for (int i = 0; i < cd.rank; ++i) {
    Weight e(static_cast<size_t>(cd.rank), 0);
    e[static_cast<size_t>(i)] = 1;
    roots.insert(e);
    todo.push_back(e);
  }
  while (!todo.empty()) {
    Weight b = todo.back();
    todo.pop_back();
    for (int i = 0; i < cd.rank; ++i) {
      int pair = 0;
      for (int j = 0; j < cd.rank; ++j) pair += cd.a[static_cast<size_t>(i)][static_cast<size_t>(j)] * b[static_cast<size_t>(j)];
      Weight r = b;
      r[static_cast<size_t>(i)] -= pair;
      if (std::all_of(r.begin(), r.end(), [](int x) { return x >= 0; }) && roots.insert(r).second) todo.push_back(r);
      if (roots.size() > 512) throw KmError("positive_roots: not of finite type");
    }
  }
  return {roots.begin(), roots.end()};
}

namespace {
long pbw_from(const std::vector<Weight>& roots, size_t from, const Weight& k) {
  if (std::all_of(k.begin(), k.end(), [](int x) { return x == 0; })) return 1;
  long total = 0;
  for (size_t r = from; r < roots.size(); ++r) {
    Weight rest = k;
    bool ok = true;
    for (size_t c = 0; c < k.size(); ++c) ok &= (rest[c] -= roots[r][c]) >= 0;
    if (ok) total += pbw_from(roots, r, rest);
  }
  return total;
}
}  // namespace

long pbw_dimension(const std::vector<Weight>& roots, const Weight& k) { return pbw_from(roots, 0, k); }

NcPoly nc_word(const Word& w, const ParamScalar& c) {
  NcPoly p;
  if (!c.is_zero()) p.emplace(w, c);
  return p;
}

namespace {
void nc_add(NcPoly& p, const Word& w, const ParamScalar& c) {
  if (c.is_zero()) return;
  auto [it, fresh] = p.try_emplace(w, c);
  if (!fresh) {
    it->second += c;
    if (it->second.is_zero()) p.erase(it);
  }
}
}  // namespace

NcPoly nc_mul(const NcPoly& x, const NcPoly& y) {
  NcPoly r;
  for (const auto& [u, a] : x)
    for (const auto& [v, b] : y) {
      Word w = u;
      w.insert(w.end(), v.begin(), v.end());
      nc_add(r, w, a * b);
    }
  return r;
}

NcPoly partial_derivation(int i, const NcPoly& x) {
  NcPoly r;
  for (const auto& [w, c] : x)
    for (size_t p = 0; p < w.size(); ++p) {
      if (w[p] != i) continue;
      Word u = w;
      u.erase(u.begin() + static_cast<long>(p));
      nc_add(r, u, c);
    }
  return r;
}

NcPoly serre_element(int j, int k, int a) {
  NcPoly r;
  for (int p = 0; p <= a; ++p) {
    Word w(static_cast<size_t>(a - p), j);
    w.push_back(k);
    w.insert(w.end(), static_cast<size_t>(p), j);
    Rational c = binomial(a, p);
    if (p % 2) c = -c;
    nc_add(r, w, ParamScalar(c));
  }
  return r;
}

// ---------------------------------------------------------------- Serre quotient

SerreQuotient::SerreQuotient(CartanData cd, int height_cutoff) : cd_(std::move(cd)), cutoff_(height_cutoff) {
  cd_.validate();
}

namespace {

std::vector<Word> words_of_weight(const Weight& k) {
  Word w;
  for (size_t i = 0; i < k.size(); ++i) w.insert(w.end(), static_cast<size_t>(k[i]), static_cast<int>(i));
  std::vector<Word> out;
  do out.push_back(w);
  while (std::next_permutation(w.begin(), w.end()));
  return out;
}

}  // namespace

WeightSpace SerreQuotient::build(const Weight& k) const {
  const int r = cd_.rank;
  WeightSpace ws;
  ws.weight = k;
  ws.words = words_of_weight(k);
  // Columns in decreasing lexicographic order so pivots are lex-largest words.
  std::vector<Word> cols(ws.words.rbegin(), ws.words.rend());
  std::map<Word, int> col_of;
  for (size_t c = 0; c < cols.size(); ++c) col_of[cols[c]] = static_cast<int>(c);

  std::vector<std::vector<Rational>> rows;
  for (int j = 0; j < r; ++j)
    for (int kk = 0; kk < r; ++kk) {
      if (j == kk) continue;
      int a = 1 - cd_.a[static_cast<size_t>(j)][static_cast<size_t>(kk)];
      Weight rest = k;
      rest[static_cast<size_t>(j)] -= a;
      rest[static_cast<size_t>(kk)] -= 1;
      if (std::any_of(rest.begin(), rest.end(), [](int x) { return x < 0; })) continue;
      NcPoly c = serre_element(j, kk, a);
      for (const Word& outer : words_of_weight(rest))
        for (size_t s = 0; s <= outer.size(); ++s) {
          std::vector<Rational> row(cols.size(), Rational(0));
          for (const auto& [w, coef] : c) {
            Word full(outer.begin(), outer.begin() + static_cast<long>(s));
            full.insert(full.end(), w.begin(), w.end());
            full.insert(full.end(), outer.begin() + static_cast<long>(s), outer.end());
            row[static_cast<size_t>(col_of.at(full))] += coef.constant_value();
          }
          rows.push_back(std::move(row));
        }
    }

  // Reduced row echelon form over Q.
  std::vector<int> pivot_col;
  size_t rank_so_far = 0;
  for (size_t c = 0; c < cols.size() && rank_so_far < rows.size(); ++c) {
    size_t piv = rank_so_far;
    while (piv < rows.size() && rows[piv][c] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[rank_so_far]);
    auto& pr = rows[rank_so_far];
    Rational inv = 1 / pr[c];
    for (auto& x : pr) x *= inv;
    for (size_t o = 0; o < rows.size(); ++o) {
      if (o == rank_so_far || rows[o][c] == 0) continue;
      Rational f = rows[o][c];
      for (size_t cc = 0; cc < cols.size(); ++cc) rows[o][cc] -= f * pr[cc];
    }
    pivot_col.push_back(static_cast<int>(c));
    ++rank_so_far;
  }
  rows.resize(rank_so_far);

  std::vector<bool> is_pivot(cols.size(), false);
  for (int c : pivot_col) is_pivot[static_cast<size_t>(c)] = true;
  for (const Word& w : ws.words)
    if (!is_pivot[static_cast<size_t>(col_of.at(w))]) ws.basis.push_back(w);
  std::map<int, int> basis_index;  // column -> basis position
  for (size_t b = 0; b < ws.basis.size(); ++b) basis_index[col_of.at(ws.basis[b])] = static_cast<int>(b);

  for (size_t b = 0; b < ws.basis.size(); ++b) ws.reduction[ws.basis[b]] = {{static_cast<int>(b), Rational(1)}};
  for (size_t ri = 0; ri < rows.size(); ++ri) {
    std::vector<std::pair<int, Rational>> combo;
    std::map<Word, Rational> row_map;
    for (size_t c = 0; c < cols.size(); ++c) {
      if (rows[ri][c] == 0) continue;
      row_map[cols[c]] = rows[ri][c];
      if (!is_pivot[c]) combo.emplace_back(basis_index.at(static_cast<int>(c)), -rows[ri][c]);
    }
    ws.reduction[cols[static_cast<size_t>(pivot_col[ri])]] = std::move(combo);
    ws.ideal_rows.push_back(std::move(row_map));
  }
  return ws;
}

const WeightSpace& SerreQuotient::space(const Weight& w) const {
  if (static_cast<int>(w.size()) != cd_.rank) throw KmError("weight has wrong rank");
  if (std::any_of(w.begin(), w.end(), [](int x) { return x < 0; })) throw KmError("weight is not a non-positive root lattice vector");
  if (height(w) > cutoff_) throw KmError("weight height " + std::to_string(height(w)) + " exceeds cutoff " + std::to_string(cutoff_));
  {
    std::shared_lock lock(mu_);
    auto it = cache_.find(w);
    if (it != cache_.end()) return *it->second;
  }
  auto built = std::make_unique<WeightSpace>(build(w));
  std::unique_lock lock(mu_);
  auto [it, fresh] = cache_.try_emplace(w, std::move(built));
  return *it->second;
}

std::vector<ParamScalar> SerreQuotient::normal_form(const NcPoly& x) const {
  if (x.empty()) return {};
  Weight w = weight_of(x.begin()->first, cd_.rank);
  const WeightSpace& ws = space(w);
  std::vector<ParamScalar> out(static_cast<size_t>(ws.dim()));
  for (const auto& [word, c] : x) {
    if (weight_of(word, cd_.rank) != w) throw KmError("normal_form of an inhomogeneous element");
    for (const auto& [b, q] : ws.reduction.at(word)) out[static_cast<size_t>(b)] += c * ParamScalar(q);
  }
  return out;
}

NcPoly SerreQuotient::lift(const Weight& w, const std::vector<ParamScalar>& coeffs) const {
  const WeightSpace& ws = space(w);
  NcPoly p;
  for (size_t b = 0; b < coeffs.size(); ++b)
    if (!coeffs[b].is_zero()) p.emplace(ws.basis[b], coeffs[b]);
  return p;
}

// ---------------------------------------------------------------- Verma modules

BasisKey verma_key(const Weight& w, int idx) {
  BasisKey k(w.begin(), w.end());
  k.push_back(idx);
  return k;
}

Weight key_weight(const BasisKey& k, int rank) { return Weight(k.begin(), k.begin() + rank); }

int key_index(const BasisKey& k) { return k.back(); }

VermaModule::VermaModule(std::shared_ptr<const SerreQuotient> q, std::vector<ParamScalar> label)
    : q_(std::move(q)), label_(std::move(label)) {
  if (static_cast<int>(label_.size()) != rank()) throw KmError("highest weight label has wrong rank");
}

Vec VermaModule::vacuum() const { return basis_vec(verma_key(Weight(static_cast<size_t>(rank()), 0), 0)); }

Vec VermaModule::from_nc(const NcPoly& x) const {
  std::map<Weight, NcPoly> by_weight;
  for (const auto& [w, c] : x) by_weight[weight_of(w, rank())].emplace(w, c);
  Vec v;
  for (const auto& [wt, part] : by_weight) {
    auto coeffs = q_->normal_form(part);
    for (size_t b = 0; b < coeffs.size(); ++b) add_to(v, verma_key(wt, static_cast<int>(b)), coeffs[b]);
  }
  return v;
}

const Word& VermaModule::word_of(const BasisKey& k) const {
  return q_->space(key_weight(k, rank())).basis.at(static_cast<size_t>(key_index(k)));
}

std::vector<BasisKey> VermaModule::basis_upto(int max_height) const {
  std::vector<BasisKey> out;
  const int r = rank();
  Weight w(static_cast<size_t>(r), 0);
  // Enumerate all k with sum <= max_height.
  std::vector<Weight> all;
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == r) {
      all.push_back(w);
      return;
    }
    for (int x = 0; x <= left; ++x) {
      w[static_cast<size_t>(i)] = x;
      rec(i + 1, left - x);
    }
  };
  rec(0, max_height);
  std::sort(all.begin(), all.end(), [](const Weight& a, const Weight& b) {
    return height(a) != height(b) ? height(a) < height(b) : a < b;
  });
  for (const Weight& k : all) {
    int d = q_->space(k).dim();
    for (int b = 0; b < d; ++b) out.push_back(verma_key(k, b));
  }
  return out;
}

ParamScalar VermaModule::h_eigenvalue(int i, const Weight& w) const {
  int shift = 1;
  for (int j = 0; j < rank(); ++j) shift += w[static_cast<size_t>(j)] * q_->cartan().a[static_cast<size_t>(i)][static_cast<size_t>(j)];
  return label_[static_cast<size_t>(i)] - ParamScalar(shift);
}

Vec VermaModule::left_mul(const NcPoly& x, const Vec& v) const {
  NcPoly acc;
  for (const auto& [k, c] : v) {
    NcPoly prod = nc_mul(x, nc_word(word_of(k), c));
    for (const auto& [w, a] : prod) {
      auto [it, fresh] = acc.try_emplace(w, a);
      if (!fresh) {
        it->second += a;
        if (it->second.is_zero()) acc.erase(it);
      }
    }
  }
  return from_nc(acc);
}

const Vec& VermaModule::e_on_word(int i, const Word& w) const {
  auto key = std::make_pair(i, w);
  {
    std::lock_guard lock(mu_);
    auto it = e_cache_.find(key);
    if (it != e_cache_.end()) return it->second;
  }
  Vec result;
  if (!w.empty()) {
    int j = w.front();
    Word rest(w.begin() + 1, w.end());
    const Vec& inner = e_on_word(i, rest);
    result = left_mul(nc_word({j}), inner);
    if (i == j) axpy(result, h_eigenvalue(i, weight_of(rest, rank())), from_word(rest));
  }
  std::lock_guard lock(mu_);
  auto [it, fresh] = e_cache_.try_emplace(key, std::move(result));
  return it->second;
}

Vec VermaModule::apply(Gen g, int i, const Vec& v) const {
  switch (g) {
    case Gen::F:
      return left_mul(nc_word({i}), v);
    case Gen::H: {
      Vec r;
      for (const auto& [k, c] : v) add_to(r, k, c * h_eigenvalue(i, key_weight(k, rank())));
      return r;
    }
    case Gen::E: {
      Vec r;
      for (const auto& [k, c] : v) axpy(r, c, e_on_word(i, word_of(k)));
      return r;
    }
  }
  return {};
}

Vec VermaModule::apply_e_via_derivation(int j, const Vec& v) const {
  Vec r;
  const auto& a = q_->cartan().a;
  for (const auto& [k, c] : v) {
    const Word& w = word_of(k);
    for (size_t p = 0; p < w.size(); ++p) {
      if (w[p] != j) continue;
      ParamScalar coef = label_[static_cast<size_t>(j)] - ParamScalar(1);
      for (size_t q = p + 1; q < w.size(); ++q) coef -= ParamScalar(a[static_cast<size_t>(j)][static_cast<size_t>(w[q])]);
      Word u = w;
      u.erase(u.begin() + static_cast<long>(p));
      axpy(r, c * coef, from_word(u));
    }
  }
  return r;
}

bool verma_equal(const Vec& u, const Vec& v) { return sub(u, v).empty(); }

}  // namespace scr::km
