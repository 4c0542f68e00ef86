#include "scr/fields.hpp"

#include <algorithm>
#include <cctype>
#include <mutex>

namespace scr::fields {

using fock::Mode;

namespace {

bool mu_less(const std::vector<ParamScalar>& x, const std::vector<ParamScalar>& y) {
  return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
}

bool mu_is_zero(const std::vector<ParamScalar>& mu) {
  return std::all_of(mu.begin(), mu.end(), [](const ParamScalar& c) { return c.is_zero(); });
}

std::vector<ParamScalar> mu_add(std::vector<ParamScalar> x, const std::vector<ParamScalar>& y) {
  if (x.size() < y.size()) x.resize(y.size());
  for (size_t i = 0; i < y.size(); ++i) x[i] += y[i];
  return x;
}

std::string point_name(int point) { return "w" + std::to_string(point + 1); }

std::string wrap_scalar(const ParamScalar& c) {
  std::string s = c.str();
  bool simple = s.find_first_of("+- /*") == std::string::npos || (s[0] == '-' && s.find_first_of("+- /*", 1) == std::string::npos);
  return simple ? s : "(" + s + ")";
}

// Vertex factors merged by point, zero exponents dropped.
void add_vertex(std::vector<VertexFactor>& vs, const VertexFactor& v) {
  for (auto it = vs.begin(); it != vs.end(); ++it)
    if (it->point == v.point) {
      it->mu = mu_add(it->mu, v.mu);
      if (mu_is_zero(it->mu)) vs.erase(it);
      return;
    }
  if (mu_is_zero(v.mu)) return;
  vs.push_back(v);
  std::sort(vs.begin(), vs.end(), [](const VertexFactor& x, const VertexFactor& y) { return x.point < y.point; });
}

FieldTerm merge(const FieldTerm& x, const FieldTerm& y) {
  FieldTerm t;
  t.factors = x.factors;
  t.factors.insert(t.factors.end(), y.factors.begin(), y.factors.end());
  std::sort(t.factors.begin(), t.factors.end());
  t.vertices = x.vertices;
  for (const auto& v : y.vertices) add_vertex(t.vertices, v);
  return t;
}

}  // namespace

// ---------------------------------------------------------------- terms

bool FieldTerm::operator<(const FieldTerm& o) const {
  if (factors != o.factors) return factors < o.factors;
  if (vertices.size() != o.vertices.size()) return vertices.size() < o.vertices.size();
  for (size_t i = 0; i < vertices.size(); ++i) {
    if (vertices[i].point != o.vertices[i].point) return vertices[i].point < o.vertices[i].point;
    if (mu_less(vertices[i].mu, o.vertices[i].mu)) return true;
    if (mu_less(o.vertices[i].mu, vertices[i].mu)) return false;
  }
  return false;
}

int FieldTerm::weight() const {
  int w = 0;
  for (const auto& f : factors) w += f.weight();
  return w;
}

const VertexFactor* FieldTerm::vertex_at(int point) const {
  for (const auto& v : vertices)
    if (v.point == point) return &v;
  return nullptr;
}

FieldExpr FieldExpr::scalar(const ParamScalar& c) {
  FieldExpr e;
  e.add(FieldTerm{}, c);
  return e;
}

FieldExpr FieldExpr::field(Kind kind, int deriv, int family, int point) {
  FieldExpr e;
  FieldTerm t;
  t.factors.push_back({static_cast<uint8_t>(point), kind, static_cast<uint8_t>(family), static_cast<uint8_t>(deriv)});
  e.add(t, ParamScalar(1));
  return e;
}

FieldExpr FieldExpr::vertex(std::vector<ParamScalar> mu, int point) {
  FieldTerm t;
  add_vertex(t.vertices, {static_cast<uint8_t>(point), std::move(mu)});
  FieldExpr e;
  e.add(t, ParamScalar(1));
  return e;
}

std::optional<ParamScalar> FieldExpr::scalar_value() const {
  if (terms_.empty()) return ParamScalar();
  if (terms_.size() == 1 && terms_.begin()->first == FieldTerm{}) return terms_.begin()->second;
  return std::nullopt;
}

void FieldExpr::add(const FieldTerm& t, const ParamScalar& c) {
  if (c.is_zero()) return;
  auto [it, fresh] = terms_.try_emplace(t, c);
  if (!fresh) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

FieldExpr FieldExpr::operator+(const FieldExpr& o) const {
  FieldExpr r = *this;
  for (const auto& [t, c] : o.terms_) r.add(t, c);
  return r;
}

FieldExpr FieldExpr::operator-(const FieldExpr& o) const { return *this + o.scaled(ParamScalar(-1)); }

FieldExpr FieldExpr::scaled(const ParamScalar& c) const {
  FieldExpr r;
  for (const auto& [t, x] : terms_) r.add(t, x * c);
  return r;
}

bool FieldExpr::operator==(const FieldExpr& o) const { return (*this - o).is_zero(); }

int FieldExpr::weight() const {
  std::optional<int> w;
  for (const auto& [t, c] : terms_) {
    if (w && *w != t.weight()) throw FieldError("field is not homogeneous: " + str());
    w = t.weight();
  }
  return w.value_or(0);
}

FieldExpr FieldExpr::at_point(int point) const {
  FieldExpr r;
  for (const auto& [t, c] : terms_) {
    FieldTerm u;
    for (auto f : t.factors) {
      f.point = static_cast<uint8_t>(point);
      u.factors.push_back(f);
    }
    std::sort(u.factors.begin(), u.factors.end());
    for (auto v : t.vertices) {
      v.point = static_cast<uint8_t>(point);
      add_vertex(u.vertices, v);
    }
    r.add(u, c);
  }
  return r;
}

FieldExpr FieldExpr::substitute(const Bindings& b) const {
  FieldExpr r;
  for (const auto& [t, c] : terms_) {
    FieldTerm u = t;
    u.vertices.clear();
    for (auto v : t.vertices) {
      for (auto& m : v.mu) m = scr::substitute(m, b);
      add_vertex(u.vertices, v);
    }
    r.add(u, scr::substitute(c, b));
  }
  return r;
}

std::string FieldExpr::str() const {
  if (terms_.empty()) return "0";
  bool multi = false;
  for (const auto& [t, c] : terms_) {
    for (const auto& f : t.factors) multi |= f.point > 0;
    for (const auto& v : t.vertices) multi |= v.point > 0;
  }
  std::string out;
  for (const auto& [t, c] : terms_) {
    std::vector<std::string> items;
    for (const auto& f : t.factors) {
      std::string s = f.kind == Kind::P ? "p" : f.kind == Kind::Beta ? "beta" : "gamma";
      if (f.family) s += "_" + std::to_string(f.family + 1);
      if (f.deriv == 1) s = "D(" + s + ")";
      if (f.deriv > 1) s = "D^" + std::to_string(f.deriv) + "(" + s + ")";
      if (multi) s += "(" + point_name(f.point) + ")";
      items.push_back(s);
    }
    for (const auto& v : t.vertices) {
      std::string s = "V[";
      for (size_t i = 0; i < v.mu.size(); ++i) s += (i ? "," : "") + v.mu[i].str();
      s += "]";
      if (multi) s += "(" + point_name(v.point) + ")";
      items.push_back(s);
    }
    std::string body;
    if (items.size() == 1) body = items[0];
    if (items.size() > 1) {
      body = ":";
      for (size_t i = 0; i < items.size(); ++i) body += (i ? " " : "") + items[i];
      body += ":";
    }
    ParamScalar coef = c;
    bool neg = c.str()[0] == '-';
    if (neg) coef = -c;
    std::string cs;
    if (body.empty()) cs = wrap_scalar(coef);
    else if (coef != ParamScalar(1)) cs = wrap_scalar(coef) + "*";
    if (out.empty()) out = (neg ? "-" : "") + cs + body;
    else out += (neg ? " - " : " + ") + cs + body;
  }
  return out;
}

FieldExpr normal_product(const FieldExpr& x, const FieldExpr& y) {
  FieldExpr r;
  for (const auto& [tx, cx] : x.terms())
    for (const auto& [ty, cy] : y.terms()) r.add(merge(tx, ty), cx * cy);
  return r;
}

FieldExpr derivative(const FieldExpr& x, int point) {
  FieldExpr r;
  for (const auto& [t, c] : x.terms()) {
    for (size_t i = 0; i < t.factors.size(); ++i) {
      if (t.factors[i].point != point) continue;
      FieldTerm u = t;
      ++u.factors[i].deriv;
      std::sort(u.factors.begin(), u.factors.end());
      r.add(u, c);
    }
    if (const VertexFactor* v = t.vertex_at(point))
      for (size_t i = 0; i < v->mu.size(); ++i) {
        if (v->mu[i].is_zero()) continue;
        FieldTerm u = t;
        u.factors.push_back({static_cast<uint8_t>(point), Kind::P, static_cast<uint8_t>(i), 0});
        std::sort(u.factors.begin(), u.factors.end());
        r.add(u, -(c * v->mu[i]));
      }
  }
  return r;
}

// ---------------------------------------------------------------- parser

namespace {

struct Token {
  enum Type { Num, Ident, Sym, End } type;
  std::string text;
  size_t pos;
};

class Parser {
 public:
  Parser(const std::string& text, const Macros& macros) : text_(text), macros_(macros) { tokenize(); }

  FieldExpr parse() {
    FieldExpr e = expr();
    if (peek().type != Token::End) fail("unexpected '" + peek().text + "'");
    return e;
  }

 private:
  void tokenize() {
    size_t i = 0;
    while (i < text_.size()) {
      char ch = text_[i];
      if (std::isspace(static_cast<unsigned char>(ch))) {
        ++i;
      } else if (std::isdigit(static_cast<unsigned char>(ch))) {
        size_t j = i;
        while (j < text_.size() && std::isdigit(static_cast<unsigned char>(text_[j]))) ++j;
        toks_.push_back({Token::Num, text_.substr(i, j - i), i});
        i = j;
      } else if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
        size_t j = i;
        while (j < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[j])) || text_[j] == '_')) ++j;
        toks_.push_back({Token::Ident, text_.substr(i, j - i), i});
        i = j;
      } else if (std::string("+-*/^():[],").find(ch) != std::string::npos) {
        toks_.push_back({Token::Sym, std::string(1, ch), i});
        ++i;
      } else {
        fail_at(i, std::string("unexpected character '") + ch + "'");
      }
    }
    toks_.push_back({Token::End, "end of input", text_.size()});
  }

  [[noreturn]] void fail_at(size_t pos, const std::string& msg) const {
    throw FieldError("parse error at " + std::to_string(pos) + ": " + msg + " in \"" + text_ + "\"");
  }
  [[noreturn]] void fail(const std::string& msg) const { fail_at(peek().pos, msg); }

  const Token& peek(size_t ahead = 0) const { return toks_[std::min(at_ + ahead, toks_.size() - 1)]; }
  bool is_sym(const char* s, size_t ahead = 0) const { return peek(ahead).type == Token::Sym && peek(ahead).text == s; }
  void expect(const char* s) {
    if (!is_sym(s)) fail(std::string("expected '") + s + "'");
    ++at_;
  }

  static ParamScalar require_scalar(const FieldExpr& e, const char* what) {
    auto s = e.scalar_value();
    if (!s) throw FieldError(std::string(what) + " must be a scalar, got " + e.str());
    return *s;
  }

  FieldExpr expr() {
    bool neg = false;
    if (is_sym("-")) {
      neg = true;
      ++at_;
    } else if (is_sym("+")) {
      ++at_;
    }
    FieldExpr e = prod();
    if (neg) e = -e;
    while (is_sym("+") || is_sym("-")) {
      bool minus = is_sym("-");
      ++at_;
      FieldExpr t = prod();
      e = minus ? e - t : e + t;
    }
    return e;
  }

  FieldExpr prod() {
    FieldExpr e = unary();
    while (is_sym("*") || is_sym("/") || starts_unary()) {
      bool div = is_sym("/");
      size_t pos = peek().pos;
      if (!starts_unary()) ++at_;
      FieldExpr r = unary();
      if (div) {
        ParamScalar d = require_scalar(r, "divisor");
        if (d.is_zero()) fail_at(pos, "division by zero");
        e = e.scaled(ParamScalar(1) / d);
      } else if (auto s = r.scalar_value()) {
        e = e.scaled(*s);
      } else if (auto s2 = e.scalar_value()) {
        e = r.scaled(*s2);
      } else {
        fail_at(pos, "use :f g: for products of fields");
      }
    }
    return e;
  }

  bool starts_unary() const {
    return peek().type == Token::Num || peek().type == Token::Ident || is_sym("(") || is_sym(":");
  }

  FieldExpr unary() {
    FieldExpr e = primary();
    while (is_sym("^")) {
      ++at_;
      bool neg = false;
      if (is_sym("-")) {
        neg = true;
        ++at_;
      }
      if (peek().type != Token::Num) fail("expected integer exponent");
      int k = std::stoi(peek().text);
      ++at_;
      ParamScalar base = require_scalar(e, "base of ^");
      e = FieldExpr::scalar(neg ? ParamScalar(1) / base.pow(k) : base.pow(k));
    }
    return e;
  }

  int family_of(const std::string& name, const std::string& stem) {
    if (name == stem) return 0;
    return std::stoi(name.substr(stem.size() + 1)) - 1;
  }

  static bool has_stem(const std::string& name, const std::string& stem) {
    if (name == stem) return true;
    if (name.size() <= stem.size() + 1 || name.compare(0, stem.size() + 1, stem + "_") != 0) return false;
    return std::all_of(name.begin() + static_cast<long>(stem.size()) + 1, name.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  }

  FieldExpr primary() {
    const Token& t = peek();
    if (t.type == Token::Num) {
      ++at_;
      return FieldExpr::scalar(ParamScalar(Rational(t.text)));
    }
    if (is_sym("(")) {
      ++at_;
      FieldExpr e = expr();
      expect(")");
      return e;
    }
    if (is_sym(":")) {
      ++at_;
      FieldExpr e = FieldExpr::scalar(ParamScalar(1));
      int count = 0;
      while (!is_sym(":")) {
        if (peek().type == Token::End) fail("unterminated normal product");
        e = normal_product(e, unary());
        ++count;
      }
      ++at_;
      if (count == 0) fail("empty normal product");
      return e;
    }
    if (t.type != Token::Ident) fail("unexpected '" + t.text + "'");
    std::string name = t.text;
    ++at_;
    if (name == "D" && (is_sym("(") || is_sym("^"))) {
      int k = 1;
      if (is_sym("^")) {
        ++at_;
        if (peek().type != Token::Num) fail("expected derivative order");
        k = std::stoi(peek().text);
        ++at_;
      }
      expect("(");
      if (peek().type == Token::Ident && has_stem(peek().text, "phi") && is_sym(")", 1)) {
        int fam = family_of(peek().text, "phi");
        at_ += 2;
        if (k == 0) fail("bare phi is not a mode field");
        return FieldExpr::field(Kind::P, k - 1, fam);
      }
      FieldExpr e = expr();
      expect(")");
      for (int i = 0; i < k; ++i) e = derivative(e);
      return e;
    }
    if (name == "V" && is_sym("[")) {
      ++at_;
      std::vector<ParamScalar> mu;
      mu.push_back(require_scalar(expr(), "vertex exponent"));
      while (is_sym(",")) {
        ++at_;
        mu.push_back(require_scalar(expr(), "vertex exponent"));
      }
      expect("]");
      return FieldExpr::vertex(std::move(mu));
    }
    if (auto it = macros_.find(name); it != macros_.end()) return it->second;
    if (has_stem(name, "p")) return FieldExpr::field(Kind::P, 0, family_of(name, "p"));
    if (has_stem(name, "beta")) return FieldExpr::field(Kind::Beta, 0, family_of(name, "beta"));
    if (has_stem(name, "gamma")) return FieldExpr::field(Kind::Gamma, 0, family_of(name, "gamma"));
    if (has_stem(name, "phi")) fail_at(t.pos, "bare phi is not a mode field; use D(phi) or V[mu]");
    return FieldExpr::scalar(ParamScalar::param(name));
  }

  std::string text_;
  const Macros& macros_;
  std::vector<Token> toks_;
  size_t at_ = 0;
};

}  // namespace

FieldExpr parse_field(const std::string& text, const Macros& macros) { return Parser(text, macros).parse(); }

// ---------------------------------------------------------------- OPE

FieldExpr OpeResult::at(int order, int point) const {
  auto it = poles.find({point, order});
  return it == poles.end() ? FieldExpr{} : it->second;
}

int OpeResult::max_order() const {
  int m = 0;
  for (const auto& [k, v] : poles) m = std::max(m, k.second);
  return m;
}

bool OpeResult::operator==(const OpeResult& o) const {
  auto nonzero = [](const OpeResult& r) {
    std::map<std::pair<int, int>, FieldExpr> m;
    for (const auto& [k, v] : r.poles)
      if (!v.is_zero()) m[k] = v;
    return m;
  };
  auto x = nonzero(*this), y = nonzero(o);
  if (x.size() != y.size()) return false;
  for (const auto& [k, v] : x) {
    auto it = y.find(k);
    if (it == y.end() || !(it->second == v)) return false;
  }
  return true;
}

std::string OpeResult::str() const {
  bool multi = std::any_of(poles.begin(), poles.end(), [](const auto& kv) { return kv.first.first > 0; });
  std::string out;
  for (auto it = poles.rbegin(); it != poles.rend(); ++it) {
    const auto& [key, e] = *it;
    if (e.is_zero()) continue;
    std::string num = e.str();
    bool neg = num[0] == '-';
    if (neg) num = (-e).str();
    if (e.terms().size() > 1) num = "(" + num + ")";
    std::string w = multi ? point_name(key.first) : "w";
    std::string den = "(z-" + w + ")" + (key.second > 1 ? "^" + std::to_string(key.second) : "");
    if (out.empty()) out = (neg ? "-" : "") + num + "/" + den;
    else out += (neg ? " - " : " + ") + num + "/" + den;
  }
  return out.empty() ? "0" : out;
}

namespace {

struct Pole {
  int point;
  ParamScalar coef;
  int order;
};

// d_z^a d_w^b (z - w)^{-k0}
Pole differentiate(int point, ParamScalar c0, int k0, int a, int b) {
  long f = 1;
  for (int i = 0; i < a + b; ++i) f *= k0 + i;
  if (a % 2) f = -f;
  return {point, c0 * ParamScalar(f), k0 + a + b};
}

std::optional<Pole> field_contraction(const OscSpec& spec, const FieldSym& x, const FieldSym& y) {
  if (x.kind == Kind::P && y.kind == Kind::P)
    return differentiate(y.point, spec.gram.at(x.family).at(y.family), 2, x.deriv, y.deriv);
  if (x.family != y.family) return std::nullopt;
  if (x.kind == Kind::Gamma && y.kind == Kind::Beta) return differentiate(y.point, ParamScalar(1), 1, x.deriv, y.deriv);
  if (x.kind == Kind::Beta && y.kind == Kind::Gamma) return differentiate(y.point, ParamScalar(-1), 1, x.deriv, y.deriv);
  return std::nullopt;
}

ParamScalar gram_pair(const OscSpec& spec, const std::vector<ParamScalar>& mu, int family, bool mu_left) {
  ParamScalar s;
  for (size_t i = 0; i < mu.size(); ++i)
    s += mu[i] * (mu_left ? spec.gram.at(i).at(family) : spec.gram.at(family).at(i));
  return s;
}

class WickEnumerator {
 public:
  WickEnumerator(const OscSpec& spec, const FieldTerm& left, const FieldTerm& right, ParamScalar coef, OpeResult& out)
      : spec_(spec), left_(left), right_(right), coef_(std::move(coef)), out_(out) {
    if (left.vertices.size() > 1) throw FieldError("left field has vertex factors at several points");
    if (!left.vertices.empty()) mu_left_ = left.vertices[0].mu;
    if (!mu_left_.empty() && !right.vertices.empty())
      throw FieldError("vertex-vertex pairing has no Laurent singular part; use normal_multi_vertex");
    used_.assign(right.factors.size(), false);
    left_done_.assign(left.factors.size(), false);
    right_done_.assign(right.factors.size(), false);
  }

  void run() { left_step(0); }

 private:
  void left_step(size_t i) {
    if (i == left_.factors.size()) return right_step(0);
    left_step(i + 1);
    const FieldSym& x = left_.factors[i];
    for (size_t j = 0; j < right_.factors.size(); ++j) {
      if (used_[j]) continue;
      auto c = field_contraction(spec_, x, right_.factors[j]);
      if (!c || c->coef.is_zero()) continue;
      used_[j] = left_done_[i] = true;
      poles_.push_back(*c);
      left_step(i + 1);
      poles_.pop_back();
      used_[j] = left_done_[i] = false;
    }
    if (x.kind != Kind::P) return;
    for (const auto& v : right_.vertices) {
      ParamScalar c0 = -gram_pair(spec_, v.mu, x.family, false);
      if (c0.is_zero()) continue;
      left_done_[i] = true;
      poles_.push_back(differentiate(v.point, c0, 1, x.deriv, 0));
      left_step(i + 1);
      poles_.pop_back();
      left_done_[i] = false;
    }
  }

  void right_step(size_t j) {
    if (j == right_.factors.size()) return leaf();
    right_step(j + 1);
    const FieldSym& y = right_.factors[j];
    if (used_[j] || mu_left_.empty() || y.kind != Kind::P) return;
    ParamScalar c0 = gram_pair(spec_, mu_left_, y.family, true);
    if (c0.is_zero()) return;
    right_done_[j] = true;
    poles_.push_back(differentiate(y.point, c0, 1, 0, y.deriv));
    right_step(j + 1);
    poles_.pop_back();
    right_done_[j] = false;
  }

  void leaf() {
    if (poles_.empty()) return;
    std::map<int, int> order;
    ParamScalar scalar = coef_;
    for (const auto& p : poles_) {
      order[p.point] += p.order;
      scalar *= p.coef;
    }
    FieldTerm rest_left;
    for (size_t i = 0; i < left_.factors.size(); ++i)
      if (!left_done_[i]) rest_left.factors.push_back(left_.factors[i]);
    rest_left.vertices = left_.vertices;
    FieldTerm rest_right;
    for (size_t j = 0; j < right_.factors.size(); ++j)
      if (!used_[j] && !right_done_[j]) rest_right.factors.push_back(right_.factors[j]);
    rest_right.vertices = right_.vertices;
    FieldExpr rr;
    rr.add(rest_right, ParamScalar(1));
    FieldExpr rl;
    rl.add(rest_left, ParamScalar(1));

    for (const auto& [pt, k] : order) {
      // other points: prod (u + w_pt - w_l)^{-k_l}, as a series in u = z - w_pt
      std::vector<ParamScalar> series(static_cast<size_t>(k), ParamScalar());
      series[0] = ParamScalar(1);
      for (const auto& [l, kl] : order) {
        if (l == pt) continue;
        ParamScalar d = ParamScalar::param(point_name(pt)) - ParamScalar::param(point_name(l));
        std::vector<ParamScalar> factor(static_cast<size_t>(k));
        for (int s = 0; s < k; ++s) factor[static_cast<size_t>(s)] = ParamScalar(binomial(Rational(-kl), s)) * (ParamScalar(1) / d.pow(kl + s));
        std::vector<ParamScalar> next(static_cast<size_t>(k));
        for (int s = 0; s < k; ++s)
          for (int t = 0; s + t < k; ++t) next[static_cast<size_t>(s + t)] += series[static_cast<size_t>(s)] * factor[static_cast<size_t>(t)];
        series = std::move(next);
      }
      FieldExpr taylor = rl.at_point(pt);
      for (int m = 0; m < k; ++m) {
        if (m > 0) taylor = derivative(taylor, pt).scaled(ParamScalar::rational(1, m));
        FieldExpr body = normal_product(taylor, rr);
        for (int s = 0; s + m < k; ++s) {
          if (series[static_cast<size_t>(s)].is_zero()) continue;
          auto& slot = out_.poles[{pt, k - s - m}];
          slot = slot + body.scaled(scalar * series[static_cast<size_t>(s)]);
        }
      }
    }
  }

  const OscSpec& spec_;
  const FieldTerm& left_;
  const FieldTerm& right_;
  ParamScalar coef_;
  OpeResult& out_;
  std::vector<ParamScalar> mu_left_;
  std::vector<bool> used_, left_done_, right_done_;
  std::vector<Pole> poles_;
};

}  // namespace

OpeResult wick_ope(const OscSpec& spec, const FieldExpr& left, const FieldExpr& right) {
  OpeResult out;
  FieldExpr l = left.at_point(0);
  for (const auto& [tl, cl] : l.terms())
    for (const auto& [tr, cr] : right.terms()) WickEnumerator(spec, tl, tr, cl * cr, out).run();
  for (auto it = out.poles.begin(); it != out.poles.end();)
    it = it->second.is_zero() ? out.poles.erase(it) : std::next(it);
  return out;
}

// ---------------------------------------------------------------- modes

namespace {

long falling(long x, int k) {
  long r = 1;
  for (int i = 0; i < k; ++i) r *= x - i;
  return r;
}

ParamScalar mode_coefficient(const FieldSym& f, int m) {
  if (f.kind == Kind::Gamma) return ParamScalar(falling(-m, f.deriv));
  return ParamScalar(-falling(-m - 1, f.deriv));
}

Mode oscillator_of(const FieldSym& f, int m) {
  switch (f.kind) {
    case Kind::P: return fock::b(m, f.family);
    case Kind::Beta: return fock::a(m, f.family);
    case Kind::Gamma: return fock::astar(m, f.family);
  }
  return {};
}

// Coefficients of exp(sum_k x_k) applied to v, graded by k, with
// x_k = -(mu . b_k)/k (plus part) or x_k = (mu . b_{-k})/k (minus part).
std::vector<Vec> vertex_series(const FockSpace& s, const std::vector<ParamScalar>& mu, const Vec& v, int kmax, bool plus) {
  std::vector<Vec> out(static_cast<size_t>(kmax + 1));
  out[0] = v;
  for (int K = 1; K <= kmax; ++K) {
    Vec acc;
    for (int k = 1; k <= K; ++k)
      for (size_t i = 0; i < mu.size(); ++i) {
        if (mu[i].is_zero()) continue;
        const Vec& prev = out[static_cast<size_t>(K - k)];
        if (prev.empty()) continue;
        Vec t = s.apply(fock::b(plus ? k : -k, static_cast<int>(i)), prev);
        axpy(acc, (plus ? -mu[i] : mu[i]) / ParamScalar(K), t);
      }
    out[static_cast<size_t>(K)] = std::move(acc);
  }
  return out;
}

class ModeEnumerator {
 public:
  ModeEnumerator(const FockSpace& src, const FieldTerm& t, const ParamScalar& coef, int npoints, std::map<std::vector<int>, Vec>& out)
      : src_(src), t_(t), coef_(coef), out_(out), modes_(static_cast<size_t>(npoints), 0) {
    for (const auto& f : t.factors)
      if (f.point >= npoints) throw FieldError("field has insertions beyond the declared points");
    for (const auto& v : t.vertices)
      if (v.point >= npoints) throw FieldError("field has insertions beyond the declared points");
    deferred_.reserve(t.factors.size());
  }

  void run(const BasisKey& key) { annihilate(0, basis_vec(key), fock::FockSpace::energy(key), coef_); }

 private:
  void annihilate(size_t i, const Vec& cur, int energy, const ParamScalar& c) {
    if (cur.empty()) return;
    if (i == t_.factors.size()) return vertex_plus(0, cur, energy, c);
    const FieldSym& f = t_.factors[i];
    deferred_.push_back(i);
    annihilate(i + 1, cur, energy, c);
    deferred_.pop_back();
    for (int m = f.kind == Kind::Gamma ? 1 : 0; m <= energy; ++m) {
      ParamScalar k = mode_coefficient(f, m);
      if (k.is_zero()) continue;
      Vec next = src_.apply(oscillator_of(f, m), cur);
      modes_[f.point] += m;
      annihilate(i + 1, next, energy - m, c * k);
      modes_[f.point] -= m;
    }
  }

  void vertex_plus(size_t j, const Vec& cur, int energy, const ParamScalar& c) {
    if (j == t_.vertices.size()) return create(0, cur, energy, c);
    const auto& v = t_.vertices[j];
    auto series = vertex_series(src_, v.mu, cur, energy, true);
    for (int K = 0; K <= energy; ++K) {
      if (series[static_cast<size_t>(K)].empty()) continue;
      modes_[v.point] += K;
      vertex_plus(j + 1, series[static_cast<size_t>(K)], energy - K, c);
      modes_[v.point] -= K;
    }
  }

  void create(size_t i, const Vec& cur, int energy, const ParamScalar& c) {
    if (cur.empty()) return;
    if (i == deferred_.size()) return vertex_minus(0, cur, energy, c);
    const FieldSym& f = t_.factors[deferred_[i]];
    for (int d = f.kind == Kind::Gamma ? 0 : 1; energy + d <= src_.energy_cap(); ++d) {
      ParamScalar k = mode_coefficient(f, -d);
      if (k.is_zero()) continue;
      Vec next = src_.apply(oscillator_of(f, -d), cur);
      modes_[f.point] -= d;
      create(i + 1, next, energy + d, c * k);
      modes_[f.point] += d;
    }
  }

  void vertex_minus(size_t j, const Vec& cur, int energy, const ParamScalar& c) {
    if (j == t_.vertices.size()) {
      axpy(out_[modes_], c, cur);
      return;
    }
    const auto& v = t_.vertices[j];
    int budget = src_.energy_cap() - energy;
    auto series = vertex_series(src_, v.mu, cur, budget, false);
    for (int K = 0; K <= budget; ++K) {
      if (series[static_cast<size_t>(K)].empty()) continue;
      modes_[v.point] -= K;
      vertex_minus(j + 1, series[static_cast<size_t>(K)], energy + K, c);
      modes_[v.point] += K;
    }
  }

  const FockSpace& src_;
  const FieldTerm& t_;
  ParamScalar coef_;
  std::map<std::vector<int>, Vec>& out_;
  std::vector<int> modes_;
  std::vector<size_t> deferred_;
};

}  // namespace

struct FieldModes::Memo {
  std::mutex mu;
  std::map<std::pair<std::vector<ParamScalar>, int>, std::map<BasisKey, std::map<std::vector<int>, Vec>>> cache;
};

FieldModes::FieldModes(FieldExpr f, int npoints) : f_(std::move(f)), npoints_(npoints), memo_(std::make_shared<Memo>()) {
  weight_ = f_.weight();
  std::optional<std::vector<ParamScalar>> shift;
  for (const auto& [t, c] : f_.terms()) {
    std::vector<ParamScalar> s(1);
    for (const auto& v : t.vertices) s = mu_add(s, v.mu);
    if (shift) {
      std::vector<ParamScalar> x = *shift;
      size_t n = std::max(x.size(), s.size());
      x.resize(n);
      s.resize(n);
      if (x != s) throw FieldError("terms of " + f_.str() + " have different charges");
    }
    shift = s;
  }
}

std::vector<ParamScalar> FieldModes::label_shift() const {
  std::vector<ParamScalar> s;
  if (f_.terms().empty()) return s;
  for (const auto& v : f_.terms().begin()->first.vertices) s = mu_add(s, v.mu);
  return s;
}

const std::map<std::vector<int>, Vec>& FieldModes::expand(const FockSpace& src, const BasisKey& v) const {
  std::map<BasisKey, std::map<std::vector<int>, Vec>>* bucket = nullptr;
  {
    std::lock_guard lock(memo_->mu);
    bucket = &memo_->cache[{src.zero_modes(), src.energy_cap()}];
    auto it = bucket->find(v);
    if (it != bucket->end()) return it->second;
  }
  std::map<std::vector<int>, Vec> out;
  for (const auto& [t, c] : f_.terms()) ModeEnumerator(src, t, c, npoints_, out).run(v);
  for (auto it = out.begin(); it != out.end();) it = it->second.empty() ? out.erase(it) : std::next(it);
  std::lock_guard lock(memo_->mu);
  return bucket->emplace(v, std::move(out)).first->second;
}

Vec FieldModes::mode(const FockSpace& src, const Vec& v, const std::vector<int>& n) const {
  int total = 0;
  for (int x : n) total += x;
  Vec out;
  for (const auto& [k, c] : v) {
    if (FockSpace::energy(k) - total > src.energy_cap())
      throw fock::FockError("window exceeded: mode of " + f_.str() + " reaches energy " + std::to_string(FockSpace::energy(k) - total));
    const auto& all = expand(src, k);
    auto it = all.find(n);
    if (it != all.end()) axpy(out, c, it->second);
  }
  return out;
}

ModeOperator FieldModes::op(int n) const {
  FieldModes self = *this;
  return ModeOperator("(" + f_.str() + ")_" + std::to_string(n), label_shift(),
                      [self, n](const FockSpace& s, const BasisKey& k) { return self.mode(s, basis_vec(k), {n}); });
}

Vec vertex_half(const FockSpace& s, const std::vector<ParamScalar>& mu, const Vec& v, int k, bool plus) {
  if (k < 0) return {};
  return vertex_series(s, mu, v, k, plus)[static_cast<size_t>(k)];
}

ModeOperator vertex_half_op(const std::vector<ParamScalar>& mu, int k, bool plus) {
  return ModeOperator(std::string(plus ? "V+" : "V-") + "_" + std::to_string(k), {},
                      [mu, k, plus](const FockSpace& s, const BasisKey& key) { return vertex_half(s, mu, basis_vec(key), k, plus); });
}

ModeOperator ope_bracket(const OpeResult& ope, int dx, int n, int m) {
  std::vector<std::pair<ParamScalar, FieldModes>> parts;
  std::vector<ParamScalar> shift;
  for (const auto& [key, e] : ope.poles) {
    if (key.first != 0) throw FieldError("mode brackets need a single insertion point");
    ParamScalar c(binomial(Rational(n + dx - 1), key.second - 1));
    if (c.is_zero() || e.is_zero()) continue;
    parts.emplace_back(c, FieldModes(e));
    shift = parts.back().second.label_shift();
  }
  return ModeOperator("ope[" + std::to_string(n) + "," + std::to_string(m) + "]", shift,
                      [parts, n, m](const FockSpace& s, const BasisKey& k) {
                        Vec out;
                        for (const auto& [c, modes] : parts) axpy(out, c, modes.mode(s, basis_vec(k), {n + m}));
                        return out;
                      });
}

dg::Residual check_ope_against_modes(const OscSpec& spec, const FieldExpr& x, const FieldExpr& y, const FockSpace& src,
                                     const std::vector<BasisKey>& keys, int nmax) {
  auto ope = wick_ope(spec, x, y);
  FieldModes xm(x), ym(y);
  dg::Residual r;
  for (int n = -nmax; n <= nmax; ++n)
    for (int m = -nmax; m <= nmax; ++m) {
      auto d = fock::matrix_sub(fock::commutator_blocks(xm.op(n), ym.op(m), src, keys), ope_bracket(ope, xm.weight(), n, m).block(src, keys));
      ++r.checked;
      if (!fock::matrix_is_zero(d)) {
        r.ok = false;
        r.witness = "[(" + x.str() + ")_" + std::to_string(n) + ", (" + y.str() + ")_" + std::to_string(m) + "] " + fock::matrix_witness(src, d);
        return r;
      }
    }
  return r;
}

OpeResult ope_difference(const OpeResult& a, const OpeResult& b) {
  OpeResult r = a;
  for (const auto& [k, e] : b.poles) r.poles[k] = r.poles[k] - e;
  std::erase_if(r.poles, [](const auto& kv) { return kv.second.is_zero(); });
  return r;
}

}  // namespace scr::fields
