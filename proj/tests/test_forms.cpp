#include "doctest.h"
#include "scr/forms.hpp"

#include <random>

using namespace scr;
using namespace scr::dg;

namespace {

ParamScalar P(const char* s) { return ParamScalar::parse(s); }

ZExp Z(int a, int b = 0, int c = 0) { return ZExp{static_cast<int16_t>(a), static_cast<int16_t>(b), static_cast<int16_t>(c), 0}; }

ParamScalar rand_q(std::mt19937& rng) {
  std::uniform_int_distribution<int> num(-9, 9), den(1, 5);
  return ParamScalar::rational(num(rng), den(rng));
}

TwistedForm random_form(std::mt19937& rng, int nvars, int terms) {
  std::uniform_int_distribution<int> ex(-2, 2), mask(0, (1 << nvars) - 1);
  TwistedForm f(nvars);
  for (int t = 0; t < terms; ++t) {
    ZExp z{};
    for (int i = 0; i < nvars; ++i) z[static_cast<size_t>(i)] = static_cast<int16_t>(ex(rng));
    f.add(FormKey{static_cast<uint8_t>(mask(rng)), z, {}}, rand_q(rng));
  }
  return f;
}

VectorField random_field(std::mt19937& rng, int nvars) {
  std::uniform_int_distribution<int> ex(-1, 2);
  VectorField v;
  v.nvars = nvars;
  v.comp.resize(static_cast<size_t>(nvars));
  for (auto& c : v.comp)
    for (int t = 0; t < 2; ++t) {
      ZExp z{};
      for (int i = 0; i < nvars; ++i) z[static_cast<size_t>(i)] = static_cast<int16_t>(ex(rng));
      laurent_add(c, z, rand_q(rng));
    }
  return v;
}

Connection random_connection(std::mt19937& rng, int nvars) {
  Connection c = Connection::zero(nvars);
  for (auto& k : c.var) k = rand_q(rng);
  for (int i = 0; i < nvars; ++i)
    for (int j = i + 1; j < nvars; ++j) c.pair[{i, j}] = rand_q(rng);
  return c;
}

TwistedForm iter_contract(const std::vector<VectorField>& xs, TwistedForm f) {
  for (int p = static_cast<int>(xs.size()) - 1; p >= 0; --p) f = contract(xs[static_cast<size_t>(p)], f);
  return f;
}

std::vector<VectorField> drop(const std::vector<VectorField>& xs, std::initializer_list<size_t> idx) {
  std::vector<VectorField> r;
  for (size_t i = 0; i < xs.size(); ++i)
    if (std::find(idx.begin(), idx.end(), i) == idx.end()) r.push_back(xs[i]);
  return r;
}

}  // namespace

TEST_SUITE("dgcartan") {
  TEST_CASE("contraction examples") {
    TwistedForm dz_over_z = TwistedForm::monomial(1, 1, Z(-1), 1);
    CHECK(contract(VectorField::diagonal(1, {{1, 1}}), dz_over_z) == TwistedForm::monomial(1, 0, Z(0), 1));
    TwistedForm f = TwistedForm::monomial(2, 3, Z(1, 0), P("c"));
    TwistedForm expect = TwistedForm::monomial(2, 2, Z(3, 0), P("c")) - TwistedForm::monomial(2, 1, Z(1, 2), P("c"));
    CHECK(contract(VectorField::diagonal(2, {{2, 1}}), f) == expect);
  }

  TEST_CASE("Witt bracket") {
    for (int n = -3; n <= 3; ++n)
      for (int m = -3; m <= 3; ++m)
        CHECK(bracket(VectorField::witt(2, n), VectorField::witt(2, m)) == VectorField::witt(2, n + m).scaled(ParamScalar(n - m)));
  }

  TEST_CASE("d squares to zero for random connections") {
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
      int nvars = 1 + trial % 3;
      Connection c = random_connection(rng, nvars);
      TwistedForm f = random_form(rng, nvars, 4);
      CHECK(d_twisted(d_twisted(f, c), c).is_zero());
    }
    // Symbolic exponents.
    Connection c = Connection::uniform(3, P("kappa"), P("mu"));
    TwistedForm f = TwistedForm::monomial(3, 0, Z(-1, 2, 0), 1) + TwistedForm::monomial(3, 4, Z(0, -1, 1), P("kappa"));
    CHECK(d_twisted(d_twisted(f, c), c).is_zero());
  }

  TEST_CASE("Cartan calculus on random data") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 12; ++trial) {
      int nvars = 1 + trial % 3;
      Connection c = random_connection(rng, nvars);
      TwistedForm f = random_form(rng, nvars, 3);
      VectorField t = random_field(rng, nvars), s = random_field(rng, nvars);
      // i_t i_t = 0 and i_t i_s = -i_s i_t
      CHECK(contract(t, contract(t, f)).is_zero());
      CHECK(contract(t, contract(s, f)) == -contract(s, contract(t, f)));
      // Lie_t commutes with d
      CHECK(lie_derivative(t, d_twisted(f, c), c) == d_twisted(lie_derivative(t, f, c), c));
      // [Lie_t, i_s] = i_[t,s]
      TwistedForm lhs = lie_derivative(t, contract(s, f), c) - contract(s, lie_derivative(t, f, c));
      CHECK(lhs == contract(bracket(t, s), f));
      // [Lie_t, Lie_s] = Lie_[t,s]
      TwistedForm ll = lie_derivative(t, lie_derivative(s, f, c), c) - lie_derivative(s, lie_derivative(t, f, c), c);
      CHECK(ll == lie_derivative(bracket(t, s), f, c));
    }
    // Witt fields with the invariant bracket.
    Connection c = Connection::uniform(2, P("kappa"), P("mu"));
    TwistedForm f = TwistedForm::monomial(2, 1, Z(-2, 1), 1);
    for (int n = -2; n <= 2; ++n)
      for (int m = -2; m <= 2; ++m) {
        VectorField t = VectorField::witt(2, n), s = VectorField::witt(2, m);
        CHECK(lie_derivative(t, contract(s, f), c) - contract(s, lie_derivative(t, f, c)) == contract(bracket(t, s), f));
      }
  }

  TEST_CASE("Lie derivative of a constant") {
    Connection c = Connection::uniform(1, P("kappa"), 0);
    CHECK(lie_derivative(VectorField::diagonal(1, {{1, 1}}), TwistedForm::monomial(1, 0, Z(0), 1), c) ==
          TwistedForm::monomial(1, 0, Z(0), P("kappa")));
  }

  TEST_CASE("graded commutator of d with iterated contractions") {
    std::mt19937 rng(99);
    for (int a = 1; a <= 3; ++a)
      for (int trial = 0; trial < 3; ++trial) {
        int nvars = std::max(a, 2);
        Connection c = random_connection(rng, nvars);
        TwistedForm eta = random_form(rng, nvars, 4);
        std::vector<VectorField> xs;
        for (int i = 0; i < a; ++i) xs.push_back(random_field(rng, nvars));
        TwistedForm lhs = d_twisted(iter_contract(xs, eta), c);
        TwistedForm tail = iter_contract(xs, d_twisted(eta, c));
        lhs += a % 2 ? tail : -tail;
        TwistedForm first(nvars), second(nvars);
        for (size_t p = 0; p < xs.size(); ++p) {
          auto rest = drop(xs, {p});
          TwistedForm t1 = lie_derivative(xs[p], iter_contract(rest, eta), c);
          TwistedForm t2 = iter_contract(rest, lie_derivative(xs[p], eta, c));
          first += p % 2 ? -t1 : t1;
          second += p % 2 ? -t2 : t2;
          for (size_t q = p + 1; q < xs.size(); ++q) {
            auto rr = drop(xs, {p, q});
            rr.insert(rr.begin(), bracket(xs[p], xs[q]));
            TwistedForm t = iter_contract(rr, eta);
            // 1-based p+q has the same parity as 0-based p+q
            first += (p + q) % 2 ? -t : t;
            second += (p + q) % 2 ? t : -t;
          }
        }
        INFO("a = ", a);
        CHECK(lhs == first);
        CHECK(lhs == second);
      }
  }

  TEST_CASE("one-variable cohomology") {
    for (int lam = 0; lam <= 5; ++lam) {
      auto h = one_var_cohomology(ParamScalar(lam), -10, 0);
      CHECK(h.h0 == 1);
      CHECK(h.h1 == 1);
      CHECK(h.h0_exponents == std::vector<int>{-lam});
      CHECK_FALSE(h.inconclusive);
    }
    for (auto k : {ParamScalar::rational(1, 2), ParamScalar::rational(-7, 3), ParamScalar::rational(5, 4)}) {
      auto h = one_var_cohomology(k, -10, 0);
      CHECK(h.h0 == 0);
      CHECK(h.h1 == 0);
    }
    auto sym = one_var_cohomology(P("lambda"), -10, 0);
    CHECK(sym.h0 == 0);
    CHECK(one_var_cohomology(ParamScalar(12), -10, 0).inconclusive);
  }

  TEST_CASE("Cartan cocycle of a canonical invariant element") {
    // sl2 acting on C^2 by linear vector fields; W = degree-1 top forms,
    // M = W^*, omega = sum_e e^* (x) z^e dz1 dz2 is invariant.
    enum G { E, H, F };
    auto field = [](int g) {
      VectorField v;
      v.nvars = 2;
      v.comp.resize(2);
      if (g == E) laurent_add(v.comp[1], Z(1, 0), 1);
      if (g == F) laurent_add(v.comp[0], Z(0, 1), 1);
      if (g == H) {
        laurent_add(v.comp[0], Z(1, 0), 1);
        laurent_add(v.comp[1], Z(0, 1), -1);
      }
      return v;
    };
    Connection conn = Connection::zero(2);
    std::vector<ZExp> basis{Z(1, 0), Z(0, 1)};
    auto omega = [&](const BasisKey&) {
      TwistedForm f(2);
      for (const ZExp& e : basis) f.add(FormKey{3, e, {e[0], e[1]}}, 1);
      return f;
    };
    auto act_target = [&](int g, const BasisKey& k) {
      Vec r;
      for (const ZExp& e : basis) {
        TwistedForm img = lie_derivative(field(g), TwistedForm::monomial(2, 3, e, 1), conn);
        Vec coef = img.coefficient(3, Z(k[0], k[1]));
        for (const auto& [_, c] : coef) add_to(r, {e[0], e[1]}, -c);
      }
      return r;
    };
    CochainSystem<int> s;
    s.degree = 2;
    s.nvars = 2;
    s.conn = conn;
    s.bracket = [](int x, int y) -> std::vector<std::pair<ParamScalar, int>> {
      if (x == y) return {};
      if (x == H && y == E) return {{2, E}};
      if (x == E && y == H) return {{-2, E}};
      if (x == H && y == F) return {{-2, F}};
      if (x == F && y == H) return {{2, F}};
      if (x == E && y == F) return {{1, H}};
      return {{-1, H}};
    };
    s.act_source = [](int, const BasisKey&) { return Vec{}; };
    s.act_target = act_target;
    std::function<TwistedForm(const int&, const TwistedForm&)> ctr = [&](const int& g, const TwistedForm& f) { return contract(field(g), f); };
    s.value = cartan_cochain<int>(omega, ctr);
    // Invariance: first plus second action vanishes.
    for (int g : {E, H, F}) {
      TwistedForm inv = omega({}).map_target([&](const BasisKey& k) { return act_target(g, k); }) + lie_derivative(field(g), omega({}), conn);
      CHECK(inv.is_zero());
    }
    auto res = total_cocycle_check<int>(s, {E, H, F}, {BasisKey{}});
    CHECK(res.ok);
    CHECK(res.checked > 0);
    // Without the normalization the bidegree (1,2) component fails.
    s.value = [&](int, const std::vector<int>& args, const BasisKey& v) {
      TwistedForm f = omega(v);
      for (int p = static_cast<int>(args.size()) - 1; p >= 0; --p) f = contract(field(args[static_cast<size_t>(p)]), f);
      return f;
    };
    CHECK_FALSE(total_cocycle_check<int>(s, {E, H, F}, {BasisKey{}}).ok);
  }

  TEST_CASE("cartan sign") {
    CHECK(cartan_sign(0) == 1);
    CHECK(cartan_sign(1) == -1);
    CHECK(cartan_sign(2) == -1);
    CHECK(cartan_sign(3) == 1);
  }
}
