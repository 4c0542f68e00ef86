#include "doctest.h"

#include "scr/fields.hpp"
#include "scr/fock.hpp"

using namespace scr;
using namespace scr::fock;
using namespace scr::fields;

namespace {

std::shared_ptr<const OscSpec> heis() { return std::make_shared<const OscSpec>(OscSpec::heisenberg()); }
std::shared_ptr<const OscSpec> waki() { return std::make_shared<const OscSpec>(OscSpec::wakimoto()); }
ParamScalar P(const char* s) { return ParamScalar::parse(s); }

FieldExpr stress(const ParamScalar& alpha0) {
  return parse_field("1/4 :p p: - alpha0 * D(p)", {{"alpha0", FieldExpr::scalar(alpha0)}});
}

}  // namespace

TEST_SUITE("fock") {
  TEST_CASE("oscillator examples") {
    FockSpace f(heis(), {P("2*alpha")});
    Vec v = basis_vec(FockSpace::vacuum());
    CHECK(f.apply_word({b(2), b(-2)}, v) == scaled(v, ParamScalar(4)));
    CHECK(f.apply(b(0), v) == scaled(v, P("2*alpha")));
    CHECK(f.apply(b(3), v).empty());
    CHECK_THROWS_AS(f.apply(q(), v), FockError);

    FockSpace w(waki(), {P("lam")});
    CHECK(w.apply_word({a(1), astar(-1)}, v) == v);
    CHECK(w.apply_word({astar(1), a(-1)}, v) == scaled(v, ParamScalar(-1)));
    CHECK(w.apply(a(0), v).empty());
    CHECK(w.apply_word({a(0), astar(0)}, v) == v);
  }

  TEST_CASE("normal ordering ledger") {
    auto spec = OscSpec::heisenberg();
    auto n = normal_order(spec, {b(3), b(-3)});
    CHECK(n.word == std::vector<Mode>{b(-3), b(3)});
    REQUIRE(n.ledger.size() == 1);
    CHECK(n.ledger[0].value == ParamScalar(6));
    auto z = normal_order(spec, {b(0), q()});
    CHECK(z.word == std::vector<Mode>{q(), b(0)});
    REQUIRE(z.ledger.size() == 1);
    CHECK(z.ledger[0].value == ParamScalar(-2));
    CHECK(normal_order(spec, {b(-1), b(2)}).ledger.empty());
  }

  TEST_CASE("block dimensions match the generating function") {
    for (auto spec : {heis(), waki()}) {
      FockSpace f(spec, {ParamScalar(0)});
      for (int e = 0; e <= 6; ++e)
        for (int c = -3; c <= 3; ++c) {
          auto blk = f.block(e, c);
          CAPTURE(e);
          CAPTURE(c);
          CHECK(static_cast<long>(blk.size()) == block_dimension_oracle(*spec, e, c));
          for (const auto& k : blk) {
            CHECK(FockSpace::energy(k) == e);
            CHECK(FockSpace::charge(k) == c);
          }
        }
    }
    CHECK(block_dimension_oracle(OscSpec::heisenberg(), 6, 0) == 11);
  }

  TEST_CASE("shift operator is H^- linear") {
    FockSpace f(heis(), {P("2*alpha")});
    FockSpace g = f.shifted({P("beta")});
    CHECK(g.zero_modes()[0] == P("2*alpha + 2*beta"));
    Vec v = f.apply_word({b(-1), b(-2)}, basis_vec(FockSpace::vacuum()));
    CHECK(shift_operator(f.apply(b(-3), v)) == g.apply(b(-3), shift_operator(v)));
    CHECK(g.apply(b(0), shift_operator(basis_vec({}))) == scaled(basis_vec({}), P("2*alpha + 2*beta")));
  }

  TEST_CASE("parser") {
    CHECK(parse_field("p").str() == "p");
    CHECK(parse_field(":gamma beta:").str() == ":beta gamma:");
    CHECK(parse_field("D(phi)") == parse_field("p"));
    CHECK(parse_field("D^2(gamma)").str() == "D^2(gamma)");
    CHECK(parse_field("D(V[b])") == parse_field("-b*:p V[b]:"));
    CHECK(parse_field("2*p - p") == parse_field("p"));
    CHECK(parse_field("(nu^2 - 2)/2").scalar_value() == P("(nu^2 - 2)/2"));
    CHECK_THROWS_AS(parse_field("phi"), FieldError);
    CHECK_THROWS_AS(parse_field("p * p"), FieldError);
    CHECK_THROWS_AS(parse_field(":p"), FieldError);
    CHECK_THROWS_AS(parse_field("p +"), FieldError);
    CHECK_THROWS_AS(parse_field("V[p]"), FieldError);
    Macros m{{"E", parse_field("beta")}};
    CHECK(parse_field("2*E", m) == parse_field("2*beta"));
  }

  TEST_CASE("wick examples") {
    auto spec = OscSpec::heisenberg();
    CHECK(wick_ope(spec, parse_field("p"), parse_field("p")).str() == "2/(z-w)^2");
    auto pp = wick_ope(spec, parse_field(":p p:"), parse_field(":p p:"));
    CHECK(pp.at(4) == FieldExpr::scalar(ParamScalar(8)));
    CHECK(pp.at(3).is_zero());
    CHECK(pp.at(2) == parse_field("8 :p p:"));
    CHECK(pp.at(1) == parse_field("8 :p D(p):"));

    auto ws = OscSpec::wakimoto();
    CHECK(wick_ope(ws, parse_field("gamma"), parse_field("beta")).str() == "1/(z-w)");
    CHECK(wick_ope(ws, parse_field("beta"), parse_field("gamma")).str() == "-1/(z-w)");
    CHECK(wick_ope(ws, parse_field("beta"), parse_field("beta")).poles.empty());

    auto pv = wick_ope(spec, parse_field("p"), parse_field("V[b]"));
    CHECK(pv.at(1) == parse_field("-2*b*V[b]"));
    auto vp = wick_ope(spec, parse_field("V[b]"), parse_field("p"));
    CHECK(vp.at(1) == parse_field("2*b*V[b]"));
    CHECK_THROWS_AS(wick_ope(spec, parse_field("V[b]"), parse_field("V[c]")), FieldError);
  }

  TEST_CASE("stress tensor OPEs") {
    auto spec = OscSpec::heisenberg();
    ParamScalar a0 = P("alpha0");
    FieldExpr t = stress(a0);
    auto tt = wick_ope(spec, t, t);
    CHECK(tt.at(4) == FieldExpr::scalar((ParamScalar(1) - ParamScalar(24) * a0 * a0) / ParamScalar(2)));
    CHECK(tt.at(3).is_zero());
    CHECK(tt.at(2) == t.scaled(ParamScalar(2)));
    CHECK(tt.at(1) == derivative(t));

    auto pt = wick_ope(spec, parse_field("p"), t);
    CHECK(pt.at(3) == FieldExpr::scalar(ParamScalar(-4) * a0));
    CHECK(pt.at(2) == parse_field("p"));

    auto tv = wick_ope(spec, t, parse_field("V[b]"));
    CHECK(tv.at(2) == parse_field("(b^2 - 2*alpha0*b)*V[b]"));
    CHECK(tv.at(1) == derivative(parse_field("V[b]")));
  }

  TEST_CASE("L_0 and mode expansion examples") {
    ParamScalar a0 = P("alpha0"), al = P("alpha");
    FockSpace f(heis(), {ParamScalar(2) * al}, 8);
    FieldModes tm(stress(a0));
    CHECK(tm.weight() == 2);
    Vec v = basis_vec(FockSpace::vacuum());
    CHECK(tm.op(0).apply(f, v) == scaled(v, al * al - ParamScalar(2) * a0 * al));
    FieldModes pm(parse_field("p"));
    CHECK(pm.op(-2).apply(f, v) == f.apply(b(-2), scaled(v, ParamScalar(-1))));
    CHECK(pm.op(0).apply(f, v) == scaled(v, ParamScalar(-2) * al));
    FieldModes vm(parse_field("V[b]"));
    FockSpace g = f.shifted({P("b")});
    CHECK(vm.op(0).target(f) == g);
    CHECK(vm.op(0).apply(f, v) == v);
    CHECK(vm.op(-1).apply(f, v) == scaled(f.apply(b(-1), v), P("b")));
    CHECK(vm.op(1).apply(f, v).empty());
    CHECK_THROWS_AS(tm.op(-9).apply(f, v), FockError);
  }

  TEST_CASE("OPE and mode brackets agree") {
    auto spec = heis();
    ParamScalar a0 = P("alpha0");
    FockSpace f(spec, {P("2*alpha")}, 9);
    auto keys = f.basis_upto(3, 0);
    struct Pair {
      FieldExpr x, y;
    };
    std::vector<Pair> pairs = {{parse_field("p"), parse_field("p")},
                               {stress(a0), stress(a0)},
                               {parse_field("p"), stress(a0)},
                               {stress(a0), parse_field("V[b]")},
                               {parse_field("p"), parse_field(":p V[b]:")}};
    for (const auto& pr : pairs) {
      auto ope = wick_ope(*spec, pr.x, pr.y);
      FieldModes xm(pr.x), ym(pr.y);
      for (int n = -2; n <= 2; ++n)
        for (int m = -2; m <= 2; ++m) {
          auto lhs = commutator_blocks(xm.op(n), ym.op(m), f, keys);
          auto rhs = ope_bracket(ope, xm.weight(), n, m).block(f, keys);
          auto d = matrix_sub(lhs, rhs);
          CAPTURE(pr.x.str());
          CAPTURE(pr.y.str());
          CAPTURE(n);
          CAPTURE(m);
          INFO(matrix_witness(f, d));
          CHECK(matrix_is_zero(d));
        }
    }
  }

  TEST_CASE("multi-point insertion") {
    auto spec = OscSpec::heisenberg();
    FieldExpr v2 = normal_product(parse_field("V[b1]").at_point(0), parse_field("V[b2]").at_point(1));
    auto r = wick_ope(spec, parse_field("p"), v2);
    CHECK(r.at(1, 0) == v2.scaled(P("-2*b1")));
    CHECK(r.at(1, 1) == v2.scaled(P("-2*b2")));
    auto t = wick_ope(spec, stress(ParamScalar(0)), v2);
    CHECK(t.at(2, 0) == v2.scaled(P("b1^2")));
    CHECK(t.at(1, 0) == derivative(v2, 0) + v2.scaled(P("2*b1*b2/(w1 - w2)")));
  }
}
