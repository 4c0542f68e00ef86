#include "doctest.h"

#include "scr/virasoro.hpp"

using namespace scr;
using namespace scr::vir;
using fock::b;

namespace {

ParamScalar P(const char* s) { return ParamScalar::parse(s); }

void require_ok(const Residual& r) {
  INFO(r.witness);
  CHECK(r.ok);
  CHECK(r.checked > 0);
}

}  // namespace

TEST_SUITE("virasoro") {
  TEST_CASE("screening parameters") {
    auto p = VirasoroParams::screening(P("beta"));
    CHECK(p.conformal_weight(P("beta")) == ParamScalar(1));
    CHECK(p.central_charge() == ParamScalar(1) - ParamScalar(24) * p.alpha0 * p.alpha0);
    auto minus = ParamScalar(-1) / P("beta");
    CHECK(p.conformal_weight(minus) == ParamScalar(1));
    CHECK_THROWS_AS(VirasoroParams::screening(ParamScalar(0)), VirasoroError);
  }

  TEST_CASE("L_0 on the vacuum and the central term") {
    ParamScalar a0 = P("alpha0"), al = P("alpha");
    Virasoro vir(a0);
    FockSpace f = ff_module(al, 8);
    Vec v = basis_vec(FockSpace::vacuum());
    CHECK(vir.L(0).apply(f, v) == scaled(v, al * al - ParamScalar(2) * a0 * al));
    Vec lhs = sub(vir.L(2).apply(f, vir.L(-2).apply(f, v)), vir.L(-2).apply(f, vir.L(2).apply(f, v)));
    Vec rhs = scaled(vir.L(0).apply(f, v), ParamScalar(4));
    CHECK(sub(lhs, rhs) == scaled(v, VirasoroParams::free(a0).central_charge() / ParamScalar(2)));
    CHECK_THROWS_AS(vir.L(-9).apply(f, v), fock::FockError);
  }

  TEST_CASE("Virasoro by the OPE route") {
    require_ok(verify_virasoro_ope(P("alpha0")));
    CHECK_FALSE(verify_virasoro_ope(P("alpha0"), true).ok);
  }

  TEST_CASE("Virasoro by the mode route") {
    ParamScalar a0 = P("alpha0");
    Virasoro vir(a0);
    FockSpace f = ff_module(P("alpha"), 16);
    require_ok(verify_virasoro_modes(vir, VirasoroParams::free(a0).central_charge(), f, 6, 5));

    Virasoro broken(a0, true);
    FockSpace g = ff_module(P("alpha"), 6);
    CHECK_FALSE(verify_virasoro_modes(broken, VirasoroParams::free(a0).central_charge(), g, 2, 2).ok);
  }

  TEST_CASE("Heisenberg-Virasoro brackets") {
    ParamScalar a0 = P("alpha0");
    Virasoro vir(a0);
    FockSpace f = ff_module(P("alpha"), 16);
    require_ok(check_heisenberg_virasoro(vir, f, 4, 6));
  }

  TEST_CASE("vertex operator examples") {
    ParamScalar al = P("alpha"), be = P("beta");
    FockSpace f = ff_module(al, 6);
    Vec v = basis_vec(FockSpace::vacuum());
    CHECK(vertex_mode(be, 0).target(f) == ff_module(al + be, 6));
    CHECK(vertex_mode(be, 0).apply(f, v) == v);
    CHECK(vertex_mode(be, -1).apply(f, v) == scaled(f.apply(b(-1), v), be));
    for (int n = -3; n <= 3; ++n)
      for (const auto& [k, c] : vertex_mode(be, n).apply(f, v)) CHECK(FockSpace::energy(k) == -n);
  }

  TEST_CASE("vertex commutation laws") {
    ParamScalar al = P("alpha"), be = P("beta"), a0 = P("alpha0");
    FockSpace f = ff_module(al, 16);
    require_ok(check_heisenberg_vertex(be, f, 6, 5));
    require_ok(check_vertex_halves(be, f, 4, 4));
    Virasoro vir(a0);
    require_ok(check_L_vertex(vir, be, f, 6, 5));
    FockSpace g = ff_module(al, 6);
    CHECK_FALSE(check_L_vertex(vir, be, g, 2, 2, ParamScalar(1)).ok);
  }

  TEST_CASE("screening specialization of the vertex law") {
    ParamScalar be = P("beta"), al = P("alpha");
    Virasoro vir(VirasoroParams::screening(be).alpha0);
    require_ok(check_L_vertex(vir, be, ff_module(al, 8), 3, 2));
  }

  TEST_CASE("product formula and its corollary") {
    ParamScalar b1 = P("b1"), b2 = P("b2");
    FockSpace f = ff_module(P("alpha"), 14);
    require_ok(product_formula_check(b1, b2, f, 2, 6));
    require_ok(product_corollary_check(b1, b2, ff_module(P("alpha"), 10), 2, 3));
  }

  TEST_CASE("multi-point normal products") {
    ParamScalar al = P("alpha"), b1 = P("b1"), b2 = P("b2");
    FockSpace f = ff_module(al, 6);
    MultiVertex one({b1});
    CHECK(one.coefficient(f, basis_vec({}), {-1}) == vertex_mode(b1, -1).apply(f, basis_vec({})));
    MultiVertex two({b1, b2});
    Vec vac = basis_vec(FockSpace::vacuum());
    CHECK(two.coefficient(f, vac, {0, 0}) == vac);
    CHECK(two.modes().label_shift() == std::vector<ParamScalar>{b1 + b2});
    require_ok(check_multi_symmetry({b1, b2}, f, 3));
    require_ok(check_multi_symmetry({b1, b2, P("b3")}, ff_module(al, 4), 2));
    auto conn = two.connection(al);
    CHECK(conn.var[0] == ParamScalar(2) * al * b1);
    CHECK(conn.pair.at({0, 1}) == ParamScalar(2) * b1 * b2);
  }

  TEST_CASE("L_n on two-point products") {
    ParamScalar a0 = P("alpha0");
    Virasoro vir(a0);
    FockSpace f = ff_module(P("alpha"), 8);
    require_ok(check_6_12(vir, {P("b1"), P("b2")}, f, 3, -3, 3));
    CHECK_FALSE(check_6_12(vir, {P("b1"), P("b2")}, f, 2, 0, 0, true).ok);
  }

  TEST_CASE("L_n on three-point products") {
    ParamScalar a0 = P("alpha0");
    Virasoro vir(a0);
    require_ok(check_6_12(vir, {P("b1"), P("b2"), P("b3")}, ff_module(P("alpha"), 5), 2, -1, 1));
  }

  TEST_CASE("mixed screening sequence") {
    ParamScalar be = P("beta");
    Virasoro vir(VirasoroParams::screening(be).alpha0);
    require_ok(check_6_12(vir, {be, ParamScalar(-1) / be}, ff_module(P("alpha"), 6), 2, -1, 1));
  }

  TEST_CASE("one-point cocycle via the OPE") {
    require_ok(check_cocycle_ope(P("beta"), 3));
  }

  TEST_CASE("one-point screening cochain") {
    auto c = screening_complex(P("beta"), P("alpha"), 1, 8, 4);
    auto keys = c.source.basis_upto(3, 0);
    std::vector<int> elems{-2, -1, 0, 1, 2};
    require_ok(check_invariance(c, elems, keys));
    require_ok(dg::total_cocycle_check(c.system, elems, keys));
  }

  TEST_CASE("two-point screening cochain") {
    auto c = screening_complex(P("beta"), P("alpha"), 2, 7, 3);
    auto keys = c.source.basis_upto(2, 0);
    std::vector<int> elems{-1, 0, 1, 2};
    require_ok(check_invariance(c, elems, keys));
    require_ok(dg::total_cocycle_check(c.system, elems, keys));

    auto bad = screening_complex(P("beta"), P("alpha"), 2, 7, 3, true);
    CHECK_FALSE(dg::total_cocycle_check(bad.system, elems, keys).ok);
  }

  TEST_CASE("three-point screening cochain at a specialization") {
    auto c = screening_complex(ParamScalar::rational(3, 2), ParamScalar::rational(2, 7), 3, 5, 2);
    auto keys = c.source.basis_upto(1, 0);
    std::vector<int> elems{-1, 0, 1};
    require_ok(check_invariance(c, elems, keys));
    require_ok(dg::total_cocycle_check(c.system, elems, keys));
  }

  TEST_CASE("Feigin-Fuchs intertwiners") {
    // 2 alpha beta = -1 picks the V_0 mode
    auto one = ff_intertwiner(1, ParamScalar::rational(-1, 2), ParamScalar(1), 4, 4);
    require_ok(one.homomorphism);
    CHECK(one.image_of_vacuum == basis_vec(FockSpace::vacuum()));
    CHECK_THROWS_AS(ff_intertwiner(1, ParamScalar::rational(1, 3), ParamScalar(1), 2, 2), VirasoroError);
    CHECK_THROWS_AS(ff_intertwiner(2, ParamScalar(0), ParamScalar::rational(1, 2), 2, 2), VirasoroError);

    auto two = ff_intertwiner(2, ParamScalar::rational(-3, 2), ParamScalar(1), 3, 4);
    require_ok(two.homomorphism);
    CHECK_FALSE(two.image_of_vacuum.empty());
    auto two_b = ff_intertwiner(2, ParamScalar::rational(-1, 4), ParamScalar(2), 2, 4);
    require_ok(two_b.homomorphism);
  }
}
