#include "doctest.h"

#include "scr/wakimoto.hpp"

using namespace scr;
using namespace scr::wak;
using fields::parse_field;

namespace {

ParamScalar P(const char* s) { return ParamScalar::parse(s); }

void require_ok(const Residual& r) {
  INFO(r.witness);
  CHECK(r.ok);
  CHECK(r.checked > 0);
}

std::shared_ptr<const Wakimoto> generic() { return std::make_shared<const Wakimoto>(AffineParams::generic()); }

}  // namespace

TEST_SUITE("wakimoto") {
  TEST_CASE("currents and data file") {
    auto w = generic();
    CHECK(w->current('E') == parse_field("beta"));
    CHECK(w->current('H') == parse_field("2 :gamma beta: + nu p"));
    CHECK(w->current('F') == parse_field("-:gamma gamma beta: - nu :gamma p: - (nu^2 - 2) D(gamma)"));
    CHECK(w->screening() == parse_field("-:beta V[1/nu]:"));
    CHECK(w->screening_seed() == parse_field("-nu^2 V[1/nu]"));
    CHECK(w->companion_mode({'E', 2}, 0).apply(w->module(4), basis_vec({})).empty());

    auto file = load_screening_data(std::string(SCR_DATA_DIR) + "/sl2_screening.txt");
    auto builtin = sl2_screening_data();
    CHECK(file.screening == builtin.screening);
    CHECK(file.currents.size() == 3);
    for (const auto& [name, e] : builtin.currents) CHECK(file.currents.at(name) == e);
    CHECK(file.seeds.at("F") == builtin.seeds.at("F"));
    CHECK_THROWS_AS(parse_screening_data("current E beta"), WakimotoError);
    CHECK_THROWS_AS(parse_screening_data("current E = beta"), WakimotoError);
    CHECK_THROWS_AS(parse_screening_data("screening S = V[1]\nseed X = p"), WakimotoError);
    CHECK_THROWS_AS(Wakimoto(AffineParams{ParamScalar(0), P("chi")}), WakimotoError);
  }

  TEST_CASE("affine brackets") {
    ParamScalar k = P("k");
    auto b = affine_bracket({'E', 2}, {'F', -2}, k);
    REQUIRE(b.size() == 2);
    CHECK(b[0].second == AffElem{'H', 0});
    CHECK(b[1].first == ParamScalar(2) * k);
    CHECK(affine_bracket({'H', 1}, {'H', -1}, k).at(0).first == ParamScalar(2) * k);
    CHECK(affine_bracket({'E', 1}, AffElem::central(), k).empty());
  }

  TEST_CASE("current OPEs") {
    auto w = generic();
    require_ok(verify_current_opes(*w));
    const auto& spec = *wakimoto_spec();
    CHECK(wick_ope(spec, w->current('H'), w->current('H')).str() == "(2*nu^2 - 4)/(z-w)^2");
    CHECK(wick_ope(spec, w->current('F'), w->current('F')).poles.empty());
  }

  TEST_CASE("current modes") {
    auto w = generic();
    FockSpace src = w->module(9);
    require_ok(verify_current_modes(*w, src, 3, 2, 3));
    CHECK_FALSE(verify_current_modes(*w, w->module(4), 1, 1, 1, ParamScalar(1)).ok);
  }

  TEST_CASE("OPE and mode brackets agree on the currents") {
    auto w = generic();
    FockSpace src = w->module(8);
    auto keys = src.basis_upto(2, 1);
    for (char x : {'E', 'H', 'F'})
      for (char y : {'E', 'H', 'F'}) require_ok(fields::check_ope_against_modes(*wakimoto_spec(), w->current(x), w->current(y), src, keys, 3));
    require_ok(fields::check_ope_against_modes(*wakimoto_spec(), w->current('F'), w->screening(), src, keys, 3));
    require_ok(fields::check_ope_against_modes(*wakimoto_spec(), w->current('F'), w->screening_seed(), src, keys, 3));
  }

  TEST_CASE("screening current OPEs") {
    auto w = generic();
    require_ok(check_screening_family(*w, P("a")));
    require_ok(check_screening_family(*w, ParamScalar(1) / P("nu")));
    require_ok(check_screening_opes(*w));
    require_ok(check_seed_opes(*w));
    require_ok(check_companion_opes(*w));
    // the vertex derivative identity behind the total-derivative form
    CHECK(fields::derivative(parse_field("V[a]")) == parse_field("-a :p V[a]:"));
  }

  TEST_CASE("screening modes") {
    auto w = generic();
    FockSpace src = w->module(11);
    require_ok(check_screening_modes(*w, src, 3, 2, 3, 3));
    FockSpace tgt = w->screening_mode(0).target(src);
    CHECK(tgt.zero_modes()[0] == -(P("chi") - ParamScalar(2)) / P("nu"));
  }

  TEST_CASE("companion modes") {
    auto w = generic();
    FockSpace src = w->module(9);
    std::vector<AffElem> elems{{'E', 0}, {'E', 1}, {'H', -1}, {'H', 0}, {'F', 0}, {'F', -1}, {'F', 1}, AffElem::central()};
    require_ok(check_companion_modes(*w, elems, 2, src, src.basis_upto(2, 1)));
  }

  TEST_CASE("one-point cochain") {
    auto c = wakimoto_complex(generic(), 1, 7, 3);
    std::vector<AffElem> elems{{'E', 0}, {'H', 1}, {'F', 0}, {'F', -1}, {'F', 1}, AffElem::central()};
    require_ok(dg::total_cocycle_check(c.system, elems, c.source.basis_upto(2, 1)));
  }

  TEST_CASE("two-point cochain") {
    auto w = std::make_shared<const Wakimoto>(AffineParams{P("nu"), ParamScalar::rational(3, 5)});
    std::vector<AffElem> elems{{'E', 0}, {'H', 0}, {'F', 0}, {'F', 1}, {'F', -1}};
    auto c = wakimoto_complex(w, 2, 6, 2);
    auto keys = c.source.basis_upto(1, 1);
    require_ok(dg::total_cocycle_check(c.system, elems, keys));
    CHECK_FALSE(dg::total_cocycle_check(wakimoto_complex(w, 2, 6, 2, true).system, elems, keys).ok);
    CHECK_FALSE(dg::total_cocycle_check(wakimoto_complex(w, 2, 6, 2, false, true).system, elems, keys).ok);
  }

  TEST_CASE("descent along bracket trees") {
    auto w = generic();
    auto pairs = standard_tree_pairs(w->level());
    CHECK(pairs.size() >= 10);
    FockSpace src = w->module(9);
    auto keys = src.basis_upto(2, 1);
    require_ok(check_descent(TreeCompanions(w), pairs, 2, src, keys));
    CHECK_FALSE(check_descent(TreeCompanions(w, true), pairs, 2, src, keys).ok);
  }
}
