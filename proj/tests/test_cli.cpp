#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "scr/cli.hpp"
#include "scr/suites.hpp"

using namespace scr;
using namespace scr::suites;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

bool contains(const std::string& s, const std::string& what) { return s.find(what) != std::string::npos; }

Check constant(std::string id, bool ok, bool negative = false) {
  return {"unit", std::move(id), "anchor", negative, [ok] {
            dg::Residual r;
            r.ok = ok;
            r.checked = 1;
            if (!ok) r.witness = "seeded";
            return r;
          }};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("ope examples") {
    CHECK(first_line(run({"ope", "p", "p"}).out) == "2/(z-w)^2");
    Run tt = run({"ope", "T", "T"});
    CHECK(first_line(tt.out) == "(c/2)/(z-w)^4 + 2*T(w)/(z-w)^2 + T'(w)/(z-w)");
    CHECK(contains(tt.out, "c = -24*alpha0^2 + 1"));
    Run ef = run({"ope", "E", "F", "--wakimoto"});
    CHECK(ef.code == 0);
    CHECK(first_line(ef.out) == "k/(z-w)^2 + H(w)/(z-w)");
    CHECK(first_line(run({"ope", "H", "S", "--wakimoto"}).out) == "0");
    CHECK(first_line(run({"ope", "E", "S", "--wakimoto"}).out) == "0");
    CHECK(first_line(run({"ope", "H", "SF", "--wakimoto"}).out) == "-2*SF(w)/(z-w)");
    CHECK(first_line(run({"ope", "F", "F", "--wakimoto"}).out) == "0");
    // several right-hand expressions give one line each
    Run many = run({"ope", "p", "p", "D(p)"});
    CHECK(many.out == "2/(z-w)^2\n4/(z-w)^3\n");
  }

  TEST_CASE("ope parse errors carry a position") {
    Run bad = run({"ope", "p", ":p"});
    CHECK(bad.code == 1);
    CHECK(contains(bad.err, "parse error at"));
  }

  TEST_CASE("ope with a bound parameter") {
    Run tt = run({"ope", "T", "T", "--param", "alpha0=1/2"});
    CHECK(first_line(tt.out) == "-(5/2)/(z-w)^4 + 2*T(w)/(z-w)^2 + T'(w)/(z-w)");
  }

  TEST_CASE("toy intertwiner") {
    Run two = run({"intertwiner", "toy", "--lambda", "2"});
    CHECK(two.code == 0);
    CHECK(contains(two.out, "image: F^2 v_1"));
    CHECK(contains(two.out, "homomorphism: PASS"));
    Run half = run({"intertwiner", "toy", "--lambda", "1/2"});
    CHECK(half.code == 1);
    CHECK(contains(half.err, "non-integral exponent"));
  }

  TEST_CASE("Kac-Moody, Feigin-Fuchs and Wakimoto intertwiners") {
    Run a2 = run({"intertwiner", "kacmoody", "--type", "A2", "--word", "1,2", "--label", "1,0"});
    CHECK(a2.code == 0);
    CHECK(contains(a2.out, "exponents: 1 1"));
    CHECK(contains(a2.out, "image: F2 F1 v"));
    CHECK(run({"intertwiner", "kacmoody", "--type", "A2", "--label", "1"}).code == 2);

    auto path = (std::filesystem::temp_directory_path() / "scr_ff_blocks.json").string();
    Run ff = run({"intertwiner", "ff", "--p", "1", "--alpha", "-1/2", "--beta", "1", "--out", path});
    CHECK(ff.code == 0);
    std::ifstream in(path);
    auto j = nlohmann::json::parse(in);
    CHECK(j["homomorphism"]["status"] == "PASS");
    CHECK(j["blocks"].size() > 1);
    CHECK(run({"intertwiner", "ff", "--p", "1", "--alpha", "1/3", "--beta", "1"}).code == 1);

    Run wk = run({"intertwiner", "wakimoto", "--param", "nu=1", "--param", "chi=2"});
    CHECK(wk.code == 0);
    CHECK(contains(wk.out, "S_-2"));
    Run wk_bad = run({"intertwiner", "wakimoto", "--param", "nu=2", "--param", "chi=1"});
    CHECK(wk_bad.code == 1);
    CHECK(contains(wk_bad.err, "non-integral exponent"));
  }

  TEST_CASE("cohomology") {
    Run three = run({"cohomology", "--kappa", "3"});
    CHECK(contains(three.out, "dims: (1,1)"));
    CHECK(contains(three.out, "H^0: z^-3\n"));
    CHECK(contains(run({"cohomology", "--kappa", "1/2"}).out, "dims: (0,0)"));
    Run zero = run({"cohomology", "--kappa", "0"});
    CHECK(contains(zero.out, "dims: (1,1)"));
    CHECK(contains(zero.out, "H^0: z^0\n"));
    CHECK(contains(run({"cohomology", "--kappa", "-12", "--laurent-window", "5"}).out, "inconclusive"));
  }

  TEST_CASE("verify toy and the report files") {
    auto path = (std::filesystem::temp_directory_path() / "scr_toy_report.txt").string();
    Run r = run({"verify", "toy", "--negative-controls", "--out", path});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "PASS          toy.intertwiner  ["));
    CHECK(contains(r.out, "EXPECTED-FAIL toy.perturbed-screening"));
    CHECK(contains(r.out, "0 FAIL"));
    std::ifstream in(path + ".json");
    auto j = nlohmann::json::parse(in);
    REQUIRE(j["checks"].size() == 7);
    for (const auto& c : j["checks"])
      for (const char* field : {"check_id", "anchor", "status", "witness", "millis"}) CHECK(c.contains(field));
    CHECK(j["summary"]["fail"] == 0);
  }

  TEST_CASE("configuration errors") {
    CHECK(run({"verify", "toy", "--param", "foo=1"}).code == 2);
    CHECK(run({"verify", "toy", "--param", "lambda"}).code == 2);
    CHECK(run({"verify", "toy", "--mode-max", "0"}).code == 2);
    CHECK(run({"verify", "nope"}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"verify", "toy", "--config", "/nonexistent/cfg"}).code == 2);
    CHECK_THROWS_AS(SuiteConfig::from_text("energy-max = -1"), ConfigError);
    CHECK_THROWS_AS(SuiteConfig::from_text("colour = red"), ConfigError);
    CHECK_THROWS_AS(SuiteConfig::from_text("just words"), ConfigError);
  }

  TEST_CASE("config file") {
    auto cfg = SuiteConfig::from_text("# windows\nsuite = toy\nmode-max = 3\nheight-max=4\nparam = lambda=5\nseed = 9\nfast = true\n");
    CHECK(cfg.suite == "toy");
    CHECK(cfg.mode(8) == 3);
    CHECK(cfg.height(8) == 4);
    CHECK(cfg.energy(6) == 6);
    CHECK(cfg.param("lambda") == ParamScalar(5));
    CHECK(cfg.seed == 9);
    CHECK(cfg.fast);

    auto path = (std::filesystem::temp_directory_path() / "scr_cfg.txt").string();
    std::ofstream(path) << "mode-max = 2\nheight-max = 3\n";
    Run r = run({"verify", "toy", "--config", path, "--height-max", "4"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "mode-max=2 height-max=4"));
  }

  TEST_CASE("fast mode draws deterministic rational specializations") {
    SuiteConfig a, b, c;
    a.fast = b.fast = c.fast = true;
    c.seed = 2;
    CHECK(a.param("nu").is_constant());
    CHECK(a.param("nu") == b.param("nu"));
    CHECK_FALSE(a.param("nu").is_zero());
    CHECK((a.param("nu") != c.param("nu") || a.param("chi") != c.param("chi")));
    a.bind("nu=3");
    CHECK(a.param("nu") == ParamScalar(3));
    SuiteConfig sym;
    CHECK_FALSE(sym.param("nu").is_constant());
  }

  TEST_CASE("reports are deterministic apart from timings") {
    SuiteConfig cfg;
    cfg.suite = "dgcartan";
    cfg.negative_controls = true;
    CHECK(cmd_verify(cfg).text(false) == cmd_verify(cfg).text(false));
  }

  TEST_CASE("exit-code contract and negative controls") {
    SuiteConfig cfg;
    cfg.negative_controls = true;
    auto rep = run_checks({constant("good", true), constant("control", false, true)}, cfg);
    CHECK(rep.ok());
    CHECK(rep.records[1].status == Status::ExpectedFail);
    // a control that passes is reported as a failure
    rep = run_checks({constant("vacuous", true, true)}, cfg);
    CHECK_FALSE(rep.ok());
    CHECK(rep.records[0].status == Status::Fail);
    rep = run_checks({constant("bad", false)}, cfg);
    CHECK_FALSE(rep.ok());
    CHECK(rep.records[0].witness == "seeded");
    Check thrower{"unit", "throws", "anchor", false, []() -> dg::Residual { throw std::runtime_error("boom"); }};
    rep = run_checks({thrower}, cfg);
    CHECK(rep.records[0].status == Status::Fail);
    CHECK(rep.records[0].witness == "error: boom");
    // controls are skipped unless requested
    cfg.negative_controls = false;
    rep = run_checks({constant("control", false, true)}, cfg);
    CHECK(rep.records[0].status == Status::Skipped);
    CHECK(rep.ok());
  }

  TEST_CASE("every suite carries a negative control") {
    SuiteConfig cfg;
    for (const auto& s : suite_names()) {
      auto checks = suite_checks(s, cfg);
      CHECK_MESSAGE(std::any_of(checks.begin(), checks.end(), [](const Check& c) { return c.negative; }), s);
      CHECK_MESSAGE(std::any_of(checks.begin(), checks.end(), [](const Check& c) { return !c.negative; }), s);
    }
  }
}
