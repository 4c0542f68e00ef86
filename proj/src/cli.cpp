#include "scr/cli.hpp"

#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "scr/screenings.hpp"
#include "scr/suites.hpp"
#include "scr/virasoro.hpp"
#include "scr/wakimoto.hpp"

namespace scr::cli {

using fields::FieldExpr;
using nlohmann::json;

namespace {

// "r*name" for a rational multiple r.
std::string multiple(const Rational& r, const std::string& name) {
  if (r == 1) return name;
  if (r == -1) return "-" + name;
  if (r.get_num() == 1) return name + "/" + r.get_den().get_str();
  if (r.get_num() == -1) return "-" + name + "/" + r.get_den().get_str();
  return ParamScalar(r).str() + "*" + name;
}

std::optional<Rational> ratio(const FieldExpr& e, const FieldExpr& m) {
  if (e.is_zero() || m.is_zero()) return std::nullopt;
  const auto& [term, c] = *e.terms().begin();
  auto it = m.terms().find(term);
  if (it == m.terms().end()) return std::nullopt;
  ParamScalar r = c / it->second;
  if (!r.is_constant() || !(e == m.scaled(r))) return std::nullopt;
  return r.constant_value();
}

std::string coefficient_str(const FieldExpr& e, const std::vector<NamedField>& named, const std::vector<NamedScalar>& scalars) {
  if (auto s = e.scalar_value()) {
    for (const auto& n : scalars) {
      if (n.value.is_constant() || n.value.is_zero()) continue;
      ParamScalar r = *s / n.value;
      if (r.is_constant()) return multiple(r.constant_value(), n.name);
    }
    std::string str = s->str();
    bool compound = str.find_first_of(" ", 1) != std::string::npos;
    return compound ? "(" + str + ")" : str;
  }
  for (const auto& n : named) {
    if (auto r = ratio(e, n.field)) return multiple(*r, n.name + "(w)");
    if (auto r = ratio(e, fields::derivative(n.field))) return multiple(*r, n.name + "'(w)");
  }
  std::string str = e.str();
  return e.terms().size() > 1 ? "(" + str + ")(w)" : str + "(w)";
}

}  // namespace

std::string format_ope(const fields::OpeResult& ope, const std::vector<NamedField>& named, const std::vector<NamedScalar>& scalars) {
  std::string out;
  for (auto it = ope.poles.rbegin(); it != ope.poles.rend(); ++it) {
    const auto& [key, e] = *it;
    if (e.is_zero()) continue;
    std::string w = key.first == 0 ? "w" : "w" + std::to_string(key.first);
    std::string den = "/(z-" + w + ")" + (key.second > 1 ? "^" + std::to_string(key.second) : "");
    std::string num = coefficient_str(e, named, scalars);
    bool neg = num[0] == '-';
    if (neg) num.erase(0, 1);
    if (num.find('/') != std::string::npos && num.front() != '(') num = "(" + num + ")";
    if (out.empty()) out = (neg ? "-" : "") + num + den;
    else out += (neg ? " - " : " + ") + num + den;
  }
  return out.empty() ? "0" : out;
}

namespace {

struct Options {
  std::vector<std::string> params;
  std::optional<int> energy, charge, mode, height, laurent;
  std::optional<uint64_t> seed;
  std::string out, config;
  bool negative = false, fast = false;
  unsigned threads = 0;
};

void add_common(CLI::App* c, Options& o) {
  c->add_option("--param", o.params, "Bind a parameter: name=value or name=generic")->allow_extra_args(false);
  c->add_option("--energy-max", o.energy, "Energy window");
  c->add_option("--charge-max", o.charge, "Charge window");
  c->add_option("--mode-max", o.mode, "Mode window |n|");
  c->add_option("--height-max", o.height, "Weight height window");
  c->add_option("--laurent-window", o.laurent, "Laurent window");
  c->add_option("--seed", o.seed, "Seed for randomized specializations");
  c->add_option("--out", o.out, "Report path; a JSON sidecar is written next to it");
  c->add_flag("--negative-controls", o.negative, "Run seeded-bug variants");
  c->add_flag("--fast", o.fast, "Randomized-specialization mode");
  c->add_option("--config", o.config, "key=value configuration file");
}

suites::SuiteConfig make_config(const Options& o, const std::string& suite) {
  suites::SuiteConfig cfg;
  if (!o.config.empty()) cfg.merge_file(o.config);
  if (!suite.empty()) cfg.set("suite", suite);
  for (const auto& p : o.params) cfg.bind(p);
  auto win = [&](const char* key, const std::optional<int>& v) {
    if (v) cfg.set(key, std::to_string(*v));
  };
  win("energy-max", o.energy);
  win("charge-max", o.charge);
  win("mode-max", o.mode);
  win("height-max", o.height);
  win("laurent-window", o.laurent);
  if (o.seed) cfg.seed = *o.seed;
  if (!o.out.empty()) cfg.out = o.out;
  cfg.negative_controls = cfg.negative_controls || o.negative;
  cfg.fast = cfg.fast || o.fast;
  return cfg;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

std::string sidecar_path(const std::string& out) { return out + ".json"; }

// ---------------------------------------------------------------- verify

int cmd_verify(const Options& o, const std::string& suite, std::ostream& out) {
  suites::SuiteConfig cfg = make_config(o, suite);
  auto rep = suites::run_checks(suites::suite_checks(cfg.suite, cfg), cfg, o.threads);
  out << rep.text();
  if (!cfg.out.empty()) {
    write_file(cfg.out, rep.text());
    write_file(sidecar_path(cfg.out), rep.json().dump(2) + "\n");
  }
  return rep.ok() ? 0 : 1;
}

// ---------------------------------------------------------------- ope

int cmd_ope(const Options& o, const std::string& left, const std::vector<std::string>& rights, bool wakimoto, std::ostream& out) {
  suites::SuiteConfig cfg = make_config(o, "");
  fields::Macros macros;
  std::vector<NamedField> named;
  std::vector<NamedScalar> scalars;
  std::shared_ptr<const fock::OscSpec> spec;
  std::vector<std::string> notes;
  if (wakimoto) {
    wak::Wakimoto w(wak::AffineParams{cfg.param("nu"), cfg.param("chi")});
    spec = wak::wakimoto_spec();
    for (char x : {'E', 'H', 'F'}) named.push_back({std::string(1, x), w.current(x)});
    named.push_back({"S", w.screening()});
    named.push_back({"SF", w.screening_seed()});
    for (const auto& n : named) macros[n.name] = n.field;
    macros["k"] = FieldExpr::scalar(w.level());
    scalars.push_back({"k", w.level()});
    notes.push_back("k = " + w.level().str());
  } else {
    ParamScalar a0 = cfg.param("alpha0");
    spec = vir::boson();
    named.push_back({"T", vir::stress_tensor(a0)});
    macros["T"] = named.back().field;
    ParamScalar c = vir::VirasoroParams::free(a0).central_charge();
    macros["c"] = FieldExpr::scalar(c);
    scalars.push_back({"c", c});
    notes.push_back("c = " + c.str());
  }
  FieldExpr l = fields::parse_field(left, macros);
  for (const auto& r : rights) {
    FieldExpr rf = fields::parse_field(r, macros);
    std::string line = format_ope(fields::wick_ope(*spec, l, rf), named, scalars);
    out << line << "\n";
    for (const auto& n : notes) {
      std::string name = n.substr(0, n.find(' '));
      bool used = false;
      for (size_t p = line.find(name); p != std::string::npos; p = line.find(name, p + 1)) {
        bool before = p == 0 || !std::isalnum(static_cast<unsigned char>(line[p - 1]));
        bool after = p + name.size() >= line.size() || !std::isalnum(static_cast<unsigned char>(line[p + name.size()]));
        used = used || (before && after);
      }
      if (used) out << "  where " << n << "\n";
    }
  }
  return 0;
}

// ---------------------------------------------------------------- intertwiner

json vec_json(const Vec& v, const std::function<std::string(const BasisKey&)>& key) {
  json j = json::object();
  for (const auto& [k, c] : v) j[key(k)] = c.str();
  return j;
}

json residual_json(const dg::Residual& r) {
  return {{"status", r.ok ? "PASS" : "FAIL"}, {"checked", r.checked}, {"witness", r.witness}};
}

struct IntertwinerArgs {
  std::string lambda, type = "A2", word = "1,2", label, alpha, beta;
  int p = 1;
};

std::vector<int> int_list(const std::string& s, const char* what) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw suites::ConfigError(std::string(what) + ": expected comma-separated integers, got '" + s + "'");
    }
  }
  return out;
}

ParamScalar scalar_arg(const std::string& text, const char* what) {
  if (text.empty()) throw suites::ConfigError(std::string(what) + " is required");
  return ParamScalar::parse(text);
}

int report_intertwiner(std::ostream& out, const Options& o, json j, const dg::Residual& hom) {
  out << "homomorphism: " << (hom.ok ? "PASS" : "FAIL") << " (checked=" << hom.checked << ")\n";
  if (!hom.ok) out << "  witness: " << hom.witness << "\n";
  if (!o.out.empty()) write_file(o.out, j.dump(2) + "\n");
  return hom.ok ? 0 : 1;
}

int cmd_intertwiner(const Options& o, const std::string& target, const IntertwinerArgs& a, std::ostream& out) {
  suites::SuiteConfig cfg = make_config(o, "");
  const int h = cfg.height(4);
  json j = {{"target", target}};
  if (target == "toy") {
    ParamScalar l = scalar_arg(a.lambda, "--lambda");
    if (!l.is_integer() || l.constant_value() < 0) throw screen::ScreeningError("non-integral exponent: lambda = " + l.str());
    int li = static_cast<int>(l.constant_value().get_num().get_si());
    screen::ScreeningChain chain({screen::ToyScreening::standard(l)}, li + h + 2);
    auto it = screen::residue_intertwiner(chain, h);
    std::string img = chain.target().vec_str(it.image_of_vacuum);
    if (img.size() >= 1 && img.back() == 'v') img += "_" + std::to_string(li - 1);
    out << "toy intertwiner M(" << -li - 1 << ") -> M(" << li - 1 << "), lambda = " << li << "\n";
    out << "exponent: " << it.exponents.at(0) << "\nimage: " << img << "\n";
    j["lambda"] = li;
    j["exponents"] = it.exponents;
    j["image"] = img;
    j["homomorphism"] = residual_json(it.homomorphism);
    json blocks = json::array();
    for (const auto& k : chain.source().basis_upto(h))
      blocks.push_back({{"source", key_str(k)}, {"image", vec_json(screen::apply_intertwiner(chain, it.exponents, basis_vec(k)), key_str)}});
    j["blocks"] = blocks;
    return report_intertwiner(out, o, j, it.homomorphism);
  }
  if (target == "kacmoody") {
    auto q = std::make_shared<km::SerreQuotient>(km::CartanData::finite(a.type), h + 8);
    std::vector<int> word;
    for (int x : int_list(a.word, "--word")) word.push_back(x - 1);
    std::vector<ParamScalar> label;
    for (int x : int_list(a.label, "--label")) label.push_back(ParamScalar(x));
    if (static_cast<int>(label.size()) != q->cartan().rank) throw suites::ConfigError("--label needs one entry per simple root");
    auto kc = screen::make_km_chain(q, word, label, h + 1);
    auto it = screen::residue_intertwiner(*kc.chain, h);
    std::string img = kc.modules[0]->vec_str(it.image_of_vacuum);
    out << a.type << " intertwiner along word " << a.word << "\nexponents:";
    for (int e : it.exponents) out << ' ' << e;
    out << "\nimage: " << img << "\n";
    j["type"] = a.type;
    j["word"] = a.word;
    j["exponents"] = it.exponents;
    j["image"] = img;
    j["homomorphism"] = residual_json(it.homomorphism);
    json blocks = json::array();
    for (const auto& k : kc.chain->source().basis_upto(std::min(h, 2)))
      blocks.push_back({{"source", key_str(k)},
                        {"image", vec_json(screen::apply_intertwiner(*kc.chain, it.exponents, basis_vec(k)), key_str)}});
    j["blocks"] = blocks;
    return report_intertwiner(out, o, j, it.homomorphism);
  }
  if (target == "ff") {
    ParamScalar al = scalar_arg(a.alpha, "--alpha"), be = scalar_arg(a.beta, "--beta");
    const int n = cfg.mode(4), e = cfg.energy(3);
    auto it = vir::ff_intertwiner(a.p, al, be, e, n);
    std::string img = it.source.vec_str(it.image_of_vacuum);
    out << "Feigin-Fuchs intertwiner p = " << a.p << ", alpha = " << al.str() << ", beta = " << be.str() << "\nimage of vacuum: " << img << "\n";
    j["p"] = a.p;
    j["alpha"] = al.str();
    j["beta"] = be.str();
    j["image"] = img;
    j["homomorphism"] = residual_json(it.homomorphism);
    json blocks = json::array();
    for (const auto& [k, v] : it.op.block(it.source, it.source.basis_upto(std::min(e, 2), 0)))
      blocks.push_back({{"source", key_str(k)}, {"image", vec_json(v, key_str)}});
    j["blocks"] = blocks;
    return report_intertwiner(out, o, j, it.homomorphism);
  }
  if (target == "wakimoto") {
    wak::Wakimoto w(wak::AffineParams{cfg.param("nu"), cfg.param("chi")});
    const int n = cfg.mode(2), e = cfg.energy(2), c = cfg.charge(1);
    auto it = wak::wakimoto_intertwiner(w, e, c, n);
    std::string img = it.target.vec_str(it.image_of_vacuum);
    out << "Wakimoto intertwiner S_" << it.mode << " : W(chi) -> W(chi - 2)\nimage of vacuum: " << img << "\n";
    j["mode"] = it.mode;
    j["image"] = img;
    j["homomorphism"] = residual_json(it.homomorphism);
    json blocks = json::array();
    for (const auto& [k, v] : it.op.block(it.source, it.source.basis_upto(std::min(e, 2), c)))
      blocks.push_back({{"source", key_str(k)}, {"image", vec_json(v, key_str)}});
    j["blocks"] = blocks;
    return report_intertwiner(out, o, j, it.homomorphism);
  }
  throw suites::ConfigError("unknown intertwiner target '" + target + "'");
}

// ---------------------------------------------------------------- cohomology

int cmd_cohomology(const Options& o, const std::string& kappa, std::ostream& out) {
  suites::SuiteConfig cfg = make_config(o, "");
  ParamScalar k = scalar_arg(kappa, "--kappa");
  int w = cfg.laurent(10);
  auto h = dg::one_var_cohomology(k, -w, w);
  out << "kappa = " << k.str() << ", window z^" << -w << " .. z^" << w << "\n";
  out << "dims: (" << h.h0 << "," << h.h1 << ")\n";
  for (int e : h.h0_exponents) out << "H^0: z^" << e << "\n";
  for (int e : h.h1_exponents) out << "H^1: z^" << e << " dz/z\n";
  if (h.inconclusive) out << "inconclusive: -kappa lies outside the window\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Screening operators and free-field checks"};
  app.set_version_flag("--version", suites::kVersion);
  app.require_subcommand(1);
  Options o;

  std::string suite;
  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->add_option("suite", suite, "toy, kacmoody, dgcartan, virasoro, vertex, screening7, wakimoto, screening9, generic11 or all")->required();
  verify->add_option("--threads", o.threads, "Worker threads (default: hardware concurrency)");
  add_common(verify, o);

  std::string left;
  std::vector<std::string> rights;
  bool wakimoto = false;
  auto* ope = app.add_subcommand("ope", "Singular part of a Wick OPE");
  ope->add_option("left", left, "Left expression, at z")->required();
  ope->add_option("right", rights, "Right expressions, at w")->required();
  ope->add_flag("--wakimoto", wakimoto, "Use the beta-gamma plus boson system with E, H, F, S, SF and k defined");
  add_common(ope, o);

  std::string target;
  IntertwinerArgs ia;
  auto* inter = app.add_subcommand("intertwiner", "Residue intertwiners");
  inter->add_option("target", target, "toy, kacmoody, ff or wakimoto")->required();
  inter->add_option("--lambda", ia.lambda, "toy: highest weight");
  inter->add_option("--type", ia.type, "kacmoody: A1, A2, B2 or G2");
  inter->add_option("--word", ia.word, "kacmoody: reduced word, 1-based, comma separated");
  inter->add_option("--label", ia.label, "kacmoody: integral label, comma separated");
  inter->add_option("--p", ia.p, "ff: number of screenings");
  inter->add_option("--alpha", ia.alpha, "ff: module label");
  inter->add_option("--beta", ia.beta, "ff: screening exponent");
  add_common(inter, o);

  std::string kappa;
  auto* coh = app.add_subcommand("cohomology", "One-variable twisted de Rham cohomology");
  coh->add_option("--kappa", kappa, "Exponent of z^kappa")->required();
  add_common(coh, o);

  std::vector<std::string> argv_store{"screenings"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    std::ostringstream o_out, o_err;
    int code = app.exit(e, o_out, o_err);
    out << o_out.str();
    err << o_err.str();
    return code == 0 ? 0 : 2;
  }

  try {
    if (*verify) return cmd_verify(o, suite, out);
    if (*ope) return cmd_ope(o, left, rights, wakimoto, out);
    if (*inter) return cmd_intertwiner(o, target, ia, out);
    if (*coh) return cmd_cohomology(o, kappa, out);
  } catch (const suites::ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace scr::cli
