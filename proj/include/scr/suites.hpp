// Verification suites: named checks with anchors, a configuration with
// truncation windows and parameter bindings, and the report they produce.
#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "scr/forms.hpp"
#include "scr/scalar.hpp"

namespace scr::suites {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kVersion = "0.1.0";

// Formal parameters a configuration may bind.
const std::vector<std::string>& parameter_names();
// toy kacmoody dgcartan virasoro vertex screening7 wakimoto screening9 generic11
const std::vector<std::string>& suite_names();

struct Windows {
  std::optional<int> energy, charge, mode, height, laurent;
};

struct SuiteConfig {
  std::string suite = "all";
  Windows windows;
  Bindings params;  // absent names stay symbolic unless `fast`
  uint64_t seed = 1;
  std::string out;
  bool negative_controls = false;
  bool fast = false;  // draw unbound parameters at random from `seed`

  // Keys as in the command line without dashes: param, energy-max, charge-max,
  // mode-max, height-max, laurent-window, seed, out, negative-controls, fast.
  void set(const std::string& key, const std::string& value);
  void bind(const std::string& assignment);  // "name=value" or "name=generic"
  static SuiteConfig from_text(const std::string& text);
  void merge_file(const std::string& path);

  ParamScalar param(const std::string& name) const;
  ParamScalar param_or(const std::string& name, const ParamScalar& fallback) const;
  int energy(int fallback) const { return windows.energy.value_or(fallback); }
  int charge(int fallback) const { return windows.charge.value_or(fallback); }
  int mode(int fallback) const { return windows.mode.value_or(fallback); }
  int height(int fallback) const { return windows.height.value_or(fallback); }
  int laurent(int fallback) const { return windows.laurent.value_or(fallback); }
  std::string echo() const;
};

enum class Status { Pass, Fail, Skipped, ExpectedFail };
std::string status_str(Status s);

struct CheckRecord {
  std::string suite, check_id, anchor;
  Status status = Status::Pass;
  std::string witness;
  long checked = 0;
  long millis = 0;
  bool negative = false;
};

struct VerificationReport {
  std::string version = kVersion;
  std::string config;
  std::vector<CheckRecord> records;

  int count(Status s) const;
  bool ok() const { return count(Status::Fail) == 0; }
  std::string text(bool timings = true) const;
  nlohmann::json json() const;
};

// A negative control passes as EXPECTED-FAIL when its residual is nonzero.
struct Check {
  std::string suite, id, anchor;
  bool negative = false;
  std::function<dg::Residual()> run;
};

std::vector<Check> suite_checks(const std::string& suite, const SuiteConfig& cfg);
VerificationReport run_checks(const std::vector<Check>& checks, const SuiteConfig& cfg, unsigned threads = 0);
VerificationReport cmd_verify(const SuiteConfig& cfg);

}  // namespace scr::suites
