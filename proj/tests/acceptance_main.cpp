// Runs every suite with negative controls and prints one line per acceptance criterion.
#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "scr/suites.hpp"

using namespace scr::suites;

namespace {

struct SuiteRun {
  VerificationReport report;
  double seconds = 0;
};

struct Criterion {
  int number;
  std::string title;
  std::vector<std::string> suites;
  double budget;
  std::string note;
};

bool ends_with(const std::string& s, const std::string& tail) {
  return s.size() >= tail.size() && s.compare(s.size() - tail.size(), tail.size(), tail) == 0;
}

std::string first_failure(const VerificationReport& rep) {
  for (const auto& r : rep.records)
    if (r.status == Status::Fail) return r.check_id + ": " + r.witness;
  return {};
}

void print(int number, bool ok, const std::string& title, const std::string& detail) {
  std::printf("criterion %2d %s  %s  %s\n", number, ok ? "PASS" : "FAIL", title.c_str(), detail.c_str());
}

}  // namespace

int main() {
  std::map<std::string, SuiteRun> runs;
  for (const auto& name : suite_names()) {
    SuiteConfig cfg;
    cfg.suite = name;
    cfg.negative_controls = true;
    auto start = std::chrono::steady_clock::now();
    SuiteRun run;
    run.report = run_checks(suite_checks(name, cfg), cfg);
    run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cerr << name << ": " << run.report.records.size() << " records, " << run.seconds << " s\n";
    runs[name] = std::move(run);
  }

  const std::vector<Criterion> criteria = {
      {1, "toy model", {"toy"}, 5, ""},
      {2, "Kac-Moody screenings", {"kacmoody"}, 60, ""},
      {3, "differential graded calculus", {"dgcartan"}, 10, ""},
      {4, "Virasoro from a boson", {"virasoro"}, 30, ""},
      {5, "vertex operators", {"vertex"}, 120, ""},
      {6, "Feigin-Fuchs screenings", {"screening7"}, 120, ""},
      {7, "Wakimoto realization", {"wakimoto", "screening9"}, 180, ""},
      {8, "generic descent", {"generic11"}, 30, "conjecture - evidence only"},
  };

  bool all = true;
  for (const auto& c : criteria) {
    bool ok = true;
    double seconds = 0;
    std::string failure;
    for (const auto& s : c.suites) {
      const auto& run = runs.at(s);
      seconds += run.seconds;
      if (!run.report.ok()) {
        ok = false;
        if (failure.empty()) failure = first_failure(run.report);
      }
    }
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.1f s (budget %.0f s)", seconds, c.budget);
    std::string detail = timing;
    if (seconds > c.budget) {
      ok = false;
      detail += " over budget";
    }
    if (!c.note.empty()) detail += "  [" + c.note + "]";
    if (!failure.empty()) detail += "  first failure " + failure;
    print(c.number, ok, c.title, detail);
    all = all && ok;
  }

  {
    int checked = 0;
    std::string failure;
    for (const char* s : {"virasoro", "vertex", "screening7", "wakimoto"})
      for (const auto& r : runs.at(s).report.records)
        if (ends_with(r.check_id, "ope-vs-modes")) {
          ++checked;
          if (r.status != Status::Pass && failure.empty()) failure = r.check_id + ": " + r.witness;
        }
    bool ok = checked > 0 && failure.empty();
    print(9, ok, "OPE and mode brackets agree",
          std::to_string(checked) + " records" + (failure.empty() ? "" : "  first failure " + failure));
    all = all && ok;
  }

  {
    int controls = 0;
    std::string failure;
    for (const auto& [name, run] : runs) {
      int here = 0;
      for (const auto& r : run.report.records)
        if (r.negative) {
          ++here;
          if (r.status != Status::ExpectedFail && failure.empty()) failure = r.check_id + ": " + r.witness;
        }
      if (here == 0 && failure.empty()) failure = name + " has no negative control";
      controls += here;
    }
    bool ok = failure.empty();
    print(10, ok, "negative controls are caught",
          std::to_string(controls) + " controls" + (failure.empty() ? "" : "  first failure " + failure));
    all = all && ok;
  }
  return all ? 0 : 1;
}
