// Acceptance run: one PASS/FAIL line per criterion on stdout, check details on stderr.
// Classifiers are built once, in memory, and shared between criteria.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <thread>

#include "segal/suites.hpp"

using namespace segal;
using namespace segal::suites;

namespace {

struct Criterion {
  int number;
  std::string title;
  double budget_seconds;  // 0 when untimed
  std::function<std::vector<Report>()> run;
};

}  // namespace

int main() {
  const int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  ClassifierStore store(jobs);
  Options defaults;
  defaults.params = Params{1, 1, 2, 2};

  // Cheap criteria first, so the timed ones include their own classifier builds.
  const std::vector<Criterion> criteria{
      {8, "monotone counts and epi-mono bijection", 0, [&] { return std::vector{simplex_suite(defaults)}; }},
      {7, "left fibrations over poset nerves match functor counts", 0, [&] { return std::vector{posets_suite(defaults)}; }},
      {1, "Grothendieck round trip at k-bound 2, fiber bound 2", 60, [&] { return std::vector{roundtrip_suite(defaults, store)}; }},
      {5, "pullback stability of every fibration class at k-bound 2", 0, [&] { return std::vector{stability_suite(defaults, store)}; }},
      {2, "classifier well-formedness for all four variants", 0, [&] { return std::vector{classifier_suite(defaults, store)}; }},
      {3, "universal fibration pulls back to Sigma G", 0, [&] { return std::vector{universal_suite(defaults, store)}; }},
      {4, "classifying bijection against brute force", 300, [&] { return std::vector{bijection_suite(defaults, store)}; }},
      {6, "subclassifier fullness", 0, [&] { return std::vector{subclassifier_suite(defaults, store)}; }},
      {9, "pointed diagonal squares", 0, [&] { return std::vector{diagonal_suite(defaults, store)}; }},
  };

  std::vector<std::pair<int, std::string>> lines;
  bool all = true;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<Report> reports;
    std::string error;
    try {
      reports = c.run();
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool passed = error.empty();
    std::size_t cases = 0;
    for (const auto& r : reports) {
      passed = passed && r.passed();
      for (const auto& check : r.checks) {
        cases += check.cases;
        std::cerr << "  [" << c.number << "] " << (check.passed ? "PASS" : "FAIL") << "  " << check.name << " [" << check.tag
                  << "]: " << check.detail << '\n';
        if (!check.witness.is_null()) std::cerr << "        witness " << io::dump(check.witness, -1);
      }
    }
    std::string note;
    if (!error.empty()) note = "; error: " + error;
    if (c.budget_seconds > 0 && seconds >= c.budget_seconds) {
      passed = false;
      note += "; over the " + std::to_string(static_cast<int>(c.budget_seconds)) + " s budget";
    }
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.1f s", seconds);
    std::string line = std::string(passed ? "PASS" : "FAIL") + " criterion " + std::to_string(c.number) + ": " + c.title + " (" +
                       std::to_string(cases) + " cases, " + timing + note + ")";
    std::cout << line << std::endl;
    lines.emplace_back(c.number, line);
    all = all && passed;
  }
  // Summary in criterion order.
  std::sort(lines.begin(), lines.end());
  std::cout << "\nsummary\n";
  for (const auto& [n, line] : lines) std::cout << line << '\n';
  std::cout << (all ? "ALL PASS" : "SOME FAILED") << std::endl;
  return all ? 0 : 1;
}
