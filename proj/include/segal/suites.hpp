#pragma once

// Verification suites shared by the workbench CLI and the acceptance binary.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "segal/classifier.hpp"
#include "segal/io.hpp"

namespace segal::suites {

struct Check {
  std::string name;
  std::string tag;  // the property being checked, e.g. "pullback-stability"
  bool passed = false;
  std::size_t cases = 0;
  std::string detail;
  io::Json witness;  // null when passed
  double seconds = 0;
};

struct Report {
  std::string suite;
  Params params;
  std::vector<Check> checks;
  bool passed() const;
};

// Builds classifiers once per (variant, params). With a cache directory, enumerated levels
// are stored as catalog JSON and read back on later runs; operators are always rebuilt.
class ClassifierStore {
 public:
  explicit ClassifierStore(int jobs = 1, std::optional<std::filesystem::path> cache_dir = std::nullopt);
  // Reads SEGAL_WORKBENCH_CACHE when set.
  static ClassifierStore from_environment(int jobs = 1);

  const ClassifierComplex& get(Variant v, const Params& params, bool operators = true);
  const PointedClassifier& pointed(Variant v, const Params& params, int r_bound);
  int jobs() const { return jobs_; }

 private:
  using Key = std::tuple<int, int, int, int, int, bool>;
  std::optional<std::vector<ClassifierLevel>> load(Variant v, const Params& params) const;
  void save(const ClassifierComplex& c) const;

  int jobs_;
  std::optional<std::filesystem::path> cache_dir_;
  std::map<Key, std::unique_ptr<ClassifierComplex>> built_;
  std::map<std::tuple<int, int, int, int, int, int>, std::unique_ptr<PointedClassifier>> pointed_;
};

struct Options {
  Params params;                   // P, Q, K, m; K is raised per variant to its minimum
  std::optional<Variant> variant;  // all four when empty
  std::uint64_t seed = 0;
  bool corrupt_fixture = false;    // prepend a check on a deliberately broken presheaf
};

const std::vector<std::string>& suite_names();  // without "all"
bool is_suite(const std::string& name);

// Params for a variant: K raised to the variant's minimum.
Params variant_params(Variant v, Params params);

// Runs one suite or "all" (one report per suite).
std::vector<Report> run(const std::string& suite, const Options& options, ClassifierStore& store);
Report run_suite(const std::string& suite, const Options& options, ClassifierStore& store);

// Individual suites.
Report simplex_suite(const Options& o);
Report roundtrip_suite(const Options& o, ClassifierStore& store);
Report stability_suite(const Options& o, ClassifierStore& store);
Report classifier_suite(const Options& o, ClassifierStore& store);
Report universal_suite(const Options& o, ClassifierStore& store);
Report bijection_suite(const Options& o, ClassifierStore& store);
Report subclassifier_suite(const Options& o, ClassifierStore& store);
Report posets_suite(const Options& o);
Report diagonal_suite(const Options& o, ClassifierStore& store);

// The built-in fixture (chain nerve over a point) with one face entry moved; fails validation.
Check corrupt_fixture_check(std::uint64_t seed);

io::Json report_json(const Report& r);
std::string report_text(const Report& r);

}  // namespace segal::suites
