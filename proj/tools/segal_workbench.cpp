// segal-workbench: run verification suites, export classifier catalogs, classify presheaf maps.
//
// Exit status: 0 pass, 1 check failure, 2 usage or parse error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "segal/fibration.hpp"
#include "segal/io.hpp"
#include "segal/suites.hpp"

namespace {

using segal::io::Json;

constexpr int kMaxFiber = 3;
constexpr int kMaxBase = 2;
constexpr int kMaxK = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

segal::Params parse_bounds(const std::string& text, int m) {
  segal::Params p;
  p.m = m;
  std::istringstream in(text);
  std::string part;
  std::vector<int> values;
  while (std::getline(in, part, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stoi(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw UsageError("--bounds expects P,Q,K as integers, got \"" + text + "\"");
    }
  }
  if (values.size() != 3) throw UsageError("--bounds expects three values P,Q,K, got \"" + text + "\"");
  p.P = values[0];
  p.Q = values[1];
  p.K = values[2];
  if (p.P < 0 || p.Q < 0 || p.K < 0 || p.m < 0) throw UsageError("bounds and --max-fiber must be non-negative");
  if (p.P > kMaxBase || p.Q > kMaxBase) throw UsageError("P and Q are capped at " + std::to_string(kMaxBase));
  if (p.K > kMaxK) throw UsageError("K is capped at " + std::to_string(kMaxK));
  if (p.m > kMaxFiber) throw UsageError("--max-fiber " + std::to_string(p.m) + " exceeds the safety cap " + std::to_string(kMaxFiber));
  return p;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + out_path);
  out << text;
  if (!out) throw UsageError("cannot write " + out_path);
}

int cmd_verify(const std::string& suite, const segal::suites::Options& options, int jobs, const std::string& format, const std::string& out) {
  if (!segal::suites::is_suite(suite)) throw UsageError("unknown suite \"" + suite + "\"");
  auto store = segal::suites::ClassifierStore::from_environment(jobs);
  auto reports = segal::suites::run(suite, options, store);
  bool passed = true;
  for (const auto& r : reports) passed = passed && r.passed();
  if (format == "json") {
    Json list = Json::array();
    for (const auto& r : reports) list.push_back(segal::suites::report_json(r));
    emit(segal::io::dump(Json{{"command", "verify"}, {"suite", suite}, {"passed", passed}, {"reports", std::move(list)}}), out);
  } else {
    std::string text;
    for (const auto& r : reports) text += segal::suites::report_text(r);
    text += std::string(passed ? "PASS" : "FAIL") + "\n";
    emit(text, out);
  }
  return passed ? 0 : 1;
}

int cmd_enumerate(segal::Variant v, const segal::Params& params, int jobs, const std::string& out) {
  segal::check_params(v, params);
  auto c = segal::build_classifier(v, params, jobs);
  emit(segal::io::dump(segal::io::catalog_json(c)), out);
  return 0;
}

int cmd_check(const std::string& in, const std::string& format, const std::string& out) {
  if (in.empty()) throw UsageError("check needs --in");
  auto map = segal::io::map_from_json(segal::io::read_file(in));
  if (map.domain().arity() != 3) throw UsageError("check expects a map of arity-3 presheaves");
  auto finest = segal::finest_class(map);
  if (format == "json") {
    Json j{{"command", "check"}, {"class", finest.cls ? Json(segal::class_name(*finest.cls)) : Json(nullptr)}};
    if (finest.next_failure) j["next_failure"] = segal::io::to_json(*finest.next_failure, 3);
    emit(segal::io::dump(j), out);
  } else {
    std::string text = "class " + std::string(finest.cls ? segal::class_name(*finest.cls) : "none") + "\n";
    if (finest.next_failure) {
      const auto& v = *finest.next_failure;
      text += std::string("not ") + segal::class_name(v.cls);
      if (v.witness) {
        const auto& w = *v.witness;
        text += ": " + w.condition + " at " + segal::index_str(w.index, 3) + " (" + std::to_string(w.lhs_count) + " vs " +
                std::to_string(w.rhs_count) + ")";
        if (!w.element.empty()) text += " element " + w.element;
      }
      text += "\n";
    }
    emit(text, out);
  }
  return finest.cls ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-truncation workbench for fibrations of simplicial spaces and their classifiers"};
  std::string command = "verify";
  std::string suite = "all";
  std::string variant_text;
  std::string bounds = "1,1,2";
  int max_fiber = 2;
  std::string in;
  std::string out;
  std::string format = "text";
  int jobs = 1;
  std::uint64_t seed = 0;
  bool corrupt = false;
  app.add_option("--command", command, "verify | enumerate | check")->check(CLI::IsMember({"verify", "enumerate", "check"}));
  app.add_option("--suite", suite, "suite for verify: simplex | roundtrip | classifier | universal | bijection | subclassifier | stability | "
                                   "posets | diagonal | all");
  app.add_option("--variant", variant_text, "SSpaces | Seg | CSS | Spaces (verify: all when omitted; enumerate: SSpaces)");
  app.add_option("--bounds", bounds, "P,Q,K");
  app.add_option("--max-fiber", max_fiber, "largest fiber size m");
  app.add_option("--in", in, "input presheaf map JSON (check)");
  app.add_option("--out", out, "output file (default stdout)");
  app.add_option("--format", format, "json | text")->check(CLI::IsMember({"json", "text"}));
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "seed for shuffled inputs and the corrupted fixture");
  app.add_flag("--corrupt-fixture", corrupt, "test mode: add a check on a deliberately broken fixture");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    auto params = parse_bounds(bounds, max_fiber);
    std::optional<segal::Variant> variant;
    if (!variant_text.empty()) variant = segal::parse_variant(variant_text);
    if (command == "verify") {
      if (variant) segal::check_params(*variant, params);
      segal::suites::Options options{params, variant, seed, corrupt};
      return cmd_verify(suite, options, jobs, format, out);
    }
    if (command == "enumerate") return cmd_enumerate(variant.value_or(segal::Variant::SSpaces), params, jobs, out);
    return cmd_check(in, format, out);
  } catch (const segal::io::ParseError& e) {
    std::cerr << "segal-workbench: parse error: " << e.what() << '\n';
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "segal-workbench: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    // ParamError and unknown variant names.
    std::cerr << "segal-workbench: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "segal-workbench: " << e.what() << '\n';
    return 2;
  }
}
