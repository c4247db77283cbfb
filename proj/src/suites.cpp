#include "segal/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "segal/fibration.hpp"
#include "segal/grothendieck.hpp"
#include "segal/oracle.hpp"
#include "segal/parallel.hpp"

namespace segal::suites {

namespace {

using clock_type = std::chrono::steady_clock;

const std::vector<Variant> kAll{Variant::SSpaces, Variant::Seg, Variant::CSS, Variant::Spaces};

std::vector<Variant> selected(const Options& o) { return o.variant ? std::vector<Variant>{*o.variant} : kAll; }

std::string at_str(int p, int q) { return "(" + std::to_string(p) + "," + std::to_string(q) + ")"; }

std::string params_str(const Params& p) {
  return "P=" + std::to_string(p.P) + " Q=" + std::to_string(p.Q) + " K=" + std::to_string(p.K) + " m=" + std::to_string(p.m);
}

// Counts cases and keeps the first failure.
struct Tally {
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string first;
  io::Json witness;
  std::mutex mutex;

  void fail(std::string detail, io::Json w) {
    std::lock_guard lock(mutex);
    if (failures++ == 0) {
      first = std::move(detail);
      witness = std::move(w);
    }
  }
};

class Timed {
 public:
  Timed(std::string name, std::string tag) : start_(clock_type::now()) {
    check_.name = std::move(name);
    check_.tag = std::move(tag);
  }
  Check finish(Tally& t, const std::string& note = {}) {
    check_.cases = t.cases;
    check_.passed = t.failures == 0;
    if (check_.passed) {
      check_.detail = std::to_string(t.cases) + " cases" + (note.empty() ? "" : "; " + note);
    } else {
      check_.detail = std::to_string(t.failures) + " of " + std::to_string(t.cases) + " cases failed; first: " + t.first;
      check_.witness = t.witness;
    }
    check_.seconds = std::chrono::duration<double>(clock_type::now() - start_).count();
    return check_;
  }

 private:
  Check check_;
  clock_type::time_point start_;
};

std::vector<MonotoneMap> maps_into(int target, int max_source) {
  std::vector<MonotoneMap> out;
  for (int n = 0; n <= max_source; ++n)
    for (auto& f : enumerate_monotone(n, target)) out.push_back(std::move(f));
  return out;
}

io::Json violation_json(const Violation& v, int arity) {
  return io::Json{{"identity", v.identity}, {"direction", v.direction}, {"index", index_str(v.index, arity)}, {"element", v.element}};
}

io::Json functor_witness(int p, int q, std::size_t element) { return io::Json{{"p", p}, {"q", q}, {"element", element}}; }

// alpha with its elements shuffled inside every cell; the map is unchanged up to isomorphism.
PresheafMap shuffled(const PresheafMap& alpha, std::mt19937_64& rng) {
  const auto& x = alpha.domain();
  std::vector<std::vector<std::uint32_t>> order(x.cell_count());
  std::vector<std::vector<std::uint32_t>> pos(x.cell_count());
  for (std::size_t f = 0; f < x.cell_count(); ++f) {
    order[f].resize(x.size_at(f));
    std::iota(order[f].begin(), order[f].end(), 0u);
    std::shuffle(order[f].begin(), order[f].end(), rng);
    pos[f].resize(order[f].size());
    for (std::uint32_t i = 0; i < order[f].size(); ++i) pos[f][order[f][i]] = i;
  }
  LabelTable labels;
  std::vector<std::uint32_t> images;
  for (std::size_t f = 0; f < x.cell_count(); ++f)
    for (auto old : order[f]) {
      labels.add(x.label_at(f, old));
      images.push_back(alpha.image_at(f, old));
    }
  TruncatedPresheaf y(x.arity(), x.bounds(), x.sizes(), std::move(labels));
  for (std::size_t f = 0; f < x.cell_count(); ++f) {
    Index at = x.index(f);
    for (int d = 0; d < x.arity(); ++d)
      for (int slot = 0; slot < x.generator_count_at(d, f); ++slot) {
        auto g = generator_at(at[static_cast<std::size_t>(d)], x.bounds()[static_cast<std::size_t>(d)], slot);
        auto tf = x.flat(shift(at, d, g.target_level()));
        auto src = x.action_slot(d, f, slot);
        auto dst = y.action_slot_mut(d, f, slot);
        for (std::uint32_t i = 0; i < src.size(); ++i) dst[i] = pos[tf][src[order[f][i]]];
      }
  }
  return PresheafMap(std::make_shared<const TruncatedPresheaf>(std::move(y)), alpha.codomain_ptr(), std::move(images));
}

std::size_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::vector<std::size_t> row(static_cast<std::size_t>(n) + 1, 0);
  row[0] = 1;
  for (int i = 1; i <= n; ++i)
    for (int j = i; j >= 1; --j) row[static_cast<std::size_t>(j)] += row[static_cast<std::size_t>(j) - 1];
  return row[static_cast<std::size_t>(k)];
}

// Every position when n <= limit, otherwise `limit` distinct positions in increasing order.
constexpr std::size_t kPointedSample = 2000;

std::vector<std::size_t> sample_positions(std::size_t n, std::size_t limit, std::mt19937_64& rng, std::size_t& sampled) {
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  if (n <= limit) return all;
  std::vector<std::size_t> out;
  std::sample(all.begin(), all.end(), std::back_inserter(out), limit, rng);
  sampled += out.size();
  return out;
}

std::string cache_name(Variant v, const Params& p) {
  return std::string(variant_name(v)) + "-P" + std::to_string(p.P) + "-Q" + std::to_string(p.Q) + "-K" + std::to_string(p.K) + "-m" +
         std::to_string(p.m) + ".json";
}

}  // namespace

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

// ---- store

ClassifierStore::ClassifierStore(int jobs, std::optional<std::filesystem::path> cache_dir)
    : jobs_(std::max(1, jobs)), cache_dir_(std::move(cache_dir)) {}

ClassifierStore ClassifierStore::from_environment(int jobs) {
  const char* dir = std::getenv("SEGAL_WORKBENCH_CACHE");
  if (dir == nullptr || *dir == '\0') return ClassifierStore(jobs);
  return ClassifierStore(jobs, std::filesystem::path(dir));
}

std::optional<std::vector<ClassifierLevel>> ClassifierStore::load(Variant v, const Params& params) const {
  if (!cache_dir_) return std::nullopt;
  auto path = *cache_dir_ / cache_name(v, params);
  if (!std::filesystem::exists(path)) return std::nullopt;
  try {
    auto levels = io::catalog_levels_from_json(io::read_file(path.string()));
    if (levels.variant != v || !(levels.params == params)) return std::nullopt;
    return std::move(levels.levels);
  } catch (const std::exception&) {
    // A stale or damaged entry is rebuilt.
    return std::nullopt;
  }
}

void ClassifierStore::save(const ClassifierComplex& c) const {
  if (!cache_dir_) return;
  std::error_code ec;
  std::filesystem::create_directories(*cache_dir_, ec);
  auto path = *cache_dir_ / cache_name(c.variant(), c.params());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) return;
    out << io::dump(io::catalog_json(c), -1);
    if (!out) return;
  }
  std::filesystem::rename(tmp, path, ec);
}

const ClassifierComplex& ClassifierStore::get(Variant v, const Params& params, bool operators) {
  const Key key{static_cast<int>(v), params.P, params.Q, params.K, params.m, operators};
  if (auto it = built_.find(key); it != built_.end()) return *it->second;
  if (!operators) {
    // A build with operators serves both.
    const Key full{static_cast<int>(v), params.P, params.Q, params.K, params.m, true};
    if (auto it = built_.find(full); it != built_.end()) return *it->second;
  }
  std::unique_ptr<ClassifierComplex> c;
  const Key bare{static_cast<int>(v), params.P, params.Q, params.K, params.m, false};
  if (auto it = built_.find(bare); operators && it != built_.end()) {
    c = std::make_unique<ClassifierComplex>(classifier_from_levels(v, params, it->second->levels(), jobs_, true));
  } else if (auto levels = load(v, params)) {
    c = std::make_unique<ClassifierComplex>(classifier_from_levels(v, params, std::move(*levels), jobs_, operators));
  } else {
    c = std::make_unique<ClassifierComplex>(build_classifier(v, params, jobs_, operators));
    save(*c);
  }
  return *built_.emplace(key, std::move(c)).first->second;
}

const PointedClassifier& ClassifierStore::pointed(Variant v, const Params& params, int r_bound) {
  const std::tuple<int, int, int, int, int, int> key{static_cast<int>(v), params.P, params.Q, params.K, params.m, r_bound};
  if (auto it = pointed_.find(key); it != pointed_.end()) return *it->second;
  auto p = std::make_unique<PointedClassifier>(build_pointed(get(v, params, true), r_bound));
  return *pointed_.emplace(key, std::move(p)).first->second;
}

// ---- names

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"simplex",       "roundtrip", "classifier", "universal", "bijection",
                                              "subclassifier", "stability", "posets",     "diagonal"};
  return names;
}

bool is_suite(const std::string& name) {
  return name == "all" || std::find(suite_names().begin(), suite_names().end(), name) != suite_names().end();
}

Params variant_params(Variant v, Params params) {
  params.K = std::max(params.K, variant_min_k(v));
  return params;
}

// ---- fixture

Check corrupt_fixture_check(std::uint64_t seed) {
  Timed timer("fixture: chain nerve over a point, one face entry moved", "simplicial-identities");
  Tally t;
  auto x = oracle::over_point(oracle::nerve(oracle::poset_category({2, {{0, 1}}}), 2)).domain();
  // Candidate entries: (cell, slot, element) of face tables in direction k with a second target available.
  struct Entry {
    std::size_t cell;
    int slot;
    std::uint32_t element;
  };
  std::vector<Entry> entries;
  for (std::size_t cell = 0; cell < x.cell_count(); ++cell)
    for (int slot = 0; slot < x.generator_count_at(0, cell); ++slot) {
      auto g = generator_at(x.index(cell)[0], x.bounds()[0], slot);
      if (x.size(shift(x.index(cell), 0, g.target_level())) < 2) continue;
      for (std::uint32_t e = 0; e < x.size_at(cell); ++e) entries.push_back({cell, slot, e});
    }
  std::mt19937_64 rng(seed);
  const auto offset = entries.empty() ? 0 : static_cast<std::size_t>(rng() % entries.size());
  std::optional<Violation> found;
  for (std::size_t i = 0; i < entries.size() && !found; ++i) {
    const auto& en = entries[(offset + i) % entries.size()];
    TruncatedPresheaf y = x;
    auto g = generator_at(y.index(en.cell)[0], y.bounds()[0], en.slot);
    const auto targets = y.size(shift(y.index(en.cell), 0, g.target_level()));
    auto table = y.action_slot_mut(0, en.cell, en.slot);
    table[en.element] = (table[en.element] + 1) % targets;
    found = validate(y);
  }
  t.cases = 1;
  if (found) t.fail("validation rejects the fixture: " + found->str(x.arity()), violation_json(*found, x.arity()));
  return timer.finish(t);
}

// ---- suites

Report simplex_suite(const Options& o) {
  Report r{"simplex", o.params, {}};
  {
    Timed timer("monotone maps [n] -> [m] for n, m <= 5", "monotone-count");
    Tally t;
    for (int n = 0; n <= 5; ++n)
      for (int m = 0; m <= 5; ++m) {
        ++t.cases;
        auto maps = enumerate_monotone(n, m);
        const auto expected = binomial(n + m + 1, n + 1);
        bool ok = maps.size() == expected && monotone_count(n, m) == expected;
        for (std::size_t i = 0; ok && i < maps.size(); ++i) {
          ok = maps[i].source() == n && maps[i].target() == m && monotone_rank(maps[i]) == i;
          for (int j = 1; ok && j <= n; ++j) ok = maps[i](j - 1) <= maps[i](j);
          if (ok && i > 0) ok = maps[i - 1] < maps[i];
        }
        if (!ok)
          t.fail("n=" + std::to_string(n) + " m=" + std::to_string(m) + ": " + std::to_string(maps.size()) + " maps, expected " +
                     std::to_string(expected),
                 io::Json{{"n", n}, {"m", m}, {"count", maps.size()}, {"expected", expected}});
      }
    r.checks.push_back(timer.finish(t));
  }
  {
    Timed timer("epi-mono factorization for n, m <= 3", "epi-mono-bijection");
    Tally t;
    for (int n = 0; n <= 3; ++n)
      for (int m = 0; m <= 3; ++m) {
        ++t.cases;
        std::set<std::pair<MonotoneMap, MonotoneMap>> seen;
        std::string problem;
        for (const auto& f : enumerate_monotone(n, m)) {
          auto [s, i] = epi_mono_factor(f);
          if (!s.is_surjective() || !i.is_injective() || s.source() != n || i.target() != m || !(compose(i, s) == f))
            problem = "factorization of " + f.str() + " is not epi then mono";
          else if (!seen.insert({s, i}).second)
            problem = "two maps share the factorization of " + f.str();
          if (!problem.empty()) break;
        }
        // Composable (surjection, injection) pairs through [k], counted independently.
        std::size_t pairs = 0;
        for (int k = 0; k <= std::min(n, m); ++k) pairs += binomial(n, k) * binomial(m + 1, k + 1);
        if (problem.empty() && seen.size() != pairs)
          problem = std::to_string(seen.size()) + " factorizations for " + std::to_string(pairs) + " composable pairs";
        if (problem.empty() && pairs != monotone_count(n, m)) problem = "pair count differs from the number of maps";
        if (!problem.empty()) t.fail("n=" + std::to_string(n) + " m=" + std::to_string(m) + ": " + problem, io::Json{{"n", n}, {"m", m}});
      }
    r.checks.push_back(timer.finish(t));
  }
  return r;
}

Report roundtrip_suite(const Options& o, ClassifierStore& store) {
  Report r{"roundtrip", o.params, {}};
  const auto& c = store.get(Variant::SSpaces, o.params, false);
  const auto b = o.params.functor_bounds();
  for (int p = 0; p <= o.params.P; ++p)
    for (int q = 0; q <= o.params.Q; ++q) {
      const auto& level = c.level(p, q);
      Timed forward("F(Sigma G) = G over " + at_str(p, q), "sigma-then-fiber");
      Timed backward("Sigma(F(alpha)) = alpha over " + at_str(p, q) + ", elements shuffled", "fiber-then-sigma");
      Tally tf;
      Tally tb;
      std::mt19937_64 rng(o.seed ^ (static_cast<std::uint64_t>(p) << 32 | static_cast<std::uint64_t>(q)));
      for (std::size_t i = 0; i < level.size(); ++i) {
        auto g = decode(c.catalogue(), p, q, b, level.code(i));
        ++tf.cases;
        if (auto d = roundtrip_check(g)) tf.fail("element " + std::to_string(i) + ": " + *d, functor_witness(p, q, i));
        ++tb.cases;
        auto alpha = shuffled(sum_construction(g), rng);
        if (auto d = roundtrip_check(alpha, p, q)) tb.fail("element " + std::to_string(i) + ": " + *d, functor_witness(p, q, i));
      }
      r.checks.push_back(forward.finish(tf));
      r.checks.push_back(backward.finish(tb));
    }
  return r;
}

Report stability_suite(const Options& o, ClassifierStore& store) {
  Report r{"stability", o.params, {}};
  const auto& c = store.get(Variant::SSpaces, o.params, false);
  const auto b = o.params.functor_bounds();
  std::vector<FibrationClass> classes;
  for (auto cls : {FibrationClass::ReedyLeft, FibrationClass::SegalCoCartesian, FibrationClass::CoCartesian, FibrationClass::Left})
    if (minimum_k_bound(cls) <= o.params.K) classes.push_back(cls);
  std::vector<Tally> tallies(classes.size());
  std::vector<Timed> timers;
  for (auto cls : classes)
    timers.emplace_back(std::string("class ") + class_name(cls) + " kept under pullback along base maps", "pullback-stability");
  std::vector<std::size_t> holders(classes.size(), 0);
  for (int p = 0; p <= o.params.P; ++p)
    for (int q = 0; q <= o.params.Q; ++q) {
      struct Along {
        MonotoneMap d1, d2;
        PresheafMap map;
      };
      std::vector<Along> along;
      for (const auto& d1 : maps_into(p, o.params.P))
        for (const auto& d2 : maps_into(q, o.params.Q)) along.push_back({d1, d2, base_map(d1, d2, b)});
      const auto& level = c.level(p, q);
      for (std::size_t i = 0; i < level.size(); ++i) {
        auto sigma = sum_construction(decode(c.catalogue(), p, q, b, level.code(i)));
        std::vector<std::size_t> held;
        for (std::size_t k = 0; k < classes.size(); ++k)
          if (check_class(classes[k], sigma).holds) held.push_back(k);
        for (auto k : held) ++holders[k];
        if (held.empty()) continue;
        for (const auto& a : along) {
          auto pb = pullback_positional(sigma, a.map);
          for (auto k : held) {
            ++tallies[k].cases;
            auto v = check_class(classes[k], pb.right);
            if (!v.holds)
              tallies[k].fail("element " + std::to_string(i) + " over " + at_str(p, q) + " along (" + a.d1.str() + ", " + a.d2.str() +
                                  ") loses " + class_name(classes[k]),
                              io::Json{{"p", p},
                                       {"q", q},
                                       {"element", i},
                                       {"delta1", a.d1.str()},
                                       {"delta2", a.d2.str()},
                                       {"verdict", io::to_json(v, 3)}});
          }
        }
      }
    }
  for (std::size_t k = 0; k < classes.size(); ++k)
    r.checks.push_back(timers[k].finish(tallies[k], std::to_string(holders[k]) + " fibrations of this class"));
  return r;
}

Report classifier_suite(const Options& o, ClassifierStore& store) {
  Report r{"classifier", o.params, {}};
  for (auto v : selected(o)) {
    const auto pv = variant_params(v, o.params);
    const std::string tag = std::string(variant_name(v)) + " at " + params_str(pv);
    Timed build("build " + tag, "classifier-closure");
    Tally tb;
    tb.cases = 1;
    const ClassifierComplex* c = nullptr;
    try {
      c = &store.get(v, pv, true);
    } catch (const ClosureViolation& e) {
      tb.fail(e.what(), io::Json{{"variant", variant_name(v)}, {"error", e.what()}});
    }
    std::string sizes;
    if (c != nullptr)
      for (const auto& lv : c->levels()) sizes += (sizes.empty() ? "" : " ") + at_str(lv.p, lv.q) + "=" + std::to_string(lv.size());
    r.checks.push_back(build.finish(tb, sizes));
    if (c == nullptr) continue;

    Timed ids("simplicial identities of " + tag, "classifier-simplicial");
    Tally ti;
    ti.cases = c->as_presheaf()->element_count();
    if (auto viol = validate(*c->as_presheaf())) ti.fail(viol->str(2), violation_json(*viol, 2));
    r.checks.push_back(ids.finish(ti));

    if (auto larger = larger_variant(v)) {
      Timed nest(tag + " inside " + variant_name(*larger), "classifier-nesting");
      Tally tn;
      const auto& big = store.get(*larger, pv, false);
      for (const auto& lv : c->levels())
        for (std::size_t i = 0; i < lv.size(); ++i) {
          ++tn.cases;
          if (!big.level(lv.p, lv.q).find(lv.code(i)))
            tn.fail("element " + std::to_string(i) + " over " + at_str(lv.p, lv.q) + " is missing", functor_witness(lv.p, lv.q, i));
        }
      r.checks.push_back(nest.finish(tn));
    }
  }
  return r;
}

Report universal_suite(const Options& o, ClassifierStore& store) {
  Report r{"universal", o.params, {}};
  for (auto v : selected(o)) {
    const auto pv = variant_params(v, o.params);
    Timed timer(std::string("pullback of the pointed ") + variant_name(v) + " classifier is Sigma G at " + params_str(pv),
                "universal-fibration");
    const auto& c = store.get(v, pv, true);
    auto report = universal_check(c, store.pointed(v, pv, pv.K), store.jobs());
    Tally t;
    t.cases = report.checked;
    for (const auto& f : report.failures)
      t.fail("element " + std::to_string(f.element) + " over " + at_str(f.p, f.q) + ": " + f.detail, functor_witness(f.p, f.q, f.element));
    r.checks.push_back(timer.finish(t));
  }
  if (!o.variant || *o.variant == Variant::SSpaces) {
    // Basepoint transport: pointed functors over (p, q) and pointed triples correspond.
    const auto& c = store.get(Variant::SSpaces, o.params, false);
    const auto b = o.params.functor_bounds();
    Timed timer("pointed functors and pointed triples correspond at " + params_str(o.params), "pointed-bijection");
    Tally t;
    std::mt19937_64 rng(o.seed);
    std::size_t sampled = 0;
    for (const auto& lv : c.levels())
      for (std::size_t i : sample_positions(lv.size(), kPointedSample, rng, sampled)) {
        auto g = decode(c.catalogue(), lv.p, lv.q, b, lv.code(i));
        for (int rr = 0; rr <= o.params.K; ++rr) {
          auto triple = pull_back_r(g, rr);
          auto back = push_forward_r(triple);
          ++t.cases;
          if (!back || !(*back == g)) {
            t.fail("element " + std::to_string(i) + " over " + at_str(lv.p, lv.q) + " does not return from level " + std::to_string(rr),
                   functor_witness(lv.p, lv.q, i));
            continue;
          }
          for (const auto& x : pointed_over(g, rr)) {
            ++t.cases;
            if (!(point_forward(point_backward(x)) == x))
              t.fail("element " + std::to_string(i) + " over " + at_str(lv.p, lv.q) + ": basepoint round trip differs at r=" +
                         std::to_string(rr),
                     functor_witness(lv.p, lv.q, i));
          }
        }
      }
    r.checks.push_back(timer.finish(t, sampled == 0 ? "every functor" : std::to_string(sampled) + " functors from sampled levels"));
  }
  return r;
}

Report bijection_suite(const Options& o, ClassifierStore& store) {
  Report r{"bijection", o.params, {}};
  const int P = o.params.P;
  const int Q = o.params.Q;
  std::vector<std::pair<std::string, TruncatedPresheaf>> bases;
  bases.emplace_back("F(0)", oracle::base_f(0, P, Q));
  bases.emplace_back("F(1)", oracle::base_f(1, P, Q));
  bases.emplace_back("Delta[1]", oracle::base_delta(1, P, Q));
  bases.emplace_back("F(1) x Delta[1]", oracle::base_product(1, 1, P, Q));
  for (auto v : selected(o)) {
    const auto pv = variant_params(v, o.params);
    const auto& c = store.get(v, pv, true);
    for (const auto& [label, x] : bases) {
      Timed timer(std::string("|Hom(") + label + ", " + variant_name(v) + ")| against brute force at " + params_str(pv),
                  "classifying-bijection");
      Tally t;
      t.cases = 1;
      const auto maps = count_maps(x, *c.as_presheaf());
      const auto direct = oracle::count_fibrations_over(v, x, pv.K, pv.m);
      if (maps != direct)
        t.fail(std::to_string(maps) + " maps but " + std::to_string(direct) + " fibrations",
               io::Json{{"variant", variant_name(v)}, {"base", label}, {"maps", maps}, {"fibrations", direct}});
      r.checks.push_back(timer.finish(t, std::to_string(maps) + " both ways"));
    }
  }
  return r;
}

Report subclassifier_suite(const Options& o, ClassifierStore& store) {
  Report r{"subclassifier", o.params, {}};
  // Variants sharing a k-bound share one pass over the SSpaces levels.
  std::map<int, std::vector<Variant>> by_k;
  for (auto v : selected(o))
    if (v != Variant::SSpaces) by_k[variant_params(v, o.params).K].push_back(v);
  for (const auto& [k, variants] : by_k) {
    Params pv = o.params;
    pv.K = k;
    const auto start = clock_type::now();
    const auto& whole = store.get(Variant::SSpaces, pv, false);
    std::vector<const ClassifierComplex*> subs;
    for (auto v : variants) subs.push_back(&store.get(v, pv, false));
    auto reports = subclassifier_check(whole, subs, store.jobs());
    const double each = std::chrono::duration<double>(clock_type::now() - start).count() / static_cast<double>(variants.size());
    for (std::size_t s = 0; s < variants.size(); ++s) {
      Timed timer(std::string(variant_name(variants[s])) + " levels are the point-fiber filter of SSpaces at " + params_str(pv),
                  "subclassifier-fullness");
      Tally t;
      t.cases = reports[s].checked;
      for (const auto& f : reports[s].failures)
        t.fail("element " + std::to_string(f.element) + " over " + at_str(f.p, f.q) + ": " + f.detail, functor_witness(f.p, f.q, f.element));
      auto check = timer.finish(t);
      check.seconds = each;
      r.checks.push_back(std::move(check));
    }
  }
  return r;
}

Report posets_suite(const Options& o) {
  Report r{"posets", o.params, {}};
  const int n_bound = std::max(2, o.params.K);
  {
    Timed timer("left fibrations over poset nerves = functors into sets of size <= " + std::to_string(o.params.m), "discrete-grothendieck");
    Tally t;
    for (int n = 0; n <= 3; ++n) {
      const auto posets = oracle::labelled_posets(n);
      for (std::size_t i = 0; i < posets.size(); ++i) {
        ++t.cases;
        const auto fibrations = oracle::count_nerve_left_fibrations(posets[i], n_bound, o.params.m);
        const auto functors = oracle::count_poset_functors(posets[i], o.params.m);
        if (fibrations != functors)
          t.fail("poset " + std::to_string(i) + " on " + std::to_string(n) + " points: " + std::to_string(fibrations) + " fibrations, " +
                     std::to_string(functors) + " functors",
                 io::Json{{"points", n}, {"poset", i}, {"fibrations", fibrations}, {"functors", functors}});
      }
    }
    r.checks.push_back(timer.finish(t, "posets on at most 3 points, nerves to level " + std::to_string(n_bound)));
  }
  return r;
}

Report diagonal_suite(const Options& o, ClassifierStore& store) {
  Report r{"diagonal", o.params, {}};
  for (auto v : selected(o)) {
    auto larger = larger_variant(v);
    if (!larger) continue;
    const auto pv = variant_params(v, o.params);
    Timed timer(std::string("pointed diagonal of ") + variant_name(v) + " is the pullback of " + variant_name(*larger) + "'s at " +
                    params_str(pv),
                "diagonal-square");
    Tally t;
    const auto& small = store.get(v, pv, true);
    const auto& large = store.get(*larger, pv, true);
    auto ds = diagonal_universal(small, store.pointed(v, pv, pv.P));
    auto dl = diagonal_universal(large, store.pointed(*larger, pv, pv.P));
    auto inc = inclusion(small, large);
    // Labels "G.x" of the large diagonal become "G'.x" with G' the position in the small classifier.
    auto pb = pullback(inc, dl, [](std::string_view a, std::string_view c) { return std::string(a) + std::string(c.substr(c.find('.'))); });
    const auto& x = ds.domain();
    for (std::size_t cell = 0; cell < x.cell_count(); ++cell) {
      ++t.cases;
      const auto at = x.index(cell);
      if (pb.object->size_at(cell) != x.size_at(cell)) {
        t.fail("level " + index_str(at, 2) + " has " + std::to_string(pb.object->size_at(cell)) + " elements in the pullback, " +
                   std::to_string(x.size_at(cell)) + " in the diagonal",
               io::Json{{"level", index_str(at, 2)}});
        continue;
      }
      for (std::uint32_t e = 0; e < x.size_at(cell); ++e)
        if (pb.object->label_at(cell, e) != x.label_at(cell, e) || pb.left.image_at(cell, e) != ds.image_at(cell, e)) {
          t.fail("level " + index_str(at, 2) + " element " + std::string(x.label_at(cell, e)) + " differs",
                 io::Json{{"level", index_str(at, 2)}, {"element", x.label_at(cell, e)}});
          break;
        }
    }
    ++t.cases;
    if (t.failures == 0 && !(*pb.object == x)) t.fail("face and degeneracy tables differ", io::Json{{"variant", variant_name(v)}});
    r.checks.push_back(timer.finish(t, std::to_string(x.element_count()) + " pointed elements"));
  }
  return r;
}

Report run_suite(const std::string& suite, const Options& options, ClassifierStore& store) {
  Report r;
  if (suite == "simplex") r = simplex_suite(options);
  else if (suite == "roundtrip") r = roundtrip_suite(options, store);
  else if (suite == "stability") r = stability_suite(options, store);
  else if (suite == "classifier") r = classifier_suite(options, store);
  else if (suite == "universal") r = universal_suite(options, store);
  else if (suite == "bijection") r = bijection_suite(options, store);
  else if (suite == "subclassifier") r = subclassifier_suite(options, store);
  else if (suite == "posets") r = posets_suite(options);
  else if (suite == "diagonal") r = diagonal_suite(options, store);
  else throw std::invalid_argument("unknown suite \"" + suite + "\"");
  if (options.corrupt_fixture) r.checks.insert(r.checks.begin(), corrupt_fixture_check(options.seed));
  return r;
}

std::vector<Report> run(const std::string& suite, const Options& options, ClassifierStore& store) {
  if (suite != "all") return {run_suite(suite, options, store)};
  std::vector<Report> out;
  for (const auto& name : suite_names()) out.push_back(run_suite(name, options, store));
  return out;
}

io::Json report_json(const Report& r) {
  io::Json checks = io::Json::array();
  for (const auto& c : r.checks) {
    io::Json j{{"check", c.name}, {"tag", c.tag}, {"passed", c.passed}, {"cases", c.cases}, {"detail", c.detail}};
    if (!c.witness.is_null()) j["witness"] = c.witness;
    checks.push_back(std::move(j));
  }
  return io::Json{{"suite", r.suite},
                  {"params", {{"P", r.params.P}, {"Q", r.params.Q}, {"K", r.params.K}, {"m", r.params.m}}},
                  {"passed", r.passed()},
                  {"checks", std::move(checks)}};
}

std::string report_text(const Report& r) {
  std::ostringstream out;
  out << "suite " << r.suite << " (" << params_str(r.params) << "): " << (r.passed() ? "PASS" : "FAIL") << '\n';
  for (const auto& c : r.checks) {
    out << "  " << (c.passed ? "PASS" : "FAIL") << "  " << c.name << " [" << c.tag << "]: " << c.detail << '\n';
    if (!c.witness.is_null()) out << "        witness " << io::dump(c.witness, -1);
  }
  return out.str();
}

}  // namespace segal::suites
