#include "segal/fibration.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <mutex>
#include <tuple>
#include <set>
#include <unordered_set>

namespace segal {

const char* class_name(FibrationClass c) {
  switch (c) {
    case FibrationClass::ReedyLeft: return "ReedyLeft";
    case FibrationClass::SegalCoCartesian: return "SegalCoCartesian";
    case FibrationClass::CoCartesian: return "CoCartesian";
    case FibrationClass::Left: return "Left";
  }
  return "?";
}

FibrationClass parse_class(std::string_view name) {
  for (auto c : {FibrationClass::ReedyLeft, FibrationClass::SegalCoCartesian, FibrationClass::CoCartesian, FibrationClass::Left})
    if (name == class_name(c)) return c;
  throw std::invalid_argument("unknown fibration class \"" + std::string(name) + "\"");
}

int minimum_k_bound(FibrationClass c) {
  switch (c) {
    case FibrationClass::SegalCoCartesian: return 2;
    case FibrationClass::CoCartesian: return 3;
    default: return 0;
  }
}

namespace {

// Comparison L_I -> L_{I0} x_{X_{I0}} X_I along the vertex 0 in direction dir, at cell I with I[dir] >= 1.
std::optional<Witness> left_condition(const PresheafMap& p, int dir, const Index& at, const char* condition) {
  const auto& l = p.domain();
  const auto& x = p.codomain();
  const int n = at[static_cast<std::size_t>(dir)];
  const MonotoneMap vertex = MonotoneMap::constant(0, n, 0);
  const Index at0 = shift(at, dir, 0);
  const auto cell = l.flat(at);
  const auto cell0 = l.flat(at0);
  const auto& vl = l.act(dir, vertex, at);
  const auto& vx = x.act(dir, vertex, at);
  std::size_t rhs = 0;
  for (std::uint32_t y = 0; y < x.size_at(cell); ++y) rhs += p.fiber(cell0, vx[y]).size();
  const std::size_t lhs = l.size_at(cell);
  if (lhs != rhs) return Witness{condition, at, lhs, rhs, {}};
  std::vector<std::uint64_t> keys(lhs);
  for (std::uint32_t e = 0; e < lhs; ++e) keys[e] = (static_cast<std::uint64_t>(vl[e]) << 32) | p.image_at(cell, e);
  std::sort(keys.begin(), keys.end());
  if (std::adjacent_find(keys.begin(), keys.end()) == keys.end()) return std::nullopt;
  // Slow pass names the first repeated element.
  std::unordered_set<std::uint64_t> seen;
  for (std::uint32_t e = 0; e < lhs; ++e) {
    auto key = (static_cast<std::uint64_t>(vl[e]) << 32) | p.image_at(cell, e);
    if (!seen.insert(key).second) return Witness{condition, at, lhs, rhs, std::string(l.label_at(cell, e))};
  }
  return std::nullopt;
}

Verdict fail(FibrationClass c, Witness w) { return Verdict{c, false, std::move(w)}; }

void require_k(const TruncatedPresheaf& l, FibrationClass c) {
  if (l.arity() != 3) throw std::invalid_argument("fibration predicates need arity-3 maps");
  if (l.bounds()[0] < minimum_k_bound(c))
    throw BoundShortfall(std::string(class_name(c)) + " needs k-bound >= " + std::to_string(minimum_k_bound(c)));
}

}  // namespace

Verdict is_left_fibration_ss(const PresheafMap& p) {
  const auto& l = p.domain();
  if (l.arity() != 2) throw std::invalid_argument("is_left_fibration_ss needs an arity-2 map");
  for (std::size_t cell = 0; cell < l.cell_count(); ++cell) {
    Index at = l.index(cell);
    if (at[0] == 0) continue;
    if (auto w = left_condition(p, 0, at, "left")) return fail(FibrationClass::Left, *w);
  }
  return {FibrationClass::Left, true, std::nullopt};
}

Verdict is_reedy_left(const PresheafMap& p) {
  const auto& l = p.domain();
  require_k(l, FibrationClass::ReedyLeft);
  for (std::size_t cell = 0; cell < l.cell_count(); ++cell) {
    Index at = l.index(cell);
    if (at[1] >= 1)
      if (auto w = left_condition(p, 1, at, "reedy-left:base")) return fail(FibrationClass::ReedyLeft, *w);
    if (at[2] >= 1)
      if (auto w = left_condition(p, 2, at, "reedy-left:space")) return fail(FibrationClass::ReedyLeft, *w);
  }
  return {FibrationClass::ReedyLeft, true, std::nullopt};
}

std::optional<Witness> segal_witness(const TruncatedPresheaf& l) {
  const auto& b = l.bounds();
  const MonotoneMap src = MonotoneMap::constant(0, 1, 0);
  const MonotoneMap tgt = MonotoneMap::constant(0, 1, 1);
  for (int k = 2; k <= b[0]; ++k)
    for (int n = 0; n <= b[1]; ++n)
      for (int ll = 0; ll <= b[2]; ++ll) {
        const Index at{k, n, ll};
        const Index e_at{1, n, ll};
        const auto& s = l.act(0, src, e_at);
        const auto& t = l.act(0, tgt, e_at);
        const auto vertices = l.size({0, n, ll});
        const auto edges = l.size(e_at);
        // Chains of k composable edges, counted by their end vertex.
        std::vector<std::size_t> ways(vertices, 1);
        for (int step = 0; step < k; ++step) {
          std::vector<std::size_t> next(vertices, 0);
          for (std::uint32_t e = 0; e < edges; ++e) next[t[e]] += ways[s[e]];
          ways = std::move(next);
        }
        std::size_t rhs = 0;
        for (auto w : ways) rhs += w;
        const std::size_t lhs = l.size(at);
        if (lhs != rhs) return Witness{"segal", at, lhs, rhs, {}};
        std::vector<const std::vector<std::uint32_t>*> spine;
        for (int i = 0; i < k; ++i) spine.push_back(&l.act(0, MonotoneMap(k, {i, i + 1}), at));
        const int bits = std::max(1, static_cast<int>(std::bit_width(edges)));
        if (bits * k <= 64) {
          std::vector<std::uint64_t> keys(lhs, 0);
          for (const auto* edge : spine)
            for (std::uint32_t e = 0; e < lhs; ++e) keys[e] = (keys[e] << bits) | (*edge)[e];
          std::sort(keys.begin(), keys.end());
          if (std::adjacent_find(keys.begin(), keys.end()) == keys.end()) continue;
        }
        std::set<std::vector<std::uint32_t>> seen;
        for (std::uint32_t e = 0; e < lhs; ++e) {
          std::vector<std::uint32_t> key;
          for (const auto* edge : spine) key.push_back((*edge)[e]);
          if (!seen.insert(std::move(key)).second) return Witness{"segal", at, lhs, rhs, std::string(l.label(at, e))};
        }
      }
  return std::nullopt;
}

std::optional<Witness> complete_witness(const TruncatedPresheaf& l) {
  const auto& b = l.bounds();
  const MonotoneMap e02(3, {0, 2});
  const MonotoneMap e13(3, {1, 3});
  const MonotoneMap degenerate = MonotoneMap::constant(1, 0, 0);
  for (int n = 0; n <= b[1]; ++n)
    for (int ll = 0; ll <= b[2]; ++ll) {
      const Index at{3, n, ll};
      const auto& a = l.act(0, e02, at);
      const auto& c = l.act(0, e13, at);
      const auto& s0 = l.act(0, degenerate, {0, n, ll});
      std::vector<char> is_degenerate(l.size({1, n, ll}), 0);
      for (auto e : s0) is_degenerate[e] = 1;
      std::size_t rhs = 0;
      for (std::uint32_t t = 0; t < l.size(at); ++t) rhs += is_degenerate[a[t]] && is_degenerate[c[t]];
      const std::size_t lhs = l.size({0, n, ll});
      if (lhs != rhs) return Witness{"complete", at, lhs, rhs, {}};
    }
  return std::nullopt;
}

std::optional<Witness> constant_witness(const TruncatedPresheaf& l) {
  const auto& b = l.bounds();
  for (std::size_t cell = 0; cell < l.cell_count(); ++cell) {
    const Index at = l.index(cell);
    if (at[0] == 0) continue;
    const std::size_t lhs = l.size({0, at[1], at[2]});
    const std::size_t rhs = l.size_at(cell);
    if (lhs != rhs) return Witness{"constant", at, lhs, rhs, {}};
    // The total degeneracy is split by a vertex, so equal sizes make it bijective.
    (void)b;
  }
  return std::nullopt;
}

Verdict is_segal_cocartesian(const PresheafMap& p) {
  require_k(p.domain(), FibrationClass::SegalCoCartesian);
  if (auto v = is_reedy_left(p); !v) return fail(FibrationClass::SegalCoCartesian, *v.witness);
  if (auto w = segal_witness(p.domain())) return fail(FibrationClass::SegalCoCartesian, *w);
  return {FibrationClass::SegalCoCartesian, true, std::nullopt};
}

Verdict is_cocartesian(const PresheafMap& p) {
  require_k(p.domain(), FibrationClass::CoCartesian);
  if (auto v = is_segal_cocartesian(p); !v) return fail(FibrationClass::CoCartesian, *v.witness);
  if (auto w = complete_witness(p.domain())) return fail(FibrationClass::CoCartesian, *w);
  return {FibrationClass::CoCartesian, true, std::nullopt};
}

Verdict is_left_fibration_sss(const PresheafMap& p) {
  require_k(p.domain(), FibrationClass::Left);
  if (auto v = is_reedy_left(p); !v) return fail(FibrationClass::Left, *v.witness);
  if (auto w = constant_witness(p.domain())) return fail(FibrationClass::Left, *w);
  return {FibrationClass::Left, true, std::nullopt};
}

Verdict check_class(FibrationClass c, const PresheafMap& p) {
  switch (c) {
    case FibrationClass::ReedyLeft: return is_reedy_left(p);
    case FibrationClass::SegalCoCartesian: return is_segal_cocartesian(p);
    case FibrationClass::CoCartesian: return is_cocartesian(p);
    case FibrationClass::Left: return is_left_fibration_sss(p);
  }
  return {};
}

FinestClass finest_class(const PresheafMap& p) {
  FinestClass out;
  for (auto c : {FibrationClass::ReedyLeft, FibrationClass::SegalCoCartesian, FibrationClass::CoCartesian, FibrationClass::Left}) {
    if (p.domain().bounds()[0] < minimum_k_bound(c)) {
      // Left does not need the completeness bound; check it directly when k is short.
      if (c == FibrationClass::CoCartesian) continue;
      break;
    }
    auto v = check_class(c, p);
    if (!v) {
      out.next_failure = std::move(v);
      break;
    }
    out.cls = c;
  }
  return out;
}

namespace {

const PresheafMap& vertex_map(int pp, int qq, int v1, int v2, Bounds b) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, int, int, Bounds>, PresheafMap> cache;
  std::lock_guard lock(mutex);
  auto key = std::make_tuple(pp, qq, v1, v2, b);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, base_map(MonotoneMap(pp, {v1}), MonotoneMap(qq, {v2}), b)).first;
  return it->second;
}

}  // namespace

std::vector<VertexClass> vertex_fiber_classes(const PresheafMap& p, int pp, int qq) {
  const Bounds b = p.domain().bounds();
  std::vector<VertexClass> out;
  for (int v1 = 0; v1 <= pp; ++v1)
    for (int v2 = 0; v2 <= qq; ++v2) {
      auto fiber = pullback_positional(p, vertex_map(pp, qq, v1, v2, b));
      const auto& f = *fiber.object;
      VertexClass vc{v1, v2, b[0] >= 2 && !segal_witness(f), std::nullopt, !constant_witness(f)};
      if (b[0] >= 3) vc.complete = vc.segal && !complete_witness(f);
      out.push_back(vc);
    }
  return out;
}

PointFiberReport point_fiber_classification(const PresheafMap& p, int pp, int qq) {
  const Bounds b = p.domain().bounds();
  if (auto v = is_reedy_left(p); !v) throw std::invalid_argument("point-fiber classification needs a Reedy left map");
  PointFiberReport report;
  report.vertices = vertex_fiber_classes(p, pp, qq);
  bool all_segal = true, all_complete = true, all_constant = true;
  for (const auto& vc : report.vertices) {
    all_segal = all_segal && vc.segal;
    all_complete = all_complete && vc.complete.value_or(false);
    all_constant = all_constant && vc.constant;
    if (!vc.segal && !report.first_non_segal) report.first_non_segal = vc;
  }
  report.global_segal = b[0] >= 2 && static_cast<bool>(is_segal_cocartesian(p));
  if (b[0] >= 3) report.global_cocartesian = static_cast<bool>(is_cocartesian(p));
  report.global_left = static_cast<bool>(is_left_fibration_sss(p));
  report.agrees = report.global_segal == all_segal && report.global_left == all_constant &&
                  (!report.global_cocartesian || *report.global_cocartesian == all_complete);
  return report;
}

}  // namespace segal
