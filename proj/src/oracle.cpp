#include "segal/oracle.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "segal/fibration.hpp"

namespace segal::oracle {

bool Poset::leq(int a, int b) const {
  return a == b || std::find(less.begin(), less.end(), std::make_pair(a, b)) != less.end();
}

FiniteCategory poset_category(const Poset& p) {
  FiniteCategory c;
  c.objects = p.size;
  for (int i = 0; i < p.size; ++i) {
    c.source.push_back(i);
    c.target.push_back(i);
  }
  for (auto [a, b] : p.less) {
    c.source.push_back(a);
    c.target.push_back(b);
  }
  const int n = c.morphisms();
  auto find = [&](int a, int b) {
    for (int m = 0; m < n; ++m)
      if (c.source[static_cast<std::size_t>(m)] == a && c.target[static_cast<std::size_t>(m)] == b) return m;
    throw std::invalid_argument("poset relations are not transitive");
  };
  c.compose.assign(static_cast<std::size_t>(n * n), -1);
  for (int g = 0; g < n; ++g)
    for (int f = 0; f < n; ++f)
      if (c.target[static_cast<std::size_t>(f)] == c.source[static_cast<std::size_t>(g)])
        c.compose[static_cast<std::size_t>(g * n + f)] = find(c.source[static_cast<std::size_t>(f)], c.target[static_cast<std::size_t>(g)]);
  return c;
}

FiniteCategory cyclic_group(int order) {
  FiniteCategory c;
  c.objects = 1;
  c.source.assign(static_cast<std::size_t>(order), 0);
  c.target.assign(static_cast<std::size_t>(order), 0);
  for (int g = 0; g < order; ++g)
    for (int f = 0; f < order; ++f) c.compose.push_back((g + f) % order);
  return c;
}

TruncatedPresheaf nerve(const FiniteCategory& c, int k_bound) {
  // chains[j] lists composable strings f_1 ... f_j (f_1 first); level 0 holds objects.
  std::vector<std::vector<std::vector<int>>> chains(static_cast<std::size_t>(k_bound + 1));
  for (int x = 0; x < c.objects; ++x) chains[0].push_back({x});
  for (int j = 1; j <= k_bound; ++j)
    for (const auto& prev : chains[static_cast<std::size_t>(j - 1)])
      for (int f = 0; f < c.morphisms(); ++f) {
        const int end = j == 1 ? prev[0] : c.target[static_cast<std::size_t>(prev.back())];
        if (c.source[static_cast<std::size_t>(f)] != end) continue;
        std::vector<int> next = j == 1 ? std::vector<int>{} : prev;
        next.push_back(f);
        chains[static_cast<std::size_t>(j)].push_back(std::move(next));
      }
  for (auto& level : chains) std::sort(level.begin(), level.end());
  std::vector<std::map<std::vector<int>, std::uint32_t>> index(chains.size());
  std::vector<std::uint32_t> sizes;
  LabelTable labels;
  for (std::size_t j = 0; j < chains.size(); ++j) {
    sizes.push_back(static_cast<std::uint32_t>(chains[j].size()));
    for (std::uint32_t e = 0; e < chains[j].size(); ++e) {
      index[j][chains[j][e]] = e;
      std::string label;
      for (auto m : chains[j][e]) label += (label.empty() ? "" : ".") + std::to_string(m);
      labels.add(label);
    }
  }
  TruncatedPresheaf x(1, {k_bound, 0, 0}, std::move(sizes), std::move(labels));
  auto vertex = [&](const std::vector<int>& chain, int i) {
    return i == 0 ? c.source[static_cast<std::size_t>(chain[0])] : c.target[static_cast<std::size_t>(chain[static_cast<std::size_t>(i - 1)])];
  };
  for (int j = 0; j <= k_bound; ++j)
    for (int slot = 0; slot < generator_count(j, k_bound); ++slot) {
      const auto gen = generator_at(j, k_bound, slot);
      auto table = x.action_slot_mut(0, static_cast<std::size_t>(j), slot);
      for (std::uint32_t e = 0; e < chains[static_cast<std::size_t>(j)].size(); ++e) {
        const auto& ch = chains[static_cast<std::size_t>(j)][e];
        std::vector<int> out;
        if (gen.kind == Generator::Kind::Face) {
          if (j == 1) {
            out = {gen.index == 0 ? c.target[static_cast<std::size_t>(ch[0])] : c.source[static_cast<std::size_t>(ch[0])]};
          } else {
            out = ch;
            const auto i = static_cast<std::size_t>(gen.index);
            if (gen.index == 0) {
              out.erase(out.begin());
            } else if (gen.index == j) {
              out.pop_back();
            } else {
              out[i - 1] = c.after(ch[i], ch[i - 1]);
              out.erase(out.begin() + static_cast<std::ptrdiff_t>(i));
            }
          }
        } else {
          const int id = j == 0 ? ch[0] : vertex(ch, gen.index);
          out = j == 0 ? std::vector<int>{} : ch;
          out.insert(out.begin() + gen.index, id);
        }
        table[e] = index[static_cast<std::size_t>(gen.target_level())].at(out);
      }
    }
  return x;
}

TruncatedPresheaf as_simplicial_space(const TruncatedPresheaf& space) {
  return slice_direction(constant_over_base(space, 0, 0), 2, 0);
}

PresheafMap over_point(const TruncatedPresheaf& space, int n_bound, int l_bound) {
  return to_terminal(std::make_shared<const TruncatedPresheaf>(constant_over_base(space, n_bound, l_bound)));
}

std::vector<Poset> labelled_posets(int n) {
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b) pairs.emplace_back(a, b);
  std::vector<Poset> out;
  for (std::uint32_t mask = 0; mask < (1u << pairs.size()); ++mask) {
    Poset p{n, {}};
    for (std::size_t i = 0; i < pairs.size(); ++i)
      if (mask >> i & 1u) p.less.push_back(pairs[i]);
    bool ok = true;
    for (auto [a, b] : p.less) {
      if (p.leq(b, a)) ok = false;
      for (auto [c, d] : p.less)
        if (b == c && !p.leq(a, d)) ok = false;
    }
    if (ok) out.push_back(std::move(p));
  }
  return out;
}

namespace {

// Every function {0..a-1} -> {0..b-1}.
std::vector<std::vector<int>> functions(int a, int b) {
  std::vector<std::vector<int>> out;
  std::vector<int> f(static_cast<std::size_t>(a), 0);
  if (a > 0 && b == 0) return out;
  while (true) {
    out.push_back(f);
    int i = 0;
    while (i < a && ++f[static_cast<std::size_t>(i)] == b) f[static_cast<std::size_t>(i++)] = 0;
    if (i == a) break;
  }
  return out;
}

// Odometer over a vector of choice counts; calls visit for every combination.
void product(const std::vector<std::size_t>& counts, const std::function<void(const std::vector<std::size_t>&)>& visit) {
  for (auto c : counts)
    if (c == 0) return;
  std::vector<std::size_t> pick(counts.size(), 0);
  while (true) {
    visit(pick);
    std::size_t i = 0;
    while (i < counts.size() && ++pick[i] == counts[i]) pick[i++] = 0;
    if (i == counts.size()) break;
  }
}

}  // namespace

std::size_t count_poset_functors(const Poset& p, int max_set) {
  std::size_t count = 0;
  std::vector<std::size_t> size_choices(static_cast<std::size_t>(p.size), static_cast<std::size_t>(max_set + 1));
  product(size_choices, [&](const std::vector<std::size_t>& sizes) {
    std::vector<std::vector<std::vector<int>>> options;
    std::vector<std::size_t> counts;
    for (auto [a, b] : p.less) {
      options.push_back(functions(static_cast<int>(sizes[static_cast<std::size_t>(a)]), static_cast<int>(sizes[static_cast<std::size_t>(b)])));
      counts.push_back(options.back().size());
    }
    auto rel = [&](int a, int b) {
      return static_cast<std::size_t>(std::find(p.less.begin(), p.less.end(), std::make_pair(a, b)) - p.less.begin());
    };
    product(counts, [&](const std::vector<std::size_t>& pick) {
      for (auto [a, b] : p.less)
        for (auto [b2, c] : p.less) {
          if (b2 != b) continue;
          const auto& f = options[rel(a, b)][pick[rel(a, b)]];
          const auto& g = options[rel(b, c)][pick[rel(b, c)]];
          const auto& h = options[rel(a, c)][pick[rel(a, c)]];
          for (std::size_t x = 0; x < f.size(); ++x)
            if (g[static_cast<std::size_t>(f[x])] != h[x]) return;
        }
      ++count;
    });
  });
  return count;
}

std::size_t count_nerve_left_fibrations(const Poset& p, int n_bound, int max_set) {
  auto x = std::make_shared<const TruncatedPresheaf>(as_simplicial_space(nerve(poset_category(p), n_bound)));
  const auto vertices = x->size({0, 0, 0});
  const auto edges = n_bound >= 1 ? x->size({1, 0, 0}) : 0u;
  // Vertex 0 of every simplex and the edge from vertex 0 to vertex t.
  std::vector<std::vector<std::uint32_t>> vertex_of(static_cast<std::size_t>(n_bound + 1));
  for (int n = 0; n <= n_bound; ++n) vertex_of[static_cast<std::size_t>(n)] = x->act(0, MonotoneMap::constant(0, n, 0), {n, 0, 0});
  std::vector<std::uint32_t> edge_src, edge_tgt;
  if (edges > 0) {
    edge_src = x->act(0, MonotoneMap::constant(0, 1, 0), {1, 0, 0});
    edge_tgt = x->act(0, MonotoneMap::constant(0, 1, 1), {1, 0, 0});
  }
  std::size_t count = 0;
  std::vector<std::size_t> size_choices(vertices, static_cast<std::size_t>(max_set + 1));
  product(size_choices, [&](const std::vector<std::size_t>& sizes) {
    std::vector<std::vector<std::vector<int>>> options;
    std::vector<std::size_t> counts;
    for (std::uint32_t e = 0; e < edges; ++e) {
      options.push_back(functions(static_cast<int>(sizes[edge_src[e]]), static_cast<int>(sizes[edge_tgt[e]])));
      counts.push_back(options.back().size());
    }
    product(counts, [&](const std::vector<std::size_t>& pick) {
      std::vector<std::uint32_t> cell_sizes;
      LabelTable labels;
      std::vector<std::uint32_t> images;
      std::vector<std::vector<std::uint32_t>> start(static_cast<std::size_t>(n_bound + 1));
      for (int n = 0; n <= n_bound; ++n) {
        std::uint32_t total = 0;
        for (std::uint32_t s = 0; s < x->size({n, 0, 0}); ++s) {
          start[static_cast<std::size_t>(n)].push_back(total);
          const auto size = static_cast<std::uint32_t>(sizes[vertex_of[static_cast<std::size_t>(n)][s]]);
          for (std::uint32_t i = 0; i < size; ++i) {
            labels.add(std::string(x->label({n, 0, 0}, s)) + ":" + std::to_string(i));
            images.push_back(s);
          }
          total += size;
        }
        cell_sizes.push_back(total);
      }
      TruncatedPresheaf l(2, {n_bound, 0, 0}, std::move(cell_sizes), std::move(labels));
      for (int n = 0; n <= n_bound; ++n)
        for (int slot = 0; slot < generator_count(n, n_bound); ++slot) {
          const auto gen = generator_at(n, n_bound, slot);
          const int t = gen.map()(0);
          const auto& act = x->action_slot(0, static_cast<std::size_t>(n), slot);
          const auto& edge = t == 0 ? std::vector<std::uint32_t>{} : x->act(0, MonotoneMap(n, {0, t}), {n, 0, 0});
          auto table = l.action_slot_mut(0, static_cast<std::size_t>(n), slot);
          std::uint32_t e = 0;
          for (std::uint32_t s = 0; s < x->size({n, 0, 0}); ++s) {
            const auto size = sizes[vertex_of[static_cast<std::size_t>(n)][s]];
            for (std::uint32_t i = 0; i < size; ++i, ++e) {
              const auto moved = t == 0 ? i : static_cast<std::uint32_t>(options[edge[s]][pick[edge[s]]][i]);
              table[e] = start[static_cast<std::size_t>(gen.target_level())][act[s]] + moved;
            }
          }
        }
      if (validate(l)) return;
      PresheafMap map(std::make_shared<const TruncatedPresheaf>(std::move(l)), x, std::move(images));
      if (is_left_fibration_ss(map)) ++count;
    });
  });
  return count;
}

std::string table_key(const TruncatedPresheaf& x) {
  std::ostringstream out;
  out << x.arity() << ';';
  for (auto b : x.bounds()) out << b << ',';
  for (auto s : x.sizes()) out << s << ',';
  for (std::size_t cell = 0; cell < x.cell_count(); ++cell)
    for (int d = 0; d < x.arity(); ++d)
      for (int slot = 0; slot < x.generator_count_at(d, cell); ++slot) {
        out << '|';
        for (auto v : x.action_slot(d, cell, slot)) out << v << ',';
      }
  return out.str();
}

namespace {

// Level-wise permutation of a space's elements.
TruncatedPresheaf permuted(const TruncatedPresheaf& x, const std::vector<std::vector<std::uint32_t>>& perm) {
  TruncatedPresheaf y(1, x.bounds(), x.sizes());
  for (std::size_t cell = 0; cell < x.cell_count(); ++cell)
    for (int slot = 0; slot < x.generator_count_at(0, cell); ++slot) {
      const auto gen = generator_at(static_cast<int>(cell), x.bounds()[0], slot);
      const auto& to = perm[static_cast<std::size_t>(gen.target_level())];
      auto src = x.action_slot(0, cell, slot);
      auto dst = y.action_slot_mut(0, cell, slot);
      for (std::uint32_t e = 0; e < src.size(); ++e) dst[perm[cell][e]] = to[src[e]];
    }
  return y;
}

bool has_nonidentity_iso(const FiniteCategory& c) {
  for (int f = c.objects; f < c.morphisms(); ++f)
    for (int g = 0; g < c.morphisms(); ++g) {
      const int gf = c.after(g, f), fg = c.after(f, g);
      if (gf >= 0 && fg >= 0 && gf < c.objects && fg < c.objects) return true;
    }
  return false;
}

}  // namespace

std::size_t count_category_nerves(int k_bound, int max_size) {
  std::set<std::string> tables;
  for (int objects = 0; objects <= max_size; ++objects)
    for (int extra = 0; objects + extra <= max_size; ++extra) {
      if (objects == 0 && extra > 0) continue;
      // Endpoints of the non-identity morphisms.
      std::vector<std::size_t> ends(static_cast<std::size_t>(extra), static_cast<std::size_t>(objects * objects));
      product(ends, [&](const std::vector<std::size_t>& pick) {
        FiniteCategory c;
        c.objects = objects;
        for (int i = 0; i < objects; ++i) {
          c.source.push_back(i);
          c.target.push_back(i);
        }
        for (auto p : pick) {
          c.source.push_back(static_cast<int>(p) / objects);
          c.target.push_back(static_cast<int>(p) % objects);
        }
        const int n = c.morphisms();
        // Free choices: composites of two non-identity morphisms.
        std::vector<std::pair<int, int>> pairs;
        std::vector<std::vector<int>> candidates;
        for (int g = objects; g < n; ++g)
          for (int f = objects; f < n; ++f)
            if (c.target[static_cast<std::size_t>(f)] == c.source[static_cast<std::size_t>(g)]) {
              pairs.emplace_back(g, f);
              std::vector<int> cands;
              for (int h = 0; h < n; ++h)
                if (c.source[static_cast<std::size_t>(h)] == c.source[static_cast<std::size_t>(f)] &&
                    c.target[static_cast<std::size_t>(h)] == c.target[static_cast<std::size_t>(g)] &&
                    (h >= objects || c.source[static_cast<std::size_t>(h)] == c.target[static_cast<std::size_t>(h)]))
                  cands.push_back(h);
              candidates.push_back(std::move(cands));
            }
        std::vector<std::size_t> counts;
        for (const auto& cands : candidates) counts.push_back(cands.size());
        product(counts, [&](const std::vector<std::size_t>& choice) {
          FiniteCategory cc = c;
          cc.compose.assign(static_cast<std::size_t>(n * n), -1);
          for (int g = 0; g < n; ++g)
            for (int f = 0; f < n; ++f) {
              if (cc.target[static_cast<std::size_t>(f)] != cc.source[static_cast<std::size_t>(g)]) continue;
              if (g < objects) cc.compose[static_cast<std::size_t>(g * n + f)] = f;
              else if (f < objects) cc.compose[static_cast<std::size_t>(g * n + f)] = g;
            }
          for (std::size_t i = 0; i < pairs.size(); ++i)
            cc.compose[static_cast<std::size_t>(pairs[i].first * n + pairs[i].second)] = candidates[i][choice[i]];
          for (int h = 0; h < n; ++h)
            for (int g = 0; g < n; ++g)
              for (int f = 0; f < n; ++f) {
                const int gf = cc.after(g, f), hg = cc.after(h, g);
                if (gf < 0 || hg < 0) continue;
                if (cc.after(h, gf) != cc.after(hg, f)) return;
              }
          if (has_nonidentity_iso(cc)) return;
          auto x = nerve(cc, k_bound);
          for (auto s : x.sizes())
            if (s > static_cast<std::uint32_t>(max_size)) return;
          // Every relabelling of every level.
          std::vector<std::vector<std::vector<std::uint32_t>>> perms;
          std::vector<std::size_t> perm_counts;
          for (auto s : x.sizes()) {
            std::vector<std::uint32_t> p(s);
            std::iota(p.begin(), p.end(), 0u);
            std::vector<std::vector<std::uint32_t>> all;
            do all.push_back(p);
            while (std::next_permutation(p.begin(), p.end()));
            perm_counts.push_back(all.size());
            perms.push_back(std::move(all));
          }
          product(perm_counts, [&](const std::vector<std::size_t>& which) {
            std::vector<std::vector<std::uint32_t>> perm;
            for (std::size_t j = 0; j < which.size(); ++j) perm.push_back(perms[j][which[j]]);
            tables.insert(table_key(permuted(x, perm)));
          });
        });
      });
    }
  return tables.size();
}

TruncatedPresheaf base_f(int r, int P, int Q) { return slice_direction(representable(RepKind::F, r, {0, P, Q}), 0, 0); }
TruncatedPresheaf base_delta(int r, int P, int Q) { return slice_direction(representable(RepKind::Delta, r, {0, P, Q}), 0, 0); }
TruncatedPresheaf base_product(int r, int s, int P, int Q) { return slice_direction(*base_presheaf(r, s, {0, P, Q}), 0, 0); }

namespace {

// An edge of X in direction dir (an element of X_{10} or X_{01}) or the identity.
struct EdgeRef {
  int dir = -1;  // -1: identity
  std::uint32_t element = 0;
};

class FibrationSearch {
 public:
  FibrationSearch(Variant v, const TruncatedPresheaf& x, int k_bound, int max_size)
      : variant_(v), x_(x), k_(k_bound), cls_(variant_class(v)) {
    if (x.arity() != 2) throw std::invalid_argument("bases are arity-2 presheaves");
    for (auto& s : enumerate_spaces(k_bound, max_size)) spaces_.push_back(std::move(s));
    for (std::uint32_t s = 0; s < spaces_.size(); ++s)
      if (check_class(cls_, over_point(spaces_[s]))) allowed_.push_back(s);
    embedded_ = std::make_shared<const TruncatedPresheaf>(standard_embed(x, k_bound));
    const auto& b = x.bounds();
    for (int dir = 0; dir < 2; ++dir) {
      const Index at = dir == 0 ? Index{1, 0, 0} : Index{0, 1, 0};
      if (b[static_cast<std::size_t>(dir)] < 1) continue;
      const auto& src = x.act(dir, MonotoneMap::constant(0, 1, 0), at);
      const auto& tgt = x.act(dir, MonotoneMap::constant(0, 1, 1), at);
      const auto& degenerate = x.act(dir, MonotoneMap::constant(1, 0, 0), {0, 0, 0});
      for (std::uint32_t e = 0; e < x.size(at); ++e) {
        if (std::find(degenerate.begin(), degenerate.end(), e) != degenerate.end()) continue;
        edge_slot_[static_cast<std::size_t>(dir)][e] = edges_.size();
        edges_.push_back({dir, e, src[e], tgt[e]});
      }
    }
    // Commutation constraints: squares in X_{11}, triangles in X_{20} and X_{02}.
    if (b[0] >= 1 && b[1] >= 1) {
      const Index at{1, 1, 0};
      const auto& h0 = x.act(1, MonotoneMap::constant(0, 1, 0), at);
      const auto& h1 = x.act(1, MonotoneMap::constant(0, 1, 1), at);
      const auto& v0 = x.act(0, MonotoneMap::constant(0, 1, 0), at);
      const auto& v1 = x.act(0, MonotoneMap::constant(0, 1, 1), at);
      for (std::uint32_t s = 0; s < x.size(at); ++s)
        add_constraint(vertex(1, 1, s), {edge(0, h0[s]), edge(1, v1[s])}, {edge(1, v0[s]), edge(0, h1[s])});
    }
    for (int dir = 0; dir < 2; ++dir) {
      if (b[static_cast<std::size_t>(dir)] < 2) continue;
      const Index at = dir == 0 ? Index{2, 0, 0} : Index{0, 2, 0};
      const auto& e01 = x.act(dir, MonotoneMap(2, {0, 1}), at);
      const auto& e12 = x.act(dir, MonotoneMap(2, {1, 2}), at);
      const auto& e02 = x.act(dir, MonotoneMap(2, {0, 2}), at);
      for (std::uint32_t s = 0; s < x.size(at); ++s)
        add_constraint(vertex(at[0], at[1], s), {edge(dir, e01[s]), edge(dir, e12[s])}, {edge(dir, e02[s])});
    }
  }

  std::size_t run() {
    precompute();
    vertex_space_.assign(x_.size({0, 0, 0}), 0);
    transport_.assign(edges_.size(), nullptr);
    place_vertex(0);
    return count_;
  }

 private:
  struct Edge {
    int dir;
    std::uint32_t element, source, target;
  };
  struct Constraint {
    std::uint32_t start = 0;        // vertex both paths leave from
    std::vector<EdgeRef> lhs, rhs;  // paths, first edge first
    std::size_t ready = 0;          // position in edges_ after which every edge is set
  };

  EdgeRef edge(int dir, std::uint32_t e) const {
    auto it = edge_slot_[static_cast<std::size_t>(dir)].find(e);
    if (it == edge_slot_[static_cast<std::size_t>(dir)].end()) return {};
    return {dir, e};
  }

  void add_constraint(std::uint32_t start, std::vector<EdgeRef> lhs, std::vector<EdgeRef> rhs) {
    Constraint c{start, std::move(lhs), std::move(rhs), 0};
    for (const auto* side : {&c.lhs, &c.rhs})
      for (const auto& r : *side)
        if (r.dir >= 0) c.ready = std::max(c.ready, edge_slot_[static_cast<std::size_t>(r.dir)].at(r.element));
    constraints_.push_back(std::move(c));
  }

  // Global image of global element g along a path of set edges.
  std::uint32_t follow(const std::vector<EdgeRef>& path, std::uint32_t g) const {
    for (const auto& r : path)
      if (r.dir >= 0) g = (*transport_[edge_slot_[static_cast<std::size_t>(r.dir)].at(r.element)])[g];
    return g;
  }

  bool consistent(std::size_t position) const {
    for (const auto& c : constraints_) {
      if (c.ready != position) continue;
      const auto n = spaces_[vertex_space_[c.start]].element_count();
      for (std::uint32_t g = 0; g < n; ++g)
        if (follow(c.lhs, g) != follow(c.rhs, g)) return false;
    }
    return true;
  }

  void place_vertex(std::size_t v) {
    if (v == vertex_space_.size()) {
      place_edge(0);
      return;
    }
    for (auto s : allowed_) {
      vertex_space_[v] = s;
      place_vertex(v + 1);
    }
  }

  const std::vector<std::vector<std::uint32_t>>& maps_between(std::uint32_t a, std::uint32_t b) {
    auto key = std::make_pair(a, b);
    auto it = maps_.find(key);
    if (it != maps_.end()) return it->second;
    std::vector<std::vector<std::uint32_t>> flat;
    for (const auto& levels : enumerate_space_maps(spaces_[a], spaces_[b])) {
      std::vector<std::uint32_t> images;
      for (std::size_t k = 0; k < levels.size(); ++k)
        for (auto y : levels[k]) images.push_back(static_cast<std::uint32_t>(spaces_[b].element_begin(k)) + y);
      flat.push_back(std::move(images));
    }
    return maps_.emplace(key, std::move(flat)).first->second;
  }

  void place_edge(std::size_t i) {
    if (i == edges_.size()) {
      assemble();
      return;
    }
    const auto& e = edges_[i];
    for (const auto& images : maps_between(vertex_space_[e.source], vertex_space_[e.target])) {
      transport_[i] = &images;
      if (consistent(i)) place_edge(i + 1);
    }
    transport_[i] = nullptr;
  }

  // For every simplex of X: its initial vertex and, per direction and t, the edge slot
  // from vertex 0 to vertex t (npos for identities and degenerate edges).
  void precompute() {
    static constexpr auto none = static_cast<std::size_t>(-1);
    vertex_of_.assign(x_.cell_count(), {});
    edge_of_.assign(x_.cell_count(), {});
    for (std::size_t cell = 0; cell < x_.cell_count(); ++cell) {
      const Index at = x_.index(cell);
      const int n = at[0], l = at[1];
      prefix_.emplace_back();
      for (std::uint32_t s = 0; s < x_.size_at(cell); ++s) {
        vertex_of_[cell].push_back(vertex(n, l, s));
        prefix_[cell].push_back(std::string(x_.label_at(cell, s)) + ":");
      }
      for (int dir = 0; dir < 2; ++dir) {
        auto& table = edge_of_[cell][static_cast<std::size_t>(dir)];
        const int top = dir == 0 ? n : l;
        table.assign(static_cast<std::size_t>(top + 1), std::vector<std::size_t>(x_.size_at(cell), none));
        for (int t = 1; t <= top; ++t)
          for (std::uint32_t s = 0; s < x_.size_at(cell); ++s) {
            std::uint32_t e;
            if (dir == 0)
              e = x_.act_one(1, MonotoneMap::constant(0, l, 0), {1, l, 0}, x_.act_one(0, MonotoneMap(n, {0, t}), {n, l, 0}, s));
            else
              e = x_.act_one(1, MonotoneMap(l, {0, t}), {0, l, 0}, x_.act_one(0, MonotoneMap::constant(0, n, 0), {n, l, 0}, s));
            auto it = edge_slot_[static_cast<std::size_t>(dir)].find(e);
            if (it != edge_slot_[static_cast<std::size_t>(dir)].end()) table[static_cast<std::size_t>(t)][s] = it->second;
          }
      }
    }
  }

  std::uint32_t vertex(int n, int l, std::uint32_t sigma) const {
    return x_.act_one(1, MonotoneMap::constant(0, l, 0), {0, l, 0}, x_.act_one(0, MonotoneMap::constant(0, n, 0), {n, l, 0}, sigma));
  }

  void assemble() {
    const Bounds b{k_, x_.bounds()[0], x_.bounds()[1]};
    TruncatedPresheaf shape(3, b, std::vector<std::uint32_t>(embedded_->cell_count(), 0));
    std::vector<std::uint32_t> sizes(shape.cell_count());
    std::vector<std::vector<std::uint32_t>> start(shape.cell_count());
    LabelTable labels;
    std::vector<std::uint32_t> images;
    for (std::size_t cell = 0; cell < shape.cell_count(); ++cell) {
      const Index at = shape.index(cell);
      std::uint32_t total = 0;
      for (std::uint32_t s = 0; s < x_.size({at[1], at[2], 0}); ++s) {
        start[cell].push_back(total);
        const auto size = spaces_[vertex_space_[vertex_of_[x_.flat({at[1], at[2], 0})][s]]].size_at(static_cast<std::size_t>(at[0]));
        for (std::uint32_t i = 0; i < size; ++i) {
          labels.add(prefix_[x_.flat({at[1], at[2], 0})][s] + std::to_string(i));
          images.push_back(s);
        }
        total += size;
      }
      sizes[cell] = total;
    }
    TruncatedPresheaf r(3, b, std::move(sizes), std::move(labels));
    for (std::size_t cell = 0; cell < r.cell_count(); ++cell) {
      const Index at = r.index(cell);
      const auto k = static_cast<std::size_t>(at[0]);
      const auto xcell = x_.flat({at[1], at[2], 0});
      for (int dir = 0; dir < 3; ++dir)
        for (int slot = 0; slot < r.generator_count_at(dir, cell); ++slot) {
          const auto gen = generator_at(at[static_cast<std::size_t>(dir)], b[static_cast<std::size_t>(dir)], slot);
          const auto tcell = r.flat(shift(at, dir, gen.target_level()));
          const int t = gen.map()(0);
          auto table = r.action_slot_mut(dir, cell, slot);
          std::uint32_t e = 0;
          for (std::uint32_t s = 0; s < x_.size_at(xcell); ++s) {
            const auto& space = spaces_[vertex_space_[vertex_of_[xcell][s]]];
            const auto size = space.size_at(k);
            const std::uint32_t s2 = dir == 0 ? s : x_.action_slot(dir - 1, xcell, slot)[s];
            const auto base = start[tcell][s2];
            if (dir == 0) {
              auto act = space.action_slot(0, k, slot);
              for (std::uint32_t i = 0; i < size; ++i, ++e) table[e] = base + act[i];
              continue;
            }
            const auto slot_of_edge = edge_of_[xcell][static_cast<std::size_t>(dir - 1)][static_cast<std::size_t>(t)][s];
            if (t == 0 || slot_of_edge == static_cast<std::size_t>(-1)) {
              for (std::uint32_t i = 0; i < size; ++i, ++e) table[e] = base + i;
              continue;
            }
            const auto& edge = edges_[slot_of_edge];
            const auto from = static_cast<std::uint32_t>(spaces_[vertex_space_[edge.source]].element_begin(k));
            const auto to = static_cast<std::uint32_t>(spaces_[vertex_space_[edge.target]].element_begin(k));
            const auto& images = *transport_[slot_of_edge];
            for (std::uint32_t i = 0; i < size; ++i, ++e) table[e] = base + images[from + i] - to;
          }
        }
    }
    if (validate(r)) return;
    PresheafMap map(std::make_shared<const TruncatedPresheaf>(std::move(r)), embedded_, std::move(images));
    if (check_class(cls_, map)) ++count_;
  }

  Variant variant_;
  const TruncatedPresheaf& x_;
  int k_;
  FibrationClass cls_;
  std::vector<TruncatedPresheaf> spaces_;
  std::vector<std::uint32_t> allowed_;
  std::shared_ptr<const TruncatedPresheaf> embedded_;
  std::vector<Edge> edges_;
  std::array<std::map<std::uint32_t, std::size_t>, 2> edge_slot_;
  std::vector<Constraint> constraints_;
  std::vector<std::vector<std::uint32_t>> vertex_of_;
  std::vector<std::vector<std::string>> prefix_;
  std::vector<std::array<std::vector<std::vector<std::size_t>>, 2>> edge_of_;
  std::vector<std::uint32_t> vertex_space_;
  std::vector<const std::vector<std::uint32_t>*> transport_;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<std::vector<std::uint32_t>>> maps_;
  std::size_t count_ = 0;
};

}  // namespace

std::size_t count_fibrations_over(Variant v, const TruncatedPresheaf& x, int k_bound, int max_size) {
  return FibrationSearch(v, x, k_bound, max_size).run();
}

}  // namespace segal::oracle
