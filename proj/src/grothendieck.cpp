#include "segal/grothendieck.hpp"

#include <numeric>
#include <stdexcept>

namespace segal {

IndexedFunctor::IndexedFunctor(int p, int q, Bounds bounds, std::vector<Value> values)
    : p_(p), q_(q), bounds_(bounds), slice_p_(slice_category(p, bounds[1])), slice_q_(slice_category(q, bounds[2])), values_(std::move(values)) {
  const auto np = slice_p_->objects().size();
  const auto nq = slice_q_->objects().size();
  if (values_.size() != np * nq) throw std::invalid_argument("functor needs one value per anchor pair");
  for (const auto& v : values_)
    if (!v || v->arity() != 1 || v->bounds()[0] != bounds_[0]) throw std::invalid_argument("functor values must be spaces with the functor's k-bound");
  for (std::size_t g = 0; g < slice_p_->generators().size(); ++g)
    for (std::size_t i2 = 0; i2 < nq; ++i2) {
      action_from_.push_back(anchor(slice_p_->generator_source(g), i2));
      action_to_.push_back(anchor(slice_p_->generator_target(g), i2));
    }
  for (std::size_t i1 = 0; i1 < np; ++i1)
    for (std::size_t g = 0; g < slice_q_->generators().size(); ++g) {
      action_from_.push_back(anchor(i1, slice_q_->generator_source(g)));
      action_to_.push_back(anchor(i1, slice_q_->generator_target(g)));
    }
  const auto levels = static_cast<std::size_t>(bounds_[0] + 1);
  offsets_.assign(action_to_.size() * levels + 1, 0);
  for (std::size_t id = 0; id < action_to_.size(); ++id)
    for (std::size_t k = 0; k < levels; ++k)
      offsets_[id * levels + k + 1] = offsets_[id * levels + k] + values_[action_to_[id]]->size_at(k);
  pool_.assign(offsets_.back(), 0);
}

std::size_t IndexedFunctor::top_anchor() const {
  if (p_ > bounds_[1] || q_ > bounds_[2]) throw std::out_of_range("top anchor lies outside the slice bounds");
  return anchor(slice_p_->index_of(MonotoneMap::identity(p_)), slice_q_->index_of(MonotoneMap::identity(q_)));
}

bool operator==(const IndexedFunctor& a, const IndexedFunctor& b) {
  if (a.p_ != b.p_ || a.q_ != b.q_ || a.bounds_ != b.bounds_ || a.pool_ != b.pool_) return false;
  for (std::size_t i = 0; i < a.values_.size(); ++i)
    if (a.values_[i] != b.values_[i] && !(*a.values_[i] == *b.values_[i])) return false;
  return true;
}

PresheafMap sum_construction(const IndexedFunctor& g) {
  const auto& sp = g.slice_p();
  const auto& sq = g.slice_q();
  const Bounds b = g.bounds();
  auto base = base_presheaf(g.p(), g.q(), b);
  std::vector<std::string> names_p, names_q;
  for (const auto& o : sp.objects()) names_p.push_back(o.anchor.str() + ".");
  for (const auto& o : sq.objects()) names_q.push_back(o.anchor.str() + ":");
  // start[cell][local anchor] gives the first element of that anchor's block.
  std::vector<std::uint32_t> sizes(base->cell_count(), 0);
  std::vector<std::vector<std::uint32_t>> start(base->cell_count());
  LabelTable labels;
  std::vector<std::uint32_t> images;
  std::string label;
  for (std::size_t cell = 0; cell < base->cell_count(); ++cell) {
    const Index at = base->index(cell);
    const auto k = static_cast<std::size_t>(at[0]);
    const auto n1 = sp.level_size(at[1]);
    const auto n2 = sq.level_size(at[2]);
    auto& st = start[cell];
    st.resize(n1 * n2);
    std::uint32_t total = 0;
    for (std::size_t a1 = 0; a1 < n1; ++a1)
      for (std::size_t a2 = 0; a2 < n2; ++a2) {
        st[a1 * n2 + a2] = total;
        const auto i1 = sp.level_begin(at[1]) + a1;
        const auto i2 = sq.level_begin(at[2]) + a2;
        const auto& v = g.value(i1, i2);
        const auto size = v.size_at(k);
        for (std::uint32_t x = 0; x < size; ++x) {
          label = names_p[i1];
          label += names_q[i2];
          label += v.label_at(k, x);
          labels.add(label);
          images.push_back(static_cast<std::uint32_t>(a1 * n2 + a2));
        }
        total += size;
      }
    sizes[cell] = total;
  }
  TruncatedPresheaf sum(3, b, std::move(sizes), std::move(labels));
  for (std::size_t cell = 0; cell < sum.cell_count(); ++cell) {
    const Index at = sum.index(cell);
    const auto k = static_cast<std::size_t>(at[0]);
    const auto n1 = sp.level_size(at[1]);
    const auto n2 = sq.level_size(at[2]);
    const auto& st = start[cell];
    for (int dir = 0; dir < 3; ++dir) {
      const int slots = generator_count(at[static_cast<std::size_t>(dir)], b[static_cast<std::size_t>(dir)]);
      for (int slot = 0; slot < slots; ++slot) {
        const auto gen = generator_at(at[static_cast<std::size_t>(dir)], b[static_cast<std::size_t>(dir)], slot);
        const Index tat = shift(at, dir, gen.target_level());
        const auto& tst = start[sum.flat(tat)];
        const auto tn2 = sq.level_size(tat[2]);
        auto table = sum.action_slot_mut(dir, cell, slot);
        for (std::size_t a1 = 0; a1 < n1; ++a1)
          for (std::size_t a2 = 0; a2 < n2; ++a2) {
            const auto i1 = sp.level_begin(at[1]) + a1;
            const auto i2 = sq.level_begin(at[2]) + a2;
            const auto first = st[a1 * n2 + a2];
            std::span<const std::uint32_t> act;
            std::size_t local = a1 * tn2 + a2;
            if (dir == 0) {
              act = g.value(i1, i2).action_slot(0, k, slot);
            } else if (dir == 1) {
              const auto gi = sp.generator_index(i1, slot);
              local = (sp.generator_source(gi) - sp.level_begin(tat[1])) * tn2 + a2;
              act = g.action(g.action_p(gi, i2), at[0]);
            } else {
              const auto gi = sq.generator_index(i2, slot);
              local = a1 * tn2 + (sq.generator_source(gi) - sq.level_begin(tat[2]));
              act = g.action(g.action_q(i1, gi), at[0]);
            }
            const auto offset = tst[local];
            for (std::size_t x = 0; x < act.size(); ++x) table[first + x] = offset + act[x];
          }
      }
    }
  }
  return PresheafMap(std::make_shared<const TruncatedPresheaf>(std::move(sum)), base, std::move(images));
}

IndexedFunctor fiber_construction(const PresheafMap& alpha, int p, int q) {
  const auto& x = alpha.domain();
  const Bounds b = x.bounds();
  if (x.arity() != 3) throw std::invalid_argument("fiber construction needs an arity-3 map");
  auto base = base_presheaf(p, q, b);
  if (!(alpha.codomain_ptr() == base || alpha.codomain() == *base)) throw std::invalid_argument("map does not land in F(p) x Delta[q]");
  auto sp = slice_category(p, b[1]);
  auto sq = slice_category(q, b[2]);
  const auto nq = sq->objects().size();
  // Rank of every domain element inside its fiber.
  std::vector<std::uint32_t> rank(x.element_count());
  for (std::size_t cell = 0; cell < x.cell_count(); ++cell)
    for (std::uint32_t bb = 0; bb < base->size_at(cell); ++bb) {
      auto fib = alpha.fiber(cell, bb);
      for (std::uint32_t i = 0; i < fib.size(); ++i) rank[x.element_begin(cell) + fib[i]] = i;
    }
  auto local_of = [&](std::size_t i1, std::size_t i2) {
    const int n = sp->objects()[i1].level();
    const int l = sq->objects()[i2].level();
    return static_cast<std::uint32_t>((i1 - sp->level_begin(n)) * sq->level_size(l) + (i2 - sq->level_begin(l)));
  };
  std::vector<IndexedFunctor::Value> values;
  values.reserve(sp->objects().size() * nq);
  for (std::size_t i1 = 0; i1 < sp->objects().size(); ++i1)
    for (std::size_t i2 = 0; i2 < nq; ++i2) {
      const int n = sp->objects()[i1].level();
      const int l = sq->objects()[i2].level();
      const auto bb = local_of(i1, i2);
      std::vector<std::uint32_t> sizes(static_cast<std::size_t>(b[0]) + 1);
      for (int k = 0; k <= b[0]; ++k) sizes[static_cast<std::size_t>(k)] = static_cast<std::uint32_t>(alpha.fiber(x.flat({k, n, l}), bb).size());
      TruncatedPresheaf v(1, {b[0], 0, 0}, std::move(sizes));
      for (int k = 0; k <= b[0]; ++k) {
        auto cell = x.flat({k, n, l});
        auto fib = alpha.fiber(cell, bb);
        for (int slot = 0; slot < v.generator_count_at(0, static_cast<std::size_t>(k)); ++slot) {
          auto gen = generator_at(k, b[0], slot);
          auto tcell = x.flat({gen.target_level(), n, l});
          auto xa = x.action_slot(0, cell, slot);
          auto table = v.action_slot_mut(0, static_cast<std::size_t>(k), slot);
          for (std::uint32_t i = 0; i < fib.size(); ++i) {
            auto e = xa[fib[i]];
            if (alpha.image_at(tcell, e) != bb) throw std::invalid_argument("map is not natural in the fibration direction");
            table[i] = rank[x.element_begin(tcell) + e];
          }
        }
      }
      values.push_back(std::make_shared<const TruncatedPresheaf>(std::move(v)));
    }
  IndexedFunctor g(p, q, b, std::move(values));
  for (std::size_t id = 0; id < g.action_count(); ++id) {
    const auto to = g.action_target(id);
    const auto from = g.action_source(id);
    const auto t1 = to / nq, t2 = to % nq, f1 = from / nq, f2 = from % nq;
    const bool in_p = id < sp->generators().size() * nq;
    const int dir = in_p ? 1 : 2;
    const std::size_t gi = in_p ? id / nq : (id - sp->generators().size() * nq) % sq->generators().size();
    const auto& slice = in_p ? *sp : *sq;
    const std::size_t obj = in_p ? t1 : t2;
    const int slot = static_cast<int>(gi - slice.generator_begin(obj));
    const int n = sp->objects()[t1].level();
    const int l = sq->objects()[t2].level();
    for (int k = 0; k <= b[0]; ++k) {
      auto cell = x.flat({k, n, l});
      Index tat{k, sp->objects()[f1].level(), sq->objects()[f2].level()};
      auto tcell = x.flat(tat);
      auto fib = alpha.fiber(cell, local_of(t1, t2));
      auto xa = x.action_slot(dir, cell, slot);
      auto table = g.action_mut(id, k);
      for (std::uint32_t i = 0; i < fib.size(); ++i) {
        auto e = xa[fib[i]];
        if (alpha.image_at(tcell, e) != local_of(f1, f2)) throw std::invalid_argument("map is not natural in a base direction");
        table[i] = rank[x.element_begin(tcell) + e];
      }
    }
  }
  return g;
}

std::optional<std::string> functoriality_violation(const IndexedFunctor& g) {
  for (std::size_t id = 0; id < g.action_count(); ++id)
    for (int k = 0; k <= g.k_bound(); ++k) {
      auto limit = g.value_at(g.action_source(id)).size_at(static_cast<std::size_t>(k));
      for (auto y : g.action(id, k))
        if (y >= limit) return "action " + std::to_string(id) + " leaves its target set at k=" + std::to_string(k);
    }
  auto sum = sum_construction(g);
  if (auto v = validate(sum.domain())) return v->str(3);
  return std::nullopt;
}

namespace {

std::optional<std::string> first_difference(const TruncatedPresheaf& a, const TruncatedPresheaf& b) {
  if (!same_shape(a, b)) return std::string("shapes differ");
  for (std::size_t cell = 0; cell < a.cell_count(); ++cell) {
    auto where = " at (" + index_str(a.index(cell), a.arity()) + ")";
    if (a.size_at(cell) != b.size_at(cell)) return "level sizes differ" + where;
    for (std::uint32_t e = 0; e < a.size_at(cell); ++e)
      if (a.label_at(cell, e) != b.label_at(cell, e)) return "labels differ" + where;
    for (int d = 0; d < a.arity(); ++d)
      for (int slot = 0; slot < a.generator_count_at(d, cell); ++slot) {
        auto x = a.action_slot(d, cell, slot);
        auto y = b.action_slot(d, cell, slot);
        if (!std::equal(x.begin(), x.end(), y.begin())) return "actions in direction " + std::to_string(d) + " differ" + where;
      }
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::string> roundtrip_check(const IndexedFunctor& g) {
  auto back = fiber_construction(sum_construction(g), g.p(), g.q());
  if (back == g) return std::nullopt;
  for (std::size_t a = 0; a < g.anchor_count(); ++a)
    if (auto d = first_difference(back.value_at(a), g.value_at(a))) return "value at anchor " + std::to_string(a) + ": " + *d;
  for (std::size_t id = 0; id < g.action_count(); ++id)
    for (int k = 0; k <= g.k_bound(); ++k) {
      auto x = back.action(id, k);
      auto y = g.action(id, k);
      if (!std::equal(x.begin(), x.end(), y.begin(), y.end())) return "action " + std::to_string(id) + " differs at k=" + std::to_string(k);
    }
  return "functors differ";
}

std::optional<std::string> roundtrip_check(const PresheafMap& alpha, int p, int q) {
  auto sum = sum_construction(fiber_construction(alpha, p, q));
  const auto& x = alpha.domain();
  auto base = base_presheaf(p, q, x.bounds());
  // Tag every element of alpha's domain with its anchor and fiber rank.
  std::vector<std::uint32_t> rank(x.element_count());
  for (std::size_t cell = 0; cell < x.cell_count(); ++cell)
    for (std::uint32_t bb = 0; bb < base->size_at(cell); ++bb) {
      auto fib = alpha.fiber(cell, bb);
      for (std::uint32_t i = 0; i < fib.size(); ++i) rank[x.element_begin(cell) + fib[i]] = i;
    }
  auto tagged = relabel(x, [&](std::size_t cell, std::uint32_t e) {
    auto bl = base->label_at(cell, alpha.image_at(cell, e));
    // Base labels read "(f1,f2)".
    auto comma = bl.find(',');
    return std::string(bl.substr(1, comma - 1)) + "." + std::string(bl.substr(comma + 1, bl.size() - comma - 2)) + ":" +
           std::to_string(rank[x.element_begin(cell) + e]);
  });
  return first_difference(canonical_relabel(tagged), canonical_relabel(sum.domain()));
}

IndexedFunctor restrict(const IndexedFunctor& g, const MonotoneMap& delta1, const MonotoneMap& delta2) {
  if (delta1.target() != g.p() || delta2.target() != g.q()) throw std::invalid_argument("restriction maps must land in [p] and [q]");
  const Bounds b = g.bounds();
  auto sp = slice_category(delta1.source(), b[1]);
  auto sq = slice_category(delta2.source(), b[2]);
  std::vector<std::size_t> m1, m2;
  for (const auto& o : sp->objects()) m1.push_back(g.slice_p().index_of(compose(delta1, o.anchor)));
  for (const auto& o : sq->objects()) m2.push_back(g.slice_q().index_of(compose(delta2, o.anchor)));
  std::vector<IndexedFunctor::Value> values;
  values.reserve(m1.size() * m2.size());
  for (auto a : m1)
    for (auto c : m2) values.push_back(g.value_ptr(g.anchor(a, c)));
  IndexedFunctor r(delta1.source(), delta2.source(), b, std::move(values));
  auto copy = [&](std::size_t id, std::size_t src) {
    for (int k = 0; k <= b[0]; ++k) {
      auto s = g.action(src, k);
      std::copy(s.begin(), s.end(), r.action_mut(id, k).begin());
    }
  };
  for (std::size_t gi = 0; gi < sp->generators().size(); ++gi) {
    auto to = sp->generator_target(gi);
    auto slot = static_cast<int>(gi - sp->generator_begin(to));
    for (std::size_t i2 = 0; i2 < m2.size(); ++i2) copy(r.action_p(gi, i2), g.action_p(g.slice_p().generator_index(m1[to], slot), m2[i2]));
  }
  for (std::size_t i1 = 0; i1 < m1.size(); ++i1)
    for (std::size_t gi = 0; gi < sq->generators().size(); ++gi) {
      auto to = sq->generator_target(gi);
      auto slot = static_cast<int>(gi - sq->generator_begin(to));
      copy(r.action_q(i1, gi), g.action_q(m1[i1], g.slice_q().generator_index(m2[to], slot)));
    }
  return r;
}

IndexedFunctor constant_functor(int p, int q, Bounds bounds, const std::shared_ptr<const TruncatedPresheaf>& value) {
  auto sp = slice_category(p, bounds[1]);
  auto sq = slice_category(q, bounds[2]);
  IndexedFunctor g(p, q, bounds, std::vector<IndexedFunctor::Value>(sp->objects().size() * sq->objects().size(), value));
  for (std::size_t id = 0; id < g.action_count(); ++id)
    for (int k = 0; k <= bounds[0]; ++k) {
      auto t = g.action_mut(id, k);
      std::iota(t.begin(), t.end(), 0u);
    }
  return g;
}

std::size_t TripleFunctor::anchor(std::size_t ir, std::size_t i1, std::size_t i2) const {
  auto np = slice_category(p, bounds[1])->objects().size();
  auto nq = slice_category(q, bounds[2])->objects().size();
  return (ir * np + i1) * nq + i2;
}

TripleFunctor pull_back_r(const IndexedFunctor& g, int r) {
  if (r < 0 || r > g.k_bound()) throw std::out_of_range("r outside the k-bound");
  TripleFunctor h{r, g.p(), g.q(), g.bounds(), {}, {}};
  auto sr = slice_category(r, g.k_bound());
  const auto np = g.slice_p().objects().size();
  const auto nq = g.slice_q().objects().size();
  for (std::size_t ir = 0; ir < sr->objects().size(); ++ir) {
    auto k = static_cast<std::size_t>(sr->objects()[ir].level());
    for (std::size_t i1 = 0; i1 < np; ++i1)
      for (std::size_t i2 = 0; i2 < nq; ++i2) {
        const auto& v = g.value(i1, i2);
        std::vector<std::string> set;
        for (std::uint32_t e = 0; e < v.size_at(k); ++e) set.emplace_back(v.label_at(k, e));
        h.sets.push_back(std::move(set));
      }
  }
  for (std::size_t gi = 0; gi < sr->generators().size(); ++gi) {
    auto to = sr->generator_target(gi);
    auto k = static_cast<std::size_t>(sr->objects()[to].level());
    auto slot = static_cast<int>(gi - sr->generator_begin(to));
    for (std::size_t i1 = 0; i1 < np; ++i1)
      for (std::size_t i2 = 0; i2 < nq; ++i2) {
        auto t = g.value(i1, i2).action_slot(0, k, slot);
        h.actions[0].emplace_back(t.begin(), t.end());
      }
  }
  for (std::size_t ir = 0; ir < sr->objects().size(); ++ir) {
    int k = sr->objects()[ir].level();
    for (std::size_t gi = 0; gi < g.slice_p().generators().size(); ++gi)
      for (std::size_t i2 = 0; i2 < nq; ++i2) {
        auto t = g.action(g.action_p(gi, i2), k);
        h.actions[1].emplace_back(t.begin(), t.end());
      }
    for (std::size_t i1 = 0; i1 < np; ++i1)
      for (std::size_t gi = 0; gi < g.slice_q().generators().size(); ++gi) {
        auto t = g.action(g.action_q(i1, gi), k);
        h.actions[2].emplace_back(t.begin(), t.end());
      }
  }
  return h;
}

std::optional<IndexedFunctor> push_forward_r(const TripleFunctor& h) {
  const int kb = h.bounds[0];
  auto sr = slice_category(h.r, kb);
  auto sp = slice_category(h.p, h.bounds[1]);
  auto sq = slice_category(h.q, h.bounds[2]);
  const auto np = sp->objects().size();
  const auto nq = sq->objects().size();
  if (h.sets.size() != sr->objects().size() * np * nq) return std::nullopt;
  // Read everything at the constant anchors c_k : [k] -> [r] with value 0.
  std::vector<std::size_t> c(static_cast<std::size_t>(kb) + 1);
  for (int k = 0; k <= kb; ++k) c[static_cast<std::size_t>(k)] = sr->index_of(MonotoneMap::constant(k, h.r, 0));
  std::vector<IndexedFunctor::Value> values;
  for (std::size_t i1 = 0; i1 < np; ++i1)
    for (std::size_t i2 = 0; i2 < nq; ++i2) {
      std::vector<std::uint32_t> sizes;
      LabelTable labels;
      for (int k = 0; k <= kb; ++k) {
        const auto& set = h.sets[h.anchor(c[static_cast<std::size_t>(k)], i1, i2)];
        sizes.push_back(static_cast<std::uint32_t>(set.size()));
        for (const auto& s : set) labels.add(s);
      }
      TruncatedPresheaf v(1, {kb, 0, 0}, std::move(sizes), std::move(labels));
      for (int k = 0; k <= kb; ++k)
        for (int slot = 0; slot < v.generator_count_at(0, static_cast<std::size_t>(k)); ++slot) {
          auto gi = sr->generator_index(c[static_cast<std::size_t>(k)], slot);
          const auto& src = h.actions[0][(gi * np + i1) * nq + i2];
          auto t = v.action_slot_mut(0, static_cast<std::size_t>(k), slot);
          if (src.size() != t.size()) return std::nullopt;
          std::copy(src.begin(), src.end(), t.begin());
        }
      values.push_back(std::make_shared<const TruncatedPresheaf>(std::move(v)));
    }
  IndexedFunctor g(h.p, h.q, h.bounds, std::move(values));
  const auto per_r = sp->generators().size() * nq;
  const auto per_r_q = np * sq->generators().size();
  for (int k = 0; k <= kb; ++k) {
    auto ck = c[static_cast<std::size_t>(k)];
    for (std::size_t id = 0; id < g.action_count(); ++id) {
      const auto& src = id < per_r ? h.actions[1][ck * per_r + id] : h.actions[2][ck * per_r_q + (id - per_r)];
      auto t = g.action_mut(id, k);
      if (src.size() != t.size()) return std::nullopt;
      std::copy(src.begin(), src.end(), t.begin());
    }
  }
  if (!(pull_back_r(g, h.r) == h)) return std::nullopt;
  return g;
}

PointedTriple point_backward(const PointedIndexedFunctor& pointed) {
  const auto& g = pointed.base;
  auto h = pull_back_r(g, pointed.r);
  auto sr = slice_category(pointed.r, g.k_bound());
  auto cell = h.anchor(sr->index_of(MonotoneMap::identity(pointed.r)), g.top_anchor() / g.slice_q().objects().size(),
                       g.top_anchor() % g.slice_q().objects().size());
  if (pointed.basepoint >= h.sets[cell].size()) throw std::out_of_range("basepoint outside G(id_p, id_q)_r");
  return {std::move(h), pointed.basepoint};
}

PointedIndexedFunctor point_forward(const PointedTriple& pointed) {
  auto g = push_forward_r(pointed.functor);
  if (!g) throw std::invalid_argument("pointed functor is not pulled back along pi_r");
  auto top = g->top_anchor();
  if (pointed.basepoint >= g->value_at(top).size_at(static_cast<std::size_t>(pointed.functor.r)))
    throw std::out_of_range("basepoint outside G(id_p, id_q)_r");
  return {std::move(*g), pointed.functor.r, pointed.basepoint};
}

std::vector<PointedIndexedFunctor> pointed_over(const IndexedFunctor& g, int r) {
  if (r < 0 || r > g.k_bound()) throw std::out_of_range("r outside the k-bound");
  std::vector<PointedIndexedFunctor> out;
  auto n = g.value_at(g.top_anchor()).size_at(static_cast<std::size_t>(r));
  for (std::uint32_t x = 0; x < n; ++x) out.push_back({g, r, x});
  return out;
}

}  // namespace segal
