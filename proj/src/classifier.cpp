#include "segal/classifier.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>
#include <tuple>
#include <stdexcept>

#include "segal/parallel.hpp"

namespace segal {

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::SSpaces: return "SSpaces";
    case Variant::Seg: return "Seg";
    case Variant::CSS: return "CSS";
    case Variant::Spaces: return "Spaces";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  for (auto v : {Variant::SSpaces, Variant::Seg, Variant::CSS, Variant::Spaces})
    if (name == variant_name(v)) return v;
  throw std::invalid_argument("unknown variant \"" + std::string(name) + "\"");
}

FibrationClass variant_class(Variant v) {
  switch (v) {
    case Variant::SSpaces: return FibrationClass::ReedyLeft;
    case Variant::Seg: return FibrationClass::SegalCoCartesian;
    case Variant::CSS: return FibrationClass::CoCartesian;
    case Variant::Spaces: return FibrationClass::Left;
  }
  return FibrationClass::ReedyLeft;
}

// Spaces sits inside CSS, so it needs the completeness bound as well.
int variant_min_k(Variant v) {
  switch (v) {
    case Variant::SSpaces: return 0;
    case Variant::Seg: return 2;
    case Variant::CSS:
    case Variant::Spaces: return 3;
  }
  return 0;
}

std::optional<Variant> larger_variant(Variant v) {
  switch (v) {
    case Variant::Seg: return Variant::SSpaces;
    case Variant::CSS: return Variant::Seg;
    case Variant::Spaces: return Variant::CSS;
    default: return std::nullopt;
  }
}

void check_params(Variant v, const Params& params) {
  if (params.P < 0 || params.Q < 0 || params.K < 0 || params.m < 0) throw ParamError("parameters must be non-negative");
  if (params.K < variant_min_k(v))
    throw ParamError(std::string(variant_name(v)) + " needs k-bound >= " + std::to_string(variant_min_k(v)));
}

// ---------------------------------------------------------------- catalogue

ValueCatalogue::ValueCatalogue(int k_bound, int max_size) : k_bound_(k_bound), max_size_(max_size) {
  for (auto& s : enumerate_spaces(k_bound, max_size)) spaces_.push_back(std::make_shared<const TruncatedPresheaf>(std::move(s)));
  const auto n = spaces_.size();
  between_.resize(n * n);
  identity_.resize(n);
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = 0; b < n; ++b)
      for (const auto& levels : enumerate_space_maps(*spaces_[a], *spaces_[b])) {
        Arrow arrow{a, b, {}};
        for (std::size_t k = 0; k < levels.size(); ++k)
          for (auto y : levels[k]) arrow.images.push_back(static_cast<std::uint32_t>(spaces_[b]->element_begin(k)) + y);
        const auto id = static_cast<std::uint32_t>(arrows_.size());
        bool is_identity = a == b;
        for (std::size_t x = 0; is_identity && x < arrow.images.size(); ++x) is_identity = arrow.images[x] == x;
        if (is_identity) identity_[a] = id;
        lookup_.emplace(std::make_tuple(a, b, arrow.images), id);
        between_[a * n + b].push_back(id);
        arrows_.push_back(std::move(arrow));
      }
  for (auto v : {Variant::SSpaces, Variant::Seg, Variant::CSS, Variant::Spaces}) {
    auto& flags = passes_[static_cast<std::size_t>(v)];
    flags.assign(n, 0);
    if (k_bound < variant_min_k(v)) continue;
    for (std::size_t i = 0; i < n; ++i) {
      auto l = constant_over_base(*spaces_[i], 0, 0);
      bool ok = true;
      if (v == Variant::Seg || v == Variant::CSS) ok = !segal_witness(l);
      if (ok && v == Variant::CSS) ok = !complete_witness(l);
      if (v == Variant::Spaces) ok = !constant_witness(l);
      flags[i] = ok;
    }
  }
}

bool ValueCatalogue::passes(Variant v, std::uint32_t space) const { return passes_[static_cast<std::size_t>(v)][space] != 0; }

std::uint32_t ValueCatalogue::compose(std::uint32_t second, std::uint32_t first) const {
  const auto& f = arrows_[first];
  const auto& s = arrows_[second];
  if (f.target != s.source) throw std::invalid_argument("arrows do not compose");
  std::vector<std::uint32_t> images(f.images.size());
  for (std::size_t x = 0; x < images.size(); ++x) images[x] = s.images[f.images[x]];
  return *find_arrow(f.source, s.target, images);
}

std::optional<std::uint32_t> ValueCatalogue::find_space(const TruncatedPresheaf& x) const {
  for (std::uint32_t i = 0; i < spaces_.size(); ++i)
    if (spaces_[i].get() == &x || *spaces_[i] == x) return i;
  return std::nullopt;
}

std::optional<std::uint32_t> ValueCatalogue::find_arrow(std::uint32_t a, std::uint32_t b, const std::vector<std::uint32_t>& images) const {
  auto it = lookup_.find({a, b, images});
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::shared_ptr<const ValueCatalogue> value_catalogue(int k_bound, int max_size) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const ValueCatalogue>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{k_bound, max_size}];
  if (!slot) slot = std::make_shared<const ValueCatalogue>(k_bound, max_size);
  return slot;
}

// ---------------------------------------------------------------- codes

namespace {

struct Layout {
  int p, q;
  std::size_t vertex(int i, int j) const { return static_cast<std::size_t>(i * (q + 1) + j); }
  std::size_t across(int i, int j) const { return vertex(p, q) + 1 + static_cast<std::size_t>(i * (q + 1) + j); }
  std::size_t down(int i, int j) const { return vertex(p, q) + 1 + static_cast<std::size_t>(p * (q + 1) + i * q + j); }
};

// Global image of x under the transport from (i, j) to (i2, j2), moving along rows first.
std::uint32_t transport(const ValueCatalogue& cat, const Layout& lay, const std::uint32_t* code, int i, int j, int i2, int j2,
                        std::uint32_t x) {
  for (int t = i; t < i2; ++t) x = cat.arrow(code[lay.across(t, j)]).images[x];
  for (int t = j; t < j2; ++t) x = cat.arrow(code[lay.down(i2, t)]).images[x];
  return x;
}

std::uint32_t path_arrow(const ValueCatalogue& cat, const Layout& lay, const std::uint32_t* code, bool across, int fixed, int from, int to) {
  std::uint32_t id = cat.identity(code[across ? lay.vertex(from, fixed) : lay.vertex(fixed, from)]);
  for (int t = from; t < to; ++t) id = cat.compose(code[across ? lay.across(t, fixed) : lay.down(fixed, t)], id);
  return id;
}

}  // namespace

std::size_t code_width(int p, int q) {
  return static_cast<std::size_t>((p + 1) * (q + 1) + p * (q + 1) + (p + 1) * q);
}

IndexedFunctor decode(const ValueCatalogue& cat, int p, int q, Bounds bounds, const std::uint32_t* code) {
  if (bounds[0] != cat.k_bound()) throw std::invalid_argument("k-bound differs from the catalogue");
  const Layout lay{p, q};
  auto sp = slice_category(p, bounds[1]);
  auto sq = slice_category(q, bounds[2]);
  std::vector<IndexedFunctor::Value> values;
  values.reserve(sp->objects().size() * sq->objects().size());
  for (const auto& o1 : sp->objects())
    for (const auto& o2 : sq->objects()) values.push_back(cat.space(code[lay.vertex(o1.anchor(0), o2.anchor(0))]));
  IndexedFunctor g(p, q, bounds, std::move(values));
  auto fill = [&](std::size_t id, int i, int j, int i2, int j2) {
    const auto& from = g.value_at(g.action_target(id));
    const auto& to = g.value_at(g.action_source(id));
    for (int k = 0; k <= bounds[0]; ++k) {
      auto out = g.action_mut(id, k);
      const auto b0 = static_cast<std::uint32_t>(from.element_begin(static_cast<std::size_t>(k)));
      const auto b1 = static_cast<std::uint32_t>(to.element_begin(static_cast<std::size_t>(k)));
      for (std::uint32_t x = 0; x < out.size(); ++x) out[x] = transport(cat, lay, code, i, j, i2, j2, b0 + x) - b1;
    }
  };
  const auto nq = sq->objects().size();
  for (std::size_t gi = 0; gi < sp->generators().size(); ++gi) {
    const auto& m = sp->generators()[gi];
    for (std::size_t i2 = 0; i2 < nq; ++i2) {
      const int j = sq->objects()[i2].anchor(0);
      fill(g.action_p(gi, i2), m.to.anchor(0), j, m.from.anchor(0), j);
    }
  }
  for (std::size_t i1 = 0; i1 < sp->objects().size(); ++i1)
    for (std::size_t gi = 0; gi < sq->generators().size(); ++gi) {
      const auto& m = sq->generators()[gi];
      const int i = sp->objects()[i1].anchor(0);
      fill(g.action_q(i1, gi), i, m.to.anchor(0), i, m.from.anchor(0));
    }
  return g;
}

std::optional<FunctorCode> encode(const ValueCatalogue& cat, const IndexedFunctor& g) {
  const int p = g.p(), q = g.q();
  if (g.k_bound() != cat.k_bound()) return std::nullopt;
  if ((p >= 1 && g.bounds()[1] < 1) || (q >= 1 && g.bounds()[2] < 1)) throw std::invalid_argument("slice bounds too small to read edges");
  const Layout lay{p, q};
  const auto& sp = g.slice_p();
  const auto& sq = g.slice_q();
  FunctorCode code(code_width(p, q));
  auto vertex_p = [&](int i) { return sp.index_of(MonotoneMap::constant(0, p, i)); };
  auto vertex_q = [&](int j) { return sq.index_of(MonotoneMap::constant(0, q, j)); };
  for (int i = 0; i <= p; ++i)
    for (int j = 0; j <= q; ++j) {
      auto s = cat.find_space(g.value(vertex_p(i), vertex_q(j)));
      if (!s) return std::nullopt;
      code[lay.vertex(i, j)] = *s;
    }
  auto read = [&](std::size_t id, std::uint32_t a, std::uint32_t b) -> std::optional<std::uint32_t> {
    const auto& from = *cat.space(a);
    const auto& to = *cat.space(b);
    if (g.value_at(g.action_target(id)) != from || g.value_at(g.action_source(id)) != to) return std::nullopt;
    std::vector<std::uint32_t> images;
    for (int k = 0; k <= g.k_bound(); ++k)
      for (auto y : g.action(id, k)) images.push_back(y + static_cast<std::uint32_t>(to.element_begin(static_cast<std::size_t>(k))));
    return cat.find_arrow(a, b, images);
  };
  for (int i = 0; i < p; ++i)
    for (int j = 0; j <= q; ++j) {
      auto edge = sp.index_of(MonotoneMap(p, {i, i + 1}));
      auto id = g.action_p(sp.generator_index(edge, 0), vertex_q(j));
      auto arrow = read(id, code[lay.vertex(i, j)], code[lay.vertex(i + 1, j)]);
      if (!arrow) return std::nullopt;
      code[lay.across(i, j)] = *arrow;
    }
  for (int i = 0; i <= p; ++i)
    for (int j = 0; j < q; ++j) {
      auto edge = sq.index_of(MonotoneMap(q, {j, j + 1}));
      auto id = g.action_q(vertex_p(i), sq.generator_index(edge, 0));
      auto arrow = read(id, code[lay.vertex(i, j)], code[lay.vertex(i, j + 1)]);
      if (!arrow) return std::nullopt;
      code[lay.down(i, j)] = *arrow;
    }
  if (!(decode(cat, p, q, g.bounds(), code.data()) == g)) return std::nullopt;
  return code;
}

FunctorCode restrict_code(const ValueCatalogue& cat, int p, int q, const std::uint32_t* code, const MonotoneMap& delta1,
                          const MonotoneMap& delta2) {
  if (delta1.target() != p || delta2.target() != q) throw std::invalid_argument("restriction maps must land in [p] and [q]");
  const Layout from{p, q};
  const int p2 = delta1.source(), q2 = delta2.source();
  const Layout to{p2, q2};
  FunctorCode out(code_width(p2, q2));
  for (int i = 0; i <= p2; ++i)
    for (int j = 0; j <= q2; ++j) out[to.vertex(i, j)] = code[from.vertex(delta1(i), delta2(j))];
  for (int i = 0; i < p2; ++i)
    for (int j = 0; j <= q2; ++j) out[to.across(i, j)] = path_arrow(cat, from, code, true, delta2(j), delta1(i), delta1(i + 1));
  for (int i = 0; i <= p2; ++i)
    for (int j = 0; j < q2; ++j) out[to.down(i, j)] = path_arrow(cat, from, code, false, delta1(i), delta2(j), delta2(j + 1));
  return out;
}

// ---------------------------------------------------------------- enumeration

namespace {

class GridSearch {
 public:
  GridSearch(const ValueCatalogue& cat, int p, int q, std::vector<std::uint32_t> allowed)
      : cat_(cat), lay_{p, q}, allowed_(std::move(allowed)), code_(code_width(p, q)) {}

  std::vector<FunctorCode> run() {
    place(0);
    return std::move(out_);
  }

 private:
  void place(int pos) {
    if (pos == (lay_.p + 1) * (lay_.q + 1)) {
      out_.push_back(code_);
      return;
    }
    const int i = pos / (lay_.q + 1), j = pos % (lay_.q + 1);
    for (auto a : allowed_) {
      code_[lay_.vertex(i, j)] = a;
      if (i == 0) {
        down(pos, i, j);
        continue;
      }
      for (auto h : cat_.arrows_between(code_[lay_.vertex(i - 1, j)], a)) {
        code_[lay_.across(i - 1, j)] = h;
        down(pos, i, j);
      }
    }
  }

  void down(int pos, int i, int j) {
    if (j == 0) {
      place(pos + 1);
      return;
    }
    for (auto v : cat_.arrows_between(code_[lay_.vertex(i, j - 1)], code_[lay_.vertex(i, j)])) {
      code_[lay_.down(i, j - 1)] = v;
      if (i > 0 && !commutes(i - 1, j - 1)) continue;
      place(pos + 1);
    }
  }

  bool commutes(int i, int j) const {
    const auto& a = cat_.arrow(code_[lay_.across(i, j)]).images;
    const auto& b = cat_.arrow(code_[lay_.down(i + 1, j)]).images;
    const auto& c = cat_.arrow(code_[lay_.down(i, j)]).images;
    const auto& d = cat_.arrow(code_[lay_.across(i, j + 1)]).images;
    for (std::size_t x = 0; x < a.size(); ++x)
      if (b[a[x]] != d[c[x]]) return false;
    return true;
  }

  const ValueCatalogue& cat_;
  Layout lay_;
  std::vector<std::uint32_t> allowed_;
  FunctorCode code_;
  std::vector<FunctorCode> out_;
};

std::vector<FunctorCode> enumerate_codes(const ValueCatalogue& cat, Variant v, int p, int q, const Params& params, int jobs) {
  std::vector<std::uint32_t> allowed;
  for (std::uint32_t s = 0; s < cat.size(); ++s)
    if (cat.passes(v, s)) allowed.push_back(s);
  auto candidates = GridSearch(cat, p, q, std::move(allowed)).run();
  std::vector<char> keep(candidates.size(), 0);
  const auto cls = variant_class(v);
  parallel_for(candidates.size(), jobs, [&](std::size_t i) {
    auto g = decode(cat, p, q, params.functor_bounds(), candidates[i].data());
    keep[i] = static_cast<bool>(check_class(cls, sum_construction(g)));
  });
  std::vector<FunctorCode> out;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (keep[i]) out.push_back(std::move(candidates[i]));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<FunctorCode> enumerate_functor_codes(Variant v, int p, int q, const Params& params) {
  check_params(v, params);
  if (p > params.P || q > params.Q) throw ParamError("level outside the parameter bounds");
  return enumerate_codes(*value_catalogue(params.K, params.m), v, p, q, params, 1);
}

std::vector<IndexedFunctor> enumerate_functors(Variant v, int p, int q, const Params& params) {
  auto cat = value_catalogue(params.K, params.m);
  std::vector<IndexedFunctor> out;
  for (const auto& code : enumerate_functor_codes(v, p, q, params)) out.push_back(decode(*cat, p, q, params.functor_bounds(), code.data()));
  return out;
}

// ---------------------------------------------------------------- classifier

std::optional<std::uint32_t> ClassifierLevel::find(const std::uint32_t* code) const {
  std::size_t lo = 0, hi = size();
  while (lo < hi) {
    const auto mid = (lo + hi) / 2;
    const auto* c = this->code(mid);
    if (std::lexicographical_compare(c, c + width, code, code + width))
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo < size() && std::equal(code, code + width, this->code(lo))) return static_cast<std::uint32_t>(lo);
  return std::nullopt;
}

const ClassifierLevel& ClassifierComplex::level(int p, int q) const {
  if (p < 0 || q < 0 || p > params_.P || q > params_.Q) throw std::out_of_range("classifier level out of range");
  return levels_[static_cast<std::size_t>(p * (params_.Q + 1) + q)];
}

IndexedFunctor ClassifierComplex::element(int p, int q, std::size_t i) const {
  return decode(*catalogue_, p, q, params_.functor_bounds(), level(p, q).code(i));
}

std::optional<std::uint32_t> ClassifierComplex::find(const IndexedFunctor& g) const {
  if (g.p() > params_.P || g.q() > params_.Q || g.bounds() != params_.functor_bounds()) return std::nullopt;
  auto code = encode(*catalogue_, g);
  if (!code) return std::nullopt;
  return level(g.p(), g.q()).find(code->data());
}

const std::shared_ptr<const TruncatedPresheaf>& ClassifierComplex::as_presheaf() const {
  if (!presheaf_) throw std::logic_error("classifier was built without operators");
  return presheaf_;
}

namespace {

// Operator tables of the arity-2 presheaf; throws when a restriction leaves the levels.
std::shared_ptr<const TruncatedPresheaf> operator_presheaf(const ValueCatalogue& cat, const Params& params,
                                                           const std::vector<ClassifierLevel>& levels, int jobs) {
  std::vector<std::uint32_t> sizes;
  for (const auto& lv : levels) sizes.push_back(static_cast<std::uint32_t>(lv.size()));
  TruncatedPresheaf c(2, {params.P, params.Q, 0}, std::move(sizes));
  auto at = [&](int p, int q) -> const ClassifierLevel& { return levels[static_cast<std::size_t>(p * (params.Q + 1) + q)]; };
  for (std::size_t cell = 0; cell < c.cell_count(); ++cell) {
    const Index idx = c.index(cell);
    const auto& lv = at(idx[0], idx[1]);
    for (int dir = 0; dir < 2; ++dir)
      for (int slot = 0; slot < c.generator_count_at(dir, cell); ++slot) {
        const auto gen = generator_at(idx[static_cast<std::size_t>(dir)], dir == 0 ? params.P : params.Q, slot);
        const auto delta = gen.map();
        const int p2 = dir == 0 ? gen.target_level() : idx[0];
        const int q2 = dir == 1 ? gen.target_level() : idx[1];
        const auto& target = at(p2, q2);
        auto table = c.action_slot_mut(dir, cell, slot);
        std::vector<char> missing(lv.size(), 0);
        parallel_for(lv.size(), jobs, [&](std::size_t i) {
          auto r = dir == 0 ? restrict_code(cat, idx[0], idx[1], lv.code(i), delta, MonotoneMap::identity(idx[1]))
                            : restrict_code(cat, idx[0], idx[1], lv.code(i), MonotoneMap::identity(idx[0]), delta);
          auto found = target.find(r.data());
          if (found)
            table[i] = *found;
          else
            missing[i] = 1;
        });
        auto bad = std::find(missing.begin(), missing.end(), 1);
        if (bad != missing.end())
          throw ClosureViolation("restriction of element " + std::to_string(bad - missing.begin()) + " at level " + index_str(idx, 2) +
                                 " along " + delta.str() + " leaves the classifier");
      }
  }
  if (auto v = validate(c)) throw ClosureViolation("classifier violates " + v->str(2));
  return std::make_shared<const TruncatedPresheaf>(std::move(c));
}

ClassifierLevel pack(int p, int q, const std::vector<FunctorCode>& codes) {
  ClassifierLevel lv{p, q, code_width(p, q), {}};
  lv.data.reserve(codes.size() * lv.width);
  for (const auto& c : codes) lv.data.insert(lv.data.end(), c.begin(), c.end());
  return lv;
}

}  // namespace

ClassifierComplex build_classifier(Variant v, const Params& params, int jobs, bool with_operators) {
  check_params(v, params);
  ClassifierComplex c;
  c.variant_ = v;
  c.params_ = params;
  c.catalogue_ = value_catalogue(params.K, params.m);
  for (int p = 0; p <= params.P; ++p)
    for (int q = 0; q <= params.Q; ++q) c.levels_.push_back(pack(p, q, enumerate_codes(*c.catalogue_, v, p, q, params, jobs)));
  if (with_operators) c.presheaf_ = operator_presheaf(*c.catalogue_, params, c.levels_, jobs);
  return c;
}

ClassifierComplex classifier_from_levels(Variant v, const Params& params, std::vector<ClassifierLevel> levels, int jobs,
                                         bool with_operators) {
  check_params(v, params);
  if (levels.size() != static_cast<std::size_t>((params.P + 1) * (params.Q + 1))) throw std::invalid_argument("one level per (p, q) expected");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const auto& lv = levels[i];
    if (static_cast<std::size_t>(lv.p * (params.Q + 1) + lv.q) != i || lv.width != code_width(lv.p, lv.q) || lv.data.size() % lv.width != 0)
      throw std::invalid_argument("malformed level " + std::to_string(lv.p) + "," + std::to_string(lv.q));
    for (std::size_t e = 1; e < lv.size(); ++e)
      if (!std::lexicographical_compare(lv.code(e - 1), lv.code(e - 1) + lv.width, lv.code(e), lv.code(e) + lv.width))
        throw std::invalid_argument("codes at level " + std::to_string(lv.p) + "," + std::to_string(lv.q) + " are not sorted");
  }
  ClassifierComplex c;
  c.variant_ = v;
  c.params_ = params;
  c.catalogue_ = value_catalogue(params.K, params.m);
  c.levels_ = std::move(levels);
  if (with_operators) c.presheaf_ = operator_presheaf(*c.catalogue_, params, c.levels_, jobs);
  return c;
}

ClassifierComplex filter_classifier(const ClassifierComplex& c, Variant v) {
  check_params(v, c.params_);
  ClassifierComplex out;
  out.variant_ = v;
  out.params_ = c.params_;
  out.catalogue_ = c.catalogue_;
  const auto cls = variant_class(v);
  for (const auto& lv : c.levels_) {
    ClassifierLevel kept{lv.p, lv.q, lv.width, {}};
    for (std::size_t i = 0; i < lv.size(); ++i) {
      auto g = decode(*c.catalogue_, lv.p, lv.q, c.params_.functor_bounds(), lv.code(i));
      if (check_class(cls, sum_construction(g))) kept.data.insert(kept.data.end(), lv.code(i), lv.code(i) + lv.width);
    }
    out.levels_.push_back(std::move(kept));
  }
  if (c.has_operators()) out.presheaf_ = operator_presheaf(*out.catalogue_, out.params_, out.levels_, 1);
  return out;
}

// ---------------------------------------------------------------- pointed classifier

PointedClassifier build_pointed(const ClassifierComplex& c, int r_bound) {
  const auto& params = c.params();
  const auto& cat = c.catalogue();
  if (r_bound < 0 || r_bound > params.K) throw std::invalid_argument("r-bound must lie within the k-bound");
  const auto& cp = *c.as_presheaf();
  auto embedded = std::make_shared<const TruncatedPresheaf>(standard_embed(cp, r_bound));
  const Bounds b{r_bound, params.P, params.Q};
  // start[cell][G] is the first element of G's block.
  TruncatedPresheaf shape(3, b, std::vector<std::uint32_t>(embedded->cell_count(), 0));
  std::vector<std::vector<std::uint32_t>> start(shape.cell_count());
  std::vector<std::uint32_t> sizes(shape.cell_count());
  LabelTable labels;
  std::vector<std::uint32_t> images;
  for (std::size_t cell = 0; cell < shape.cell_count(); ++cell) {
    const Index at = shape.index(cell);
    const auto& lv = c.level(at[1], at[2]);
    auto& st = start[cell];
    st.resize(lv.size() + 1);
    std::uint32_t total = 0;
    for (std::size_t g = 0; g < lv.size(); ++g) {
      st[g] = total;
      const auto n = cat.space(lv.code(g)[0])->size_at(static_cast<std::size_t>(at[0]));
      const auto prefix = std::to_string(g) + ".";
      for (std::uint32_t x = 0; x < n; ++x) {
        labels.add(prefix + std::to_string(x));
        images.push_back(static_cast<std::uint32_t>(g));
      }
      total += n;
    }
    st[lv.size()] = total;
    sizes[cell] = total;
  }
  TruncatedPresheaf pointed(3, b, std::move(sizes), std::move(labels));
  for (std::size_t cell = 0; cell < pointed.cell_count(); ++cell) {
    const Index at = pointed.index(cell);
    const auto k = static_cast<std::size_t>(at[0]);
    const auto& lv = c.level(at[1], at[2]);
    const Layout lay{at[1], at[2]};
    const auto ccell = cp.flat({at[1], at[2], 0});
    for (int dir = 0; dir < 3; ++dir)
      for (int slot = 0; slot < pointed.generator_count_at(dir, cell); ++slot) {
        const auto gen = generator_at(at[static_cast<std::size_t>(dir)], b[static_cast<std::size_t>(dir)], slot);
        const Index tat = shift(at, dir, gen.target_level());
        const auto tcell = pointed.flat(tat);
        const auto tk = static_cast<std::size_t>(tat[0]);
        const int vertex = gen.map()(0);
        auto table = pointed.action_slot_mut(dir, cell, slot);
        for (std::size_t g = 0; g < lv.size(); ++g) {
          const auto* code = lv.code(g);
          const auto& space = *cat.space(code[0]);
          const auto first = start[cell][g];
          const auto n = start[cell][g + 1] - first;
          if (dir == 0) {
            auto act = space.action_slot(0, k, slot);
            for (std::uint32_t x = 0; x < n; ++x) table[first + x] = start[tcell][g] + act[x];
            continue;
          }
          const auto g2 = cp.action_slot(dir - 1, ccell, slot)[g];
          const auto& target = *cat.space(c.level(tat[1], tat[2]).code(g2)[0]);
          for (std::uint32_t x = 0; x < n; ++x) {
            auto y = transport(cat, lay, code, 0, 0, dir == 1 ? vertex : 0, dir == 2 ? vertex : 0,
                               static_cast<std::uint32_t>(space.element_begin(k)) + x);
            table[first + x] = start[tcell][g2] + y - static_cast<std::uint32_t>(target.element_begin(tk));
          }
        }
      }
  }
  auto object = std::make_shared<const TruncatedPresheaf>(std::move(pointed));
  return {object, PresheafMap(object, embedded, std::move(images))};
}

PresheafMap yoneda_map(const ClassifierComplex& c, const PresheafMap::Ptr& embedded, int p, int q, std::size_t i) {
  const auto& cp = *c.as_presheaf();
  const Bounds b = embedded->bounds();
  auto base = base_presheaf(p, q, b);
  std::vector<std::uint32_t> images;
  images.reserve(base->element_count());
  for (std::size_t cell = 0; cell < base->cell_count(); ++cell) {
    const Index at = base->index(cell);
    const auto f1s = enumerate_monotone(at[1], p);
    const auto f2s = enumerate_monotone(at[2], q);
    // Memoized whole-level tables; every element of the level reuses them.
    for (const auto& f1 : f1s) {
      const auto g1 = cp.act(0, f1, {p, q, 0})[i];
      for (const auto& f2 : f2s) images.push_back(cp.act(1, f2, {at[1], q, 0})[g1]);
    }
  }
  return PresheafMap(base, embedded, std::move(images));
}

PresheafMap yoneda_map(const ClassifierComplex& c, int p, int q, std::size_t i) {
  auto embedded = std::make_shared<const TruncatedPresheaf>(standard_embed(*c.as_presheaf(), c.params().K));
  return yoneda_map(c, embedded, p, q, i);
}

namespace {

std::string_view after_last(std::string_view s, char sep) { return s.substr(s.rfind(sep) + 1); }

// "(f1,f2)" and "G.x" -> "f1.f2:x"
std::string anchor_label(std::string_view base, std::string_view pointed) {
  std::string out(base.substr(1, base.size() - 2));
  out[out.find(',')] = '.';
  out += ':';
  out += after_last(pointed, '.');
  return out;
}

}  // namespace

UniversalReport universal_check(const ClassifierComplex& c, const PointedClassifier& pointed, int jobs) {
  const auto& params = c.params();
  if (pointed.object->bounds()[0] != params.K) throw std::invalid_argument("universal check needs the pointed classifier at r-bound K");
  const auto cls = variant_class(c.variant());
  UniversalReport report;
  std::mutex mutex;
  for (int p = 0; p <= params.P; ++p)
    for (int q = 0; q <= params.Q; ++q) {
      const auto& lv = c.level(p, q);
      parallel_for(lv.size(), jobs, [&](std::size_t i) {
        auto y = yoneda_map(c, pointed.projection.codomain_ptr(), p, q, i);
        auto pb = pullback(y, pointed.projection, anchor_label);
        auto sum = sum_construction(c.element(p, q, i));
        std::string detail;
        if (!(*pb.object == sum.domain()))
          detail = "pullback differs from the sum construction";
        else if (pb.left.images() != sum.images())
          detail = "pullback projection differs from the sum projection";
        else if (auto v = check_class(cls, pb.left); !v)
          detail = std::string("pullback fails ") + class_name(cls) + " at " + v.witness->condition;
        std::lock_guard lock(mutex);
        ++report.checked;
        if (!detail.empty()) report.failures.push_back({p, q, i, detail});
      });
    }
  std::sort(report.failures.begin(), report.failures.end(),
            [](const CheckFailure& a, const CheckFailure& b) { return std::tie(a.p, a.q, a.element) < std::tie(b.p, b.q, b.element); });
  return report;
}

// ---------------------------------------------------------------- classify / name

PresheafMap fiber_canonical(const PresheafMap& g) {
  const auto& d = g.domain();
  std::vector<std::uint32_t> rank(d.element_count());
  for (std::size_t cell = 0; cell < d.cell_count(); ++cell)
    for (std::uint32_t b = 0; b < g.codomain().size_at(cell); ++b) {
      auto fib = g.fiber(cell, b);
      for (std::uint32_t r = 0; r < fib.size(); ++r) rank[d.element_begin(cell) + fib[r]] = r;
    }
  auto relabelled = relabel(d, [&](std::size_t cell, std::uint32_t e) {
    return std::string(g.codomain().label_at(cell, g.image_at(cell, e))) + ":" + std::to_string(rank[d.element_begin(cell) + e]);
  });
  return PresheafMap(std::make_shared<const TruncatedPresheaf>(std::move(relabelled)), g.codomain_ptr(), g.images());
}

PresheafMap classify(const ClassifierComplex& c, const PointedClassifier& pointed, const PresheafMap& f) {
  const auto& cp = c.as_presheaf();
  const auto& x = f.domain();
  if (x.arity() != 2) throw std::invalid_argument("classify needs a map out of an arity-2 presheaf");
  if (x.bounds()[0] != c.params().P || x.bounds()[1] != c.params().Q)
    throw std::invalid_argument("base bounds must equal the classifier's level bounds");
  if (!(f.codomain_ptr() == cp || f.codomain() == *cp)) throw std::invalid_argument("map does not land in the classifier");
  if (auto v = f.naturality_violation()) throw std::invalid_argument("not a natural map: " + v->str(2));
  const int r = pointed.object->bounds()[0];
  auto ex = std::make_shared<const TruncatedPresheaf>(standard_embed(x, r));
  std::vector<std::uint32_t> images;
  images.reserve(ex->element_count());
  for (std::size_t cell = 0; cell < ex->cell_count(); ++cell) {
    const Index at = ex->index(cell);
    const auto src = x.flat({at[1], at[2], 0});
    for (std::uint32_t e = 0; e < ex->size_at(cell); ++e) images.push_back(f.image_at(src, e));
  }
  PresheafMap g(ex, pointed.projection.codomain_ptr(), std::move(images));
  auto pb = pullback(g, pointed.projection,
                     [](std::string_view a, std::string_view b) { return std::string(a) + ":" + std::string(after_last(b, '.')); });
  return pb.left;
}

PresheafMap name(const ClassifierComplex& c, const PresheafMap& g) {
  const auto& params = c.params();
  const auto& ex = g.codomain();
  if (ex.arity() != 3 || ex.bounds()[0] != params.K) throw std::invalid_argument("name needs a fibration over an embedded base with k-bound K");
  if (ex.bounds()[1] != params.P || ex.bounds()[2] != params.Q)
    throw std::invalid_argument("base bounds must equal the classifier's level bounds");
  if (auto v = g.naturality_violation()) throw std::invalid_argument("not a natural map: " + v->str(3));
  auto x = std::make_shared<const TruncatedPresheaf>(slice_direction(ex, 0, 0));
  for (std::size_t cell = 0; cell < ex.cell_count(); ++cell)
    for (std::uint32_t b = 0; b < ex.size_at(cell); ++b)
      if (g.fiber(cell, b).size() > static_cast<std::size_t>(params.m))
        throw std::domain_error("fiber over " + std::string(ex.label_at(cell, b)) + " at " + index_str(ex.index(cell), 3) +
                                " exceeds the fiber bound");
  std::vector<std::uint32_t> images;
  for (std::size_t cell = 0; cell < x->cell_count(); ++cell) {
    const Index at = x->index(cell);
    const int n = at[0], l = at[1];
    for (std::uint32_t e = 0; e < x->size_at(cell); ++e) {
      auto base = base_presheaf(n, l, ex.bounds());
      std::vector<std::uint32_t> yi;
      yi.reserve(base->element_count());
      for (std::size_t bc = 0; bc < base->cell_count(); ++bc) {
        const Index bat = base->index(bc);
        for (const auto& f1 : enumerate_monotone(bat[1], n)) {
          const auto e1 = x->act_one(0, f1, {n, l, 0}, e);
          for (const auto& f2 : enumerate_monotone(bat[2], l)) yi.push_back(x->act_one(1, f2, {bat[1], l, 0}, e1));
        }
      }
      PresheafMap hat(base, g.codomain_ptr(), std::move(yi));
      auto pb = pullback(hat, g);
      auto functor = fiber_construction(pb.left, n, l);
      auto found = c.find(functor);
      if (!found)
        throw std::domain_error("fibration over " + std::string(x->label_at(cell, e)) + " lies outside " + variant_name(c.variant()));
      images.push_back(*found);
    }
  }
  return PresheafMap(x, c.as_presheaf(), std::move(images));
}

// ---------------------------------------------------------------- sub-classifiers, diagonal

std::vector<SubclassifierReport> subclassifier_check(const ClassifierComplex& whole, const std::vector<const ClassifierComplex*>& subs,
                                                     int jobs) {
  if (whole.variant() != Variant::SSpaces) throw std::invalid_argument("subclassifier check runs against SSpaces");
  for (const auto* sub : subs)
    if (!(whole.params() == sub->params())) throw std::invalid_argument("classifiers built with different parameters");
  const auto& params = whole.params();
  std::vector<SubclassifierReport> reports(subs.size());
  std::mutex mutex;
  for (int p = 0; p <= params.P; ++p)
    for (int q = 0; q <= params.Q; ++q) {
      const auto& lv = whole.level(p, q);
      std::vector<std::vector<char>> member(subs.size(), std::vector<char>(lv.size(), 0));
      parallel_for(lv.size(), jobs, [&](std::size_t i) {
        // Elements of SSpaces are Reedy left by construction.
        const auto fibers = vertex_fiber_classes(sum_construction(whole.element(p, q, i)), p, q);
        for (std::size_t s = 0; s < subs.size(); ++s) {
          bool all = true;
          for (const auto& vc : fibers) {
            switch (subs[s]->variant()) {
              case Variant::SSpaces: break;
              case Variant::Seg: all = all && vc.segal; break;
              case Variant::CSS: all = all && vc.complete.value_or(false); break;
              case Variant::Spaces: all = all && vc.constant; break;
            }
          }
          member[s][i] = all;
          const bool present = subs[s]->level(p, q).find(lv.code(i)).has_value();
          std::lock_guard lock(mutex);
          ++reports[s].checked;
          if (all != present)
            reports[s].failures.push_back(
                {p, q, i, all ? "point fibers pass but the element is missing" : "element present but a point fiber fails"});
        }
      });
      for (std::size_t s = 0; s < subs.size(); ++s) {
        const auto expected = static_cast<std::size_t>(std::count(member[s].begin(), member[s].end(), 1));
        if (expected != subs[s]->level(p, q).size())
          reports[s].failures.push_back({p, q, lv.size(), "level holds " + std::to_string(subs[s]->level(p, q).size()) +
                                                              " elements, expected " + std::to_string(expected)});
      }
    }
  for (auto& report : reports)
    std::sort(report.failures.begin(), report.failures.end(),
              [](const CheckFailure& a, const CheckFailure& b) { return std::tie(a.p, a.q, a.element) < std::tie(b.p, b.q, b.element); });
  return reports;
}

SubclassifierReport subclassifier_check(const ClassifierComplex& whole, const ClassifierComplex& sub, int jobs) {
  return subclassifier_check(whole, std::vector<const ClassifierComplex*>{&sub}, jobs).front();
}

PresheafMap diagonal_universal(const ClassifierComplex& c, const PointedClassifier& pointed) {
  const auto& b = pointed.object->bounds();
  if (b[0] != b[1]) throw std::invalid_argument("diagonal needs equal r and p bounds");
  auto d = std::make_shared<const TruncatedPresheaf>(delta_diag(*pointed.object));
  auto proj = delta_diag(pointed.projection);
  const auto& cp = c.as_presheaf();
  if (!(proj.codomain() == *cp)) throw std::logic_error("diagonal of the embedded classifier differs from the classifier");
  // The projection forgets the basepoint: "G.x" lies over G.
  for (std::size_t cell = 0; cell < d->cell_count(); ++cell)
    for (std::uint32_t e = 0; e < d->size_at(cell); ++e) {
      auto label = d->label_at(cell, e);
      if (label.substr(0, label.find('.')) != cp->label_at(cell, proj.image_at(cell, e)))
        throw std::logic_error("diagonal projection is not the forgetful map at " + index_str(d->index(cell), 2));
    }
  return PresheafMap(d, cp, proj.images());
}

PresheafMap inclusion(const ClassifierComplex& small, const ClassifierComplex& large) {
  if (&small.catalogue() != &large.catalogue() || !(small.params() == large.params()))
    throw std::invalid_argument("inclusion needs classifiers over one catalogue and parameter set");
  const auto& sp = small.as_presheaf();
  std::vector<std::uint32_t> images;
  for (std::size_t cell = 0; cell < sp->cell_count(); ++cell) {
    const Index at = sp->index(cell);
    const auto& lv = small.level(at[0], at[1]);
    const auto& big = large.level(at[0], at[1]);
    for (std::size_t i = 0; i < lv.size(); ++i) {
      auto found = big.find(lv.code(i));
      if (!found) throw ClosureViolation("element " + std::to_string(i) + " at " + index_str(at, 2) + " is missing from the larger classifier");
      images.push_back(*found);
    }
  }
  PresheafMap map(sp, large.as_presheaf(), std::move(images));
  if (auto v = map.naturality_violation()) throw ClosureViolation("inclusion is not natural: " + v->str(2));
  return map;
}

}  // namespace segal
