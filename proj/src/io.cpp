#include "segal/io.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace segal::io {

namespace {

std::string at_key(const std::string& path, std::string_view key) { return path + "." + std::string(key); }
std::string at_item(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const Json& field(const Json& j, const std::string& path, std::string_view key) {
  if (!j.is_object()) throw ParseError(path, "expected an object");
  auto it = j.find(std::string(key));
  if (it == j.end()) throw ParseError(at_key(path, key), "missing field");
  return *it;
}

int as_int(const Json& j, const std::string& path, int lo = 0, int hi = 1 << 30) {
  if (!j.is_number_integer()) throw ParseError(path, "expected an integer");
  auto v = j.get<long long>();
  if (v < lo || v > hi) throw ParseError(path, "value " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(v);
}

const std::string& as_string(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ParseError(path, "expected a string");
  return j.get_ref<const std::string&>();
}

const Json& as_array(const Json& j, const std::string& path, std::optional<std::size_t> size = std::nullopt) {
  if (!j.is_array()) throw ParseError(path, "expected an array");
  if (size && j.size() != *size)
    throw ParseError(path, "expected " + std::to_string(*size) + " entries, found " + std::to_string(j.size()));
  return j;
}

std::string generator_name(const Generator& g) { return (g.kind == Generator::Kind::Face ? "d" : "s") + std::to_string(g.index); }

Index index_field(const Json& j, const std::string& path, int arity) {
  try {
    return parse_index(as_string(j, path), arity);
  } catch (const std::invalid_argument& e) {
    throw ParseError(path, e.what());
  }
}

// Positions of labels inside one level; duplicate labels make label maps ambiguous.
std::map<std::string, std::uint32_t, std::less<>> label_positions(const TruncatedPresheaf& x, std::size_t cell, const std::string& path) {
  std::map<std::string, std::uint32_t, std::less<>> out;
  for (std::uint32_t e = 0; e < x.size_at(cell); ++e)
    if (!out.emplace(std::string(x.label_at(cell, e)), e).second)
      throw ParseError(path, "duplicate label \"" + std::string(x.label_at(cell, e)) + "\"");
  return out;
}

std::uint32_t lookup(const std::map<std::string, std::uint32_t, std::less<>>& labels, const Json& j, const std::string& path) {
  const auto& s = as_string(j, path);
  auto it = labels.find(s);
  if (it == labels.end()) throw ParseError(path, "unknown label \"" + s + "\"");
  return it->second;
}

Json anchor_json(const SliceCategory& sp, const SliceCategory& sq, std::size_t i1, std::size_t i2) {
  return Json::array({sp.objects()[i1].anchor.str(), sq.objects()[i2].anchor.str()});
}

std::pair<std::size_t, std::size_t> anchor_from_json(const Json& j, const std::string& path, const SliceCategory& sp, const SliceCategory& sq) {
  as_array(j, path, 2);
  try {
    auto f1 = MonotoneMap::parse(as_string(j[0], at_item(path, 0)), sp.p());
    auto f2 = MonotoneMap::parse(as_string(j[1], at_item(path, 1)), sq.p());
    return {sp.index_of(f1), sq.index_of(f2)};
  } catch (const std::invalid_argument& e) {
    throw ParseError(path, e.what());
  } catch (const std::out_of_range& e) {
    throw ParseError(path, e.what());
  }
}

}  // namespace

Json parse_text(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // Byte offset -> line and column.
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(column), "malformed JSON");
  }
}

Json read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, "cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_text(buffer.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ", " + e.where(), "malformed JSON");
  }
}

std::string dump(const Json& j, int indent) { return j.dump(indent) + "\n"; }

Json to_json(const TruncatedPresheaf& x) {
  Json j;
  j["arity"] = x.arity();
  Json bounds = Json::array();
  for (int d = 0; d < x.arity(); ++d) bounds.push_back(x.bounds()[static_cast<std::size_t>(d)]);
  j["bounds"] = std::move(bounds);
  Json levels = Json::object();
  for (std::size_t cell = 0; cell < x.cell_count(); ++cell) {
    Json labels = Json::array();
    for (std::uint32_t e = 0; e < x.size_at(cell); ++e) labels.push_back(std::string(x.label_at(cell, e)));
    levels[index_str(x.index(cell), x.arity())] = std::move(labels);
  }
  j["levels"] = std::move(levels);
  Json actions = Json::array();
  for (std::size_t cell = 0; cell < x.cell_count(); ++cell) {
    const Index at = x.index(cell);
    for (int d = 0; d < x.arity(); ++d)
      for (int slot = 0; slot < x.generator_count_at(d, cell); ++slot) {
        const auto g = generator_at(at[static_cast<std::size_t>(d)], x.bounds()[static_cast<std::size_t>(d)], slot);
        const auto tcell = x.flat(shift(at, d, g.target_level()));
        Json map = Json::array();
        for (auto t : x.action_slot(d, cell, slot)) map.push_back(std::string(x.label_at(tcell, t)));
        actions.push_back(Json{{"direction", d}, {"generator", generator_name(g)}, {"index", index_str(at, x.arity())}, {"map", std::move(map)}});
      }
  }
  j["actions"] = std::move(actions);
  return j;
}

TruncatedPresheaf presheaf_from_json(const Json& j, const std::string& path) {
  const int arity = as_int(field(j, path, "arity"), at_key(path, "arity"), 1, 3);
  const auto bpath = at_key(path, "bounds");
  const auto& bj = as_array(field(j, path, "bounds"), bpath, static_cast<std::size_t>(arity));
  Bounds bounds{0, 0, 0};
  for (int d = 0; d < arity; ++d) bounds[static_cast<std::size_t>(d)] = as_int(bj[static_cast<std::size_t>(d)], at_item(bpath, static_cast<std::size_t>(d)), 0, 16);
  const TruncatedPresheaf shape = empty_presheaf(arity, bounds);
  const auto lpath = at_key(path, "levels");
  const auto& lj = field(j, path, "levels");
  if (!lj.is_object()) throw ParseError(lpath, "expected an object");
  std::vector<std::uint32_t> sizes(shape.cell_count(), 0);
  std::vector<const Json*> level_json(shape.cell_count(), nullptr);
  for (const auto& [key, labels] : lj.items()) {
    const auto kpath = at_key(lpath, key);
    Index at;
    try {
      at = parse_index(key, arity);
    } catch (const std::invalid_argument& e) {
      throw ParseError(kpath, e.what());
    }
    if (!shape.contains(at)) throw ParseError(kpath, "index outside the bounds");
    as_array(labels, kpath);
    level_json[shape.flat(at)] = &labels;
    sizes[shape.flat(at)] = static_cast<std::uint32_t>(labels.size());
  }
  LabelTable table;
  for (std::size_t cell = 0; cell < shape.cell_count(); ++cell) {
    const auto kpath = at_key(lpath, index_str(shape.index(cell), arity));
    if (!level_json[cell]) throw ParseError(kpath, "missing level");
    for (std::size_t e = 0; e < level_json[cell]->size(); ++e) table.add(as_string((*level_json[cell])[e], at_item(kpath, e)));
  }
  TruncatedPresheaf x(arity, bounds, std::move(sizes), std::move(table));
  std::vector<std::map<std::string, std::uint32_t, std::less<>>> positions;
  for (std::size_t cell = 0; cell < x.cell_count(); ++cell)
    positions.push_back(label_positions(x, cell, at_key(lpath, index_str(x.index(cell), arity))));

  const auto apath = at_key(path, "actions");
  const auto& aj = as_array(field(j, path, "actions"), apath);
  std::map<std::tuple<std::size_t, int, int>, bool> filled;
  for (std::size_t i = 0; i < aj.size(); ++i) {
    const auto ipath = at_item(apath, i);
    const int d = as_int(field(aj[i], ipath, "direction"), at_key(ipath, "direction"), 0, arity - 1);
    const Index at = index_field(field(aj[i], ipath, "index"), at_key(ipath, "index"), arity);
    if (!x.contains(at)) throw ParseError(at_key(ipath, "index"), "index outside the bounds");
    const auto gpath = at_key(ipath, "generator");
    const auto& gname = as_string(field(aj[i], ipath, "generator"), gpath);
    if (gname.size() < 2 || (gname[0] != 'd' && gname[0] != 's')) throw ParseError(gpath, "expected d<i> or s<i>");
    Generator g{gname[0] == 'd' ? Generator::Kind::Face : Generator::Kind::Degeneracy, at[static_cast<std::size_t>(d)], 0};
    try {
      g.index = std::stoi(gname.substr(1));
    } catch (const std::exception&) {
      throw ParseError(gpath, "expected d<i> or s<i>");
    }
    const int j_level = at[static_cast<std::size_t>(d)];
    const int bound = bounds[static_cast<std::size_t>(d)];
    if (g.index < 0 || g.index > j_level || (g.kind == Generator::Kind::Face && j_level == 0) ||
        (g.kind == Generator::Kind::Degeneracy && j_level >= bound))
      throw ParseError(gpath, "no generator " + gname + " at level " + std::to_string(j_level));
    const auto cell = x.flat(at);
    const int slot = generator_slot(g, bound);
    if (filled[{cell, d, slot}]) throw ParseError(ipath, "action given twice");
    filled[{cell, d, slot}] = true;
    const auto tcell = x.flat(shift(at, d, g.target_level()));
    const auto mpath = at_key(ipath, "map");
    const auto& mj = as_array(field(aj[i], ipath, "map"), mpath, x.size_at(cell));
    auto out = x.action_slot_mut(d, cell, slot);
    for (std::size_t e = 0; e < mj.size(); ++e) out[e] = lookup(positions[tcell], mj[e], at_item(mpath, e));
  }
  for (std::size_t cell = 0; cell < x.cell_count(); ++cell)
    for (int d = 0; d < arity; ++d)
      for (int slot = 0; slot < x.generator_count_at(d, cell); ++slot)
        if (!filled[{cell, d, slot}]) {
          const auto g = generator_at(x.index(cell)[static_cast<std::size_t>(d)], bounds[static_cast<std::size_t>(d)], slot);
          throw ParseError(apath, "missing action " + generator_name(g) + " in direction " + std::to_string(d) + " at " +
                                      index_str(x.index(cell), arity));
        }
  return x;
}

Json to_json(const PresheafMap& f) {
  Json components = Json::object();
  const auto& d = f.domain();
  for (std::size_t cell = 0; cell < d.cell_count(); ++cell) {
    Json labels = Json::array();
    for (std::uint32_t e = 0; e < d.size_at(cell); ++e) labels.push_back(std::string(f.codomain().label_at(cell, f.image_at(cell, e))));
    components[index_str(d.index(cell), d.arity())] = std::move(labels);
  }
  return Json{{"domain", to_json(f.domain())}, {"codomain", to_json(f.codomain())}, {"components", std::move(components)}};
}

PresheafMap map_from_json(const Json& j, const std::string& path) {
  auto domain = std::make_shared<const TruncatedPresheaf>(presheaf_from_json(field(j, path, "domain"), at_key(path, "domain")));
  auto codomain = std::make_shared<const TruncatedPresheaf>(presheaf_from_json(field(j, path, "codomain"), at_key(path, "codomain")));
  if (!same_shape(*domain, *codomain)) throw ParseError(at_key(path, "codomain"), "arity or bounds differ from the domain");
  const auto cpath = at_key(path, "components");
  const auto& cj = field(j, path, "components");
  if (!cj.is_object()) throw ParseError(cpath, "expected an object");
  std::vector<std::uint32_t> images;
  images.reserve(domain->element_count());
  for (std::size_t cell = 0; cell < domain->cell_count(); ++cell) {
    const auto key = index_str(domain->index(cell), domain->arity());
    const auto kpath = at_key(cpath, key);
    auto it = cj.find(key);
    if (it == cj.end()) throw ParseError(kpath, "missing component");
    as_array(*it, kpath, domain->size_at(cell));
    auto positions = label_positions(*codomain, cell, at_key(at_key(at_key(path, "codomain"), "levels"), key));
    for (std::size_t e = 0; e < it->size(); ++e) images.push_back(lookup(positions, (*it)[e], at_item(kpath, e)));
  }
  if (cj.size() != domain->cell_count()) throw ParseError(cpath, "components outside the bounds");
  return PresheafMap(std::move(domain), std::move(codomain), std::move(images));
}

Json to_json(const IndexedFunctor& g) {
  const auto& sp = g.slice_p();
  const auto& sq = g.slice_q();
  const auto nq = sq.objects().size();
  Json values = Json::array();
  for (std::size_t a = 0; a < g.anchor_count(); ++a)
    values.push_back(Json{{"anchor", anchor_json(sp, sq, a / nq, a % nq)}, {"value", to_json(g.value_at(a))}});
  Json actions = Json::array();
  auto emit = [&](std::size_t id, int direction, const MonotoneMap& mediator) {
    const auto from = g.action_source(id), to = g.action_target(id);
    Json levels = Json::array();
    const auto& src = g.value_at(from);
    for (int k = 0; k <= g.k_bound(); ++k) {
      Json labels = Json::array();
      for (auto e : g.action(id, k)) labels.push_back(std::string(src.label_at(static_cast<std::size_t>(k), e)));
      levels.push_back(std::move(labels));
    }
    actions.push_back(Json{{"direction", direction},
                           {"mediator", mediator.str()},
                           {"source", anchor_json(sp, sq, from / nq, from % nq)},
                           {"target", anchor_json(sp, sq, to / nq, to % nq)},
                           {"levels", std::move(levels)}});
  };
  for (std::size_t gen = 0; gen < sp.generators().size(); ++gen)
    for (std::size_t i2 = 0; i2 < nq; ++i2) emit(g.action_p(gen, i2), 0, sp.generators()[gen].mediator);
  for (std::size_t i1 = 0; i1 < sp.objects().size(); ++i1)
    for (std::size_t gen = 0; gen < sq.generators().size(); ++gen) emit(g.action_q(i1, gen), 1, sq.generators()[gen].mediator);
  return Json{{"p", g.p()}, {"q", g.q()}, {"bounds", Json::array({g.bounds()[0], g.bounds()[1], g.bounds()[2]})},
              {"values", std::move(values)}, {"actions", std::move(actions)}};
}

IndexedFunctor functor_from_json(const Json& j, const std::string& path) {
  const int p = as_int(field(j, path, "p"), at_key(path, "p"), 0, 8);
  const int q = as_int(field(j, path, "q"), at_key(path, "q"), 0, 8);
  const auto bpath = at_key(path, "bounds");
  const auto& bj = as_array(field(j, path, "bounds"), bpath, 3);
  Bounds bounds{};
  for (std::size_t d = 0; d < 3; ++d) bounds[d] = as_int(bj[d], at_item(bpath, d), 0, 8);
  auto sp = slice_category(p, bounds[1]);
  auto sq = slice_category(q, bounds[2]);
  const auto nq = sq->objects().size();
  const auto vpath = at_key(path, "values");
  const auto& vj = as_array(field(j, path, "values"), vpath, sp->objects().size() * nq);
  std::vector<IndexedFunctor::Value> values(vj.size());
  for (std::size_t i = 0; i < vj.size(); ++i) {
    const auto ipath = at_item(vpath, i);
    auto [i1, i2] = anchor_from_json(field(vj[i], ipath, "anchor"), at_key(ipath, "anchor"), *sp, *sq);
    auto& slot = values[i1 * nq + i2];
    if (slot) throw ParseError(at_key(ipath, "anchor"), "anchor given twice");
    slot = std::make_shared<const TruncatedPresheaf>(presheaf_from_json(field(vj[i], ipath, "value"), at_key(ipath, "value")));
    if (slot->arity() != 1 || slot->bounds()[0] != bounds[0]) throw ParseError(at_key(ipath, "value"), "values must be spaces with the functor's k-bound");
  }
  IndexedFunctor g(p, q, bounds, std::move(values));
  // (direction, mediator, source, target) -> action id
  std::map<std::tuple<int, std::string, std::size_t, std::size_t>, std::size_t> ids;
  for (std::size_t gen = 0; gen < sp->generators().size(); ++gen)
    for (std::size_t i2 = 0; i2 < nq; ++i2) {
      auto id = g.action_p(gen, i2);
      ids[{0, sp->generators()[gen].mediator.str(), g.action_source(id), g.action_target(id)}] = id;
    }
  for (std::size_t i1 = 0; i1 < sp->objects().size(); ++i1)
    for (std::size_t gen = 0; gen < sq->generators().size(); ++gen) {
      auto id = g.action_q(i1, gen);
      ids[{1, sq->generators()[gen].mediator.str(), g.action_source(id), g.action_target(id)}] = id;
    }
  const auto apath = at_key(path, "actions");
  const auto& aj = as_array(field(j, path, "actions"), apath, g.action_count());
  std::vector<char> seen(g.action_count(), 0);
  for (std::size_t i = 0; i < aj.size(); ++i) {
    const auto ipath = at_item(apath, i);
    const int dir = as_int(field(aj[i], ipath, "direction"), at_key(ipath, "direction"), 0, 1);
    const auto& mediator = as_string(field(aj[i], ipath, "mediator"), at_key(ipath, "mediator"));
    auto [s1, s2] = anchor_from_json(field(aj[i], ipath, "source"), at_key(ipath, "source"), *sp, *sq);
    auto [t1, t2] = anchor_from_json(field(aj[i], ipath, "target"), at_key(ipath, "target"), *sp, *sq);
    auto it = ids.find({dir, mediator, s1 * nq + s2, t1 * nq + t2});
    if (it == ids.end()) throw ParseError(ipath, "not a generating slice morphism");
    if (seen[it->second]++) throw ParseError(ipath, "action given twice");
    const auto& src = g.value_at(g.action_source(it->second));
    const auto lpath = at_key(ipath, "levels");
    const auto& lj = as_array(field(aj[i], ipath, "levels"), lpath, static_cast<std::size_t>(bounds[0] + 1));
    for (int k = 0; k <= bounds[0]; ++k) {
      const auto kpath = at_item(lpath, static_cast<std::size_t>(k));
      auto out = g.action_mut(it->second, k);
      as_array(lj[static_cast<std::size_t>(k)], kpath, out.size());
      auto positions = label_positions(src, static_cast<std::size_t>(k), kpath);
      for (std::size_t e = 0; e < out.size(); ++e) out[e] = lookup(positions, lj[static_cast<std::size_t>(k)][e], at_item(kpath, e));
    }
  }
  return g;
}

Json to_json(const PointedIndexedFunctor& g) {
  Json j = to_json(g.base);
  j["r"] = g.r;
  j["basepoint"] = std::string(g.base.value_at(g.base.top_anchor()).label_at(static_cast<std::size_t>(g.r), g.basepoint));
  return j;
}

PointedIndexedFunctor pointed_from_json(const Json& j, const std::string& path) {
  auto base = functor_from_json(j, path);
  const int r = as_int(field(j, path, "r"), at_key(path, "r"), 0, base.k_bound());
  const auto& top = base.value_at(base.top_anchor());
  auto positions = label_positions(top, static_cast<std::size_t>(r), at_key(path, "values"));
  const auto point = lookup(positions, field(j, path, "basepoint"), at_key(path, "basepoint"));
  return PointedIndexedFunctor{std::move(base), r, point};
}

Json to_json(const Witness& w, int arity) {
  Json j{{"condition", w.condition}, {"index", index_str(w.index, arity)}, {"lhs_count", w.lhs_count}, {"rhs_count", w.rhs_count}};
  if (!w.element.empty()) j["element"] = w.element;
  return j;
}

Json to_json(const Verdict& v, int arity) {
  Json j{{"class", class_name(v.cls)}, {"verdict", v.holds}};
  if (v.witness) j["witness"] = to_json(*v.witness, arity);
  return j;
}

Json catalog_json(const ClassifierComplex& c) {
  const auto& params = c.params();
  const auto& cat = c.catalogue();
  Json j;
  j["variant"] = variant_name(c.variant());
  j["params"] = Json{{"P", params.P}, {"Q", params.Q}, {"K", params.K}, {"m", params.m}};
  Json counts = Json::object();
  for (int p = 0; p <= params.P; ++p)
    for (int q = 0; q <= params.Q; ++q) counts[std::to_string(p) + "," + std::to_string(q)] = c.level(p, q).size();
  j["counts"] = std::move(counts);
  Json spaces = Json::array();
  for (std::size_t i = 0; i < cat.size(); ++i) spaces.push_back(to_json(*cat.space(i)));
  j["spaces"] = std::move(spaces);
  Json arrows = Json::array();
  for (std::size_t i = 0; i < cat.arrow_count(); ++i) {
    const auto& a = cat.arrow(i);
    arrows.push_back(Json{{"source", a.source}, {"target", a.target}, {"images", a.images}});
  }
  j["arrows"] = std::move(arrows);
  Json levels = Json::array();
  for (int p = 0; p <= params.P; ++p)
    for (int q = 0; q <= params.Q; ++q) {
      const auto& lv = c.level(p, q);
      Json functors = Json::array();
      for (std::size_t i = 0; i < lv.size(); ++i) functors.push_back(std::vector<std::uint32_t>(lv.code(i), lv.code(i) + lv.width));
      levels.push_back(Json{{"p", p}, {"q", q}, {"count", lv.size()}, {"functors", std::move(functors)}});
    }
  j["levels"] = std::move(levels);
  Json operators = Json::array();
  if (c.has_operators()) {
    const auto& x = *c.as_presheaf();
    for (std::size_t cell = 0; cell < x.cell_count(); ++cell) {
      const Index at = x.index(cell);
      for (int d = 0; d < 2; ++d)
        for (int slot = 0; slot < x.generator_count_at(d, cell); ++slot) {
          const auto g = generator_at(at[static_cast<std::size_t>(d)], x.bounds()[static_cast<std::size_t>(d)], slot);
          auto t = x.action_slot(d, cell, slot);
          operators.push_back(Json{{"level", index_str(at, 2)}, {"direction", d}, {"generator", generator_name(g)},
                                   {"table", std::vector<std::uint32_t>(t.begin(), t.end())}});
        }
    }
  }
  j["operators"] = std::move(operators);
  return j;
}

CatalogLevels catalog_levels_from_json(const Json& j) {
  const std::string path = "$";
  CatalogLevels out;
  try {
    out.variant = parse_variant(as_string(field(j, path, "variant"), "$.variant"));
  } catch (const std::invalid_argument& e) {
    throw ParseError("$.variant", e.what());
  }
  const auto& pj = field(j, path, "params");
  out.params = Params{as_int(field(pj, "$.params", "P"), "$.params.P", 0, 4), as_int(field(pj, "$.params", "Q"), "$.params.Q", 0, 4),
                      as_int(field(pj, "$.params", "K"), "$.params.K", 0, 6), as_int(field(pj, "$.params", "m"), "$.params.m", 0, 4)};
  const auto& cat = *value_catalogue(out.params.K, out.params.m);
  const auto& sj = as_array(field(j, path, "spaces"), "$.spaces", cat.size());
  const auto& aj = as_array(field(j, path, "arrows"), "$.arrows", cat.arrow_count());
  for (std::size_t i = 0; i < sj.size(); i += std::max<std::size_t>(1, sj.size() / 16))
    if (!(presheaf_from_json(sj[i], at_item("$.spaces", i)) == *cat.space(i))) throw ParseError(at_item("$.spaces", i), "space table differs");
  for (std::size_t i = 0; i < aj.size(); i += std::max<std::size_t>(1, aj.size() / 16)) {
    const auto& a = cat.arrow(i);
    const auto ipath = at_item("$.arrows", i);
    if (field(aj[i], ipath, "source") != a.source || field(aj[i], ipath, "target") != a.target || field(aj[i], ipath, "images") != Json(a.images))
      throw ParseError(ipath, "arrow table differs");
  }
  const auto& lj = as_array(field(j, path, "levels"), "$.levels", static_cast<std::size_t>((out.params.P + 1) * (out.params.Q + 1)));
  for (std::size_t i = 0; i < lj.size(); ++i) {
    const auto ipath = at_item("$.levels", i);
    ClassifierLevel lv;
    lv.p = as_int(field(lj[i], ipath, "p"), at_key(ipath, "p"), 0, out.params.P);
    lv.q = as_int(field(lj[i], ipath, "q"), at_key(ipath, "q"), 0, out.params.Q);
    if (static_cast<std::size_t>(lv.p * (out.params.Q + 1) + lv.q) != i) throw ParseError(ipath, "levels out of order");
    lv.width = code_width(lv.p, lv.q);
    const auto fpath = at_key(ipath, "functors");
    const auto& fj = as_array(field(lj[i], ipath, "functors"), fpath);
    lv.data.reserve(fj.size() * lv.width);
    for (std::size_t e = 0; e < fj.size(); ++e) {
      const auto epath = at_item(fpath, e);
      const auto& code = as_array(fj[e], epath, lv.width);
      for (std::size_t w = 0; w < code.size(); ++w) {
        const auto limit = w < static_cast<std::size_t>((lv.p + 1) * (lv.q + 1)) ? cat.size() : cat.arrow_count();
        lv.data.push_back(static_cast<std::uint32_t>(as_int(code[w], at_item(epath, w), 0, static_cast<int>(limit) - 1)));
      }
    }
    out.levels.push_back(std::move(lv));
  }
  return out;
}

}  // namespace segal::io
