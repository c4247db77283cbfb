#include <gtest/gtest.h>

#include "segal/io.hpp"
#include "segal/oracle.hpp"

using namespace segal;
using namespace segal::io;

namespace {

std::shared_ptr<const TruncatedPresheaf> share(TruncatedPresheaf x) { return std::make_shared<const TruncatedPresheaf>(std::move(x)); }

std::string where_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e.where();
  }
  return "no error";
}

}  // namespace

TEST(PresheafJson, RoundTripIsBitExact) {
  for (const auto& x : {representable(RepKind::Phi, 1, {2, 1, 1}), *base_presheaf(1, 1, {2, 1, 1}), terminal(2, {1, 2, 0}),
                        empty_presheaf(1, {3, 0, 0}), oracle::nerve(oracle::cyclic_group(2), 3)}) {
    auto text = dump(to_json(x));
    auto back = presheaf_from_json(parse_text(text));
    EXPECT_EQ(back, x);
    EXPECT_EQ(dump(to_json(back)), text);
  }
}

TEST(PresheafJson, Diagnostics) {
  auto j = to_json(oracle::nerve(oracle::cyclic_group(2), 2));
  auto bad_label = j;
  bad_label["actions"][2]["map"][0] = "zz";
  EXPECT_EQ(where_of([&] { presheaf_from_json(bad_label); }), "$.actions[2].map[0]");
  auto missing = j;
  missing["levels"].erase("1");
  EXPECT_EQ(where_of([&] { presheaf_from_json(missing); }), "$.levels.1");
  auto no_arity = j;
  no_arity.erase("arity");
  EXPECT_EQ(where_of([&] { presheaf_from_json(no_arity); }), "$.arity");
  auto dropped = j;
  dropped["actions"].erase(0);
  EXPECT_EQ(where_of([&] { presheaf_from_json(dropped); }), "$.actions");
  EXPECT_EQ(where_of([] { parse_text("{\n  \"arity\": 1,\n  \"bounds\": [1,\n}"); }), "line 4, column 1");
}

TEST(MapJson, RoundTrip) {
  const Bounds b{2, 1, 1};
  auto f = base_map(MonotoneMap(1, {1}), MonotoneMap::identity(1), b);
  auto back = map_from_json(parse_text(dump(to_json(f))));
  EXPECT_EQ(back.images(), f.images());
  EXPECT_EQ(back.domain(), f.domain());
  EXPECT_EQ(dump(to_json(back)), dump(to_json(f)));
  auto j = to_json(f);
  j["components"]["0,0,0"][0] = "(9,9)";
  EXPECT_EQ(where_of([&] { map_from_json(j); }), "$.components.0,0,0[0]");
}

TEST(FunctorJson, RoundTrip) {
  const Params params{1, 1, 2, 2};
  for (auto [p, q] : {std::pair{0, 0}, {1, 0}, {1, 1}}) {
    auto all = enumerate_functors(Variant::Seg, p, q, params);
    for (std::size_t i = 0; i < all.size(); i += 1 + all.size() / 20) {
      const auto& g = all[i];
      auto text = dump(to_json(g));
      auto back = functor_from_json(parse_text(text));
      EXPECT_EQ(back, g);
      EXPECT_EQ(dump(to_json(back)), text);
      for (const auto& pointed : pointed_over(g, 1)) {
        auto pt = pointed_from_json(parse_text(dump(to_json(pointed))));
        EXPECT_EQ(pt, pointed);
      }
    }
  }
}

TEST(VerdictJson, Fields) {
  auto v = is_left_fibration_sss(oracle::over_point(oracle::nerve(oracle::poset_category({2, {{0, 1}}}), 2)));
  auto j = to_json(v, 3);
  EXPECT_EQ(j["class"], "Left");
  EXPECT_EQ(j["verdict"], false);
  EXPECT_EQ(j["witness"]["condition"], "constant");
  EXPECT_EQ(j["witness"]["index"], "1,0,0");
  EXPECT_EQ(j["witness"]["lhs_count"], 2);
  EXPECT_EQ(j["witness"]["rhs_count"], 3);
  auto ok = to_json(is_reedy_left(to_terminal(share(terminal(3, {1, 1, 1})))), 3);
  EXPECT_FALSE(ok.contains("witness"));
}

TEST(CatalogJson, DeterministicAndReadable) {
  auto c = build_classifier(Variant::SSpaces, {1, 1, 1, 1});
  auto a = dump(catalog_json(c));
  auto b = dump(catalog_json(build_classifier(Variant::SSpaces, {1, 1, 1, 1})));
  EXPECT_EQ(a, b);
  auto j = parse_text(a);
  EXPECT_EQ(j["counts"]["0,0"], c.level(0, 0).size());
  auto levels = catalog_levels_from_json(j);
  EXPECT_EQ(levels.variant, Variant::SSpaces);
  EXPECT_EQ(levels.params, (Params{1, 1, 1, 1}));
  auto rebuilt = classifier_from_levels(levels.variant, levels.params, levels.levels);
  EXPECT_EQ(*rebuilt.as_presheaf(), *c.as_presheaf());
  j["levels"][1]["functors"][0][0] = 100000;
  EXPECT_THROW(catalog_levels_from_json(j), ParseError);
}
