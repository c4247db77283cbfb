#include <gtest/gtest.h>

#include <set>

#include "segal/classifier.hpp"
#include "segal/oracle.hpp"

using namespace segal;

namespace {

const Params kSmall{1, 1, 2, 2};

// Shared across tests: building the K=2 classifiers takes a few seconds.
const ClassifierComplex& sspaces() {
  static const ClassifierComplex c = build_classifier(Variant::SSpaces, kSmall, 2);
  return c;
}
const ClassifierComplex& seg() {
  static const ClassifierComplex c = build_classifier(Variant::Seg, kSmall, 2);
  return c;
}

std::array<std::size_t, 4> counts(const ClassifierComplex& c) {
  return {c.level(0, 0).size(), c.level(1, 0).size(), c.level(0, 1).size(), c.level(1, 1).size()};
}

}  // namespace

TEST(Variants, NamesAndBounds) {
  for (auto v : {Variant::SSpaces, Variant::Seg, Variant::CSS, Variant::Spaces}) EXPECT_EQ(parse_variant(variant_name(v)), v);
  EXPECT_THROW(parse_variant("Kan"), std::invalid_argument);
  EXPECT_EQ(variant_min_k(Variant::Seg), 2);
  EXPECT_EQ(variant_min_k(Variant::CSS), 3);
  EXPECT_THROW(check_params(Variant::CSS, {1, 1, 2, 2}), ParamError);
  EXPECT_THROW(check_params(Variant::SSpaces, {1, 1, 2, -1}), ParamError);
  EXPECT_NO_THROW(check_params(Variant::Spaces, {1, 1, 3, 2}));
  EXPECT_EQ(*larger_variant(Variant::Spaces), Variant::CSS);
  EXPECT_FALSE(larger_variant(Variant::SSpaces));
}

TEST(Enumerate, SmallestCases) {
  // Empty and terminal.
  EXPECT_EQ(enumerate_functor_codes(Variant::SSpaces, 0, 0, {1, 0, 1, 1}).size(), 2u);
  for (auto v : {Variant::SSpaces, Variant::Seg, Variant::CSS, Variant::Spaces})
    for (auto [p, q] : {std::pair{0, 0}, {1, 0}, {0, 1}, {1, 1}})
      EXPECT_EQ(enumerate_functor_codes(v, p, q, {1, 1, 3, 0}).size(), 1u) << variant_name(v);
  auto spaces = enumerate_functor_codes(Variant::Spaces, 1, 0, {1, 1, 3, 2});
  auto css = enumerate_functor_codes(Variant::CSS, 1, 0, {1, 1, 3, 2});
  EXPECT_LE(spaces.size(), css.size());
  std::set<FunctorCode> in_css(css.begin(), css.end());
  for (const auto& code : spaces) EXPECT_TRUE(in_css.count(code));
}

TEST(Enumerate, FrozenCountsAtK2) {
  EXPECT_EQ(counts(sspaces()), (std::array<std::size_t, 4>{8, 121, 121, 44386}));
  EXPECT_EQ(counts(seg()), (std::array<std::size_t, 4>{6, 83, 83, 27078}));
}

TEST(Enumerate, GrowsWithFiberBound) {
  auto small = build_classifier(Variant::SSpaces, {1, 1, 2, 1}, 1, false);
  const auto& cat = sspaces().catalogue();
  for (auto [p, q] : {std::pair{0, 0}, {1, 0}, {0, 1}, {1, 1}})
    for (std::size_t i = 0; i < small.level(p, q).size(); ++i) {
      auto code = encode(cat, small.element(p, q, i));
      ASSERT_TRUE(code);
      EXPECT_TRUE(sspaces().level(p, q).find(code->data()));
    }
}

TEST(Classifier, PresheafValidatesAndIdentityOperators) {
  const auto& x = *sspaces().as_presheaf();
  EXPECT_FALSE(validate(x));
  EXPECT_EQ(x.size({1, 1, 0}), 44386u);
  // d_0 s_0 = id at level (0, 0) in both directions.
  for (int dir : {0, 1}) {
    const auto& s0 = x.act(dir, MonotoneMap::constant(1, 0, 0), {0, 0, 0});
    const auto& back = x.act(dir, MonotoneMap(1, {0}), shift({0, 0, 0}, dir, 1));
    for (std::uint32_t e = 0; e < x.size({0, 0, 0}); ++e) EXPECT_EQ(back[s0[e]], e);
  }
}

TEST(Classifier, OperatorsMatchRestriction) {
  const auto& c = sspaces();
  const auto& x = *c.as_presheaf();
  for (std::size_t i = 0; i < c.level(1, 1).size(); i += 331) {
    auto g = c.element(1, 1, i);
    for (int dir : {0, 1})
      for (int face : {0, 1}) {
        auto d = MonotoneMap::coface(1, face);
        auto r = dir == 0 ? restrict(g, d, MonotoneMap::identity(1)) : restrict(g, MonotoneMap::identity(1), d);
        auto image = x.act(dir, d, {1, 1, 0})[i];
        auto target = dir == 0 ? std::pair{0, 1} : std::pair{1, 0};
        EXPECT_EQ(c.element(target.first, target.second, image), r);
      }
  }
}

TEST(Pointed, CountsAndFibers) {
  const auto& c = sspaces();
  auto pointed = build_pointed(c, 2);
  EXPECT_FALSE(validate(*pointed.object));
  EXPECT_FALSE(pointed.projection.naturality_violation());
  // Only the terminal functor contributes at (0, 0, 0) among the functors of size <= 1.
  for (int r = 0; r <= 2; ++r)
    for (auto [p, q] : {std::pair{0, 0}, {1, 0}, {0, 1}, {1, 1}}) {
      std::size_t expected = 0;
      const auto& level = c.level(p, q);
      for (std::size_t i = 0; i < level.size(); ++i) {
        auto g = c.element(p, q, i);
        const auto size = g.value_at(g.top_anchor()).size({r, 0, 0});
        expected += size;
        const auto cell = pointed.projection.codomain().flat({r, p, q});
        EXPECT_EQ(pointed.projection.fiber(cell, static_cast<std::uint32_t>(i)).size(), size);
      }
      EXPECT_EQ(pointed.object->size({r, p, q}), expected);
    }
}

TEST(Universal, SSpacesAndSegAtK2) {
  for (const auto* c : {&sspaces(), &seg()}) {
    auto pointed = build_pointed(*c, 2);
    auto report = universal_check(*c, pointed, 2);
    EXPECT_EQ(report.checked, 8u + 121 + 121 + 44386 - (c == &seg() ? 2 + 38 + 38 + 17308 : 0));
    EXPECT_TRUE(report.failures.empty()) << report.failures.front().detail;
  }
}

TEST(ClassifyName, RoundTripOverF1AndDelta1) {
  const auto& c = sspaces();
  auto pointed = build_pointed(c, 2);
  for (const auto& x : {oracle::base_f(1, 1, 1), oracle::base_delta(1, 1, 1)}) {
    std::size_t seen = 0;
    enumerate_maps(x, *c.as_presheaf(), [&](const std::vector<std::uint32_t>& images) {
      PresheafMap f(std::make_shared<const TruncatedPresheaf>(x), c.as_presheaf(), images);
      auto g = classify(c, pointed, f);
      EXPECT_TRUE(is_reedy_left(g));
      EXPECT_EQ(name(c, g).images(), images);
      ++seen;
      return true;
    });
    EXPECT_EQ(seen, 121u);
  }
}

TEST(ClassifyName, RejectsLargeFibers) {
  const auto& c = sspaces();
  auto x = oracle::base_f(0, 1, 1);
  auto ex = std::make_shared<const TruncatedPresheaf>(standard_embed(x, 2));
  auto three = oracle::nerve(oracle::poset_category({3, {}}), 2);
  auto big = std::make_shared<const TruncatedPresheaf>(product(constant_over_base(three, 1, 1), *ex));
  std::vector<std::uint32_t> images;
  for (std::size_t cell = 0; cell < big->cell_count(); ++cell)
    for (std::uint32_t e = 0; e < big->size_at(cell); ++e) images.push_back(0);
  EXPECT_THROW(name(c, PresheafMap(big, ex, images)), std::domain_error);
}

TEST(Subclassifier, SegInsideSSpaces) {
  auto report = subclassifier_check(sspaces(), seg(), 2);
  EXPECT_EQ(report.checked, 8u + 121 + 121 + 44386);
  EXPECT_TRUE(report.failures.empty());
  auto filtered = filter_classifier(sspaces(), Variant::Seg);
  EXPECT_EQ(counts(filtered), counts(seg()));
}

TEST(Inclusion, SegIntoSSpacesIsNaturalAndInjective) {
  auto inc = inclusion(seg(), sspaces());
  EXPECT_FALSE(inc.naturality_violation());
  std::set<std::pair<std::size_t, std::uint32_t>> images;
  for (std::size_t cell = 0; cell < inc.domain().cell_count(); ++cell)
    for (std::uint32_t e = 0; e < inc.domain().size_at(cell); ++e) EXPECT_TRUE(images.insert({cell, inc.image_at(cell, e)}).second);
}

TEST(Diagonal, LevelsAndFibers) {
  const auto& c = seg();
  auto pointed = build_pointed(c, 1);
  auto diag = diagonal_universal(c, pointed);
  EXPECT_FALSE(diag.naturality_violation());
  for (auto [p, q] : {std::pair{0, 0}, {1, 0}, {0, 1}, {1, 1}}) {
    EXPECT_EQ(diag.domain().size({p, q, 0}), pointed.object->size({p, p, q}));
    const auto cell = diag.codomain().flat({p, q, 0});
    for (std::size_t i = 0; i < c.level(p, q).size(); i += 97) {
      auto g = c.element(p, q, i);
      EXPECT_EQ(diag.fiber(cell, static_cast<std::uint32_t>(i)).size(), g.value_at(g.top_anchor()).size({p, 0, 0}));
    }
  }
  EXPECT_THROW(diagonal_universal(c, build_pointed(c, 2)), std::invalid_argument);
}
