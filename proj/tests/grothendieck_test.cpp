#include <gtest/gtest.h>

#include "segal/classifier.hpp"
#include "segal/fibration.hpp"
#include "segal/grothendieck.hpp"
#include "segal/oracle.hpp"

using namespace segal;

namespace {

std::shared_ptr<const TruncatedPresheaf> share(TruncatedPresheaf x) { return std::make_shared<const TruncatedPresheaf>(std::move(x)); }

const Params kSmall{1, 1, 2, 2};

std::vector<IndexedFunctor> universe(int p, int q) { return enumerate_functors(Variant::SSpaces, p, q, kSmall); }

}  // namespace

TEST(Sum, TerminalFunctorGivesTheBase) {
  const Bounds b{2, 1, 1};
  auto g = constant_functor(0, 0, b, share(terminal(1, {2, 0, 0})));
  auto alpha = sum_construction(g);
  for (std::size_t c = 0; c < alpha.domain().cell_count(); ++c) {
    EXPECT_EQ(alpha.domain().size_at(c), 1u);
    EXPECT_EQ(alpha.codomain().size_at(c), 1u);
  }
  EXPECT_FALSE(alpha.naturality_violation());
}

TEST(Sum, TwoPointConstantValue) {
  const Bounds b{2, 1, 1};
  auto two = share(oracle::nerve(oracle::poset_category({2, {}}), 2));
  auto alpha = sum_construction(constant_functor(0, 0, b, two));
  for (std::size_t c = 0; c < alpha.domain().cell_count(); ++c) EXPECT_EQ(alpha.domain().size_at(c), 2u);
  EXPECT_FALSE(validate(alpha.domain()));
}

TEST(Sum, EmptyValueAtOneEdgeAnchor) {
  const Bounds b{1, 1, 0};
  auto point = share(terminal(1, {1, 0, 0}));
  auto none = share(empty_presheaf(1, {1, 0, 0}));
  const auto& slice = *slice_category(1, 1);
  std::vector<IndexedFunctor::Value> values;
  for (const auto& obj : slice.objects()) values.push_back(obj.anchor == MonotoneMap(1, {0, 1}) ? none : point);
  IndexedFunctor g(1, 0, b, values);
  EXPECT_FALSE(functoriality_violation(g));
  auto alpha = sum_construction(g);
  EXPECT_FALSE(validate(alpha.domain()));
  for (int k = 0; k <= 1; ++k) {
    EXPECT_EQ(alpha.domain().size({k, 0, 0}), 2u);
    EXPECT_EQ(alpha.domain().size({k, 1, 0}), 2u);
  }
  // The empty edge anchor breaks the left condition against the two vertex fibers.
  EXPECT_FALSE(is_reedy_left(alpha));
}

TEST(Fiber, IdentityAndEmpty) {
  const Bounds b{2, 1, 1};
  auto base = base_presheaf(1, 1, b);
  auto g = fiber_construction(identity_map(base), 1, 1);
  for (std::size_t a = 0; a < g.anchor_count(); ++a)
    for (std::size_t c = 0; c < g.value_at(a).cell_count(); ++c) EXPECT_EQ(g.value_at(a).size_at(c), 1u);
  auto empty = share(empty_presheaf(3, b));
  auto h = fiber_construction(PresheafMap(empty, base, {}), 1, 1);
  for (std::size_t a = 0; a < h.anchor_count(); ++a) EXPECT_EQ(h.value_at(a).element_count(), 0u);
}

TEST(Fiber, TwoPointsOverThePoint) {
  const Bounds b{2, 1, 1};
  auto two = oracle::nerve(oracle::poset_category({2, {}}), 2);
  auto domain = share(constant_over_base(two, 1, 1));
  auto alpha = PresheafMap(domain, base_presheaf(0, 0, b), std::vector<std::uint32_t>(domain->element_count(), 0));
  EXPECT_FALSE(roundtrip_check(alpha, 0, 0));
  auto g = fiber_construction(alpha, 0, 0);
  for (std::size_t a = 0; a < g.anchor_count(); ++a)
    for (int k = 0; k <= 2; ++k) EXPECT_EQ(g.value_at(a).size({k, 0, 0}), 2u);
}

TEST(RoundTrip, EnumeratedUniverseAtLowLevels) {
  for (auto [p, q] : {std::pair{0, 0}, {1, 0}, {0, 1}}) {
    auto all = universe(p, q);
    EXPECT_FALSE(all.empty());
    for (const auto& g : all) {
      ASSERT_FALSE(roundtrip_check(g)) << p << q;
      ASSERT_FALSE(roundtrip_check(sum_construction(g), p, q)) << p << q;
    }
  }
}

TEST(RoundTrip, SampleAtTopLevel) {
  auto codes = enumerate_functor_codes(Variant::SSpaces, 1, 1, kSmall);
  ASSERT_EQ(codes.size(), 44386u);
  const auto& cat = *value_catalogue(2, 2);
  for (std::size_t i = 0; i < codes.size(); i += 97) {
    auto g = decode(cat, 1, 1, kSmall.functor_bounds(), codes[i].data());
    ASSERT_FALSE(roundtrip_check(g)) << i;
    ASSERT_EQ(encode(cat, g), codes[i]);
  }
}

TEST(Restrict, IdentityAndVertex) {
  for (const auto& g : universe(1, 0)) {
    EXPECT_EQ(restrict(g, MonotoneMap::identity(1), MonotoneMap::identity(0)), g);
    auto at0 = restrict(g, MonotoneMap(1, {0}), MonotoneMap::identity(0));
    EXPECT_EQ(at0.p(), 0);
    const auto& s1 = g.slice_p();
    // Every anchor of the restriction sees the value of G at the constant anchor 0...0.
    for (std::size_t i = 0; i < at0.slice_p().objects().size(); ++i) {
      const auto& anchor = at0.slice_p().objects()[i].anchor;
      auto image = s1.index_of(compose(MonotoneMap(1, {0}), anchor));
      EXPECT_EQ(at0.value(i, 0), g.value(image, 0));
    }
  }
}

TEST(Restrict, EqualsFiberOfPullback) {
  const auto bounds = kSmall.functor_bounds();
  const std::vector<MonotoneMap> into1{MonotoneMap(1, {0}), MonotoneMap(1, {1}), MonotoneMap::identity(1)};
  auto codes = enumerate_functor_codes(Variant::SSpaces, 1, 1, kSmall);
  const auto& cat = *value_catalogue(2, 2);
  for (std::size_t i = 0; i < codes.size(); i += 211) {
    auto g = decode(cat, 1, 1, bounds, codes[i].data());
    auto sigma = sum_construction(g);
    for (const auto& d1 : into1)
      for (const auto& d2 : into1) {
        auto along = base_map(d1, d2, bounds);
        auto pb = pullback(sigma, along);
        auto f = fiber_construction(pb.right, d1.source(), d2.source());
        ASSERT_EQ(f, restrict(g, d1, d2)) << i << " " << d1.str() << " " << d2.str();
        ASSERT_EQ(encode(cat, f), restrict_code(cat, 1, 1, codes[i].data(), d1, d2));
      }
  }
}

TEST(PointBijection, CountsAndInverse) {
  const Bounds b{2, 1, 1};
  EXPECT_EQ(pointed_over(constant_functor(0, 0, b, share(terminal(1, {2, 0, 0}))), 0).size(), 1u);
  EXPECT_TRUE(pointed_over(constant_functor(0, 0, b, share(empty_presheaf(1, {2, 0, 0}))), 1).empty());
  auto two = share(oracle::nerve(oracle::poset_category({2, {}}), 2));
  EXPECT_EQ(pointed_over(constant_functor(0, 0, b, two), 1).size(), 2u);
  EXPECT_THROW(pointed_over(constant_functor(0, 0, b, two), 3), std::out_of_range);

  for (const auto& g : universe(1, 0))
    for (int r = 0; r <= 2; ++r) {
      auto pointed = pointed_over(g, r);
      ASSERT_EQ(pointed.size(), g.value_at(g.top_anchor()).size({r, 0, 0}));
      for (const auto& x : pointed) {
        auto triple = point_backward(x);
        EXPECT_EQ(point_forward(triple), x);
        EXPECT_EQ(point_backward(point_forward(triple)), triple);
      }
    }
}

TEST(PullBackR, InjectiveAndInvertible) {
  for (int r : {0, 1}) {
    auto all = universe(1, 0);
    std::vector<TripleFunctor> images;
    for (const auto& g : all) {
      images.push_back(pull_back_r(g, r));
      auto back = push_forward_r(images.back());
      ASSERT_TRUE(back);
      EXPECT_EQ(*back, g);
    }
    for (std::size_t i = 0; i < images.size(); ++i)
      for (std::size_t j = i + 1; j < images.size(); ++j) ASSERT_FALSE(images[i] == images[j]) << i << " " << j;
  }
}
