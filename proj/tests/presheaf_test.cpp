#include <gtest/gtest.h>

#include <random>

#include "segal/presheaf.hpp"

using namespace segal;

namespace {

std::shared_ptr<const TruncatedPresheaf> share(TruncatedPresheaf x) { return std::make_shared<const TruncatedPresheaf>(std::move(x)); }

}  // namespace

TEST(Representable, LevelSizes) {
  Bounds b{2, 2, 2};
  auto phi1 = representable(RepKind::Phi, 1, b);
  for (int n = 0; n <= 2; ++n)
    for (int l = 0; l <= 2; ++l) EXPECT_EQ(phi1.size({1, n, l}), 3u);
  auto f0 = representable(RepKind::F, 0, b);
  for (std::size_t c = 0; c < f0.cell_count(); ++c) EXPECT_EQ(f0.size_at(c), 1u);
  auto d1 = representable(RepKind::Delta, 1, b);
  for (int k = 0; k <= 2; ++k)
    for (int n = 0; n <= 2; ++n) EXPECT_EQ(d1.size({k, n, 0}), 2u);
  for (auto kind : {RepKind::Phi, RepKind::F, RepKind::Delta})
    for (int r = 0; r <= 2; ++r) EXPECT_FALSE(validate(representable(kind, r, b))) << r;
  EXPECT_FALSE(validate(terminal(3, b)));
  EXPECT_FALSE(validate(terminal(1, {3, 0, 0})));
  EXPECT_FALSE(validate(empty_presheaf(2, {2, 2, 0})));
}

TEST(Validate, LocatesEveryCorruption) {
  Bounds b{2, 1, 1};
  auto x = representable(RepKind::Phi, 2, b);
  std::mt19937 rng(7);
  int located = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto y = x;
    std::size_t cell = rng() % y.cell_count();
    if (y.size_at(cell) == 0) continue;
    int dir = static_cast<int>(rng() % 3);
    int count = y.generator_count_at(dir, cell);
    if (count == 0) continue;
    int slot = static_cast<int>(rng() % static_cast<unsigned>(count));
    auto g = generator_at(y.index(cell)[static_cast<std::size_t>(dir)], b[static_cast<std::size_t>(dir)], slot);
    auto target = y.size(shift(y.index(cell), dir, g.target_level()));
    auto table = y.action_slot_mut(dir, cell, slot);
    std::uint32_t e = static_cast<std::uint32_t>(rng() % table.size());
    std::uint32_t old = table[e];
    table[e] = (old + 1 + static_cast<std::uint32_t>(rng() % std::max<std::uint32_t>(target - 1, 1))) % std::max<std::uint32_t>(target, 1);
    if (table[e] == old) continue;
    auto v = validate(y);
    ASSERT_TRUE(v.has_value()) << "corruption at cell " << cell << " not found";
    EXPECT_FALSE(v->identity.empty());
    ++located;
  }
  EXPECT_GT(located, 100);
}

TEST(Product, UnitAndPullbackOverPoint) {
  Bounds b{1, 1, 1};
  auto x = representable(RepKind::F, 1, b);
  auto xt = product(x, terminal(3, b));
  EXPECT_EQ(index_relabel(xt), index_relabel(x));
  auto y = representable(RepKind::Delta, 1, b);
  auto px = share(x);
  auto py = share(y);
  auto pb = pullback(to_terminal(px), to_terminal(py));
  EXPECT_EQ(*pb.object, product(x, y));
  EXPECT_FALSE(validate(*pb.object));
  EXPECT_FALSE(pb.left.naturality_violation());
  EXPECT_FALSE(pb.right.naturality_violation());
  auto along_id = pullback(identity_map(px), identity_map(px));
  EXPECT_EQ(index_relabel(*along_id.object), index_relabel(x));
}

TEST(Pullback, UniversalPropertyAgainstCones) {
  // A -> B <- C with A = F(1), C = Delta[1], B = terminal; cones from T = F(1) x Delta[0].
  Bounds b{0, 1, 1};
  auto a = share(representable(RepKind::F, 1, b));
  auto c = share(representable(RepKind::Delta, 1, b));
  auto pb = pullback(to_terminal(a), to_terminal(c));
  auto t = share(product(representable(RepKind::F, 1, b), representable(RepKind::Delta, 0, b)));
  std::size_t cones = 0;
  enumerate_maps(*t, *a, [&](const std::vector<std::uint32_t>& ta) {
    enumerate_maps(*t, *c, [&](const std::vector<std::uint32_t>&) {
      ++cones;
      return true;
    });
    (void)ta;
    return true;
  });
  EXPECT_EQ(cones, count_maps(*t, *pb.object));
}

TEST(Embed, StandardAndDiagonal) {
  auto x = slice_direction(representable(RepKind::Delta, 1, {0, 2, 2}), 0, 0);
  ASSERT_EQ(x.arity(), 2);
  auto e = standard_embed(x, 2);
  EXPECT_FALSE(validate(e));
  for (int k = 0; k <= 2; ++k) EXPECT_EQ(slice_direction(e, 0, k), x);
  EXPECT_EQ(delta_diag(standard_embed(x, 2)), x);
  EXPECT_EQ(standard_embed(terminal(2, {2, 2, 0}), 2), terminal(3, {2, 2, 2}));
  EXPECT_EQ(delta_diag(terminal(3, {2, 2, 1})), terminal(2, {2, 1, 0}));
  auto prod = product(product(representable(RepKind::Phi, 1, {2, 2, 0}), representable(RepKind::F, 1, {2, 2, 0})),
                      representable(RepKind::Delta, 0, {2, 2, 0}));
  auto d = delta_diag(prod);
  EXPECT_FALSE(validate(d));
  for (int n = 0; n <= 2; ++n) EXPECT_EQ(d.size({n, 0, 0}), monotone_count(n, 1) * monotone_count(n, 1));
  EXPECT_THROW(delta_diag(terminal(3, {1, 2, 0})), std::invalid_argument);
}

TEST(Embed, CommutesWithProducts) {
  auto x = slice_direction(representable(RepKind::Delta, 1, {0, 2, 2}), 0, 0);
  auto y = slice_direction(representable(RepKind::F, 2, {0, 2, 2}), 0, 0);
  EXPECT_EQ(standard_embed(product(x, y), 2), product(standard_embed(x, 2), standard_embed(y, 2)));
  auto a = representable(RepKind::Phi, 1, {2, 2, 1});
  auto c = representable(RepKind::F, 1, {2, 2, 1});
  EXPECT_EQ(delta_diag(product(a, c)), product(delta_diag(a), delta_diag(c)));
}

TEST(Spaces, CountsMatchIndependentBruteForce) {
  // Frozen from an independent brute force over all truncated simplicial set tables.
  EXPECT_EQ(enumerate_spaces(1, 1).size(), 2u);
  EXPECT_EQ(enumerate_spaces(2, 1).size(), 2u);
  EXPECT_EQ(enumerate_spaces(3, 1).size(), 2u);
  EXPECT_EQ(enumerate_spaces(1, 2).size(), 6u);
  EXPECT_EQ(enumerate_spaces(2, 2).size(), 8u);
  EXPECT_EQ(enumerate_spaces(3, 2).size(), 12u);
  EXPECT_EQ(enumerate_spaces(2, 0).size(), 1u);
  for (int k : {2, 3}) {
    auto spaces = enumerate_spaces(k, 2);
    std::size_t arrows = 0;
    for (const auto& a : spaces) {
      EXPECT_FALSE(validate(a));
      for (const auto& b : spaces) arrows += enumerate_space_maps(a, b).size();
    }
    EXPECT_EQ(arrows, k == 2 ? 121u : 353u);
  }
}

TEST(Spaces, MapsAreNatural) {
  auto spaces = enumerate_spaces(2, 2);
  for (const auto& a : spaces)
    for (const auto& b : spaces)
      for (const auto& m : enumerate_space_maps(a, b)) {
        std::vector<std::uint32_t> images;
        for (const auto& lvl : m) images.insert(images.end(), lvl.begin(), lvl.end());
        EXPECT_FALSE(PresheafMap(share(a), share(b), images).naturality_violation());
      }
}

TEST(HomOver, FibersOfRepresentableMaps) {
  Bounds b{1, 1, 1};
  auto base = base_presheaf(1, 0, b);
  auto x = identity_map(base);
  // A = phi_1 x F(1) x Delta[0] over the anchor (01, 0): maps over base into the base itself.
  auto a_obj = share(product(representable(RepKind::Phi, 1, b), *base));
  std::vector<std::uint32_t> proj;
  for (std::size_t c = 0; c < a_obj->cell_count(); ++c)
    for (std::uint32_t e = 0; e < a_obj->size_at(c); ++e) proj.push_back(e % base->size_at(c));
  PresheafMap a(a_obj, base, proj);
  ASSERT_FALSE(a.naturality_violation());
  EXPECT_EQ(hom_over(a, x).size(), 1u);
  auto empty = share(empty_presheaf(3, b));
  PresheafMap none(empty, base, {});
  EXPECT_EQ(hom_over(a, none).size(), 0u);
}

TEST(Relabel, CanonicalSortsLabels) {
  auto x = representable(RepKind::Phi, 1, {1, 0, 0});
  auto y = canonical_relabel(x);
  EXPECT_FALSE(validate(y));
  EXPECT_EQ(y.label({1, 0, 0}, 0), "0");
  EXPECT_EQ(canonical_relabel(y), y);
}
