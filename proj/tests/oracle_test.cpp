#include <gtest/gtest.h>

#include <map>

#include "segal/oracle.hpp"

using namespace segal;
using namespace segal::oracle;

TEST(FiniteCategories, PosetsAndGroups) {
  Poset chain{3, {{0, 1}, {1, 2}, {0, 2}}};
  EXPECT_TRUE(chain.leq(0, 2));
  EXPECT_FALSE(chain.leq(2, 0));
  auto c = poset_category(chain);
  EXPECT_EQ(c.morphisms(), 6);
  auto z3 = cyclic_group(3);
  EXPECT_EQ(z3.objects, 1);
  EXPECT_EQ(z3.after(1, 2), 0);
  EXPECT_EQ(z3.after(2, 2), 1);
}

TEST(Nerve, LevelSizes) {
  auto n = nerve(poset_category({3, {{0, 1}, {1, 2}, {0, 2}}}), 3);
  EXPECT_FALSE(validate(n));
  // Weakly increasing chains in a 3-element total order: binomial(k+3, k+1).
  EXPECT_EQ(n.sizes(), (std::vector<std::uint32_t>{3, 6, 10, 15}));
  auto z2 = nerve(cyclic_group(2), 3);
  EXPECT_FALSE(validate(z2));
  EXPECT_EQ(z2.sizes(), (std::vector<std::uint32_t>{1, 2, 4, 8}));
}

TEST(Posets, LabelledCounts) {
  // Number of labelled posets on n points.
  EXPECT_EQ(labelled_posets(0).size(), 1u);
  EXPECT_EQ(labelled_posets(1).size(), 1u);
  EXPECT_EQ(labelled_posets(2).size(), 3u);
  EXPECT_EQ(labelled_posets(3).size(), 19u);
}

TEST(Posets, FunctorCountsByShape) {
  // Functors into sets of size <= 2, keyed by size and number of strict relations.
  std::map<std::pair<int, std::size_t>, std::multiset<std::size_t>> seen;
  for (int n = 0; n <= 3; ++n)
    for (const auto& p : labelled_posets(n)) seen[std::pair{n, p.less.size()}].insert(count_poset_functors(p, 2));
  auto at = [&](int n, std::size_t relations) { return seen[std::pair{n, relations}]; };
  EXPECT_EQ(at(0, 0), (std::multiset<std::size_t>{1}));
  EXPECT_EQ(at(1, 0), (std::multiset<std::size_t>{3}));
  EXPECT_EQ(at(2, 0), (std::multiset<std::size_t>{9}));
  EXPECT_EQ(at(2, 1), (std::multiset<std::size_t>{11, 11}));
  EXPECT_EQ(at(3, 0), (std::multiset<std::size_t>{27}));
  EXPECT_EQ(at(3, 1).count(33), 6u);
  // Three V shapes and three inverted V shapes.
  EXPECT_EQ(at(3, 2).count(43), 3u);
  EXPECT_EQ(at(3, 2).count(59), 3u);
  EXPECT_EQ(at(3, 3).size(), 6u);
  EXPECT_EQ(at(3, 3).count(47), 6u);
}

TEST(Posets, NerveLeftFibrationsMatchFunctors) {
  for (int n = 0; n <= 2; ++n)
    for (const auto& p : labelled_posets(n)) EXPECT_EQ(count_nerve_left_fibrations(p, 2, 2), count_poset_functors(p, 2));
}

TEST(CategoryNerves, FrozenCounts) {
  EXPECT_EQ(count_category_nerves(2, 2), 6u);
  EXPECT_EQ(count_category_nerves(3, 2), 10u);
  EXPECT_EQ(count_category_nerves(3, 0), 1u);
}

TEST(FibrationsOver, SmallBasesAtK2) {
  EXPECT_EQ(count_fibrations_over(Variant::SSpaces, base_f(0, 1, 1), 2, 2), 8u);
  EXPECT_EQ(count_fibrations_over(Variant::SSpaces, base_f(1, 1, 1), 2, 2), 121u);
  EXPECT_EQ(count_fibrations_over(Variant::SSpaces, base_delta(1, 1, 1), 2, 2), 121u);
  EXPECT_EQ(count_fibrations_over(Variant::Seg, base_f(0, 1, 1), 2, 2), 6u);
  EXPECT_EQ(count_fibrations_over(Variant::Seg, base_f(1, 1, 1), 2, 2), 83u);
  EXPECT_EQ(count_fibrations_over(Variant::CSS, base_f(0, 1, 1), 3, 2), 10u);
}

TEST(FibrationsOver, CoCartesianOverPointMatchesCategoryNerves) {
  EXPECT_EQ(count_fibrations_over(Variant::CSS, base_f(0, 1, 1), 3, 2), count_category_nerves(3, 2));
}

TEST(TableKey, IgnoresLabels) {
  auto n = nerve(poset_category({2, {{0, 1}}}), 2);
  EXPECT_EQ(table_key(n), table_key(index_relabel(n)));
  EXPECT_NE(table_key(n), table_key(nerve(cyclic_group(2), 2)));
}
