#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <set>

#include "segal/classifier.hpp"
#include "segal/fibration.hpp"
#include "segal/grothendieck.hpp"
#include "segal/oracle.hpp"

using namespace segal;
using oracle::over_point;

namespace {

std::shared_ptr<const TruncatedPresheaf> share(TruncatedPresheaf x) { return std::make_shared<const TruncatedPresheaf>(std::move(x)); }

// The simplicial set whose k-simplices are the weakly increasing sequences over
// {0..vertices-1} accepted by `allowed`, truncated at k_bound.
TruncatedPresheaf ordered_complex(int vertices, const std::function<bool(const std::vector<int>&)>& allowed, int k_bound) {
  std::vector<std::vector<std::vector<int>>> simplices(static_cast<std::size_t>(k_bound + 1));
  for (int k = 0; k <= k_bound; ++k)
    for (const auto& f : enumerate_monotone(k, vertices - 1))
      if (allowed(f.values())) simplices[static_cast<std::size_t>(k)].push_back(f.values());
  std::vector<std::uint32_t> sizes;
  LabelTable labels;
  for (const auto& level : simplices) {
    sizes.push_back(static_cast<std::uint32_t>(level.size()));
    for (const auto& s : level) {
      std::string label;
      for (int v : s) label += std::to_string(v);
      labels.add(label);
    }
  }
  TruncatedPresheaf x(1, {k_bound, 0, 0}, sizes, std::move(labels));
  for (int k = 0; k <= k_bound; ++k) {
    const auto& level = simplices[static_cast<std::size_t>(k)];
    for (int slot = 0; slot < generator_count(k, k_bound); ++slot) {
      const auto g = generator_at(k, k_bound, slot);
      const auto& target = simplices[static_cast<std::size_t>(g.target_level())];
      auto table = x.action_slot_mut(0, static_cast<std::size_t>(k), slot);
      for (std::size_t e = 0; e < level.size(); ++e) {
        auto s = level[e];
        if (g.kind == Generator::Kind::Face)
          s.erase(s.begin() + g.index);
        else
          s.insert(s.begin() + g.index, s[static_cast<std::size_t>(g.index)]);
        table[e] = static_cast<std::uint32_t>(std::find(target.begin(), target.end(), s) - target.begin());
      }
    }
  }
  return x;
}

TruncatedPresheaf chain_nerve(int k_bound) { return oracle::nerve(oracle::poset_category({2, {{0, 1}}}), k_bound); }

}  // namespace

TEST(LeftFibrationSS, Examples) {
  auto constant = share(oracle::as_simplicial_space(terminal(1, {2, 0, 0})));
  EXPECT_TRUE(is_left_fibration_ss(to_terminal(constant)));
  auto chain = share(oracle::as_simplicial_space(chain_nerve(1)));
  auto v = is_left_fibration_ss(to_terminal(chain));
  ASSERT_FALSE(v);
  EXPECT_EQ(v.witness->lhs_count, 3u);
  EXPECT_EQ(v.witness->rhs_count, 2u);
  EXPECT_EQ(v.witness->index[0], 1);
  EXPECT_TRUE(is_left_fibration_ss(identity_map(chain)));
}

TEST(ReedyLeft, Examples) {
  for (int k : {0, 1, 2, 3}) {
    auto point_fibers = over_point(chain_nerve(k), 1, 1);
    EXPECT_TRUE(is_reedy_left(point_fibers)) << k;
  }
  // Two elements over one vertex in the base direction.
  auto z2 = oracle::nerve(oracle::cyclic_group(2), 1);
  auto bad = share(standard_embed(oracle::as_simplicial_space(z2), 1));
  auto v = is_reedy_left(to_terminal(bad));
  ASSERT_FALSE(v);
  EXPECT_EQ(v.witness->condition, "reedy-left:base");
  EXPECT_EQ(v.witness->lhs_count, 2u);
  EXPECT_EQ(v.witness->rhs_count, 1u);
}

TEST(Segal, ChainNerveIsSegal) {
  auto p = over_point(chain_nerve(2));
  EXPECT_TRUE(is_segal_cocartesian(p));
  EXPECT_TRUE(is_segal_cocartesian(to_terminal(share(terminal(3, {2, 0, 0})))));
}

TEST(Segal, UnfilledBoundaryFails) {
  auto boundary = ordered_complex(3, [](const std::vector<int>& s) { return std::set<int>(s.begin(), s.end()).size() < 3; }, 2);
  ASSERT_FALSE(validate(boundary));
  auto v = is_segal_cocartesian(over_point(boundary));
  ASSERT_FALSE(v);
  EXPECT_EQ(v.witness->condition, "segal");
  // The composable pair 01, 12 has no 2-simplex over it.
  EXPECT_EQ(v.witness->rhs_count - v.witness->lhs_count, 1u);
  auto simplex = ordered_complex(3, [](const std::vector<int>&) { return true; }, 2);
  EXPECT_TRUE(is_segal_cocartesian(over_point(simplex)));
}

TEST(Segal, BoundShortfall) { EXPECT_THROW(is_segal_cocartesian(over_point(chain_nerve(1))), BoundShortfall); }

TEST(CoCartesian, Examples) {
  for (int n = 1; n <= 3; ++n)
    for (const auto& p : oracle::labelled_posets(n))
      EXPECT_TRUE(is_cocartesian(over_point(oracle::nerve(oracle::poset_category(p), 3))));
  auto v = is_cocartesian(over_point(oracle::nerve(oracle::cyclic_group(2), 3)));
  ASSERT_FALSE(v);
  EXPECT_EQ(v.witness->condition, "complete");
  EXPECT_EQ(v.witness->lhs_count, 1u);
  EXPECT_EQ(v.witness->rhs_count, 2u);
  EXPECT_TRUE(is_cocartesian(to_terminal(share(terminal(3, {3, 1, 1})))));
  EXPECT_THROW(is_cocartesian(over_point(chain_nerve(2))), BoundShortfall);
}

TEST(LeftSSS, Examples) {
  EXPECT_TRUE(is_left_fibration_sss(to_terminal(share(terminal(3, {2, 2, 2})))));
  EXPECT_TRUE(is_left_fibration_sss(over_point(oracle::nerve(oracle::poset_category({3, {}}), 2))));
  auto v = is_left_fibration_sss(over_point(chain_nerve(3)));
  ASSERT_FALSE(v);
  EXPECT_EQ(v.witness->condition, "constant");
  EXPECT_EQ(v.witness->lhs_count, 2u);
  EXPECT_EQ(v.witness->rhs_count, 3u);
}

TEST(FinestClass, ChainNerveStopsAtCoCartesian) {
  auto f = finest_class(over_point(chain_nerve(3)));
  ASSERT_TRUE(f.cls);
  EXPECT_EQ(*f.cls, FibrationClass::CoCartesian);
  ASSERT_TRUE(f.next_failure);
  EXPECT_EQ(f.next_failure->cls, FibrationClass::Left);
  EXPECT_EQ(*finest_class(to_terminal(share(terminal(3, {3, 0, 0})))).cls, FibrationClass::Left);
}

TEST(Nesting, AllSmallSpacesOverThePoint) {
  std::size_t left = 0, cocart = 0, segal = 0;
  for (const auto& space : enumerate_spaces(3, 2)) {
    auto p = over_point(space, 1, 1);
    const bool r = is_reedy_left(p).holds, s = is_segal_cocartesian(p).holds, c = is_cocartesian(p).holds, l = is_left_fibration_sss(p).holds;
    EXPECT_TRUE(r);
    if (l) EXPECT_TRUE(c);
    if (c) EXPECT_TRUE(s);
    left += l;
    cocart += c;
    segal += s;
    // Witnesses replay on the standalone conditions.
    if (!s) {
      auto w = segal_witness(p.domain());
      ASSERT_TRUE(w);
      EXPECT_NE(w->lhs_count == w->rhs_count, w->element.empty());
    }
    if (s && !c) EXPECT_TRUE(complete_witness(p.domain()));
  }
  EXPECT_LE(left, cocart);
  EXPECT_LE(cocart, segal);
  EXPECT_GT(left, 0u);
  EXPECT_LT(segal, enumerate_spaces(3, 2).size());
}

TEST(EmptyPresheaf, PassesEverything) {
  auto p = to_terminal(share(empty_presheaf(3, {3, 1, 1})));
  for (auto c : {FibrationClass::ReedyLeft, FibrationClass::SegalCoCartesian, FibrationClass::CoCartesian, FibrationClass::Left})
    EXPECT_TRUE(check_class(c, p)) << class_name(c);
}

TEST(PointFibers, MixedFibersOverF1) {
  const auto& cat = *value_catalogue(2, 2);
  std::optional<std::uint32_t> non_segal;
  for (std::uint32_t i = 0; i < cat.size() && !non_segal; ++i)
    if (segal_witness(constant_over_base(*cat.space(i), 0, 0))) non_segal = i;
  ASSERT_TRUE(non_segal);
  std::optional<std::uint32_t> empty;
  for (std::uint32_t i = 0; i < cat.size() && !empty; ++i)
    if (cat.space(i)->element_count() == 0) empty = i;
  ASSERT_TRUE(empty);
  const auto& arrows = cat.arrows_between(*empty, *non_segal);
  ASSERT_EQ(arrows.size(), 1u);
  const FunctorCode code{*empty, *non_segal, arrows[0]};
  auto g = decode(cat, 1, 0, {2, 1, 0}, code.data());
  auto alpha = sum_construction(g);
  ASSERT_TRUE(is_reedy_left(alpha));
  auto report = point_fiber_classification(alpha, 1, 0);
  ASSERT_EQ(report.vertices.size(), 2u);
  EXPECT_TRUE(report.vertices[0].segal);
  EXPECT_FALSE(report.vertices[1].segal);
  EXPECT_FALSE(report.global_segal);
  EXPECT_TRUE(report.agrees);
  ASSERT_TRUE(report.first_non_segal);
  EXPECT_EQ(report.first_non_segal->v1, 1);
}

TEST(PointFibers, SingleVertexMatchesGlobal) {
  const auto& cat = *value_catalogue(3, 2);
  for (std::uint32_t i = 0; i < cat.size(); ++i) {
    const FunctorCode code{i};
    auto alpha = sum_construction(decode(cat, 0, 0, {3, 0, 0}, code.data()));
    auto report = point_fiber_classification(alpha, 0, 0);
    ASSERT_EQ(report.vertices.size(), 1u);
    EXPECT_TRUE(report.agrees);
    EXPECT_EQ(report.vertices[0].segal, report.global_segal);
    EXPECT_EQ(report.vertices[0].complete.value_or(false), report.global_cocartesian.value_or(false));
    EXPECT_EQ(report.vertices[0].constant, report.global_left);
  }
}

TEST(Classes, NamesRoundTrip) {
  for (auto c : {FibrationClass::ReedyLeft, FibrationClass::SegalCoCartesian, FibrationClass::CoCartesian, FibrationClass::Left})
    EXPECT_EQ(parse_class(class_name(c)), c);
  EXPECT_THROW(parse_class("Kan"), std::invalid_argument);
}
