#include <gtest/gtest.h>

#include <set>
#include <stdexcept>

#include "segal/simplex.hpp"

using namespace segal;

namespace {

std::size_t binomial(int n, int k) {
  std::size_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
  return r;
}

// All functions [n] -> [m] that happen to be monotone, by brute force.
std::vector<MonotoneMap> brute_monotone(int n, int m) {
  std::vector<MonotoneMap> out;
  std::vector<int> v(static_cast<std::size_t>(n) + 1, 0);
  while (true) {
    bool ok = true;
    for (std::size_t i = 1; i < v.size(); ++i) ok = ok && v[i - 1] <= v[i];
    if (ok) out.emplace_back(m, v);
    std::size_t i = 0;
    while (i < v.size() && v[i] == m) v[i++] = 0;
    if (i == v.size()) break;
    ++v[i];
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Monotone, SmallHomSets) {
  auto h = enumerate_monotone(0, 2);
  ASSERT_EQ(h.size(), 3u);
  EXPECT_EQ(h[0].str(), "0");
  EXPECT_EQ(h[2].str(), "2");
  auto h11 = enumerate_monotone(1, 1);
  ASSERT_EQ(h11.size(), 3u);
  EXPECT_EQ(h11[0].str(), "00");
  EXPECT_EQ(h11[1].str(), "01");
  EXPECT_EQ(h11[2].str(), "11");
}

TEST(Monotone, CountsMatchBinomialAndBruteForce) {
  for (int n = 0; n <= 5; ++n)
    for (int m = 0; m <= 5; ++m) {
      auto h = enumerate_monotone(n, m);
      EXPECT_EQ(h.size(), binomial(n + m + 1, n + 1));
      EXPECT_EQ(h.size(), monotone_count(n, m));
      EXPECT_TRUE(std::is_sorted(h.begin(), h.end()));
      for (std::size_t i = 0; i < h.size(); ++i) EXPECT_EQ(monotone_rank(h[i]), i);
      if (n <= 3 && m <= 3) EXPECT_EQ(h, brute_monotone(n, m));
    }
  for (int n = 0; n <= 5; ++n) {
    auto h = enumerate_monotone(n, n);
    EXPECT_NE(std::find(h.begin(), h.end(), MonotoneMap::identity(n)), h.end());
  }
}

TEST(Monotone, RejectsBadValues) {
  EXPECT_THROW(MonotoneMap(1, {1, 0}), std::invalid_argument);
  EXPECT_THROW(MonotoneMap(1, {0, 2}), std::invalid_argument);
  EXPECT_EQ(MonotoneMap::parse("0,1,12", 12).values(), (std::vector<int>{0, 1, 12}));
  EXPECT_EQ(MonotoneMap::parse("012", 2).str(), "012");
}

TEST(Compose, ExamplesAndLaws) {
  MonotoneMap f(1, {0, 1});
  MonotoneMap g(1, {0, 0});
  EXPECT_EQ(compose(f, g).str(), "00");
  EXPECT_THROW(compose(MonotoneMap(2, {0, 1}), MonotoneMap(2, {0, 1, 2})), std::invalid_argument);
  for (int a = 0; a <= 3; ++a)
    for (int b = 0; b <= 3; ++b)
      for (const auto& h : enumerate_monotone(a, b)) {
        EXPECT_EQ(compose(MonotoneMap::identity(b), h), h);
        EXPECT_EQ(compose(h, MonotoneMap::identity(a)), h);
      }
  for (int a = 0; a <= 2; ++a)
    for (int b = 0; b <= 2; ++b)
      for (int c = 0; c <= 2; ++c)
        for (int d = 0; d <= 2; ++d)
          for (const auto& h : enumerate_monotone(a, b))
            for (const auto& g2 : enumerate_monotone(b, c))
              for (const auto& f2 : enumerate_monotone(c, d)) EXPECT_EQ(compose(compose(f2, g2), h), compose(f2, compose(g2, h)));
}

TEST(EpiMono, Examples) {
  auto id = epi_mono_factor(MonotoneMap::identity(2));
  EXPECT_TRUE(id.surjection.is_identity());
  EXPECT_TRUE(id.injection.is_identity());
  auto a = epi_mono_factor(MonotoneMap(1, {0, 0, 1}));
  EXPECT_EQ(a.surjection, MonotoneMap(1, {0, 0, 1}));
  EXPECT_EQ(a.injection, MonotoneMap::identity(1));
  auto b = epi_mono_factor(MonotoneMap(2, {0, 2}));
  EXPECT_EQ(b.surjection, MonotoneMap::identity(1));
  EXPECT_EQ(b.injection, MonotoneMap(2, {0, 2}));
}

TEST(EpiMono, BijectionWithComposablePairs) {
  for (int n = 0; n <= 3; ++n)
    for (int m = 0; m <= 3; ++m) {
      std::set<std::pair<MonotoneMap, MonotoneMap>> seen;
      for (const auto& f : enumerate_monotone(n, m)) {
        auto [s, i] = epi_mono_factor(f);
        EXPECT_TRUE(s.is_surjective());
        EXPECT_TRUE(i.is_injective());
        EXPECT_EQ(compose(i, s), f);
        seen.insert({s, i});
      }
      std::size_t pairs = 0;
      for (int k = 0; k <= std::min(n, m); ++k)
        for (const auto& s : enumerate_monotone(n, k))
          for (const auto& i : enumerate_monotone(k, m))
            if (s.is_surjective() && i.is_injective()) {
              ++pairs;
              EXPECT_TRUE(seen.count({s, i}));
            }
      EXPECT_EQ(pairs, seen.size());
    }
}

TEST(Generators, ChainRealizesMap) {
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; b <= 4; ++b)
      for (const auto& theta : enumerate_monotone(a, b)) {
        // Actions compose contravariantly, so the maps compose in reverse.
        MonotoneMap acc = MonotoneMap::identity(b);
        int level = b;
        for (const auto& g : generator_chain(theta)) {
          EXPECT_EQ(g.level, level);
          acc = compose(acc, g.map());
          level = g.target_level();
        }
        EXPECT_EQ(acc, theta);
        Generator g;
        if (as_generator(theta, g)) EXPECT_EQ(g.map(), theta);
      }
}

TEST(Slice, ObjectsAndGenerators) {
  auto s0 = slice_category(0, 1);
  EXPECT_EQ(s0->objects().size(), 2u);
  auto s1 = slice_category(1, 1);
  EXPECT_EQ(s1->objects().size(), 5u);
  EXPECT_EQ(s1->level_size(0), 2u);
  EXPECT_EQ(s1->level_size(1), 3u);
  for (int p = 0; p <= 2; ++p)
    for (int bound = 0; bound <= 2; ++bound) {
      auto s = slice_category(p, bound);
      for (std::size_t gi = 0; gi < s->generators().size(); ++gi) {
        const auto& g = s->generators()[gi];
        EXPECT_EQ(g.from.anchor, compose(g.to.anchor, g.mediator));
        EXPECT_EQ(s->objects()[s->generator_source(gi)], g.from);
        Generator gen;
        EXPECT_TRUE(as_generator(g.mediator, gen));
      }
      for (std::size_t i = 0; i < s->objects().size(); ++i) EXPECT_EQ(s->index_of(s->objects()[i].anchor), i);
    }
}

TEST(Slice, PostcomposeIsCosimplicial) {
  auto s = slice_category(1, 1);
  for (const auto& o : s->objects()) EXPECT_EQ(postcompose(MonotoneMap::identity(1), o), o);
  for (int p = 0; p <= 2; ++p)
    for (int bound = 0; bound <= 2; ++bound) {
      auto sl = slice_category(p, bound);
      // d^j d^i = d^i d^{j-1} for i < j, as maps [p] -> [p+2].
      for (int j = 1; j <= p + 2; ++j)
        for (int i = 0; i < j; ++i) {
          auto lhs = compose(MonotoneMap::coface(p + 2, j), MonotoneMap::coface(p + 1, i));
          auto rhs = compose(MonotoneMap::coface(p + 2, i), MonotoneMap::coface(p + 1, j - 1));
          for (const auto& o : sl->objects()) {
            auto l = postcompose(MonotoneMap::coface(p + 2, j), postcompose(MonotoneMap::coface(p + 1, i), o));
            auto r = postcompose(MonotoneMap::coface(p + 2, i), postcompose(MonotoneMap::coface(p + 1, j - 1), o));
            EXPECT_EQ(l, r);
            EXPECT_EQ(l, postcompose(lhs, o));
            EXPECT_EQ(r, postcompose(rhs, o));
          }
        }
      // Generators go to slice morphisms with the same mediator.
      if (p >= 1)
        for (const auto& g : sl->generators()) {
          auto moved = postcompose(MonotoneMap::codegeneracy(p - 1, 0), g);
          EXPECT_EQ(moved.from.anchor, compose(moved.to.anchor, moved.mediator));
        }
    }
}
