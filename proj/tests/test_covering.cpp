#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"

using namespace pebble;

namespace {

std::vector<VertexSet> k_subsets(std::vector<Vertex> pool, std::size_t k) {
  std::vector<VertexSet> out;
  for_each_subset(std::span<const Vertex>(pool), k, [&](VertexSet s) { out.push_back(s); });
  return out;
}

}  // namespace

TEST(Cover, Singleton) {
  const std::vector<VertexSet> fam{VertexSet{3}};
  const auto d = greedy_cover(fam, 2, 0);
  EXPECT_EQ(d.sets, fam);
  EXPECT_TRUE(validate_cover(d, fam));
}

TEST(Cover, PairsOfFiveLexicographic) {
  const auto fam = k_subsets({0, 1, 2, 3, 4}, 2);
  const auto d = greedy_cover(fam, 4, 5);
  EXPECT_EQ(d.sets, (std::vector<VertexSet>{VertexSet{0, 1, 2, 3}, VertexSet{0, 1, 2, 4}, VertexSet{3, 4}}));
  EXPECT_TRUE(validate_cover(d, fam));
}

TEST(Cover, DisjointFamilyIsItsOwnCover) {
  const std::vector<VertexSet> fam{VertexSet{1, 2}, VertexSet{3, 4}, VertexSet{5, 6}};
  EXPECT_EQ(greedy_cover(fam, 2, 0).sets, fam);
}

TEST(Cover, ValidateRejects) {
  const auto fam = k_subsets({1, 2, 3, 4}, 2);
  CoveringDesign d = greedy_cover(fam, 3, 0);
  ASSERT_TRUE(validate_cover(d, fam));
  CoveringDesign missing = d;
  missing.sets.pop_back();
  EXPECT_FALSE(validate_cover(missing, fam));
  CoveringDesign big = d;
  big.sets.push_back(VertexSet{1, 2, 3, 4});
  EXPECT_FALSE(validate_cover(big, fam));
  CoveringDesign rooted = d;
  rooted.sets.push_back(VertexSet{0, 1});
  EXPECT_FALSE(validate_cover(rooted, fam));
}

TEST(Cover, RejectsBadInput) {
  EXPECT_THROW(greedy_cover(std::vector<VertexSet>{}, 3, 0), std::invalid_argument);
  EXPECT_THROW(greedy_cover(std::vector<VertexSet>{VertexSet{1, 2}, VertexSet{3}}, 3, 0), std::invalid_argument);
  EXPECT_THROW(greedy_cover(std::vector<VertexSet>{VertexSet{1, 2, 3}}, 2, 0), std::invalid_argument);
}

TEST(Cover, RandomFamiliesAreCovered) {
  std::mt19937_64 rng(23);
  for (int it = 0; it < 2000; ++it) {
    const std::size_t n = 4 + rng() % 12, k = 1 + rng() % 3, c = k + rng() % 4;
    std::vector<Vertex> pool;
    for (Vertex v = 1; v <= n; ++v) pool.push_back(v);
    auto fam = k_subsets(pool, k);
    std::shuffle(fam.begin(), fam.end(), rng);
    fam.resize(1 + rng() % fam.size());
    const auto d = greedy_cover(fam, c, 0);
    ASSERT_TRUE(validate_cover(d, fam));
    EXPECT_LE(d.sets.size(), fam.size());
    // Naive membership check, independent of validate_cover.
    for (VertexSet t : fam) {
      bool hit = false;
      for (VertexSet b : d.sets) hit = hit || t.subset_of(b);
      EXPECT_TRUE(hit);
    }
  }
}

TEST(Cover, ShuffleIsSeeded) {
  const auto fam = k_subsets({1, 2, 3, 4, 5, 6, 7}, 3);
  EXPECT_EQ(ordered_family(fam, FamilyOrder::shuffled, 5), ordered_family(fam, FamilyOrder::shuffled, 5));
  EXPECT_NE(ordered_family(fam, FamilyOrder::shuffled, 5), ordered_family(fam, FamilyOrder::shuffled, 6));
  EXPECT_EQ(ordered_family(fam, FamilyOrder::lexicographic, 5), fam);
  auto sorted = ordered_family(fam, FamilyOrder::shuffled, 1);
  std::sort(sorted.begin(), sorted.end(), VertexSet::lex_less);
  EXPECT_EQ(sorted, fam);
}

TEST(VertexSetOps, Basics) {
  VertexSet s{1, 5, 63};
  EXPECT_EQ(s.size(), 3u);
  EXPECT_TRUE(s.contains(63));
  EXPECT_FALSE(s.contains(64));
  EXPECT_THROW(s.insert(64), std::out_of_range);
  EXPECT_EQ(s.to_string(), "1,5,63");
  EXPECT_TRUE(VertexSet::lex_less(VertexSet{1, 2}, VertexSet{1, 3}));
  EXPECT_TRUE(VertexSet::lex_less(VertexSet{1, 9}, VertexSet{2, 3}));
  EXPECT_EQ(binomial(63, 4), 595665u);
  EXPECT_EQ(binomial(3, 5), 0u);
  std::size_t count = 0;
  for_each_subset_of(VertexSet{0, 2, 4, 6, 8}, 3, [&](VertexSet) { ++count; });
  EXPECT_EQ(count, 10u);
}
