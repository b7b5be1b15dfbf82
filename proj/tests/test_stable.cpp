#include <gtest/gtest.h>

#include <set>

#include "popmatch/oracle.hpp"
#include "popmatch/stable.hpp"
#include "popmatch/verify.hpp"
#include "support.hpp"

using namespace popmatch;
using fixtures::pairs;

TEST(GaleShapley, SingleEdge) {
  Instance i = parse_instance("popmatch v1 bipartite\nnode a A\nnode b B\npref a: b\npref b: a\n");
  EXPECT_EQ(stable::gale_shapley(i, Side::A).size(), 1);
  EXPECT_EQ(stable::gale_shapley(i, Side::B).size(), 1);
}

TEST(GaleShapley, BothOrientationsOnTwoByTwo) {
  Instance i = fixtures::two_by_two();
  EXPECT_EQ(stable::gale_shapley(i, Side::A), pairs(i, {{"a1", "b1"}, {"a2", "b2"}}));
  EXPECT_EQ(stable::gale_shapley(i, Side::B), pairs(i, {{"a1", "b2"}, {"a2", "b1"}}));
}

TEST(GaleShapley, RejectsRoommates) {
  EXPECT_THROW(stable::gale_shapley(fixtures::d_instance(), Side::A), InputError);
}

TEST(Irving, DInstanceHasNoStableMatching) { EXPECT_FALSE(stable::irving(fixtures::d_instance())); }

TEST(Irving, ExistenceMatchesOracleOnCorpus) {
  auto insts = fixtures::corpus(31, 200);
  std::mt19937_64 rng(32);
  for (int i = 0; i < 200; ++i) insts.push_back(fixtures::random_instance(rng, 4 + i % 5, false, 0.8));
  for (const auto& inst : insts) {
    auto all = oracle::enumerate_matchings(inst);
    bool exists = false;
    for (const auto& m : all) exists = exists || is_stable(inst, m);
    auto got = stable::irving(inst);
    ASSERT_EQ(got.has_value(), exists) << write_instance(inst);
    if (got) ASSERT_TRUE(is_stable(inst, *got));
    if (inst.bipartite()) ASSERT_TRUE(got);
  }
}

TEST(Enumerate, TwoByTwoHasTwoStableMatchings) {
  auto all = stable::enumerate_stable(fixtures::two_by_two());
  EXPECT_EQ(all.size(), 2u);
}

TEST(Enumerate, UniqueStableMatching) {
  Instance i = parse_instance(
      "popmatch v1 bipartite\nnode a1 A\nnode a2 A\nnode b1 B\nnode b2 B\n"
      "pref a1: b1 b2\npref a2: b2 b1\npref b1: a1 a2\npref b2: a2 a1\n");
  EXPECT_EQ(stable::enumerate_stable(i).size(), 1u);
}

TEST(Enumerate, RejectsRoommates) { EXPECT_THROW(stable::enumerate_stable(fixtures::d_instance()), InputError); }

TEST(Enumerate, CapIsReported) {
  EXPECT_THROW(stable::enumerate_stable(fixtures::two_by_two(), 1), BudgetExceeded);
}

TEST(Enumerate, CompleteAgainstOracleOnBipartiteCorpus) {
  std::mt19937_64 rng(33);
  for (int k = 0; k < 300; ++k) {
    Instance inst = fixtures::random_instance(rng, 4 + k % 7, true, 0.85);
    std::set<Matching> want;
    for (const auto& m : oracle::enumerate_matchings(inst))
      if (is_stable(inst, m)) want.insert(m);
    auto got = stable::enumerate_stable(inst);
    ASSERT_EQ(std::set<Matching>(got.begin(), got.end()), want) << write_instance(inst);
    ASSERT_TRUE(std::is_sorted(got.begin(), got.end()));
    // Same matched node set in every stable matching; every one is popular.
    for (const auto& m : got) {
      for (int u = 0; u < inst.size(); ++u) ASSERT_EQ(m.matched(u), got.front().matched(u));
      ASSERT_TRUE(verify::is_popular_structural(inst, m).verdict);
    }
    ASSERT_TRUE(want.count(stable::gale_shapley(inst, Side::A)));
    ASSERT_TRUE(want.count(stable::gale_shapley(inst, Side::B)));
  }
}

TEST(MaxWeightStable, PicksCostlyEdge) {
  Instance i = fixtures::two_by_two();
  std::vector<Rational> c(i.edge_count(), Rational(0));
  c[i.edge_id(i.index_of("a1"), i.index_of("b1"))] = 5;
  Instance w = i.with_costs(c);
  EXPECT_EQ(stable::max_weight_stable(w), pairs(w, {{"a1", "b1"}, {"a2", "b2"}}));
}

TEST(MaxWeightStable, ZeroCostsGiveFirstEnumerated) {
  Instance i = fixtures::two_by_two();
  EXPECT_EQ(stable::max_weight_stable(i), stable::enumerate_stable(i).front());
}
