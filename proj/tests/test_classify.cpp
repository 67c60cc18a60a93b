#include <gtest/gtest.h>

#include <bit>

#include "helpers.hpp"

using namespace prunex;
using prunex::testing::make_data;
using prunex::testing::tree_of;

TEST(Classify, NaiveFollowsLessOrEqualToTheLeft) {
  DecisionTree t = tree_of("[0<=2 blue red]");
  std::vector<Rational> at{Rational(2)}, above{Rational(5, 2)};
  EXPECT_EQ(classify_naive(t, at).label, Label::blue);
  EXPECT_EQ(classify_naive(t, above).label, Label::red);
}

TEST(Hld, HeavyChildIsTheLargerSubtree) {
  DecisionTree t = tree_of("[0<=0 [1<=0 [1<=1 blue red] red] blue]");
  HldIndex index(t, 2);
  NodeId root = t.root();
  EXPECT_EQ(index.heavy_child(root), t[root].left);
  // Neither leaf of the lowest cut is heavy (3 < 2 * 1 fails).
  EXPECT_EQ(index.paths().front().size(), 3u);
  EXPECT_EQ(max_light_edges(index, t), 1);
}

TEST(Hld, SingleLeafTree) {
  DecisionTree t = tree_of("red");
  HldIndex index(t, 1);
  EXPECT_TRUE(index.empty());
  std::vector<Rational> v{Rational(0)};
  EXPECT_EQ(classify_hld(index, t, v).label, Label::red);
}

TEST(Hld, NodeBoxesDescribeReachingExamples) {
  DecisionTree t = gen_random_tree(11, 40, 3, 6);
  HldIndex index(t, 3);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    auto v = random_values(rng, 3, 6);
    // Every node on the naive route admits v; the reached leaf's box does too.
    NodeId u = t.root();
    while (true) {
      EXPECT_TRUE(index.bounds(u).contains(v));
      if (t.is_leaf(u)) break;
      u = v[static_cast<std::size_t>(t[u].feature)] <= t[u].threshold ? t[u].left : t[u].right;
    }
  }
}

TEST(Hld, AgreesWithNaiveOnRandomTrees) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    int s = 1 + static_cast<int>(seed * 37 % 300);
    DecisionTree t = gen_random_tree(seed, s, 4, 6, seed % 2 ? 0.6 : 0.1);
    HldIndex index(t, 4);
    std::mt19937_64 rng(seed);
    for (int i = 0; i < 50; ++i) {
      auto v = random_values(rng, 4, 6);
      EXPECT_EQ(classify_hld(index, t, v), classify_naive(t, v));
    }
  }
}

TEST(Hld, LightEdgesAreLogarithmic) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    DecisionTree t = gen_random_tree(seed + 100, 500, 3, 8, 0.2 * static_cast<double>(seed % 5));
    HldIndex index(t, 3);
    auto nodes = static_cast<unsigned>(t.node_count());
    EXPECT_LE(max_light_edges(index, t), std::bit_width(nodes) - 1);
  }
}

TEST(Hld, ProbesStayLogarithmicOnAPath) {
  DecisionTree t;
  NodeId below = t.add_leaf(Label::red);
  for (int i = 0; i < 1024; ++i) {
    NodeId leaf = t.add_leaf(Label::blue);
    below = t.add_cut(0, Rational(i), below, leaf);
  }
  t = compact(t);
  HldIndex index(t, 1);
  std::size_t probes = 0;
  std::vector<Rational> v{Rational(-5)};
  auto c = classify_hld(index, t, v, &probes);
  EXPECT_EQ(c, classify_naive(t, v));
  EXPECT_LE(probes, 12u);
}

TEST(Stats, ReplacementAndSubtreeErrors) {
  auto data = make_data({{{0}, 'b'}, {{1}, 'r'}, {{2}, 'r'}, {{3}, 'b'}});
  DecisionTree t = tree_of("[0<=1/2 blue [0<=5/2 red red]]");
  NodeStats st = annotate_stats(t, data);
  NodeId root = t.root();
  NodeId right = t[root].right;
  EXPECT_EQ(st.inner[root], 2);
  EXPECT_EQ(st.replace_errors[root], 2);
  EXPECT_EQ(st.subtree_errors[root], 1);
  EXPECT_EQ(st.replace_errors[right], 1);
  EXPECT_EQ(st.counts[right].red, 2);
}
