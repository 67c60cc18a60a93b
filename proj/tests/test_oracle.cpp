#include <gtest/gtest.h>

#include <deque>
#include <set>

#include "helpers.hpp"

using namespace prunex;
using prunex::testing::arbitrary_instance;
using prunex::testing::make_data;
using prunex::testing::small_instance;
using prunex::testing::tree_of;

namespace {

// Closure of the input under single raisings, by breadth-first search.
std::set<std::string> raising_closure(const DecisionTree& tree) {
  std::set<std::string> seen{to_compact(tree)};
  std::deque<DecisionTree> queue{compact(tree)};
  while (!queue.empty()) {
    DecisionTree cur = std::move(queue.front());
    queue.pop_front();
    cur.for_each_preorder([&](NodeId v) {
      if (cur.is_leaf(v)) return;
      for (NodeId c : {cur[v].left, cur[v].right}) {
        DecisionTree next = apply_raising(cur, v, c).tree;
        if (seen.insert(to_compact(next)).second) queue.push_back(next);
      }
    });
  }
  return seen;
}

DecisionTree path_tree(int s) {
  DecisionTree t;
  NodeId below = t.add_leaf(Label::red);
  for (int i = 0; i < s; ++i) {
    NodeId leaf = t.add_leaf(i % 2 ? Label::blue : Label::red);
    below = t.add_cut(i, Rational(0), below, leaf);
  }
  return compact(t);
}

}  // namespace

TEST(Oracle, SmallCounts) {
  auto data = make_data({{{0, 0}, 'b'}, {{1, 1}, 'r'}});
  EXPECT_EQ(enumerate_pruned_trees(tree_of("blue"), data, Operation::raising).size(), 1u);
  EXPECT_EQ(enumerate_pruned_trees(tree_of("[0<=0 blue red]"), data, Operation::raising).size(), 3u);
  // Full tree, deep cut replaced, root replaced.
  EXPECT_EQ(enumerate_pruned_trees(tree_of("[0<=0 blue [1<=0 red blue]]"), data, Operation::replacement).size(), 3u);
}

TEST(Oracle, RefusesLargeTrees) {
  DecisionTree t = path_tree(12);
  Dataset data(12, {});
  try {
    enumerate_pruned_trees(t, data, Operation::raising);
    FAIL() << "expected CapExceeded";
  } catch (const CapExceeded& e) {
    EXPECT_EQ(e.size(), 12u);
    EXPECT_EQ(e.cap(), 10u);
  }
  EXPECT_NO_THROW(enumerate_pruned_trees(t, data, Operation::raising, 12));
}

TEST(Oracle, RaisingSetEqualsSingleStepClosure) {
  for (int s = 1; s <= 6; ++s) {
    DecisionTree t = path_tree(s);
    Dataset data(static_cast<std::size_t>(s), {});
    EXPECT_EQ(enumerate_pruned_trees(t, data, Operation::raising).size(), raising_closure(t).size()) << s;
  }
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto inst = arbitrary_instance(seed);
    ReachSet set = enumerate_pruned_trees(inst.tree, inst.data, Operation::raising);
    auto closure = raising_closure(inst.tree);
    EXPECT_EQ(set.size(), closure.size());
    for (const auto& m : set.members()) EXPECT_TRUE(closure.count(to_compact(m.tree)));
  }
}

TEST(Oracle, ReplacementSetIsClosed) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto inst = seed % 2 ? small_instance(seed) : arbitrary_instance(seed);
    ReachSet set = enumerate_pruned_trees(inst.tree, inst.data, Operation::replacement);
    std::mt19937_64 rng(seed);
    for (int round = 0; round < 10; ++round) {
      const auto& m = set.members()[rng() % set.size()];
      std::vector<NodeId> cuts;
      m.tree.for_each_preorder([&](NodeId v) {
        if (!m.tree.is_leaf(v)) cuts.push_back(v);
      });
      if (cuts.empty()) continue;
      // The leaf label must come from the examples reaching the node in the
      // original tree; reaching sets only depend on the kept ancestors, so
      // the member's own routing gives the same majority.
      DecisionTree next = apply_replacement(m.tree, inst.data, cuts[rng() % cuts.size()]);
      EXPECT_TRUE(set.contains(next));
    }
  }
}

TEST(Oracle, MembersCarryTheirCosts) {
  auto inst = small_instance(5);
  for (Operation op : {Operation::raising, Operation::replacement}) {
    ReachSet set = enumerate_pruned_trees(inst.tree, inst.data, op);
    for (const auto& m : set.members()) {
      EXPECT_EQ(m.errors, count_errors(m.tree, inst.data));
      EXPECT_EQ(m.pruned, static_cast<int>(inst.tree.size() - m.tree.size()));
    }
  }
}

TEST(Oracle, NonMonotoneFront) {
  auto inst = gen_nonmonotone(2);
  ParetoFront f = oracle_pareto(inst.tree, inst.data, Operation::raising);
  EXPECT_EQ(f[0], 0);
  EXPECT_GE(f[1], 1);
  EXPECT_EQ(f[2], 0);
  ParetoFront at_least = oracle_pareto(inst.tree, inst.data, Operation::raising, Variant::at_least);
  EXPECT_EQ(at_least, f.suffix_min());
}

TEST(Oracle, ReplacementFrontMonotoneOnReasonableTrees) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto inst = small_instance(seed);
    ParetoFront f = oracle_pareto(inst.tree, inst.data, Operation::replacement);
    for (std::size_t k = 1; k < f.size(); ++k) EXPECT_LE(f[k - 1], f[k]);
  }
}
