#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace prunex;
using prunex::testing::arbitrary_instance;
using prunex::testing::make_data;
using prunex::testing::small_instance;
using prunex::testing::tree_of;

namespace {

Instance mixed_instance(std::uint64_t seed) { return seed % 2 ? small_instance(seed) : arbitrary_instance(seed); }

void expect_valid_witness(const DecisionTree& input, const Dataset& data, const RaisingResult& r) {
  ASSERT_LT(r.min_errors, kInfeasible);
  EXPECT_TRUE(is_prunable_to(input, r.witness)) << to_compact(input) << " -> " << to_compact(r.witness);
  EXPECT_EQ(count_errors(r.witness, data), r.min_errors);
  EXPECT_EQ(static_cast<int>(input.size() - r.witness.size()), r.pruned);
}

}  // namespace

TEST(ApplyRaising, PrunedCountIncludesDiscardedCuts) {
  DecisionTree t = tree_of("[0<=0 [1<=0 blue red] [1<=1 red blue]]");
  auto out = apply_raising(t, t.root(), t[t.root()].left);
  EXPECT_EQ(out.pruned, 2);
  EXPECT_EQ(to_compact(out.tree), "[1<=0 blue red]");
  NodeId lower = t[t.root()].right;
  auto one = apply_raising(t, lower, t[lower].right);
  EXPECT_EQ(one.pruned, 1);
  EXPECT_EQ(to_compact(one.tree), "[0<=0 [1<=0 blue red] blue]");
  EXPECT_THROW(apply_raising(t, t[lower].left, kNoNode), InvalidOperation);
  EXPECT_THROW(apply_raising(t, t.root(), t[lower].left), InvalidOperation);
}

TEST(ApplyRaising, ExamplesAvoidingTheNodeKeepTheirLabel) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto inst = arbitrary_instance(seed);
    const auto& t = inst.tree;
    std::vector<NodeId> cuts;
    t.for_each_preorder([&](NodeId v) {
      if (!t.is_leaf(v)) cuts.push_back(v);
    });
    NodeId w = cuts[seed % cuts.size()];
    auto out = apply_raising(t, w, t[w].left).tree;
    auto counts_through = [&](const Example& e) {
      NodeId v = t.root();
      while (!t.is_leaf(v)) {
        if (v == w) return true;
        v = e.values[static_cast<std::size_t>(t[v].feature)] <= t[v].threshold ? t[v].left : t[v].right;
      }
      return false;
    };
    for (const auto& e : inst.data.examples())
      if (!counts_through(e)) {
        EXPECT_EQ(classify_naive(t, e.values).label, classify_naive(out, e.values).label);
      }
  }
}

TEST(ElementaryRaisings, EachRemovesOneCut) {
  DecisionTree t = tree_of("[0<=0 [1<=0 blue red] [1<=1 red [0<=3 blue red]]]");
  auto ops = elementary_raisings(t);
  EXPECT_EQ(ops.size(), 5u);
  for (const auto& op : ops) EXPECT_EQ(apply_raising(t, op.node, op.kept).pruned, 1);
}

TEST(BoxDp, RowsMatchOracleForBothVariants) {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    auto inst = mixed_instance(seed);
    for (Variant v : {Variant::exact, Variant::at_least})
      EXPECT_EQ(pareto_raising(inst.tree, inst.data, v), oracle_pareto(inst.tree, inst.data, Operation::raising, v))
          << to_compact(inst.tree);
  }
}

TEST(BoxDp, PerBudgetSolverMatchesOracle) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto inst = mixed_instance(seed);
    const int s = static_cast<int>(inst.tree.size());
    for (Variant v : {Variant::exact, Variant::at_least}) {
      ParetoFront oracle = oracle_pareto(inst.tree, inst.data, Operation::raising, v);
      for (int k = 0; k <= s; ++k) {
        RaisingResult r = solve_raising_boxdp(inst.tree, inst.data, {Operation::raising, v, k, 0});
        EXPECT_EQ(r.min_errors, oracle[static_cast<std::size_t>(k)]);
        if (r.min_errors < kInfeasible) {
          expect_valid_witness(inst.tree, inst.data, r);
          if (v == Variant::exact)
            EXPECT_EQ(r.pruned, k);
          else
            EXPECT_GE(r.pruned, k);
        }
      }
    }
  }
}

TEST(BoxDp, RowWitnessesAreValid) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto inst = mixed_instance(seed);
    RaisingRows rows(inst.tree, inst.data);
    for (int k = 0; k <= static_cast<int>(inst.tree.size()); ++k)
      for (Variant v : {Variant::exact, Variant::at_least}) {
        RaisingResult r = rows.solve(k, v);
        if (r.min_errors < kInfeasible) expect_valid_witness(inst.tree, inst.data, r);
      }
  }
}

TEST(BoxDp, BoxesOnlyUsePathThresholds) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto inst = mixed_instance(seed);
    RaisingRows rows(inst.tree, inst.data);
    rows.front();
    EXPECT_EQ(rows.stats().off_path_boxes, 0u);
    RaisingBudgetDp dp(inst.tree, inst.data, Variant::at_least);
    dp.solve(static_cast<int>(inst.tree.size()) / 2, 0);
    EXPECT_EQ(dp.stats().off_path_boxes, 0u);
  }
}

TEST(BoxDp, ZeroBudgetIsTheInputTree) {
  auto inst = small_instance(9);
  RaisingResult r = solve_raising_boxdp(inst.tree, inst.data, {Operation::raising, Variant::exact, 0, 100});
  EXPECT_EQ(r.min_errors, count_errors(inst.tree, inst.data));
  EXPECT_TRUE(structurally_equal(r.witness, inst.tree));
}

TEST(BoxDp, NonMonotoneFamily) {
  auto inst = gen_nonmonotone(2);
  auto solve = [&](int k) {
    return solve_raising_boxdp(inst.tree, inst.data, {Operation::raising, Variant::exact, k, 0}).feasible;
  };
  EXPECT_TRUE(solve(2));
  EXPECT_FALSE(solve(1));
  ParetoFront f = pareto_raising(gen_nonmonotone(3).tree, gen_nonmonotone(3).data);
  EXPECT_EQ(f[0], 0);
  EXPECT_GE(f[1], 1);
  EXPECT_GE(f[2], 1);
  EXPECT_EQ(f[3], 0);
}

TEST(BoxDp, TimeBudgetAborts) {
  RandomParams p;
  p.n = 400;
  p.d = 8;
  p.value_range = 20;
  auto inst = gen_random(3, p);
  ASSERT_GT(inst.tree.size(), 40u);
  EXPECT_THROW(pareto_raising(inst.tree, inst.data, Variant::exact, {std::chrono::milliseconds(1)}),
               TimeBudgetExceeded);
}

TEST(Fptk, AgreesWithBoxDp) {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    auto inst = mixed_instance(seed);
    ParetoFront f = pareto_raising(inst.tree, inst.data);
    for (int k = 0; k <= static_cast<int>(inst.tree.size()); ++k) {
      RaisingResult r = solve_raising_exact_fptk(inst.tree, inst.data, k, 0);
      EXPECT_EQ(r.min_errors, f[static_cast<std::size_t>(k)]) << to_compact(inst.tree) << " k=" << k;
      if (r.min_errors < kInfeasible) {
        expect_valid_witness(inst.tree, inst.data, r);
        EXPECT_EQ(r.pruned, k);
      }
    }
  }
}

TEST(Fptk, NonMonotoneFamily) {
  auto inst = gen_nonmonotone(3);
  EXPECT_TRUE(solve_raising_exact_fptk(inst.tree, inst.data, 3, 0).feasible);
  EXPECT_FALSE(solve_raising_exact_fptk(inst.tree, inst.data, 2, 0).feasible);
  EXPECT_FALSE(solve_raising_exact_fptk(inst.tree, inst.data, 1, 0).feasible);
  RaisingResult zero = solve_raising_exact_fptk(inst.tree, inst.data, 0, 0);
  EXPECT_TRUE(structurally_equal(zero.witness, inst.tree));
}

TEST(ZeroZero, ExamplesFromTheDefinition) {
  auto data = make_data({{{0}, 'b'}, {{1}, 'r'}});
  DecisionTree fits = tree_of("[0<=0 blue red]");
  auto same = solve_zero_zero(fits, data);
  ASSERT_TRUE(same);
  EXPECT_TRUE(structurally_equal(*same, fits));
  EXPECT_FALSE(solve_zero_zero(tree_of("red"), data));

  // Left leaf misclassifies; the sibling becomes the root only when it fits everything.
  auto all_red = make_data({{{0}, 'r'}, {{1}, 'r'}});
  auto peeled = solve_zero_zero(tree_of("[0<=0 blue red]"), all_red);
  ASSERT_TRUE(peeled);
  EXPECT_EQ(to_compact(*peeled), "red");
  auto mixed = make_data({{{0}, 'r'}, {{1}, 'b'}});
  EXPECT_FALSE(solve_zero_zero(tree_of("[0<=0 blue blue]"), mixed));
}

TEST(ZeroZero, SucceedsExactlyWhenSomeRaisingFitsTheData) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto inst = mixed_instance(seed);
    ParetoFront f = oracle_pareto(inst.tree, inst.data, Operation::raising, Variant::at_least);
    auto z = solve_zero_zero(inst.tree, inst.data);
    EXPECT_EQ(z.has_value(), f[0] == 0) << to_compact(inst.tree);
    if (z) {
      EXPECT_EQ(count_errors(*z, inst.data), 0);
      EXPECT_TRUE(is_prunable_to(inst.tree, *z));
    }
  }
}

TEST(ZeroZero, PeelOrderDoesNotMatter) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto inst = mixed_instance(seed);
    auto base = solve_zero_zero(inst.tree, inst.data);
    for (std::uint64_t order = 1; order <= 5; ++order) {
      auto other = solve_zero_zero(inst.tree, inst.data, order * 31 + seed);
      ASSERT_EQ(base.has_value(), other.has_value());
      if (base) {
        EXPECT_TRUE(structurally_equal(*base, *other)) << to_compact(inst.tree);
      }
    }
  }
}

TEST(Subsets, AgreesWithAtLeastBoxDp) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto inst = mixed_instance(seed);
    for (int k = 0; k <= 2; ++k)
      for (int t = 0; t <= 2; ++t) {
        bool expected = solve_raising_boxdp(inst.tree, inst.data, {Operation::raising, Variant::at_least, k, t}).feasible;
        RaisingResult r = solve_raising_subsets(inst.tree, inst.data, k, t);
        EXPECT_EQ(r.feasible, expected) << to_compact(inst.tree) << " k=" << k << " t=" << t;
        if (r.feasible) {
          EXPECT_TRUE(is_prunable_to(inst.tree, r.witness));
          EXPECT_LE(r.min_errors, t);
          EXPECT_GE(r.pruned, k);
        }
      }
  }
}

TEST(Subsets, ZeroBudgetsDelegateToThePeel) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto inst = mixed_instance(seed);
    EXPECT_EQ(solve_raising_subsets(inst.tree, inst.data, 0, 0).feasible,
              solve_zero_zero(inst.tree, inst.data).has_value());
  }
  auto data = make_data({{{0}, 'b'}, {{1}, 'r'}});
  for (int t = 0; t < 3; ++t) EXPECT_TRUE(solve_raising_subsets(tree_of("[0<=0 blue red]"), data, 0, t).feasible);
}

TEST(Prunable, Examples) {
  DecisionTree t = tree_of("[0<=0 blue [1<=0 red blue]]");
  EXPECT_TRUE(is_prunable_to(t, t));
  EXPECT_TRUE(is_prunable_to(t, tree_of("[1<=0 red blue]")));
  EXPECT_TRUE(is_prunable_to(t, tree_of("[0<=0 blue red]")));
  EXPECT_TRUE(is_prunable_to(t, tree_of("blue")));
  EXPECT_FALSE(is_prunable_to(t, tree_of("[2<=0 red blue]")));
  EXPECT_FALSE(is_prunable_to(t, tree_of("[1<=0 blue red]")));
}

TEST(Prunable, MatchesTheRaisingReachSet) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto inst = mixed_instance(seed);
    ReachSet raise = enumerate_pruned_trees(inst.tree, inst.data, Operation::raising);
    for (const auto& m : raise.members()) EXPECT_TRUE(is_prunable_to(inst.tree, m.tree));
    ReachSet rep = enumerate_pruned_trees(inst.tree, inst.data, Operation::replacement);
    for (const auto& m : rep.members())
      EXPECT_EQ(is_prunable_to(inst.tree, m.tree), raise.contains(m.tree)) << to_compact(m.tree);
  }
}
