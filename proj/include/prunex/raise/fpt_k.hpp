#pragma once

#include <algorithm>
#include <unordered_map>
#include <vector>

#include "prunex/model.hpp"
#include "prunex/pareto.hpp"
#include "prunex/raise/box_dp.hpp"
#include "prunex/raise/grid.hpp"
#include "prunex/raise/ops.hpp"

namespace prunex {

/// Exact-k raising restricted to relevant thresholds, filled bottom-up.
///
/// At node v the box bound in feature f is named by its rank among the
/// distinct thresholds of v's ancestors bounding f from that side, strongest
/// first (rank 1 = strongest, |list|+1 = unbounded). A bound of rank r means
/// the r-1 stronger ancestors were all raised, and each of them removes at
/// least one cut outside T_v, so only boxes with
///   k' + sum over bounds of (rank - 1) <= k
/// can occur. Every such box is materialized densely with its row of
/// budgets k' = 0..min(k - cost, s_v).
class FptkSolver {
 public:
  FptkSolver(const DecisionTree& tree, const Dataset& data, int k, BoxDpOptions opts = {})
      : tree_(tree), grid_(tree_, data), k_(k), tables_(tree_.node_count()), deadline_(opts.time_budget) {
    for (NodeId v : tree_.postorder()) fill(v);
  }

  /// Boxes materialized over all nodes.
  std::size_t states() const { return states_; }

  RaisingResult solve(int t) {
    RaisingResult res;
    if (k_ < 0 || k_ > static_cast<int>(tree_.size())) return res;
    const auto& top = lookup(tree_.root(), grid_.full_box());
    res.min_errors = top[static_cast<std::size_t>(k_)];
    if (res.min_errors >= kInfeasible) return res;
    res.feasible = res.min_errors <= t;
    res.actions = backtrack();
    auto out = apply_raisings(tree_, res.actions);
    res.witness = std::move(out.tree);
    res.pruned = out.pruned;
    return res;
  }

 private:
  using Row = std::vector<int>;

  const Row& lookup(NodeId v, const GridBox& box) const {
    auto it = tables_[v].find(box);
    if (it == tables_[v].end()) throw Error("relevant-threshold table is missing a child state");
    return it->second;
  }

  int entry(NodeId v, const GridBox& box, int budget) const {
    const Row& r = lookup(v, box);
    return budget >= 0 && budget < static_cast<int>(r.size()) ? r[static_cast<std::size_t>(budget)] : kInfeasible;
  }

  // Calls fn(box, cost) for every box at v of cost <= k.
  template <class Fn>
  void enumerate_boxes(NodeId v, Fn&& fn) const {
    const std::size_t m = grid_.features();
    GridBox box(2 * m);
    auto rec = [&](auto&& self, std::size_t slot, int cost) -> void {
      if (slot == 2 * m) {
        fn(box, cost);
        return;
      }
      const std::size_t f = slot / 2;
      const bool lower = slot % 2 == 0;
      const auto& list = lower ? grid_.lower_list(v, f) : grid_.upper_list(v, f);
      const auto sentinel = static_cast<std::int16_t>(lower ? -1 : grid_.threshold_count(f));
      for (std::size_t rank = 0; rank <= list.size(); ++rank) {
        int c = cost + static_cast<int>(rank);
        if (c > k_) break;
        box[slot] = rank < list.size() ? list[rank] : sentinel;
        self(self, slot + 1, c);
      }
    };
    rec(rec, 0, 0);
  }

  void fill(NodeId v) {
    const Node& n = tree_[v];
    const int sv = grid_.inner(v);
    auto& table = tables_[v];
    enumerate_boxes(v, [&](const GridBox& box, int cost) {
      deadline_.poll();
      const int width = std::min(k_ - cost, sv);
      Row row(static_cast<std::size_t>(width) + 1, kInfeasible);
      if (n.leaf) {
        row[0] = grid_.leaf_errors(v, box);
      } else {
        const int su = grid_.inner(n.left);
        const int sw = grid_.inner(n.right);
        GridBox lb = grid_.left_box(v, box);
        GridBox rb = grid_.right_box(v, box);
        for (int kp = 0; kp <= width; ++kp) {
          int best = kInfeasible;
          for (int a = std::max(0, kp - sw); a <= std::min(su, kp); ++a) {
            int l = entry(n.left, lb, a);
            int r = entry(n.right, rb, kp - a);
            if (l < kInfeasible && r < kInfeasible) best = std::min(best, l + r);
          }
          if (kp - sw - 1 >= 0) best = std::min(best, entry(n.left, box, kp - sw - 1));
          if (kp - su - 1 >= 0) best = std::min(best, entry(n.right, box, kp - su - 1));
          row[static_cast<std::size_t>(kp)] = best;
        }
      }
      table.emplace(box, std::move(row));
      ++states_;
    });
  }

  std::vector<RaiseAction> backtrack() const {
    std::vector<RaiseAction> actions;
    struct Item {
      NodeId v;
      GridBox box;
      int budget;
    };
    std::vector<Item> stack{{tree_.root(), grid_.full_box(), k_}};
    while (!stack.empty()) {
      Item it = std::move(stack.back());
      stack.pop_back();
      const Node& n = tree_[it.v];
      if (n.leaf) continue;
      const int target = entry(it.v, it.box, it.budget);
      const int su = grid_.inner(n.left);
      const int sw = grid_.inner(n.right);
      GridBox lb = grid_.left_box(it.v, it.box);
      GridBox rb = grid_.right_box(it.v, it.box);
      bool done = false;
      for (int a = std::max(0, it.budget - sw); a <= std::min(su, it.budget) && !done; ++a) {
        int l = entry(n.left, lb, a);
        int r = entry(n.right, rb, it.budget - a);
        if (l < kInfeasible && r < kInfeasible && l + r == target) {
          stack.push_back({n.right, rb, it.budget - a});
          stack.push_back({n.left, lb, a});
          done = true;
        }
      }
      if (done) continue;
      if (entry(n.left, it.box, it.budget - sw - 1) == target) {
        actions.push_back({it.v, n.left});
        stack.push_back({n.left, it.box, it.budget - sw - 1});
      } else {
        actions.push_back({it.v, n.right});
        stack.push_back({n.right, it.box, it.budget - su - 1});
      }
    }
    return actions;
  }

  DecisionTree tree_;
  RaiseGrid grid_;
  int k_;
  std::vector<std::unordered_map<GridBox, Row, GridBoxHash>> tables_;
  Deadline deadline_;
  std::size_t states_ = 0;
};

/// Exact variant only: fewest errors pruning exactly k cuts by raising.
inline RaisingResult solve_raising_exact_fptk(const DecisionTree& tree, const Dataset& data, int k, int t,
                                              BoxDpOptions opts = {}) {
  if (k < 0 || k > static_cast<int>(tree.size())) return {};
  FptkSolver solver(tree, data, k, opts);
  return solver.solve(t);
}

}  // namespace prunex
