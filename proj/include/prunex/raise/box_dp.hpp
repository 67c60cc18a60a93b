#pragma once

#include <algorithm>
#include <chrono>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "prunex/model.hpp"
#include "prunex/pareto.hpp"
#include "prunex/raise/grid.hpp"
#include "prunex/raise/ops.hpp"

namespace prunex {

struct BoxDpOptions {
  std::optional<std::chrono::milliseconds> time_budget;
};

struct BoxDpStats {
  std::size_t states = 0;          ///< memo entries created
  std::size_t off_path_boxes = 0;  ///< boxes with a bound not taken from the node's ancestors (expected 0)
};

/// Raising DP over (node, box) states where each state holds a whole row:
/// row[k'] = fewest errors on the examples inside box when the subtree at
/// the node, evaluated against box, is raised so that exactly k' of its
/// cuts disappear.
///
/// Keeping a cut splits the budget between the children under the two
/// tightened boxes; raising it keeps one child under the unchanged box and
/// spends 1 + s(other child) of the budget.
class RaisingRows {
 public:
  RaisingRows(const DecisionTree& tree, const Dataset& data, BoxDpOptions opts = {})
      : tree_(tree), grid_(tree_, data), memo_(tree_.node_count()), deadline_(opts.time_budget) {}

  const DecisionTree& tree() const { return tree_; }
  const RaiseGrid& grid() const { return grid_; }
  const BoxDpStats& stats() const { return stats_; }

  const std::vector<int>& row(NodeId v, const GridBox& box) {
    auto& memo = memo_[v];
    if (auto it = memo.find(box); it != memo.end()) return it->second;
    deadline_.poll();
    if (!grid_.uses_path_thresholds(v, box)) ++stats_.off_path_boxes;

    const Node& n = tree_[v];
    std::vector<int> out;
    if (n.leaf) {
      out = {grid_.leaf_errors(v, box)};
    } else {
      const int su = grid_.inner(n.left);
      const int sw = grid_.inner(n.right);
      out.assign(static_cast<std::size_t>(grid_.inner(v)) + 1, kInfeasible);
      // Map references stay valid across the insertions made by the recursion.
      const std::vector<int>& lrow = row(n.left, grid_.left_box(v, box));
      const std::vector<int>& rrow = row(n.right, grid_.right_box(v, box));
      for (int a = 0; a <= su; ++a) {
        if (lrow[a] >= kInfeasible) continue;
        for (int b = 0; b <= sw; ++b)
          if (rrow[b] < kInfeasible) out[a + b] = std::min(out[a + b], lrow[a] + rrow[b]);
      }
      const std::vector<int>& keep_left = row(n.left, box);
      for (int a = 0; a <= su; ++a) out[a + sw + 1] = std::min(out[a + sw + 1], keep_left[a]);
      const std::vector<int>& keep_right = row(n.right, box);
      for (int b = 0; b <= sw; ++b) out[b + su + 1] = std::min(out[b + su + 1], keep_right[b]);
    }
    ++stats_.states;
    return memo.emplace(box, std::move(out)).first->second;
  }

  /// Exact front over k = 0..s.
  ParetoFront front() { return ParetoFront{row(tree_.root(), grid_.full_box())}; }

  /// A witness for the requested budget. For at_least the smallest k' >= k
  /// attaining the suffix minimum is used.
  RaisingResult solve(int k, Variant variant) {
    RaisingResult res;
    const int s = static_cast<int>(tree_.size());
    if (k < 0 || k > s) return res;
    const auto& top = row(tree_.root(), grid_.full_box());
    int target_k = k;
    if (variant == Variant::at_least)
      for (int j = k + 1; j <= s; ++j)
        if (top[j] < top[target_k]) target_k = j;
    res.min_errors = top[target_k];
    if (res.min_errors >= kInfeasible) return res;
    res.feasible = true;
    res.pruned = target_k;
    res.actions = backtrack(target_k);
    res.witness = apply_raisings(tree_, res.actions).tree;
    return res;
  }

 private:
  std::vector<RaiseAction> backtrack(int k) {
    std::vector<RaiseAction> actions;
    struct Item {
      NodeId v;
      GridBox box;
      int budget;
    };
    std::vector<Item> stack{{tree_.root(), grid_.full_box(), k}};
    while (!stack.empty()) {
      Item it = std::move(stack.back());
      stack.pop_back();
      const Node& n = tree_[it.v];
      if (n.leaf) continue;
      const int target = row(it.v, it.box)[it.budget];
      const int su = grid_.inner(n.left);
      const int sw = grid_.inner(n.right);
      GridBox lb = grid_.left_box(it.v, it.box);
      GridBox rb = grid_.right_box(it.v, it.box);
      const std::vector<int> lrow = row(n.left, lb);
      const std::vector<int> rrow = row(n.right, rb);
      bool done = false;
      for (int a = std::max(0, it.budget - sw); a <= std::min(su, it.budget) && !done; ++a) {
        int b = it.budget - a;
        if (lrow[a] < kInfeasible && rrow[b] < kInfeasible && lrow[a] + rrow[b] == target) {
          stack.push_back({n.right, std::move(rb), b});
          stack.push_back({n.left, std::move(lb), a});
          done = true;
        }
      }
      if (done) continue;
      int rest = it.budget - sw - 1;
      if (rest >= 0 && rest <= su && row(n.left, it.box)[rest] == target) {
        actions.push_back({it.v, n.left});
        stack.push_back({n.left, it.box, rest});
        continue;
      }
      rest = it.budget - su - 1;
      actions.push_back({it.v, n.right});
      stack.push_back({n.right, it.box, rest});
    }
    return actions;
  }

  DecisionTree tree_;
  RaiseGrid grid_;
  std::vector<std::unordered_map<GridBox, std::vector<int>, GridBoxHash>> memo_;
  Deadline deadline_;
  BoxDpStats stats_;
};

/// Fewest errors for every number of pruned cuts; at_least is the suffix
/// minimum of the exact front.
inline ParetoFront pareto_raising(const DecisionTree& tree, const Dataset& data,
                                  Variant variant = Variant::exact, BoxDpOptions opts = {}) {
  RaisingRows rows(tree, data, opts);
  ParetoFront f = rows.front();
  return variant == Variant::exact ? f : f.suffix_min();
}

/// Per-budget form of the raising DP: Q(v, box, k') for the single k of the
/// query. With at_least, a negative remaining budget counts as zero.
class RaisingBudgetDp {
 public:
  RaisingBudgetDp(const DecisionTree& tree, const Dataset& data, Variant variant, BoxDpOptions opts = {})
      : tree_(tree), grid_(tree_, data), variant_(variant), memo_(tree_.node_count()),
        deadline_(opts.time_budget) {}

  const BoxDpStats& stats() const { return stats_; }

  RaisingResult solve(int k, int t) {
    RaisingResult res;
    const int s = static_cast<int>(tree_.size());
    if (k < 0 || k > s) return res;
    GridBox box = grid_.full_box();
    res.min_errors = value(tree_.root(), box, k);
    if (res.min_errors >= kInfeasible) return res;
    res.feasible = res.min_errors <= t;
    res.actions = backtrack(k);
    auto out = apply_raisings(tree_, res.actions);
    res.witness = std::move(out.tree);
    res.pruned = out.pruned;
    return res;
  }

 private:
  enum Choice : std::int8_t { kLeaf, kKeep, kLeft, kRight };
  struct Entry {
    int value = kInfeasible;
    Choice choice = kLeaf;
    int split = 0;
  };

  int clamp(int budget) const { return variant_ == Variant::at_least ? std::max(budget, 0) : budget; }

  const Entry& entry(NodeId v, const GridBox& box, int k) {
    GridBox key = box;
    key.push_back(static_cast<std::int16_t>(k));
    auto& memo = memo_[v];
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    deadline_.poll();
    if (!grid_.uses_path_thresholds(v, box)) ++stats_.off_path_boxes;

    const Node& n = tree_[v];
    Entry e;
    if (n.leaf) {
      if (k == 0) e.value = grid_.leaf_errors(v, box);
    } else if (k <= grid_.inner(v)) {
      const int su = grid_.inner(n.left);
      const int sw = grid_.inner(n.right);
      GridBox lb = grid_.left_box(v, box);
      GridBox rb = grid_.right_box(v, box);
      for (int a = std::max(0, k - sw); a <= std::min(su, k); ++a) {
        int l = value(n.left, lb, a);
        if (l >= kInfeasible) continue;
        int r = value(n.right, rb, k - a);
        if (r < kInfeasible && l + r < e.value) e = {l + r, kKeep, a};
      }
      int rest = clamp(k - sw - 1);
      if (rest >= 0) {
        int l = value(n.left, box, rest);
        if (l < e.value) e = {l, kLeft, rest};
      }
      rest = clamp(k - su - 1);
      if (rest >= 0) {
        int r = value(n.right, box, rest);
        if (r < e.value) e = {r, kRight, rest};
      }
    }
    ++stats_.states;
    return memo.emplace(std::move(key), e).first->second;
  }

  int value(NodeId v, const GridBox& box, int k) { return entry(v, box, k).value; }

  std::vector<RaiseAction> backtrack(int k) {
    std::vector<RaiseAction> actions;
    struct Item {
      NodeId v;
      GridBox box;
      int budget;
    };
    std::vector<Item> stack{{tree_.root(), grid_.full_box(), k}};
    while (!stack.empty()) {
      Item it = std::move(stack.back());
      stack.pop_back();
      const Node& n = tree_[it.v];
      if (n.leaf) continue;
      const Entry e = entry(it.v, it.box, it.budget);
      switch (e.choice) {
        case kKeep:
          stack.push_back({n.right, grid_.right_box(it.v, it.box), it.budget - e.split});
          stack.push_back({n.left, grid_.left_box(it.v, it.box), e.split});
          break;
        case kLeft:
          actions.push_back({it.v, n.left});
          stack.push_back({n.left, it.box, e.split});
          break;
        case kRight:
          actions.push_back({it.v, n.right});
          stack.push_back({n.right, it.box, e.split});
          break;
        case kLeaf:
          break;
      }
    }
    return actions;
  }

  DecisionTree tree_;
  RaiseGrid grid_;
  Variant variant_;
  std::vector<std::unordered_map<GridBox, Entry, GridBoxHash>> memo_;
  Deadline deadline_;
  BoxDpStats stats_;
};

/// Decides a raising instance with the per-budget box DP.
inline RaisingResult solve_raising_boxdp(const DecisionTree& tree, const Dataset& data, const SolveSpec& spec,
                                         BoxDpOptions opts = {}) {
  RaisingBudgetDp dp(tree, data, spec.variant, opts);
  return dp.solve(spec.k, spec.t);
}

}  // namespace prunex
