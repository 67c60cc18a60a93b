#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "prunex/classify.hpp"
#include "prunex/model.hpp"
#include "prunex/pareto.hpp"

namespace prunex {

/// Replaces the subtree at cut w by a leaf carrying the majority label of
/// E[T,w].
inline DecisionTree apply_replacement(const DecisionTree& tree, const Dataset& data, NodeId w) {
  if (w < 0 || static_cast<std::size_t>(w) >= tree.node_count())
    throw InvalidOperation("node " + std::to_string(w) + " does not exist");
  if (tree.is_leaf(w)) throw InvalidOperation("cannot replace leaf " + std::to_string(w));
  Label label = majority_label(node_label_counts(tree, data)[w]);
  return rebuild(tree, [&](NodeId v) {
    return v == w ? RebuildAction::make_leaf(label) : RebuildAction::keep();
  });
}

/// Replaces every listed cut (none may lie below another) in one pass.
inline DecisionTree apply_replacements(const DecisionTree& tree, const Dataset& data,
                                       const std::vector<NodeId>& nodes) {
  auto counts = node_label_counts(tree, data);
  std::vector<char> marked(tree.node_count(), 0);
  for (NodeId w : nodes) {
    if (tree.is_leaf(w)) throw InvalidOperation("cannot replace leaf " + std::to_string(w));
    marked[w] = 1;
  }
  return rebuild(tree, [&](NodeId v) {
    return marked[v] ? RebuildAction::make_leaf(majority_label(counts[v])) : RebuildAction::keep();
  });
}

/// Bottom-up table opt(v, k') = fewest errors on E[T,v] after replacements
/// inside T_v that prune exactly k' cuts, for k' up to min(cap, s_v).
///
/// Pruning all s_v cuts means replacing v itself (cost t_v); any smaller
/// budget keeps v and splits between the two children.
class ReplaceTable {
 public:
  ReplaceTable(const DecisionTree& tree, const NodeStats& stats, int cap)
      : tree_(&tree), cap_(std::max(cap, 0)), opt_(tree.node_count()), split_(tree.node_count()) {
    for (NodeId v : tree.postorder()) {
      const Node& n = tree[v];
      if (n.leaf) {
        opt_[v] = {stats.subtree_errors[v]};
        split_[v] = {0};
        continue;
      }
      const int sv = stats.inner[v];
      const int width = std::min(cap_, sv);
      auto& row = opt_[v];
      auto& split = split_[v];
      row.assign(static_cast<std::size_t>(width) + 1, kInfeasible);
      split.assign(static_cast<std::size_t>(width) + 1, 0);
      const auto& lrow = opt_[n.left];
      const auto& rrow = opt_[n.right];
      const int keep_max = std::min(width, sv - 1);
      for (int a = 0; a < static_cast<int>(lrow.size()); ++a) {
        if (lrow[a] >= kInfeasible) continue;
        for (int b = 0; b < static_cast<int>(rrow.size()) && a + b <= keep_max; ++b) {
          int cost = lrow[a] + rrow[b];
          if (cost < row[a + b]) {
            row[a + b] = cost;
            split[a + b] = a;
          }
        }
      }
      if (sv <= cap_) {
        row[sv] = stats.replace_errors[v];
        split[sv] = -1;
      }
    }
  }

  int cap() const { return cap_; }
  const std::vector<int>& row(NodeId v) const { return opt_[v]; }

  /// Subtree roots replaced by one optimal solution pruning exactly k cuts
  /// under v (defaults to the root).
  std::vector<NodeId> replaced_nodes(int k, NodeId v = kNoNode) const {
    std::vector<NodeId> out;
    std::vector<std::pair<NodeId, int>> stack{{v == kNoNode ? tree_->root() : v, k}};
    while (!stack.empty()) {
      auto [u, budget] = stack.back();
      stack.pop_back();
      const Node& n = (*tree_)[u];
      if (n.leaf) continue;
      int a = split_[u][static_cast<std::size_t>(budget)];
      if (a < 0) {
        out.push_back(u);
        continue;
      }
      stack.emplace_back(n.right, budget - a);
      stack.emplace_back(n.left, a);
    }
    return out;
  }

 private:
  const DecisionTree* tree_;
  int cap_;
  std::vector<std::vector<int>> opt_;
  std::vector<std::vector<int>> split_;
};

/// Dual table: for each error budget t' <= cap, the most cuts replacements
/// inside T_v can prune with at most t' errors on E[T,v] (-1: impossible).
inline std::vector<int> replacement_dual_row(const DecisionTree& tree, const NodeStats& stats, int cap) {
  constexpr int kNone = -1;
  const std::size_t width = static_cast<std::size_t>(std::max(cap, 0)) + 1;
  std::vector<std::vector<int>> best(tree.node_count());
  for (NodeId v : tree.postorder()) {
    const Node& n = tree[v];
    auto& row = best[v];
    row.assign(width, kNone);
    if (n.leaf) {
      for (std::size_t t = 0; t < width; ++t)
        if (stats.subtree_errors[v] <= static_cast<int>(t)) row[t] = 0;
      continue;
    }
    const auto& l = best[n.left];
    const auto& r = best[n.right];
    for (std::size_t t = 0; t < width; ++t) {
      if (stats.replace_errors[v] <= static_cast<int>(t)) row[t] = stats.inner[v];
      for (std::size_t a = 0; a <= t; ++a)
        if (l[a] != kNone && r[t - a] != kNone) row[t] = std::max(row[t], l[a] + r[t - a]);
    }
  }
  return best[tree.root()];
}

struct ReplacementResult {
  bool feasible = false;
  int min_errors = kInfeasible;  ///< fewest errors pruning exactly k cuts
  DecisionTree witness;          ///< a tree attaining min_errors
  std::vector<NodeId> replaced;  ///< cuts of the input replaced to get the witness
  bool decided_by_dual = false;  ///< feasibility came from the error-indexed table
};

/// Can replacements pruning exactly k cuts leave at most t errors?
///
/// The error minimum and witness come from the budget-indexed table capped
/// at k. When t < k and the tree is reasonable, feasibility is decided by
/// the error-indexed dual (prune at least k within t errors), which is
/// equivalent there because pruning fewer cuts never adds errors.
inline ReplacementResult solve_replacement(const DecisionTree& tree, const Dataset& data, int k, int t) {
  ReplacementResult res;
  const int s = static_cast<int>(tree.size());
  if (k < 0 || k > s) {
    res.witness = compact(tree);
    return res;
  }
  NodeStats stats = annotate_stats(tree, data);
  ReplaceTable table(tree, stats, k);
  res.min_errors = table.row(tree.root())[static_cast<std::size_t>(k)];
  res.replaced = table.replaced_nodes(k);
  res.witness = apply_replacements(tree, data, res.replaced);
  res.feasible = res.min_errors <= t;
  if (t < k && is_reasonable(tree, data)) {
    auto dual = replacement_dual_row(tree, stats, t);
    res.feasible = dual[static_cast<std::size_t>(t)] >= k;
    res.decided_by_dual = true;
  }
  return res;
}

/// Fewest errors for every k in 0..s.
inline ParetoFront pareto_replacement(const DecisionTree& tree, const Dataset& data) {
  NodeStats stats = annotate_stats(tree, data);
  ReplaceTable table(tree, stats, static_cast<int>(tree.size()));
  return ParetoFront{table.row(tree.root())};
}

/// Most cuts prunable with at most t' errors, for t' in 0..t_max.
inline std::vector<int> replacement_dual_front(const DecisionTree& tree, const Dataset& data, int t_max) {
  return replacement_dual_row(tree, annotate_stats(tree, data), t_max);
}

}  // namespace prunex
