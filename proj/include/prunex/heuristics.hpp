#pragma once

#include <vector>

#include "prunex/model.hpp"

namespace prunex {

struct HeuristicResult {
  DecisionTree tree;
  int k_used = 0;    ///< cuts pruned
  int t_result = 0;  ///< training errors of the result
};

namespace detail {

// Errors when routing follows `raised` redirections and stops at `leaf_at` overrides.
inline int errors_with(const DecisionTree& tree, const Dataset& data, const std::vector<NodeId>& raised,
                       const std::vector<signed char>& leaf_at) {
  int errors = 0;
  for (const auto& e : data.examples()) {
    NodeId v = tree.root();
    Label out;
    for (;;) {
      if (raised[v] != kNoNode) {
        v = raised[v];
        continue;
      }
      if (leaf_at[v] >= 0) {
        out = static_cast<Label>(leaf_at[v]);
        break;
      }
      const Node& n = tree[v];
      if (n.leaf) {
        out = n.label;
        break;
      }
      v = e.values[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    errors += out != e.label;
  }
  return errors;
}

inline HeuristicResult finish(const DecisionTree& tree, const Dataset& data, const std::vector<NodeId>& raised,
                              const std::vector<signed char>& leaf_at) {
  HeuristicResult res;
  res.tree = rebuild(tree, [&](NodeId v) {
    if (raised[v] != kNoNode) return RebuildAction::descend(raised[v]);
    if (leaf_at[v] >= 0) return RebuildAction::make_leaf(static_cast<Label>(leaf_at[v]));
    return RebuildAction::keep();
  });
  res.k_used = static_cast<int>(tree.size()) - static_cast<int>(res.tree.size());
  res.t_result = count_errors(res.tree, data);
  return res;
}

}  // namespace detail

/// Post-order pass replacing each cut by its majority leaf whenever the
/// training errors do not go up.
inline HeuristicResult heuristic_replacement(const DecisionTree& tree, const Dataset& data) {
  const auto counts = node_label_counts(tree, data);
  std::vector<NodeId> raised(tree.node_count(), kNoNode);
  std::vector<signed char> leaf_at(tree.node_count(), -1);
  int current = count_errors(tree, data);
  for (NodeId v : tree.postorder()) {
    if (tree.is_leaf(v)) continue;
    leaf_at[v] = static_cast<signed char>(majority_label(counts[v]));
    int errors = detail::errors_with(tree, data, raised, leaf_at);
    if (errors <= current)
      current = errors;
    else
      leaf_at[v] = -1;
  }
  return detail::finish(tree, data, raised, leaf_at);
}

/// Post-order pass raising, at each cut, the child whose current subtree
/// has more nodes (ties: left) whenever the training errors do not go up.
/// Only raising is used, so the result is always reachable by raising.
inline HeuristicResult heuristic_raising(const DecisionTree& tree, const Dataset& data) {
  std::vector<NodeId> raised(tree.node_count(), kNoNode);
  std::vector<signed char> leaf_at(tree.node_count(), -1);
  std::vector<int> size(tree.node_count(), 1);  // nodes of the current subtree at v
  int current = count_errors(tree, data);
  for (NodeId v : tree.postorder()) {
    const Node& n = tree[v];
    if (n.leaf) continue;
    size[v] = 1 + size[n.left] + size[n.right];
    NodeId kept = size[n.left] >= size[n.right] ? n.left : n.right;
    raised[v] = kept;
    int errors = detail::errors_with(tree, data, raised, leaf_at);
    if (errors <= current) {
      current = errors;
      size[v] = size[kept];
    } else {
      raised[v] = kNoNode;
    }
  }
  return detail::finish(tree, data, raised, leaf_at);
}

}  // namespace prunex
