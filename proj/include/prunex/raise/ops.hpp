#pragma once

#include <string>
#include <utility>
#include <vector>

#include "prunex/errors.hpp"
#include "prunex/model.hpp"
#include "prunex/pareto.hpp"

namespace prunex {

/// One subtree raising: cut `node` is replaced by its child `kept`; the
/// other child's subtree is discarded.
struct RaiseAction {
  NodeId node = kNoNode;
  NodeId kept = kNoNode;
  friend bool operator==(const RaiseAction&, const RaiseAction&) = default;
};

struct RaiseOutcome {
  DecisionTree tree;
  int pruned = 0;  ///< cuts removed: the raised node plus the discarded subtree's cuts
};

inline void check_raise(const DecisionTree& tree, const RaiseAction& a) {
  if (a.node < 0 || static_cast<std::size_t>(a.node) >= tree.node_count())
    throw InvalidOperation("node " + std::to_string(a.node) + " does not exist");
  const Node& n = tree[a.node];
  if (n.leaf) throw InvalidOperation("cannot raise at leaf " + std::to_string(a.node));
  if (a.kept != n.left && a.kept != n.right)
    throw InvalidOperation("node " + std::to_string(a.kept) + " is not a child of " + std::to_string(a.node));
}

inline RaiseOutcome apply_raising(const DecisionTree& tree, NodeId node, NodeId kept) {
  check_raise(tree, {node, kept});
  const Node& n = tree[node];
  NodeId dropped = kept == n.left ? n.right : n.left;
  int pruned = 1 + tree.inner_counts()[dropped];
  DecisionTree out = rebuild(tree, [&](NodeId v) {
    return v == node ? RebuildAction::descend(kept) : RebuildAction::keep();
  });
  return {std::move(out), pruned};
}

/// Applies raisings that are simultaneously valid in `tree` (each acted-on
/// node must survive the others; unreachable ones are ignored by rebuild).
inline RaiseOutcome apply_raisings(const DecisionTree& tree, const std::vector<RaiseAction>& actions) {
  std::vector<NodeId> target(tree.node_count(), kNoNode);
  for (const auto& a : actions) {
    check_raise(tree, a);
    target[a.node] = a.kept;
  }
  DecisionTree out = rebuild(tree, [&](NodeId v) {
    return target[v] != kNoNode ? RebuildAction::descend(target[v]) : RebuildAction::keep();
  });
  int pruned = static_cast<int>(tree.size()) - static_cast<int>(out.size());
  return {std::move(out), pruned};
}

/// Elementary raisings: at a cut with at least one leaf child, discard that
/// leaf and keep the other child. Each removes exactly one cut.
inline std::vector<RaiseAction> elementary_raisings(const DecisionTree& tree) {
  std::vector<RaiseAction> out;
  tree.for_each_preorder([&](NodeId v) {
    const Node& n = tree[v];
    if (n.leaf) return;
    if (tree.is_leaf(n.right)) out.push_back({v, n.left});
    if (tree.is_leaf(n.left)) out.push_back({v, n.right});
  });
  return out;
}

/// Common result type of the raising solvers.
struct RaisingResult {
  bool feasible = false;
  int min_errors = kInfeasible;     ///< best error count found for the requested budget
  int pruned = 0;                   ///< cuts removed by the witness
  DecisionTree witness;             ///< valid only when min_errors < kInfeasible
  std::vector<RaiseAction> actions; ///< raisings of the input tree producing the witness
};

}  // namespace prunex
