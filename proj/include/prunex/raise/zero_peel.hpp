#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "prunex/model.hpp"
#include "prunex/raise/ops.hpp"

namespace prunex {

/// Peels leaves that misclassify an active example: each step raises the
/// leaf's parent keeping the sibling. Leaves are taken deepest first, then
/// by smallest node id; with a seed, uniformly at random instead. Returns
/// the raisings (in ids of `tree`) on success, nothing when the whole tree
/// gets peeled away.
inline std::optional<std::vector<RaiseAction>> peel_to_zero(const DecisionTree& tree, const Dataset& data,
                                                            const std::vector<char>* active = nullptr,
                                                            std::optional<std::uint64_t> seed = std::nullopt) {
  const std::size_t n = tree.node_count();
  std::vector<NodeId> left(n, kNoNode), right(n, kNoNode), parent(n, kNoNode);
  for (std::size_t v = 0; v < n; ++v) {
    left[v] = tree.node(static_cast<NodeId>(v)).left;
    right[v] = tree.node(static_cast<NodeId>(v)).right;
  }
  NodeId root = tree.root();
  std::optional<std::mt19937_64> rng;
  if (seed) rng.emplace(*seed);
  std::vector<RaiseAction> actions;
  std::vector<int> depth(n, 0);
  std::vector<char> bad(n, 0);

  for (;;) {
    // Refresh parents and depths of the current shape.
    std::vector<NodeId> stack{root};
    parent[root] = kNoNode;
    depth[root] = 0;
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      bad[v] = 0;
      if (tree.is_leaf(v)) continue;
      for (NodeId c : {left[v], right[v]}) {
        parent[c] = v;
        depth[c] = depth[v] + 1;
        stack.push_back(c);
      }
    }
    std::vector<NodeId> offending;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (active && !(*active)[i]) continue;
      const Example& e = data[i];
      NodeId v = root;
      while (!tree.is_leaf(v)) {
        const Node& node = tree[v];
        v = e.values[static_cast<std::size_t>(node.feature)] <= node.threshold ? left[v] : right[v];
      }
      if (tree[v].label != e.label && !bad[v]) {
        bad[v] = 1;
        offending.push_back(v);
      }
    }
    if (offending.empty()) return actions;
    if (parent[offending.front()] == kNoNode) return std::nullopt;

    NodeId leaf;
    if (rng) {
      leaf = offending[std::uniform_int_distribution<std::size_t>(0, offending.size() - 1)(*rng)];
    } else {
      leaf = *std::min_element(offending.begin(), offending.end(), [&](NodeId a, NodeId b) {
        return depth[a] != depth[b] ? depth[a] > depth[b] : a < b;
      });
    }
    NodeId p = parent[leaf];
    const bool leaf_is_left = left[p] == leaf;
    NodeId sibling = leaf_is_left ? right[p] : left[p];
    // Record the original child on the kept side; rebuild follows earlier raisings below it.
    actions.push_back({p, leaf_is_left ? tree[p].right : tree[p].left});
    NodeId gp = parent[p];
    if (gp == kNoNode)
      root = sibling;
    else if (left[gp] == p)
      left[gp] = sibling;
    else
      right[gp] = sibling;
  }
}

/// A tree with zero training errors reachable by raising, if one exists.
inline std::optional<DecisionTree> solve_zero_zero(const DecisionTree& tree, const Dataset& data,
                                                   std::optional<std::uint64_t> seed = std::nullopt) {
  auto actions = peel_to_zero(tree, data, nullptr, seed);
  if (!actions) return std::nullopt;
  return apply_raisings(tree, *actions).tree;
}

}  // namespace prunex
