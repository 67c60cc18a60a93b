#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "prunex/model.hpp"

namespace prunex {

struct Classification {
  Label label = Label::blue;
  NodeId leaf = kNoNode;
  friend bool operator==(const Classification&, const Classification&) = default;
};

/// Root-to-leaf walk; value <= threshold goes left.
inline Classification classify_naive(const DecisionTree& tree, std::span<const Rational> values) {
  NodeId leaf = leaf_of(tree, values);
  return {tree[leaf].label, leaf};
}

// ---------------------------------------------------------------------------
// Heavy-light index
// ---------------------------------------------------------------------------

/// Heavy-path decomposition of a tree plus, for every node, the box of
/// feature values an example must lie in to reach it.
///
/// An edge (v, u) is heavy when |T_v| < 2 |T_u| (node counts); an exact
/// factor of two is light. Each node has at most one heavy child, so heavy
/// edges form vertex-disjoint paths. A path is stored head first.
class HldIndex {
 public:
  HldIndex() = default;

  HldIndex(const DecisionTree& tree, std::size_t d) : d_(d) {
    const std::size_t n = tree.node_count();
    if (tree.empty() || tree.size() == 0) return;
    sizes_ = tree.node_counts();
    heavy_child_.assign(n, kNoNode);
    path_of_.assign(n, -1);
    position_.assign(n, -1);
    bounds_.assign(n, Box(d));

    tree.for_each_preorder([&](NodeId v) {
      const Node& node = tree[v];
      if (node.leaf) return;
      for (NodeId c : {node.left, node.right})
        if (sizes_[v] < 2 * sizes_[c]) heavy_child_[v] = c;
      Box left = bounds_[v];
      left[static_cast<std::size_t>(node.feature)].tighten_hi(node.threshold);
      Box right = bounds_[v];
      right[static_cast<std::size_t>(node.feature)].tighten_lo(node.threshold);
      bounds_[node.left] = std::move(left);
      bounds_[node.right] = std::move(right);
    });

    // A node starts a path unless it is its parent's heavy child; preorder
    // visits heads before the rest of their path.
    auto parent = tree.parents();
    tree.for_each_preorder([&](NodeId v) {
      NodeId p = parent[v];
      if (p != kNoNode && heavy_child_[p] == v) return;
      std::vector<NodeId> path;
      for (NodeId u = v; u != kNoNode; u = heavy_child_[u]) {
        path_of_[u] = static_cast<int>(paths_.size());
        position_[u] = static_cast<int>(path.size());
        path.push_back(u);
      }
      paths_.push_back(std::move(path));
    });
  }

  /// True for the index of a single-leaf tree.
  bool empty() const { return paths_.empty(); }
  std::size_t d() const { return d_; }
  const std::vector<std::vector<NodeId>>& paths() const { return paths_; }
  int path_of(NodeId v) const { return path_of_[v]; }
  int position(NodeId v) const { return position_[v]; }
  NodeId heavy_child(NodeId v) const { return heavy_child_[v]; }
  int subtree_nodes(NodeId v) const { return sizes_[v]; }
  const Box& bounds(NodeId v) const { return bounds_[v]; }

  bool is_heavy_edge(NodeId parent, NodeId child) const { return heavy_child_[parent] == child; }

 private:
  std::size_t d_ = 0;
  std::vector<int> sizes_;
  std::vector<NodeId> heavy_child_;
  std::vector<int> path_of_;
  std::vector<int> position_;
  std::vector<Box> bounds_;
  std::vector<std::vector<NodeId>> paths_;
};

inline HldIndex build_hld_index(const DecisionTree& tree, std::size_t d) { return HldIndex(tree, d); }

/// Same answer as classify_naive. On each heavy path a binary search finds
/// the deepest node whose box still admits the example; the walk then leaves
/// the path through a light edge. `probes` (optional) counts box tests.
inline Classification classify_hld(const HldIndex& index, const DecisionTree& tree,
                                   std::span<const Rational> values, std::size_t* probes = nullptr) {
  if (index.empty()) return classify_naive(tree, values);
  NodeId v = tree.root();
  for (;;) {
    const auto& path = index.paths()[static_cast<std::size_t>(index.path_of(v))];
    // v is the head of its path and is known to be reached.
    std::size_t lo = static_cast<std::size_t>(index.position(v));
    std::size_t hi = path.size() - 1;
    while (lo < hi) {
      std::size_t mid = (lo + hi + 1) / 2;
      if (probes) ++*probes;
      if (index.bounds(path[mid]).contains(values))
        lo = mid;
      else
        hi = mid - 1;
    }
    NodeId u = path[lo];
    const Node& node = tree[u];
    if (node.leaf) return {node.label, u};
    v = values[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
  }
}

/// Largest number of light edges on any root-to-leaf path.
inline int max_light_edges(const HldIndex& index, const DecisionTree& tree) {
  if (index.empty()) return 0;
  std::vector<int> light(tree.node_count(), 0);
  int best = 0;
  tree.for_each_preorder([&](NodeId v) {
    const Node& n = tree[v];
    if (n.leaf) {
      best = std::max(best, light[v]);
      return;
    }
    for (NodeId c : {n.left, n.right}) light[c] = light[v] + (index.is_heavy_edge(v, c) ? 0 : 1);
  });
  return best;
}

// ---------------------------------------------------------------------------
// Per-node statistics for the pruning DPs
// ---------------------------------------------------------------------------

struct NodeStats {
  std::vector<LabelCounts> counts;  ///< labels of E[T,v]
  std::vector<int> inner;           ///< s_v, cuts in the subtree of v
  std::vector<int> replace_errors;  ///< t_v = min(blue, red) of E[T,v]
  std::vector<int> subtree_errors;  ///< errors of the unpruned subtree on E[T,v]
};

/// Routes every example once, then aggregates bottom-up.
inline NodeStats annotate_stats(const DecisionTree& tree, const Dataset& data) {
  const std::size_t n = tree.node_count();
  NodeStats st;
  st.counts.assign(n, {});
  st.inner.assign(n, 0);
  st.replace_errors.assign(n, 0);
  st.subtree_errors.assign(n, 0);
  for (const auto& e : data.examples()) st.counts[leaf_of(tree, e.values)].add(e.label);
  for (NodeId v : tree.postorder()) {
    const Node& node = tree[v];
    if (node.leaf) {
      st.subtree_errors[v] = st.counts[v].of(other(node.label));
    } else {
      st.counts[v] = st.counts[node.left];
      st.counts[v] += st.counts[node.right];
      st.inner[v] = 1 + st.inner[node.left] + st.inner[node.right];
      st.subtree_errors[v] = st.subtree_errors[node.left] + st.subtree_errors[node.right];
    }
    st.replace_errors[v] = st.counts[v].minority();
  }
  return st;
}

}  // namespace prunex
