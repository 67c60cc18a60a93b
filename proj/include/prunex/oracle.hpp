#pragma once

#include <algorithm>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "prunex/errors.hpp"
#include "prunex/model.hpp"
#include "prunex/pareto.hpp"

namespace prunex {

inline constexpr int kDefaultOracleCap = 10;

struct ReachMember {
  DecisionTree tree;
  int pruned = 0;
  int errors = 0;
};

/// Every distinct tree reachable by one kind of pruning operation.
class ReachSet {
 public:
  void add(DecisionTree tree, int pruned, int errors) {
    std::string key = to_compact(tree);
    if (index_.emplace(std::move(key), members_.size()).second)
      members_.push_back({std::move(tree), pruned, errors});
  }
  bool contains(const DecisionTree& tree) const { return index_.count(to_compact(tree)) > 0; }
  std::size_t size() const { return members_.size(); }
  const std::vector<ReachMember>& members() const { return members_; }

 private:
  std::vector<ReachMember> members_;
  std::unordered_map<std::string, std::size_t> index_;
};

namespace detail {

// Appends all nodes of `part` (assumed fully reachable) and returns its root's new id.
inline NodeId append_tree(DecisionTree& out, const DecisionTree& part) {
  const auto offset = static_cast<NodeId>(out.node_count());
  for (std::size_t i = 0; i < part.node_count(); ++i) {
    const Node& n = part.node(static_cast<NodeId>(i));
    if (n.leaf)
      out.add_leaf(n.label);
    else
      out.add_cut(n.feature, n.threshold, n.left + offset, n.right + offset);
  }
  return part.root() + offset;
}

inline DecisionTree join_cut(const Node& cut, const DecisionTree& left, const DecisionTree& right) {
  DecisionTree out;
  NodeId l = append_tree(out, left);
  NodeId r = append_tree(out, right);
  out.add_cut(cut.feature, cut.threshold, l, r);
  return out;
}

}  // namespace detail

/// Enumerates the reach set bottom-up, deduplicating by canonical string.
/// Refuses trees with more than `cap` cuts.
inline ReachSet enumerate_pruned_trees(const DecisionTree& tree, const Dataset& data, Operation op,
                                       int cap = kDefaultOracleCap) {
  const int s = static_cast<int>(tree.size());
  if (s > cap) throw CapExceeded(static_cast<std::size_t>(s), static_cast<std::size_t>(cap));
  tree.check_structure(data.d());
  const auto counts = node_label_counts(tree, data);

  std::vector<std::vector<DecisionTree>> reach(tree.node_count());
  for (NodeId v : tree.postorder()) {
    const Node& n = tree[v];
    auto& mine = reach[v];
    if (n.leaf) {
      mine.push_back(DecisionTree::single_leaf(n.label));
      continue;
    }
    std::unordered_map<std::string, char> seen;
    auto push = [&](DecisionTree t) {
      if (seen.emplace(to_compact(t), 0).second) mine.push_back(std::move(t));
    };
    for (const auto& l : reach[n.left])
      for (const auto& r : reach[n.right]) push(detail::join_cut(n, l, r));
    if (op == Operation::raising) {
      for (const auto& l : reach[n.left]) push(l);
      for (const auto& r : reach[n.right]) push(r);
    } else {
      push(DecisionTree::single_leaf(majority_label(counts[v])));
    }
    reach[n.left].clear();
    reach[n.right].clear();
  }

  ReachSet out;
  for (auto& t : reach[tree.root()]) {
    int pruned = s - static_cast<int>(t.size());
    int errors = count_errors(t, data);
    out.add(std::move(t), pruned, errors);
  }
  return out;
}

/// Fewest errors per pruned count over the reach set (suffix minimum for at_least).
inline ParetoFront oracle_pareto(const DecisionTree& tree, const Dataset& data, Operation op,
                                 Variant variant = Variant::exact, int cap = kDefaultOracleCap) {
  ReachSet set = enumerate_pruned_trees(tree, data, op, cap);
  ParetoFront front{std::vector<int>(tree.size() + 1, kInfeasible)};
  for (const auto& m : set.members())
    front.min_errors[static_cast<std::size_t>(m.pruned)] =
        std::min(front.min_errors[static_cast<std::size_t>(m.pruned)], m.errors);
  return variant == Variant::exact ? front : front.suffix_min();
}

}  // namespace prunex
