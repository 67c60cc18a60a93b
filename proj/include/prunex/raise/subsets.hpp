#pragma once

#include <algorithm>
#include <string>
#include <unordered_set>
#include <vector>

#include "prunex/model.hpp"
#include "prunex/raise/ops.hpp"
#include "prunex/raise/zero_peel.hpp"

namespace prunex {

/// At-least raising by enumeration: every tree reachable by k elementary
/// raisings, combined with every set of min(t, n) examples to ignore, is
/// tested with the zero-error peel on the remaining examples.
inline RaisingResult solve_raising_subsets(const DecisionTree& tree, const Dataset& data, int k, int t) {
  RaisingResult res;
  const int s = static_cast<int>(tree.size());
  if (k < 0 || k > s || t < 0) return res;

  std::vector<DecisionTree> layer{compact(tree)};
  for (int step = 0; step < k; ++step) {
    std::vector<DecisionTree> next;
    std::unordered_set<std::string> seen;
    for (const auto& cur : layer)
      for (const auto& op : elementary_raisings(cur)) {
        DecisionTree raised = apply_raising(cur, op.node, op.kept).tree;
        if (seen.insert(to_compact(raised)).second) next.push_back(std::move(raised));
      }
    layer = std::move(next);
  }

  const std::size_t n = data.size();
  const std::size_t drop = std::min<std::size_t>(static_cast<std::size_t>(t), n);
  for (const auto& cur : layer) {
    // Iterate drop-subsets as selection masks in lexicographic order.
    std::vector<char> removed(n, 0);
    std::fill(removed.end() - static_cast<std::ptrdiff_t>(drop), removed.end(), 1);
    do {
      std::vector<char> active(n);
      for (std::size_t i = 0; i < n; ++i) active[i] = !removed[i];
      if (auto actions = peel_to_zero(cur, data, &active)) {
        res.witness = compact(apply_raisings(cur, *actions).tree);
        res.min_errors = count_errors(res.witness, data);
        res.pruned = s - static_cast<int>(res.witness.size());
        res.feasible = true;
        return res;
      }
    } while (std::next_permutation(removed.begin(), removed.end()));
  }
  return res;
}

}  // namespace prunex
