#pragma once

#include <cstdint>
#include <vector>

#include "prunex/model.hpp"

namespace prunex {

/// True iff P can be obtained from T by raising operations.
///
/// When the roots carry the same cut, either both keep it and the children
/// match pairwise, or T's root was raised away; otherwise P must come from
/// one of T's subtrees. Leaves match leaves of the same label.
inline bool is_prunable_to(const DecisionTree& T, const DecisionTree& P) {
  const std::size_t np = P.node_count();
  std::vector<std::int8_t> memo(T.node_count() * np, -1);
  auto match = [&](auto&& self, NodeId t, NodeId p) -> bool {
    auto& slot = memo[static_cast<std::size_t>(t) * np + static_cast<std::size_t>(p)];
    if (slot >= 0) return slot;
    const Node& a = T[t];
    const Node& b = P[p];
    bool ok;
    if (a.leaf) {
      ok = b.leaf && a.label == b.label;
    } else if (a.same_cut(b) && self(self, a.left, b.left) && self(self, a.right, b.right)) {
      ok = true;
    } else {
      ok = self(self, a.left, p) || self(self, a.right, p);
    }
    memo[static_cast<std::size_t>(t) * np + static_cast<std::size_t>(p)] = ok;
    return ok;
  };
  if (T.root() == kNoNode || P.root() == kNoNode) return false;
  return match(match, T.root(), P.root());
}

}  // namespace prunex
