#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace prunex {

/// Value used for "no tree with this many pruned nodes".
inline constexpr int kInfeasible = std::numeric_limits<int>::max() / 4;

/// min_errors[k] = fewest training errors over all prunings removing k cuts.
struct ParetoFront {
  std::vector<int> min_errors;

  std::size_t size() const { return min_errors.size(); }
  int operator[](std::size_t k) const { return min_errors[k]; }
  bool feasible(std::size_t k) const { return k < min_errors.size() && min_errors[k] < kInfeasible; }

  /// at_least(k) = min over k' >= k of exact(k').
  ParetoFront suffix_min() const {
    ParetoFront out = *this;
    for (std::size_t i = out.min_errors.size(); i-- > 1;)
      out.min_errors[i - 1] = std::min(out.min_errors[i - 1], out.min_errors[i]);
    return out;
  }

  /// Largest k whose value is at most t, or -1.
  int max_pruned_within(int t) const {
    for (std::size_t k = min_errors.size(); k-- > 0;)
      if (min_errors[k] <= t) return static_cast<int>(k);
    return -1;
  }

  friend bool operator==(const ParetoFront&, const ParetoFront&) = default;
};

/// "k,min_errors[,variant]" rows with a header; infeasible entries print "inf".
inline void write_front_csv(std::ostream& os, const ParetoFront& front, const std::string& variant = {}) {
  os << (variant.empty() ? "k,min_errors\n" : "k,min_errors,variant\n");
  for (std::size_t k = 0; k < front.size(); ++k) {
    os << k << ',';
    if (front[k] >= kInfeasible)
      os << "inf";
    else
      os << front[k];
    if (!variant.empty()) os << ',' << variant;
    os << '\n';
  }
}

}  // namespace prunex
