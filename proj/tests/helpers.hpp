#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "prunex.hpp"

namespace prunex::testing {

/// Rows of integer feature values with 'b' (blue) or 'r' (red).
inline Dataset make_data(const std::vector<std::pair<std::vector<int>, char>>& rows) {
  std::vector<Example> ex;
  std::size_t d = rows.empty() ? 0 : rows.front().first.size();
  for (const auto& [vals, c] : rows) {
    Example e{static_cast<int>(ex.size()), {}, c == 'b' ? Label::blue : Label::red};
    for (int v : vals) e.values.emplace_back(v);
    ex.push_back(std::move(e));
  }
  return Dataset(d, std::move(ex));
}

inline DecisionTree tree_of(const std::string& text) { return parse_compact_tree(text); }

/// Small reasonable instance: n <= 12, d <= 3, s <= 7.
inline Instance small_instance(std::uint64_t seed) {
  RandomParams p;
  p.n = 6 + static_cast<int>(seed % 7);
  p.d = 1 + static_cast<int>((seed / 7) % 3);
  p.value_range = 3 + static_cast<int>((seed / 21) % 3);
  p.max_depth = 3;
  return gen_random(seed * 7919 + 17, p);
}

/// Small instance whose tree ignores the data (possibly unreasonable).
inline Instance arbitrary_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  int d = 1 + static_cast<int>(rng() % 3);
  int s = static_cast<int>(rng() % 7) + 1;
  DecisionTree tree = gen_random_tree(seed, s, d, 4, 0.3);
  int n = 3 + static_cast<int>(rng() % 10);
  std::vector<Example> ex;
  for (int i = 0; i < n; ++i) {
    Example e{i, {}, rng() % 2 ? Label::blue : Label::red};
    for (int f = 0; f < d; ++f) e.values.emplace_back(static_cast<int>(rng() % 5) - 1);
    ex.push_back(std::move(e));
  }
  return {Dataset(static_cast<std::size_t>(d), std::move(ex)), std::move(tree)};
}

}  // namespace prunex::testing
