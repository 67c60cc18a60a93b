#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "prunex/errors.hpp"
#include "prunex/ingest.hpp"
#include "prunex/model.hpp"

namespace prunex {

// ---------------------------------------------------------------------------
// Graphs
// ---------------------------------------------------------------------------

/// Simple undirected graph on vertices 0..N-1.
struct Graph {
  int vertices = 0;
  std::vector<std::pair<int, int>> edges;

  Graph() = default;
  Graph(int n, std::vector<std::pair<int, int>> e) : vertices(n), edges(std::move(e)) {
    std::set<std::pair<int, int>> seen;
    for (auto& [u, v] : edges) {
      if (u < 0 || v < 0 || u >= n || v >= n) throw std::invalid_argument("edge endpoint out of range");
      if (u == v) throw std::invalid_argument("self-loop at " + std::to_string(u));
      if (u > v) std::swap(u, v);
      if (!seen.insert({u, v}).second) throw std::invalid_argument("duplicate edge");
    }
  }
};

/// "N" on the first line, then one "u v" pair per line (0-based).
inline Graph parse_graph(std::string_view text) {
  std::istringstream in{std::string(text)};
  int n;
  if (!(in >> n) || n < 0) throw ParseError("graph text must start with the vertex count");
  std::vector<std::pair<int, int>> edges;
  int u, v;
  while (in >> u) {
    if (!(in >> v)) throw ParseError("dangling edge endpoint");
    edges.emplace_back(u, v);
  }
  if (!in.eof()) throw ParseError("non-numeric token in graph text");
  try {
    return Graph(n, std::move(edges));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

inline Graph read_graph(const std::string& path) { return parse_graph(detail::read_file(path)); }

inline Graph random_graph(std::uint64_t seed, int n, double edge_probability) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(edge_probability);
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (coin(rng)) edges.emplace_back(u, v);
  return Graph(n, std::move(edges));
}

/// Brute force over all kappa-subsets.
inline bool has_independent_set(const Graph& g, int kappa) {
  if (kappa < 0 || kappa > g.vertices) return false;
  std::vector<char> pick(static_cast<std::size_t>(g.vertices), 0);
  std::fill(pick.end() - kappa, pick.end(), 1);
  do {
    bool ok = std::none_of(g.edges.begin(), g.edges.end(), [&](const auto& e) { return pick[e.first] && pick[e.second]; });
    if (ok) return true;
  } while (std::next_permutation(pick.begin(), pick.end()));
  return false;
}

/// Brute force over all kappa-subsets of {0..universe-1}.
inline bool has_hitting_set(int universe, const std::vector<std::vector<int>>& sets, int kappa) {
  if (kappa < 0 || kappa > universe) return false;
  std::vector<char> pick(static_cast<std::size_t>(universe), 0);
  std::fill(pick.end() - kappa, pick.end(), 1);
  do {
    bool ok = std::all_of(sets.begin(), sets.end(), [&](const auto& s) {
      return std::any_of(s.begin(), s.end(), [&](int x) { return pick[x]; });
    });
    if (ok) return true;
  } while (std::next_permutation(pick.begin(), pick.end()));
  return false;
}

// ---------------------------------------------------------------------------
// Instances
// ---------------------------------------------------------------------------

struct Instance {
  Dataset data;
  DecisionTree tree;
};

/// Instance of a reduction together with its question and the answer
/// computed directly on the source problem.
struct ReductionInstance {
  Dataset data;
  DecisionTree tree;
  SolveSpec spec;
  bool truth = false;
};

namespace detail {

inline Example binary_example(int id, std::size_t d, const std::vector<int>& ones, Label label) {
  Example e{id, std::vector<Rational>(d, Rational(0)), label};
  for (int i : ones) e.values[static_cast<std::size_t>(i)] = 1;
  return e;
}

/// Path of cuts "x_i <= 0" over features 0..m-1 whose right children are
/// blue leaves, ending in the cut on feature m (left red, right blue).
inline DecisionTree blue_path_tree(int m) {
  DecisionTree t;
  NodeId red = t.add_leaf(Label::red);
  NodeId blue = t.add_leaf(Label::blue);
  NodeId below = t.add_cut(m, Rational(0), red, blue);
  for (int i = m - 1; i >= 0; --i) {
    NodeId leaf = t.add_leaf(Label::blue);
    below = t.add_cut(i, Rational(0), below, leaf);
  }
  t.set_root(below);
  return compact(t);
}

inline std::vector<std::string> path_feature_names(int m, const std::string& prefix) {
  std::vector<std::string> names;
  for (int i = 0; i < m; ++i) names.push_back(prefix + std::to_string(i));
  names.push_back("dstar");
  return names;
}

}  // namespace detail

/// Family whose raising front is 0 at k, at least 1 for every 1 <= j < k.
///
/// Features d1..dk (indices 0..k-1). Examples: for each j >= 2 a blue one
/// with only dj = 1 and a blue one with d1 = dj = 1; a red one with all
/// zeros and a red one with only d1 = 1. The root cuts d1 and both sides
/// carry the same path of cuts dj <= 0 (j = 2..k) whose right children are
/// blue leaves; the last cut's left child is red.
inline Instance gen_nonmonotone(int k) {
  if (k < 2) throw std::invalid_argument("non-monotone family needs k >= 2");
  const auto d = static_cast<std::size_t>(k);
  std::vector<Example> ex;
  for (int j = 1; j < k; ++j) {
    ex.push_back(detail::binary_example(static_cast<int>(ex.size()), d, {j}, Label::blue));
    ex.push_back(detail::binary_example(static_cast<int>(ex.size()), d, {0, j}, Label::blue));
  }
  ex.push_back(detail::binary_example(static_cast<int>(ex.size()), d, {}, Label::red));
  ex.push_back(detail::binary_example(static_cast<int>(ex.size()), d, {0}, Label::red));
  std::vector<std::string> names;
  for (int j = 1; j <= k; ++j) names.push_back("d" + std::to_string(j));

  DecisionTree t;
  auto branch = [&] {
    NodeId red = t.add_leaf(Label::red);
    NodeId blue = t.add_leaf(Label::blue);
    NodeId below = t.add_cut(k - 1, Rational(0), red, blue);
    for (int j = k - 2; j >= 1; --j) {
      NodeId leaf = t.add_leaf(Label::blue);
      below = t.add_cut(j, Rational(0), below, leaf);
    }
    return below;
  };
  NodeId l = branch();
  NodeId r = branch();
  t.add_cut(0, Rational(0), l, r);
  return {Dataset(d, std::move(ex), std::move(names)), compact(t)};
}

/// Independent set of size kappa in g  <=>  exactly kappa raisings with no
/// error. One feature per vertex plus d*; a blue example per edge (its two
/// endpoints set), a blue example per vertex (vertex and d* set), a blue
/// example with only d* set, and an all-zero red example.
inline ReductionInstance gen_independent_set(const Graph& g, int kappa) {
  const int n = g.vertices;
  const auto d = static_cast<std::size_t>(n + 1);
  std::vector<Example> ex;
  for (const auto& [u, v] : g.edges) ex.push_back(detail::binary_example(static_cast<int>(ex.size()), d, {u, v}, Label::blue));
  for (int v = 0; v < n; ++v) ex.push_back(detail::binary_example(static_cast<int>(ex.size()), d, {v, n}, Label::blue));
  ex.push_back(detail::binary_example(static_cast<int>(ex.size()), d, {n}, Label::blue));
  ex.push_back(detail::binary_example(static_cast<int>(ex.size()), d, {}, Label::red));
  return {Dataset(d, std::move(ex), detail::path_feature_names(n, "v")), detail::blue_path_tree(n),
          SolveSpec{Operation::raising, Variant::exact, kappa, 0}, has_independent_set(g, kappa)};
}

/// Hitting set of size kappa  <=>  raising exactly |U| - kappa element cuts
/// without error. Same scaffold with universe elements as features and one
/// blue example per set. The terminal d* cut cannot be raised without an
/// error, so the budget is s - kappa - 1.
inline ReductionInstance gen_hitting_set(int universe, const std::vector<std::vector<int>>& sets, int kappa) {
  const auto d = static_cast<std::size_t>(universe + 1);
  std::vector<Example> ex;
  for (const auto& s : sets) {
    if (s.empty()) throw std::invalid_argument("hitting-set instances need non-empty sets");
    for (int x : s)
      if (x < 0 || x >= universe) throw std::invalid_argument("set element out of range");
    ex.push_back(detail::binary_example(static_cast<int>(ex.size()), d, s, Label::blue));
  }
  for (int u = 0; u < universe; ++u)
    ex.push_back(detail::binary_example(static_cast<int>(ex.size()), d, {u, universe}, Label::blue));
  ex.push_back(detail::binary_example(static_cast<int>(ex.size()), d, {universe}, Label::blue));
  ex.push_back(detail::binary_example(static_cast<int>(ex.size()), d, {}, Label::red));
  return {Dataset(d, std::move(ex), detail::path_feature_names(universe, "u")), detail::blue_path_tree(universe),
          SolveSpec{Operation::raising, Variant::exact, universe - kappa, 0}, has_hitting_set(universe, sets, kappa)};
}

inline std::vector<std::vector<int>> random_set_system(std::uint64_t seed, int universe, int count) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<int>> sets;
  for (int i = 0; i < count; ++i) {
    std::vector<int> s;
    while (s.empty())
      for (int u = 0; u < universe; ++u)
        if (rng() % 2) s.push_back(u);
    sets.push_back(std::move(s));
  }
  return sets;
}

struct RandomParams {
  int n = 12;
  int d = 3;
  int value_range = 4;        ///< integer values in [0, value_range)
  double class_balance = 0.5; ///< probability of blue
  int min_leaf = 1;
  std::optional<int> max_depth;
};

/// Seeded random dataset with independent labels and its greedy tree.
inline Instance gen_random(std::uint64_t seed, const RandomParams& p) {
  if (p.n <= 0 || p.d <= 0 || p.value_range <= 0 || p.min_leaf <= 0)
    throw std::invalid_argument("random instance parameters must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> value(0, p.value_range - 1);
  std::bernoulli_distribution blue(p.class_balance);
  std::vector<Example> ex;
  for (int i = 0; i < p.n; ++i) {
    Example e{i, {}, Label::blue};
    for (int f = 0; f < p.d; ++f) e.values.emplace_back(value(rng));
    e.label = blue(rng) ? Label::blue : Label::red;
    ex.push_back(std::move(e));
  }
  Dataset data(static_cast<std::size_t>(p.d), std::move(ex));
  DecisionTree tree = induce_greedy(data, {p.min_leaf, p.max_depth});
  return {std::move(data), std::move(tree)};
}

/// Random tree with exactly s cuts, not fitted to any data: features in
/// [0, d), integer thresholds in [0, value_range), random leaf labels.
/// With probability `skew` a cut sends all remaining cuts to one side,
/// which produces long paths.
inline DecisionTree gen_random_tree(std::uint64_t seed, int s, int d, int value_range = 8, double skew = 0.3) {
  std::mt19937_64 rng(seed);
  DecisionTree t;
  std::bernoulli_distribution skewed(skew), coin(0.5);
  std::uniform_int_distribution<int> feature(0, d - 1), threshold(0, value_range - 1);
  struct Pending {
    int cuts;
    NodeId parent;
    bool left;
  };
  std::vector<Node> nodes;
  std::vector<Pending> stack{{s, kNoNode, false}};
  NodeId root = kNoNode;
  while (!stack.empty()) {
    Pending p = stack.back();
    stack.pop_back();
    Node n;
    if (p.cuts == 0) {
      n.leaf = true;
      n.label = coin(rng) ? Label::blue : Label::red;
    } else {
      n.leaf = false;
      n.feature = feature(rng);
      n.threshold = threshold(rng);
    }
    auto id = static_cast<NodeId>(nodes.size());
    nodes.push_back(n);
    if (p.parent == kNoNode)
      root = id;
    else
      (p.left ? nodes[p.parent].left : nodes[p.parent].right) = id;
    if (p.cuts > 0) {
      int rest = p.cuts - 1;
      int left = skewed(rng) ? (coin(rng) ? rest : 0) : std::uniform_int_distribution<int>(0, rest)(rng);
      stack.push_back({rest - left, id, false});
      stack.push_back({left, id, true});
    }
  }
  for (const Node& n : nodes) {
    if (n.leaf)
      t.add_leaf(n.label);
    else
      t.add_cut(n.feature, n.threshold, n.left, n.right);
  }
  t.set_root(root);
  return t;
}

/// Random example values for a tree from gen_random_tree.
inline std::vector<Rational> random_values(std::mt19937_64& rng, int d, int value_range) {
  std::uniform_int_distribution<int> value(-1, value_range);
  std::vector<Rational> v;
  for (int f = 0; f < d; ++f) v.emplace_back(value(rng));
  return v;
}

}  // namespace prunex
