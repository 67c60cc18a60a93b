#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "prunex/errors.hpp"
#include "prunex/rational.hpp"

namespace prunex {

// ---------------------------------------------------------------------------
// Labels
// ---------------------------------------------------------------------------

enum class Label : std::uint8_t { blue, red };

inline const char* to_string(Label l) { return l == Label::blue ? "blue" : "red"; }

inline std::optional<Label> parse_label(std::string_view s) {
  if (s == "blue") return Label::blue;
  if (s == "red") return Label::red;
  return std::nullopt;
}

inline Label other(Label l) { return l == Label::blue ? Label::red : Label::blue; }

struct LabelCounts {
  int blue = 0;
  int red = 0;

  int total() const { return blue + red; }
  int of(Label l) const { return l == Label::blue ? blue : red; }
  int minority() const { return std::min(blue, red); }
  void add(Label l, int n = 1) { (l == Label::blue ? blue : red) += n; }
  LabelCounts& operator+=(const LabelCounts& o) {
    blue += o.blue;
    red += o.red;
    return *this;
  }
  friend bool operator==(const LabelCounts&, const LabelCounts&) = default;
};

/// Ties go to blue.
inline Label majority_label(LabelCounts c) { return c.blue >= c.red ? Label::blue : Label::red; }

// ---------------------------------------------------------------------------
// Dataset
// ---------------------------------------------------------------------------

struct Example {
  int id = 0;
  std::vector<Rational> values;
  Label label = Label::blue;

  friend bool operator==(const Example&, const Example&) = default;
};

/// Midpoints between consecutive distinct values: the canonical minimum-size
/// set separating every pair of distinct values.
inline std::vector<Rational> compute_thresholds(std::vector<Rational> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::vector<Rational> out;
  if (values.size() > 1) out.reserve(values.size() - 1);
  for (std::size_t i = 1; i < values.size(); ++i) out.push_back(midpoint(values[i - 1], values[i]));
  return out;
}

inline std::vector<std::vector<Rational>> compute_thresholds(
    const std::vector<std::vector<Rational>>& values_per_feature) {
  std::vector<std::vector<Rational>> out;
  out.reserve(values_per_feature.size());
  for (const auto& v : values_per_feature) out.push_back(compute_thresholds(v));
  return out;
}

struct DatasetMetrics {
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t D = 0;  ///< largest per-feature count of distinct values
  std::size_t delta_max = 0;
};

/// Labeled examples over d rational features. Immutable after construction;
/// thresholds and metrics are computed eagerly.
class Dataset {
 public:
  Dataset() = default;

  Dataset(std::size_t d, std::vector<Example> examples, std::vector<std::string> feature_names = {})
      : d_(d), examples_(std::move(examples)), feature_names_(std::move(feature_names)) {
    for (const auto& e : examples_) {
      if (e.values.size() != d_)
        throw std::invalid_argument("example " + std::to_string(e.id) + " has " +
                                    std::to_string(e.values.size()) + " values, expected " +
                                    std::to_string(d_));
    }
    if (feature_names_.empty()) {
      for (std::size_t i = 0; i < d_; ++i) feature_names_.push_back("f" + std::to_string(i));
    } else if (feature_names_.size() != d_) {
      throw std::invalid_argument("feature name count does not match d");
    }
    std::vector<std::vector<Rational>> columns(d_);
    for (auto& c : columns) c.reserve(examples_.size());
    for (const auto& e : examples_)
      for (std::size_t i = 0; i < d_; ++i) columns[i].push_back(e.values[i]);
    thresholds_ = compute_thresholds(columns);
    metrics_.n = examples_.size();
    metrics_.d = d_;
    for (const auto& t : thresholds_)
      metrics_.D = std::max(metrics_.D, examples_.empty() ? std::size_t{0} : t.size() + 1);
    metrics_.delta_max = compute_delta_max();
  }

  std::size_t size() const { return examples_.size(); }
  std::size_t d() const { return d_; }
  bool empty() const { return examples_.empty(); }
  const std::vector<Example>& examples() const { return examples_; }
  const Example& operator[](std::size_t i) const { return examples_[i]; }
  const std::vector<Rational>& thresholds(std::size_t feature) const { return thresholds_[feature]; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const DatasetMetrics& metrics() const { return metrics_; }

  LabelCounts counts() const {
    LabelCounts c;
    for (const auto& e : examples_) c.add(e.label);
    return c;
  }

  /// Same features, only the examples at the given positions.
  Dataset subset(std::span<const std::size_t> positions) const {
    std::vector<Example> ex;
    ex.reserve(positions.size());
    for (auto p : positions) ex.push_back(examples_[p]);
    return Dataset(d_, std::move(ex), feature_names_);
  }

 private:
  std::size_t compute_delta_max() const {
    std::vector<const Example*> blue;
    std::vector<const Example*> red;
    for (const auto& e : examples_) (e.label == Label::blue ? blue : red).push_back(&e);
    std::size_t best = 0;
    for (const auto* b : blue) {
      for (const auto* r : red) {
        std::size_t diff = 0;
        for (std::size_t i = 0; i < d_; ++i) diff += b->values[i] != r->values[i];
        best = std::max(best, diff);
      }
    }
    return best;
  }

  std::size_t d_ = 0;
  std::vector<Example> examples_;
  std::vector<std::string> feature_names_;
  std::vector<std::vector<Rational>> thresholds_;
  DatasetMetrics metrics_;
};

inline DatasetMetrics dataset_metrics(const Dataset& data) { return data.metrics(); }

// ---------------------------------------------------------------------------
// Box: per-feature half-open interval (lo, hi]
// ---------------------------------------------------------------------------

/// (lo, hi]; an absent bound is the matching infinity.
struct Interval {
  std::optional<Rational> lo;
  std::optional<Rational> hi;

  bool contains(const Rational& x) const { return (!lo || x > *lo) && (!hi || x <= *hi); }
  bool empty() const { return lo && hi && *lo >= *hi; }
  void tighten_hi(const Rational& x) {
    if (!hi || x < *hi) hi = x;
  }
  void tighten_lo(const Rational& x) {
    if (!lo || x > *lo) lo = x;
  }
  friend bool operator==(const Interval&, const Interval&) = default;
};

class Box {
 public:
  Box() = default;
  explicit Box(std::size_t d) : intervals_(d) {}

  std::size_t d() const { return intervals_.size(); }
  Interval& operator[](std::size_t i) { return intervals_[i]; }
  const Interval& operator[](std::size_t i) const { return intervals_[i]; }

  bool contains(std::span<const Rational> values) const {
    for (std::size_t i = 0; i < intervals_.size(); ++i)
      if (!intervals_[i].contains(values[i])) return false;
    return true;
  }
  bool empty() const {
    return std::any_of(intervals_.begin(), intervals_.end(), [](const Interval& iv) { return iv.empty(); });
  }
  friend bool operator==(const Box&, const Box&) = default;

 private:
  std::vector<Interval> intervals_;
};

// ---------------------------------------------------------------------------
// DecisionTree
// ---------------------------------------------------------------------------

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

/// Either a leaf (label) or a cut "value[feature] <= threshold" whose left
/// child receives the examples satisfying the test.
struct Node {
  bool leaf = true;
  Label label = Label::blue;
  int feature = -1;
  Rational threshold{0};
  NodeId left = kNoNode;
  NodeId right = kNoNode;

  bool same_cut(const Node& o) const {
    return !leaf && !o.leaf && feature == o.feature && threshold == o.threshold;
  }
};

/// Ordered binary tree in an arena. Nodes are appended with add_leaf/add_cut
/// and the root is set explicitly (defaults to the last node added).
class DecisionTree {
 public:
  DecisionTree() = default;

  static DecisionTree single_leaf(Label l) {
    DecisionTree t;
    t.add_leaf(l);
    return t;
  }

  NodeId add_leaf(Label l) {
    Node n;
    n.leaf = true;
    n.label = l;
    nodes_.push_back(n);
    root_ = static_cast<NodeId>(nodes_.size() - 1);
    return root_;
  }

  NodeId add_cut(int feature, Rational threshold, NodeId left, NodeId right) {
    Node n;
    n.leaf = false;
    n.feature = feature;
    n.threshold = threshold;
    n.left = left;
    n.right = right;
    nodes_.push_back(n);
    root_ = static_cast<NodeId>(nodes_.size() - 1);
    return root_;
  }

  void set_root(NodeId r) { root_ = r; }

  NodeId root() const { return root_; }
  const Node& node(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }
  const Node& operator[](NodeId id) const { return node(id); }
  bool is_leaf(NodeId id) const { return node(id).leaf; }
  std::size_t node_count() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }

  /// Number of cuts reachable from the root.
  std::size_t size() const {
    std::size_t s = 0;
    for_each_preorder([&](NodeId v) { s += !is_leaf(v); });
    return s;
  }

  /// Visits reachable nodes in preorder (iteratively; paths can be deep).
  template <class Fn>
  void for_each_preorder(Fn&& fn) const {
    if (root_ == kNoNode) return;
    std::vector<NodeId> stack{root_};
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      fn(v);
      const Node& n = node(v);
      if (!n.leaf) {
        stack.push_back(n.right);
        stack.push_back(n.left);
      }
    }
  }

  /// Reachable nodes with children before parents.
  std::vector<NodeId> postorder() const {
    // Reverse of (root, right, left) preorder is a valid postorder.
    std::vector<NodeId> out;
    std::vector<NodeId> stack;
    if (root_ != kNoNode) stack.push_back(root_);
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      out.push_back(v);
      const Node& n = node(v);
      if (!n.leaf) {
        stack.push_back(n.left);
        stack.push_back(n.right);
      }
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

  /// parent[v] for reachable nodes, kNoNode for the root and unreachable ones.
  std::vector<NodeId> parents() const {
    std::vector<NodeId> p(nodes_.size(), kNoNode);
    for_each_preorder([&](NodeId v) {
      const Node& n = node(v);
      if (!n.leaf) p[n.left] = p[n.right] = v;
    });
    return p;
  }

  std::vector<int> depths() const {
    std::vector<int> depth(nodes_.size(), 0);
    for_each_preorder([&](NodeId v) {
      const Node& n = node(v);
      if (!n.leaf) depth[n.left] = depth[n.right] = depth[v] + 1;
    });
    return depth;
  }

  /// Cuts in the subtree of each node (s_v).
  std::vector<int> inner_counts() const {
    std::vector<int> s(nodes_.size(), 0);
    for (NodeId v : postorder()) {
      const Node& n = node(v);
      if (!n.leaf) s[v] = 1 + s[n.left] + s[n.right];
    }
    return s;
  }

  /// All nodes (cuts and leaves) in the subtree of each node.
  std::vector<int> node_counts() const {
    std::vector<int> c(nodes_.size(), 0);
    for (NodeId v : postorder()) {
      const Node& n = node(v);
      c[v] = n.leaf ? 1 : 1 + c[n.left] + c[n.right];
    }
    return c;
  }

  /// Throws StructuralError unless the arena is a proper rooted binary tree
  /// (each node reached once, child ids valid) with features below d.
  void check_structure(std::optional<std::size_t> d = std::nullopt) const {
    if (root_ == kNoNode || static_cast<std::size_t>(root_) >= nodes_.size())
      throw StructuralError("tree has no valid root");
    std::vector<char> seen(nodes_.size(), 0);
    std::vector<NodeId> stack{root_};
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      if (seen[v]) throw StructuralError("node " + std::to_string(v) + " reached twice");
      seen[v] = 1;
      const Node& n = node(v);
      if (n.leaf) continue;
      for (NodeId c : {n.left, n.right}) {
        if (c < 0 || static_cast<std::size_t>(c) >= nodes_.size())
          throw StructuralError("node " + std::to_string(v) + " has invalid child " + std::to_string(c));
        stack.push_back(c);
      }
      if (n.feature < 0 || (d && static_cast<std::size_t>(n.feature) >= *d))
        throw StructuralError("node " + std::to_string(v) + " uses feature " +
                              std::to_string(n.feature) + " outside the dataset");
    }
  }

 private:
  std::vector<Node> nodes_;
  NodeId root_ = kNoNode;
};

/// The leaf an example with the given values reaches.
inline NodeId leaf_of(const DecisionTree& tree, std::span<const Rational> values) {
  NodeId v = tree.root();
  while (!tree.is_leaf(v)) {
    const Node& n = tree[v];
    v = values[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return v;
}

inline int count_errors(const DecisionTree& tree, const Dataset& data) {
  int errors = 0;
  for (const auto& e : data.examples()) errors += tree[leaf_of(tree, e.values)].label != e.label;
  return errors;
}

/// Label counts of E[T,v] for every node v.
inline std::vector<LabelCounts> node_label_counts(const DecisionTree& tree, const Dataset& data) {
  std::vector<LabelCounts> counts(tree.node_count());
  for (const auto& e : data.examples()) {
    NodeId v = tree.root();
    for (;;) {
      counts[v].add(e.label);
      const Node& n = tree[v];
      if (n.leaf) break;
      v = e.values[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
  }
  return counts;
}

// ---------------------------------------------------------------------------
// Rebuilding: the common primitive behind every pruning operation
// ---------------------------------------------------------------------------

/// What to do with an original node when copying a tree.
struct RebuildAction {
  enum class Kind { keep, leaf, descend };
  Kind kind = Kind::keep;
  Label label = Label::blue;  ///< for Kind::leaf
  NodeId child = kNoNode;     ///< for Kind::descend: continue copying from here

  static RebuildAction keep() { return {}; }
  static RebuildAction make_leaf(Label l) { return {Kind::leaf, l, kNoNode}; }
  static RebuildAction descend(NodeId c) { return {Kind::descend, Label::blue, c}; }
};

/// Copies the reachable part of `tree` into a fresh preorder-numbered arena,
/// asking `decide` at every original node. Leaves are always kept.
template <class Decide>
DecisionTree rebuild(const DecisionTree& tree, Decide&& decide) {
  if (tree.root() == kNoNode) return DecisionTree{};
  std::vector<Node> out;
  // Follows descend actions from v, appends the resulting node and returns
  // (new id, original id of the copied node).
  auto emit = [&](NodeId v) -> std::pair<NodeId, NodeId> {
    for (;;) {
      const Node& n = tree[v];
      if (n.leaf) {
        out.push_back(n);
        break;
      }
      RebuildAction a = decide(v);
      if (a.kind == RebuildAction::Kind::descend) {
        if (a.child != n.left && a.child != n.right)
          throw InvalidOperation("node " + std::to_string(v) + " has no child " + std::to_string(a.child));
        v = a.child;
        continue;
      }
      Node copy = n;
      if (a.kind == RebuildAction::Kind::leaf) {
        copy = Node{};
        copy.label = a.label;
      } else {
        copy.left = copy.right = kNoNode;
      }
      out.push_back(copy);
      break;
    }
    return {static_cast<NodeId>(out.size() - 1), v};
  };

  // Preorder: a node's left subtree is finished before its right child is emitted.
  struct Pending {
    NodeId new_id;
    NodeId original;
    bool left_done;
  };
  std::vector<Pending> stack;
  auto [root_new, root_orig] = emit(tree.root());
  if (!out[root_new].leaf) stack.push_back({root_new, root_orig, false});
  while (!stack.empty()) {
    Pending& p = stack.back();
    const Node& n = tree[p.original];
    if (!p.left_done) {
      p.left_done = true;
      auto [l, lo] = emit(n.left);
      out[p.new_id].left = l;
      if (!out[l].leaf) stack.push_back({l, lo, false});
    } else {
      NodeId parent = p.new_id;
      stack.pop_back();
      auto [r, ro] = emit(n.right);
      out[parent].right = r;
      if (!out[r].leaf) stack.push_back({r, ro, false});
    }
  }

  DecisionTree result;
  for (const Node& n : out) {
    if (n.leaf)
      result.add_leaf(n.label);
    else
      result.add_cut(n.feature, n.threshold, n.left, n.right);
  }
  result.set_root(root_new);
  return result;
}

/// Fresh compact copy of the reachable part.
inline DecisionTree compact(const DecisionTree& tree) {
  return rebuild(tree, [](NodeId) { return RebuildAction::keep(); });
}

// ---------------------------------------------------------------------------
// Textual forms
// ---------------------------------------------------------------------------

/// One-line form: "blue", "red" or "[feature<=threshold LEFT RIGHT]".
/// Structurally equal trees have equal strings, so it doubles as a canonical key.
inline std::string to_compact(const DecisionTree& tree) {
  std::string out;
  std::vector<std::pair<NodeId, int>> stack{{tree.root(), 0}};
  while (!stack.empty()) {
    auto& [v, stage] = stack.back();
    const Node& n = tree[v];
    if (n.leaf) {
      out += to_string(n.label);
      stack.pop_back();
      if (!stack.empty()) out += ' ';
      continue;
    }
    if (stage == 0) {
      out += '[' + std::to_string(n.feature) + "<=" + to_short_string(n.threshold) + ' ';
      stage = 1;
      stack.emplace_back(n.left, 0);
    } else if (stage == 1) {
      stage = 2;
      stack.emplace_back(n.right, 0);
    } else {
      if (out.back() == ' ') out.pop_back();
      out += ']';
      stack.pop_back();
      if (!stack.empty()) out += ' ';
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

inline DecisionTree parse_compact_tree(std::string_view text) {
  DecisionTree tree;
  std::size_t pos = 0;
  auto skip = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  std::function<NodeId()> parse = [&]() -> NodeId {
    skip();
    if (pos >= text.size()) throw ParseError("unexpected end of tree text");
    if (text[pos] == '[') {
      ++pos;
      std::size_t le = text.find("<=", pos);
      if (le == std::string_view::npos) throw ParseError("cut without '<=' at offset " + std::to_string(pos));
      int feature = static_cast<int>(detail::parse_int64(detail::trim(text.substr(pos, le - pos)), text));
      pos = le + 2;
      std::size_t end = text.find_first_of(" \t\n", pos);
      if (end == std::string_view::npos) throw ParseError("cut without children");
      Rational thr = parse_rational(text.substr(pos, end - pos));
      pos = end;
      NodeId l = parse();
      NodeId r = parse();
      skip();
      if (pos >= text.size() || text[pos] != ']') throw ParseError("missing ']' at offset " + std::to_string(pos));
      ++pos;
      return tree.add_cut(feature, thr, l, r);
    }
    std::size_t end = pos;
    while (end < text.size() && std::isalpha(static_cast<unsigned char>(text[end]))) ++end;
    auto label = parse_label(text.substr(pos, end - pos));
    if (!label) throw ParseError("bad leaf at offset " + std::to_string(pos));
    pos = end;
    return tree.add_leaf(*label);
  };
  NodeId root = parse();
  skip();
  if (pos != text.size()) throw ParseError("trailing text after tree");
  tree.set_root(root);
  return tree;
}

inline bool structurally_equal(const DecisionTree& a, const DecisionTree& b) {
  return to_compact(a) == to_compact(b);
}

// ---------------------------------------------------------------------------
// Metrics and validation
// ---------------------------------------------------------------------------

struct TreeMetrics {
  std::size_t s = 0;
  std::size_t depth = 0;
  std::size_t d_T = 0;  ///< most distinct features on one root-to-leaf path
  std::size_t D_T = 0;  ///< most distinct thresholds of one feature on one path
  friend bool operator==(const TreeMetrics&, const TreeMetrics&) = default;
};

inline TreeMetrics tree_metrics(const DecisionTree& tree) {
  TreeMetrics m;
  m.s = tree.size();
  // DFS carrying the multiset of (feature, threshold) on the current path.
  std::map<int, std::map<Rational, int>> on_path;
  struct Frame {
    NodeId v;
    int depth;
    bool entered;
  };
  std::vector<Frame> stack{{tree.root(), 0, false}};
  while (!stack.empty()) {
    Frame& f = stack.back();
    const Node& n = tree[f.v];
    if (n.leaf) {
      m.depth = std::max(m.depth, static_cast<std::size_t>(f.depth));
      m.d_T = std::max(m.d_T, on_path.size());
      for (const auto& [feat, thrs] : on_path) m.D_T = std::max(m.D_T, thrs.size());
      stack.pop_back();
      continue;
    }
    if (!f.entered) {
      f.entered = true;
      ++on_path[n.feature][n.threshold];
      int d = f.depth;
      stack.push_back({n.right, d + 1, false});
      stack.push_back({n.left, d + 1, false});
    } else {
      auto& thrs = on_path[n.feature];
      if (--thrs[n.threshold] == 0) thrs.erase(n.threshold);
      if (thrs.empty()) on_path.erase(n.feature);
      stack.pop_back();
    }
  }
  return m;
}

struct LeafViolation {
  enum class Kind { empty_leaf, minority_label };
  NodeId leaf = kNoNode;
  Kind kind = Kind::empty_leaf;
};

struct ValidationReport {
  std::vector<LeafViolation> violations;
  bool reasonable() const { return violations.empty(); }
};

/// Flags empty leaves and leaves whose label is not a most frequent label of
/// their examples. Throws StructuralError for an ill-formed tree.
inline ValidationReport validate_reasonable(const DecisionTree& tree, const Dataset& data) {
  tree.check_structure(data.d());
  auto counts = node_label_counts(tree, data);
  ValidationReport report;
  tree.for_each_preorder([&](NodeId v) {
    const Node& n = tree[v];
    if (!n.leaf) return;
    const LabelCounts& c = counts[v];
    if (c.total() == 0)
      report.violations.push_back({v, LeafViolation::Kind::empty_leaf});
    else if (c.of(n.label) < c.of(other(n.label)))
      report.violations.push_back({v, LeafViolation::Kind::minority_label});
  });
  return report;
}

inline bool is_reasonable(const DecisionTree& tree, const Dataset& data) {
  return validate_reasonable(tree, data).reasonable();
}

// ---------------------------------------------------------------------------
// Problem statement
// ---------------------------------------------------------------------------

enum class Operation { replacement, raising };
enum class Variant { exact, at_least };

inline const char* to_string(Operation o) { return o == Operation::replacement ? "replacement" : "raising"; }
inline const char* to_string(Variant v) { return v == Variant::exact ? "exact" : "at_least"; }

struct SolveSpec {
  Operation operation = Operation::raising;
  Variant variant = Variant::exact;
  int k = 0;
  int t = 0;
  friend bool operator==(const SolveSpec&, const SolveSpec&) = default;
};

}  // namespace prunex
