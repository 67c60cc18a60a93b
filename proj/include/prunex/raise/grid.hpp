#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include <boost/container_hash/hash.hpp>

#include "prunex/errors.hpp"
#include "prunex/model.hpp"

namespace prunex {

/// Box over the features a tree uses, in threshold-index coordinates:
/// entries [2f] = lo, [2f+1] = hi for local feature f. lo = -1 is -inf,
/// hi = c_f (number of tree thresholds of f) is +inf. An example whose gap
/// index in f is g (g = #thresholds below its value) is inside iff
/// lo < g <= hi.
using GridBox = std::vector<std::int16_t>;

struct GridBoxHash {
  std::size_t operator()(const GridBox& b) const { return boost::hash_range(b.begin(), b.end()); }
};

/// A tree and dataset compiled for the raising DPs: only features used by
/// some cut survive, values collapse to gap indices between the tree's
/// thresholds, and identical examples merge into weighted points.
class RaiseGrid {
 public:
  struct Point {
    std::vector<std::int16_t> gaps;
    LabelCounts counts;
  };

  RaiseGrid(const DecisionTree& tree, const Dataset& data) : tree_(&tree) {
    tree.check_structure(data.d());
    const std::size_t n = tree.node_count();

    std::map<int, std::vector<Rational>> thresholds;
    tree.for_each_preorder([&](NodeId v) {
      const Node& node = tree[v];
      if (!node.leaf) thresholds[node.feature].push_back(node.threshold);
    });
    for (auto& [feature, thr] : thresholds) {
      std::sort(thr.begin(), thr.end());
      thr.erase(std::unique(thr.begin(), thr.end()), thr.end());
      if (thr.size() >= 32000) throw Error("too many thresholds in one feature");
      local_of_[feature] = static_cast<int>(features_.size());
      features_.push_back(feature);
      thresholds_.push_back(thr);
    }

    cut_feature_.assign(n, -1);
    cut_index_.assign(n, -1);
    tree.for_each_preorder([&](NodeId v) {
      const Node& node = tree[v];
      if (node.leaf) return;
      int f = local_of_.at(node.feature);
      const auto& thr = thresholds_[static_cast<std::size_t>(f)];
      cut_feature_[v] = f;
      cut_index_[v] = static_cast<int>(std::lower_bound(thr.begin(), thr.end(), node.threshold) - thr.begin());
    });
    inner_ = tree.inner_counts();

    std::map<std::vector<std::int16_t>, LabelCounts> merged;
    for (const auto& e : data.examples()) {
      std::vector<std::int16_t> gaps(features_.size());
      for (std::size_t f = 0; f < features_.size(); ++f) {
        const auto& thr = thresholds_[f];
        const Rational& x = e.values[static_cast<std::size_t>(features_[f])];
        gaps[f] = static_cast<std::int16_t>(std::lower_bound(thr.begin(), thr.end(), x) - thr.begin());
      }
      merged[gaps].add(e.label);
    }
    points_.reserve(merged.size());
    for (auto& [gaps, counts] : merged) points_.push_back({gaps, counts});

    build_path_lists();
  }

  const DecisionTree& tree() const { return *tree_; }
  std::size_t features() const { return features_.size(); }
  int original_feature(std::size_t local) const { return features_[local]; }
  int threshold_count(std::size_t local) const { return static_cast<int>(thresholds_[local].size()); }
  int inner(NodeId v) const { return inner_[v]; }
  const std::vector<Point>& points() const { return points_; }

  GridBox full_box() const {
    GridBox b(2 * features_.size());
    for (std::size_t f = 0; f < features_.size(); ++f) {
      b[2 * f] = -1;
      b[2 * f + 1] = static_cast<std::int16_t>(thresholds_[f].size());
    }
    return b;
  }

  GridBox left_box(NodeId v, const GridBox& box) const {
    GridBox b = box;
    auto& hi = b[2 * static_cast<std::size_t>(cut_feature_[v]) + 1];
    hi = std::min<std::int16_t>(hi, static_cast<std::int16_t>(cut_index_[v]));
    return b;
  }

  GridBox right_box(NodeId v, const GridBox& box) const {
    GridBox b = box;
    auto& lo = b[2 * static_cast<std::size_t>(cut_feature_[v])];
    lo = std::max<std::int16_t>(lo, static_cast<std::int16_t>(cut_index_[v]));
    return b;
  }

  bool inside(const Point& p, const GridBox& box) const {
    for (std::size_t f = 0; f < features_.size(); ++f)
      if (p.gaps[f] <= box[2 * f] || p.gaps[f] > box[2 * f + 1]) return false;
    return true;
  }

  LabelCounts count_in(const GridBox& box) const {
    LabelCounts c;
    for (const auto& p : points_)
      if (inside(p, box)) c += p.counts;
    return c;
  }

  /// Misclassifications of leaf v on the examples inside box.
  int leaf_errors(NodeId v, const GridBox& box) const {
    return count_in(box).of(other((*tree_)[v].label));
  }

  int cut_feature(NodeId v) const { return cut_feature_[v]; }
  int cut_index(NodeId v) const { return cut_index_[v]; }

  /// Threshold indices of ancestors of v whose path continues right in
  /// feature f (lower bounds), strongest (largest) first, distinct.
  const std::vector<std::int16_t>& lower_list(NodeId v, std::size_t f) const { return lower_[v][f]; }
  /// Ancestors whose path continues left (upper bounds), strongest (smallest) first.
  const std::vector<std::int16_t>& upper_list(NodeId v, std::size_t f) const { return upper_[v][f]; }

  /// True when every bound of box at v is a sentinel or a threshold of a
  /// cut on the root-to-v path in the matching direction.
  bool uses_path_thresholds(NodeId v, const GridBox& box) const {
    for (std::size_t f = 0; f < features_.size(); ++f) {
      auto lo = box[2 * f];
      auto hi = box[2 * f + 1];
      const auto& L = lower_[v][f];
      const auto& U = upper_[v][f];
      if (lo != -1 && std::find(L.begin(), L.end(), lo) == L.end()) return false;
      if (hi != threshold_count(f) && std::find(U.begin(), U.end(), hi) == U.end()) return false;
    }
    return true;
  }

 private:
  void build_path_lists() {
    const std::size_t n = tree_->node_count();
    const std::size_t m = features_.size();
    lower_.assign(n, std::vector<std::vector<std::int16_t>>(m));
    upper_.assign(n, std::vector<std::vector<std::int16_t>>(m));
    tree_->for_each_preorder([&](NodeId v) {
      const Node& node = tree_->node(v);
      if (node.leaf) return;
      auto f = static_cast<std::size_t>(cut_feature_[v]);
      auto idx = static_cast<std::int16_t>(cut_index_[v]);
      lower_[node.left] = lower_[v];
      upper_[node.left] = upper_[v];
      lower_[node.right] = lower_[v];
      upper_[node.right] = upper_[v];
      auto& up = upper_[node.left][f];
      if (std::find(up.begin(), up.end(), idx) == up.end()) {
        up.push_back(idx);
        std::sort(up.begin(), up.end());
      }
      auto& lo = lower_[node.right][f];
      if (std::find(lo.begin(), lo.end(), idx) == lo.end()) {
        lo.push_back(idx);
        std::sort(lo.begin(), lo.end(), std::greater<>());
      }
    });
  }

  const DecisionTree* tree_;
  std::vector<int> features_;
  std::map<int, int> local_of_;
  std::vector<std::vector<Rational>> thresholds_;
  std::vector<int> cut_feature_;
  std::vector<int> cut_index_;
  std::vector<int> inner_;
  std::vector<Point> points_;
  std::vector<std::vector<std::vector<std::int16_t>>> lower_;
  std::vector<std::vector<std::vector<std::int16_t>>> upper_;
};

/// Wall-clock guard polled by the long-running solvers.
class Deadline {
 public:
  Deadline() = default;
  explicit Deadline(std::optional<std::chrono::milliseconds> budget) {
    if (budget) at_ = std::chrono::steady_clock::now() + *budget;
  }

  void poll() {
    if (!at_ || (++calls_ & 1023u) != 0) return;
    if (std::chrono::steady_clock::now() > *at_) throw TimeBudgetExceeded("time budget exhausted");
  }

 private:
  std::optional<std::chrono::steady_clock::time_point> at_;
  unsigned calls_ = 0;
};

}  // namespace prunex
