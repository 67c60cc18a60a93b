#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "prunex/errors.hpp"
#include "prunex/model.hpp"
#include "prunex/rational.hpp"

namespace prunex {

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

/// Splits CSV text into rows of cells. Handles double-quoted cells with ""
/// escapes and CRLF line ends; blank lines are skipped.
inline std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false, any = false;
  auto end_row = [&] {
    if (any || !cell.empty() || !row.empty()) {
      row.push_back(std::move(cell));
      rows.push_back(std::move(row));
    }
    row.clear();
    cell.clear();
    any = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = any = true;
    } else if (c == ',') {
      row.push_back(std::move(cell));
      cell.clear();
      any = true;
    } else if (c == '\n') {
      end_row();
    } else if (c != '\r') {
      cell += c;
    }
  }
  if (quoted) throw ParseError("unterminated quoted cell");
  end_row();
  return rows;
}

struct CsvOptions {
  bool binarize_categorical = true;
  bool binarize_class = true;
  bool dedup_contradictions = false;
  std::string class_column;  ///< empty: last column
};

namespace detail {

inline std::optional<Rational> try_number(const std::string& s) {
  try {
    return parse_rational(s);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

/// Builds a dataset from CSV text with a header row.
///
/// A column whose cells all parse as numbers is numeric; any other column is
/// categorical and becomes one 0/1 feature "col=value" per value (sorted).
/// The class column maps the most frequent class to blue (ties: smallest
/// name) and everything else to red, unless its values are already only
/// "blue"/"red".
inline Dataset parse_dataset_csv(std::string_view text, const CsvOptions& opt = {}) {
  auto rows = parse_csv(text);
  if (rows.empty()) throw ParseError("empty CSV");
  const auto header = rows.front();
  const std::size_t width = header.size();
  for (std::size_t r = 1; r < rows.size(); ++r)
    if (rows[r].size() != width)
      throw ParseError("row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) + " cells, expected " +
                       std::to_string(width));
  std::size_t class_col = width - 1;
  if (!opt.class_column.empty()) {
    auto it = std::find(header.begin(), header.end(), opt.class_column);
    if (it == header.end()) throw ParseError("no class column named " + opt.class_column);
    class_col = static_cast<std::size_t>(it - header.begin());
  }
  if (width < 1) throw ParseError("CSV has no columns");

  // Class mapping.
  std::map<std::string, std::size_t> class_sizes;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& c = rows[r][class_col];
    if (c.empty()) throw ParseError("row " + std::to_string(r) + " has an empty class");
    ++class_sizes[c];
  }
  bool literal = std::all_of(class_sizes.begin(), class_sizes.end(),
                             [](const auto& kv) { return parse_label(kv.first).has_value(); });
  if (!opt.binarize_class && !literal) throw ParseError("class values must be blue/red without binarization");
  std::string blue_class;
  std::size_t best = 0;
  for (const auto& [name, count] : class_sizes)
    if (count > best) best = count, blue_class = name;  // map order: ties keep the smallest name
  auto label_of = [&](const std::string& c) {
    if (literal) return *parse_label(c);
    return c == blue_class ? Label::blue : Label::red;
  };

  // Feature columns.
  struct Column {
    std::size_t source;
    std::optional<std::string> category;  // indicator for this value
  };
  std::vector<Column> columns;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < width; ++c) {
    if (c == class_col) continue;
    std::optional<std::size_t> bad_row;
    for (std::size_t r = 1; r < rows.size() && !bad_row; ++r)
      if (!detail::try_number(rows[r][c])) bad_row = r;
    if (!bad_row) {
      columns.push_back({c, std::nullopt});
      names.push_back(header[c]);
      continue;
    }
    if (!opt.binarize_categorical)
      throw ParseError("row " + std::to_string(*bad_row) + ": non-numeric value '" + rows[*bad_row][c] +
                       "' in column " + header[c]);
    std::set<std::string> values;
    for (std::size_t r = 1; r < rows.size(); ++r) values.insert(rows[r][c]);
    for (const auto& v : values) {
      columns.push_back({c, v});
      names.push_back(header[c] + "=" + v);
    }
  }

  std::vector<Example> examples;
  std::map<std::vector<Rational>, Label> first_label;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    Example e;
    e.id = static_cast<int>(r - 1);
    e.label = label_of(rows[r][class_col]);
    for (const auto& col : columns) {
      const auto& cell = rows[r][col.source];
      e.values.push_back(col.category ? Rational(cell == *col.category ? 1 : 0) : *detail::try_number(cell));
    }
    if (opt.dedup_contradictions) {
      auto [it, inserted] = first_label.emplace(e.values, e.label);
      if (!inserted && it->second != e.label) continue;
    }
    examples.push_back(std::move(e));
  }
  return Dataset(columns.size(), std::move(examples), std::move(names));
}

inline Dataset load_dataset_csv(const std::string& path, const CsvOptions& opt = {}) {
  return parse_dataset_csv(detail::read_file(path), opt);
}

/// Header of feature names plus "class"; values in short exact form.
inline void write_dataset_csv(std::ostream& os, const Dataset& data) {
  for (const auto& name : data.feature_names()) os << name << ',';
  os << "class\n";
  for (const auto& e : data.examples()) {
    for (const auto& x : e.values) os << to_short_string(x) << ',';
    os << to_string(e.label) << '\n';
  }
}

inline void write_dataset_csv(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  write_dataset_csv(out, data);
}

// ---------------------------------------------------------------------------
// Tree documents
// ---------------------------------------------------------------------------

struct TreeDocument {
  DecisionTree tree;
  std::size_t d = 0;
};

inline nlohmann::json tree_to_json(const DecisionTree& tree, std::size_t d) {
  DecisionTree t = compact(tree);
  nlohmann::json nodes = nlohmann::json::object();
  for (std::size_t i = 0; i < t.node_count(); ++i) {
    const Node& n = t.node(static_cast<NodeId>(i));
    if (n.leaf)
      nodes[std::to_string(i)] = {{"kind", "leaf"}, {"class", to_string(n.label)}};
    else
      nodes[std::to_string(i)] = {{"kind", "cut"},
                                  {"feature", n.feature},
                                  {"threshold", to_fraction_string(n.threshold)},
                                  {"left", std::to_string(n.left)},
                                  {"right", std::to_string(n.right)}};
  }
  return {{"d", d}, {"root", std::to_string(t.root())}, {"nodes", nodes}};
}

namespace detail {

inline std::string id_text(const nlohmann::json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw ParseError("node reference must be a string or integer, got " + j.dump());
}

}  // namespace detail

inline TreeDocument tree_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("root") || !doc.contains("d"))
    throw ParseError("tree document needs d, root and nodes");
  const auto& nodes = doc["nodes"];
  if (!nodes.is_object()) throw ParseError("nodes must be an object");
  TreeDocument out;
  if (!doc["d"].is_number_integer() || doc["d"].get<long long>() < 0) throw ParseError("d must be a non-negative integer");
  out.d = doc["d"].get<std::size_t>();

  std::set<std::string> visiting, done;
  std::function<NodeId(const std::string&)> build = [&](const std::string& id) -> NodeId {
    if (!nodes.contains(id)) throw ParseError("node " + id + " is referenced but not defined");
    if (visiting.count(id) || done.count(id)) throw ParseError("node " + id + " is reached twice (cycle or shared child)");
    visiting.insert(id);
    const auto& n = nodes[id];
    std::string kind = n.value("kind", "");
    NodeId result;
    try {
      if (kind == "leaf") {
        auto label = parse_label(n.at("class").get<std::string>());
        if (!label) throw ParseError("node " + id + " has unknown class");
        result = out.tree.add_leaf(*label);
      } else if (kind == "cut") {
        int feature = n.at("feature").get<int>();
        if (feature < 0 || static_cast<std::size_t>(feature) >= out.d)
          throw ParseError("node " + id + " uses feature " + std::to_string(feature) + " outside [0, d)");
        Rational thr = n.at("threshold").is_string() ? parse_rational(n.at("threshold").get<std::string>())
                                                      : parse_rational(n.at("threshold").dump());
        NodeId l = build(detail::id_text(n.at("left")));
        NodeId r = build(detail::id_text(n.at("right")));
        result = out.tree.add_cut(feature, thr, l, r);
      } else {
        throw ParseError("node " + id + " has unknown kind '" + kind + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("node " + id + ": " + e.what());
    }
    visiting.erase(id);
    done.insert(id);
    return result;
  };
  NodeId root = build(detail::id_text(doc["root"]));
  out.tree.set_root(root);
  for (const auto& [id, _] : nodes.items())
    if (!done.count(id)) throw ParseError("node " + id + " is not reachable from the root");
  out.tree = compact(out.tree);
  return out;
}

inline TreeDocument parse_tree_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed tree document: ") + e.what());
  }
  return tree_from_json(doc);
}

inline TreeDocument read_tree(const std::string& path) { return parse_tree_json(detail::read_file(path)); }

inline void write_tree(const std::string& path, const DecisionTree& tree, std::size_t d) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << tree_to_json(tree, d).dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Domain reduction
// ---------------------------------------------------------------------------

struct ReducedInstance {
  Dataset data;
  DecisionTree tree;                ///< same shape, features renumbered
  std::vector<int> kept_features;   ///< original index of each remaining feature
};

/// Keeps only features some cut uses and maps each value to a representative
/// of its gap between consecutive tree thresholds (midpoints; one unit below
/// the smallest and above the largest). Every example reaches the same leaf.
inline ReducedInstance reduce_to_tree_domains(const Dataset& data, const DecisionTree& tree) {
  tree.check_structure(data.d());
  std::map<int, std::vector<Rational>> thresholds;
  tree.for_each_preorder([&](NodeId v) {
    const Node& n = tree[v];
    if (!n.leaf) thresholds[n.feature].push_back(n.threshold);
  });
  ReducedInstance out{Dataset(0, {}), DecisionTree{}, {}};
  std::map<int, int> local;
  std::vector<std::string> names;
  for (auto& [f, thr] : thresholds) {
    std::sort(thr.begin(), thr.end());
    thr.erase(std::unique(thr.begin(), thr.end()), thr.end());
    local[f] = static_cast<int>(out.kept_features.size());
    out.kept_features.push_back(f);
    names.push_back(data.feature_names()[static_cast<std::size_t>(f)]);
  }
  std::vector<Example> examples;
  for (const auto& e : data.examples()) {
    Example r{e.id, {}, e.label};
    for (int f : out.kept_features) {
      const auto& thr = thresholds[f];
      const Rational& x = e.values[static_cast<std::size_t>(f)];
      auto g = static_cast<std::size_t>(std::lower_bound(thr.begin(), thr.end(), x) - thr.begin());
      if (g == 0)
        r.values.push_back(thr.front() - 1);
      else if (g == thr.size())
        r.values.push_back(thr.back() + 1);
      else
        r.values.push_back(midpoint(thr[g - 1], thr[g]));
    }
    examples.push_back(std::move(r));
  }
  out.data = Dataset(out.kept_features.size(), std::move(examples), std::move(names));
  DecisionTree t = compact(tree);
  DecisionTree remapped;
  for (std::size_t i = 0; i < t.node_count(); ++i) {
    const Node& n = t.node(static_cast<NodeId>(i));
    if (n.leaf)
      remapped.add_leaf(n.label);
    else
      remapped.add_cut(local.at(n.feature), n.threshold, n.left, n.right);
  }
  remapped.set_root(t.root());
  out.tree = std::move(remapped);
  return out;
}

// ---------------------------------------------------------------------------
// Greedy induction
// ---------------------------------------------------------------------------

struct InduceOptions {
  int min_leaf = 1;
  std::optional<int> max_depth;
};

namespace detail {

inline double entropy(std::size_t blue, std::size_t red) {
  double n = static_cast<double>(blue + red);
  double h = 0;
  for (double c : {static_cast<double>(blue), static_cast<double>(red)})
    if (c > 0) h -= c / n * std::log2(c / n);
  return h;
}

}  // namespace detail

/// Top-down induction choosing the (feature, threshold) with the highest
/// information gain among Thr; ties go to the smaller feature, then the
/// smaller threshold. Impure nodes still split when the best gain is zero,
/// as long as some split leaves min_leaf examples on both sides.
inline DecisionTree induce_greedy(const Dataset& data, const InduceOptions& opt = {}) {
  DecisionTree tree;
  if (data.empty()) {
    tree.add_leaf(Label::blue);
    return tree;
  }
  const std::size_t min_leaf = static_cast<std::size_t>(std::max(opt.min_leaf, 1));

  std::function<NodeId(std::vector<std::size_t>, int)> grow = [&](std::vector<std::size_t> idx, int depth) -> NodeId {
    LabelCounts c;
    for (auto i : idx) c.add(data[i].label);
    Label majority = majority_label(c);
    bool stop = c.blue == 0 || c.red == 0 || (opt.max_depth && depth >= *opt.max_depth) || idx.size() < 2 * min_leaf;
    int best_f = -1;
    Rational best_thr;
    double best_gain = -1;
    if (!stop) {
      const double h = detail::entropy(static_cast<std::size_t>(c.blue), static_cast<std::size_t>(c.red));
      const double n = static_cast<double>(idx.size());
      for (std::size_t f = 0; f < data.d(); ++f) {
        std::vector<std::size_t> order = idx;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return data[a].values[f] < data[b].values[f]; });
        std::size_t pos = 0, lb = 0, lr = 0;
        for (const Rational& thr : data.thresholds(f)) {
          while (pos < order.size() && data[order[pos]].values[f] <= thr) {
            (data[order[pos]].label == Label::blue ? lb : lr)++;
            ++pos;
          }
          if (pos < min_leaf) continue;
          if (order.size() - pos < min_leaf) break;
          std::size_t rb = static_cast<std::size_t>(c.blue) - lb, rr = static_cast<std::size_t>(c.red) - lr;
          double gain = h - (static_cast<double>(pos) / n) * detail::entropy(lb, lr) -
                        (static_cast<double>(order.size() - pos) / n) * detail::entropy(rb, rr);
          if (gain > best_gain + 1e-12) {
            best_gain = gain;
            best_f = static_cast<int>(f);
            best_thr = thr;
          }
        }
      }
    }
    if (best_f < 0) return tree.add_leaf(majority);
    std::vector<std::size_t> left, right;
    for (auto i : idx) (data[i].values[static_cast<std::size_t>(best_f)] <= best_thr ? left : right).push_back(i);
    NodeId l = grow(std::move(left), depth + 1);
    NodeId r = grow(std::move(right), depth + 1);
    return tree.add_cut(best_f, best_thr, l, r);
  };

  std::vector<std::size_t> all(data.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  tree.set_root(grow(std::move(all), 0));
  return compact(tree);
}

}  // namespace prunex
