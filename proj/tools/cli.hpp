#pragma once

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "prunex.hpp"

namespace prunex::cli {

enum ExitCode : int { kExitOk = 0, kExitInfeasible = 1, kExitInputError = 2, kExitTimeBudget = 3 };

namespace detail {

struct Loaded {
  Dataset data;
  DecisionTree tree;
};

inline Loaded load_pair(const std::string& tree_path, const std::string& data_path, const CsvOptions& csv) {
  Dataset data = load_dataset_csv(data_path, csv);
  TreeDocument doc = read_tree(tree_path);
  if (doc.d != data.d())
    throw ParseError("tree document has d = " + std::to_string(doc.d) + " but the dataset has " +
                     std::to_string(data.d()) + " features");
  return {std::move(data), std::move(doc.tree)};
}

/// Writes to the named file, or to `fallback` when the path is empty or "-".
template <class Fn>
void emit(const std::string& path, std::ostream& fallback, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(fallback);
    return;
  }
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  fn(out);
}

inline Variant parse_variant(const std::string& s) { return s == "at_least" ? Variant::at_least : Variant::exact; }

inline Operation parse_op(const std::string& s) { return s == "rep" ? Operation::replacement : Operation::raising; }

inline std::optional<std::chrono::milliseconds> budget_of(long long ms) {
  if (ms <= 0) return std::nullopt;
  return std::chrono::milliseconds(ms);
}

inline unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("PRUNEX_THREADS")) {
    try {
      long v = std::stol(env);
      if (v > 0) n = std::min<unsigned>(n, static_cast<unsigned>(v));
    } catch (const std::exception&) {
      throw ParseError(std::string("PRUNEX_THREADS must be a positive integer, got '") + env + "'");
    }
  }
  return n;
}

/// Raising front computed one budget at a time on a worker pool.
inline ParetoFront raising_front_per_budget(const DecisionTree& tree, const Dataset& data, Variant variant,
                                            BoxDpOptions opts) {
  const int s = static_cast<int>(tree.size());
  std::vector<int> values(static_cast<std::size_t>(s) + 1, kInfeasible);
  std::mutex mu;
  std::exception_ptr failure;
  int next = 0;
  auto work = [&] {
    for (;;) {
      int k;
      {
        std::lock_guard lock(mu);
        if (next > s || failure) return;
        k = next++;
      }
      try {
        RaisingBudgetDp dp(tree, data, variant, opts);
        values[static_cast<std::size_t>(k)] = dp.solve(k, 0).min_errors;
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  unsigned n = std::min<unsigned>(worker_count(), static_cast<unsigned>(s + 1));
  for (unsigned i = 0; i < n; ++i) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return ParetoFront{std::move(values)};
}

inline void write_spec_json(const std::string& path, const SolveSpec& spec, bool truth) {
  nlohmann::json j = {{"operation", to_string(spec.operation)},
                      {"variant", to_string(spec.variant)},
                      {"k", spec.k},
                      {"t", spec.t},
                      {"truth", truth}};
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << j.dump(2) << '\n';
}

/// First line: universe size; every further non-empty line: one set.
inline std::pair<int, std::vector<std::vector<int>>> parse_set_system(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int universe = -1;
  std::vector<std::vector<int>> sets;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<int> items;
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        int v = std::stoi(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        items.push_back(v);
      } catch (const std::exception&) {
        throw ParseError("non-integer token '" + tok + "' in set system");
      }
    }
    if (items.empty()) continue;
    if (universe < 0) {
      if (items.size() != 1 || items[0] < 0) throw ParseError("set system must start with the universe size");
      universe = items[0];
      continue;
    }
    sets.push_back(std::move(items));
  }
  if (universe < 0) throw ParseError("empty set system");
  return {universe, std::move(sets)};
}

struct CompareRow {
  std::string name;
  int s;
  int k_heur, t_heur, k_star, t_star;
};

inline CompareRow compare_instance(const std::string& name, const DecisionTree& tree, const Dataset& data,
                                   Operation op, BoxDpOptions opts) {
  HeuristicResult h = op == Operation::replacement ? heuristic_replacement(tree, data) : heuristic_raising(tree, data);
  ParetoFront exact = op == Operation::replacement ? pareto_replacement(tree, data)
                                                   : pareto_raising(tree, data, Variant::exact, opts);
  ParetoFront at_least = exact.suffix_min();
  CompareRow row{name, static_cast<int>(tree.size()), h.k_used, h.t_result, 0, 0};
  row.k_star = exact.max_pruned_within(h.t_result);
  row.t_star = at_least[static_cast<std::size_t>(h.k_used)];
  return row;
}

}  // namespace detail

/// Runs one prunex command line; args exclude the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Optimal post-pruning of binary decision trees", "prunex"};
  app.require_subcommand(1);

  std::string tree_path, data_path, output, summary_path, class_col, variant_s = "exact", op_s, kind, solver = "boxdp";
  bool dedup = false, hld = false, per_budget = false, variant_given = false;
  int k = 0, t = 0, min_leaf = 1, max_depth = -1, cap = kDefaultOracleCap, kappa = 0;
  long long time_budget_ms = 0;
  std::uint64_t seed = 1;
  RandomParams rp;
  std::string graph_path, sets_path;
  std::vector<std::string> trees, datas, names;

  auto add_data_opts = [&](CLI::App* sub) {
    sub->add_option("--class-col", class_col, "Class column name (default: last column)");
    sub->add_flag("--dedup", dedup, "Drop later examples contradicting an earlier identical one");
  };
  auto add_pair = [&](CLI::App* sub) {
    sub->add_option("--tree", tree_path, "Tree document (JSON)")->required();
    sub->add_option("--data", data_path, "Dataset CSV")->required();
    add_data_opts(sub);
  };
  auto add_variant = [&](CLI::App* sub) {
    sub->add_option("--variant", variant_s, "exact or at_least (raising only)")
        ->check(CLI::IsMember({"exact", "at_least"}));
  };
  const auto op_check = CLI::IsMember({"rep", "raise"});

  auto* induce = app.add_subcommand("induce", "Grow a greedy tree from a CSV");
  induce->add_option("--data", data_path, "Dataset CSV")->required();
  add_data_opts(induce);
  induce->add_option("--min-leaf", min_leaf, "Minimum examples per leaf")->check(CLI::PositiveNumber);
  induce->add_option("--max-depth", max_depth, "Maximum depth (default: unlimited)");
  induce->add_option("-o,--output", output, "Tree document to write (default: stdout)");

  auto* validate = app.add_subcommand("validate", "Report leaves that make a tree unreasonable");
  add_pair(validate);

  auto* classify = app.add_subcommand("classify", "Predict the class of every example");
  add_pair(classify);
  classify->add_flag("--hld", hld, "Use the heavy-path index");
  classify->add_option("-o,--output", output, "Predictions CSV (default: stdout)");

  auto* prune = app.add_subcommand("prune", "Solve one pruning instance");
  prune->add_option("operation", op_s, "rep or raise")->required()->check(op_check);
  add_pair(prune);
  prune->add_option("--k", k, "Pruned cuts")->required();
  prune->add_option("--t", t, "Allowed training errors")->required();
  add_variant(prune);
  prune->add_option("--solver", solver, "Raising solver: boxdp, fptk or subsets")
      ->check(CLI::IsMember({"boxdp", "fptk", "subsets"}));
  prune->add_option("--time-budget", time_budget_ms, "Abort after this many milliseconds");
  prune->add_option("-o,--output", output, "Witness tree document");
  prune->add_option("--summary", summary_path, "Summary JSON (default: stdout)");

  auto* pareto = app.add_subcommand("pareto", "Fewest errors for every number of pruned cuts");
  pareto->add_option("operation", op_s, "rep or raise")->required()->check(op_check);
  add_pair(pareto);
  add_variant(pareto);
  pareto->add_flag("--per-budget", per_budget, "Solve each budget separately on a worker pool (raise)");
  pareto->add_option("--time-budget", time_budget_ms, "Abort after this many milliseconds");
  pareto->add_option("-o,--output", output, "Front CSV (default: stdout)");

  auto* gen = app.add_subcommand("gen", "Generate an instance");
  gen->add_option("kind", kind, "nonmono, indset, hitset or random")
      ->required()
      ->check(CLI::IsMember({"nonmono", "indset", "hitset", "random"}));
  gen->add_option("-k", k, "Family parameter for nonmono");
  gen->add_option("--graph", graph_path, "Graph edge list for indset");
  gen->add_option("--sets", sets_path, "Set system for hitset");
  gen->add_option("--kappa", kappa, "Solution size for indset/hitset");
  gen->add_option("--seed", seed, "Seed for random");
  gen->add_option("--n", rp.n, "Examples for random")->check(CLI::PositiveNumber);
  gen->add_option("--d", rp.d, "Features for random")->check(CLI::PositiveNumber);
  gen->add_option("--value-range", rp.value_range, "Values per feature for random")->check(CLI::PositiveNumber);
  gen->add_option("--balance", rp.class_balance, "Probability of blue for random")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--min-leaf", min_leaf, "Minimum examples per leaf for random")->check(CLI::PositiveNumber);
  gen->add_option("--max-depth", max_depth, "Maximum depth for random");
  gen->add_option("-o,--output", output, "Output directory")->required();

  auto* oracle = app.add_subcommand("oracle", "Brute-force front of a small instance");
  add_pair(oracle);
  oracle->add_option("--op", op_s, "rep or raise")->required()->check(op_check);
  add_variant(oracle);
  oracle->add_option("--cap", cap, "Refuse trees with more cuts");
  oracle->add_option("-o,--output", output, "Front CSV (default: stdout)");

  auto* compare = app.add_subcommand("compare", "Heuristic against optimal pruning");
  compare->add_option("--tree", trees, "Tree documents")->required();
  compare->add_option("--data", datas, "Dataset CSVs, one per tree")->required();
  compare->add_option("--name", names, "Row names, one per tree (default: data file stem)");
  compare->add_option("--op", op_s, "rep or raise")->required()->check(op_check);
  add_data_opts(compare);
  compare->add_option("--time-budget", time_budget_ms, "Abort after this many milliseconds");
  compare->add_option("-o,--output", output, "Report CSV (default: stdout)");

  std::vector<std::string> argv_store{"prunex"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInputError;
  }

  for (auto* sub : app.get_subcommands())
    if (const auto* opt = sub->get_option_no_throw("--variant"); opt && opt->count() > 0) variant_given = true;
  const CsvOptions csv{true, true, dedup, class_col};
  const BoxDpOptions box_opts{detail::budget_of(time_budget_ms)};
  std::optional<int> depth_limit;
  if (max_depth >= 0) depth_limit = max_depth;

  try {
    if (variant_given && detail::parse_op(op_s) == Operation::replacement)
      throw ParseError("--variant applies to raising only");

    if (*induce) {
      Dataset data = load_dataset_csv(data_path, csv);
      DecisionTree tree = induce_greedy(data, {min_leaf, depth_limit});
      detail::emit(output, out, [&](std::ostream& os) { os << tree_to_json(tree, data.d()).dump(2) << '\n'; });
      return kExitOk;
    }

    if (*validate) {
      auto [data, tree] = detail::load_pair(tree_path, data_path, csv);
      ValidationReport report = validate_reasonable(tree, data);
      for (const auto& v : report.violations)
        out << "leaf " << v.leaf << ": "
            << (v.kind == LeafViolation::Kind::empty_leaf ? "no examples" : "label is not a majority label") << '\n';
      out << (report.reasonable() ? "reasonable" : "not reasonable") << '\n';
      return report.reasonable() ? kExitOk : kExitInfeasible;
    }

    if (*classify) {
      auto [data, tree] = detail::load_pair(tree_path, data_path, csv);
      HldIndex index;
      if (hld) index = build_hld_index(tree, data.d());
      detail::emit(output, out, [&](std::ostream& os) {
        os << "id,predicted,leaf\n";
        for (const auto& e : data.examples()) {
          Classification c = hld ? classify_hld(index, tree, e.values) : classify_naive(tree, e.values);
          os << e.id << ',' << to_string(c.label) << ',' << c.leaf << '\n';
        }
      });
      return kExitOk;
    }

    if (*prune) {
      auto [data, tree] = detail::load_pair(tree_path, data_path, csv);
      const auto start = std::chrono::steady_clock::now();
      const Operation op = detail::parse_op(op_s);
      const Variant variant = detail::parse_variant(variant_s);
      bool feasible = false;
      int min_errors = kInfeasible, pruned = 0;
      std::optional<DecisionTree> witness;
      if (op == Operation::replacement) {
        ReplacementResult r = solve_replacement(tree, data, k, t);
        feasible = r.feasible;
        min_errors = r.min_errors;
        if (r.min_errors < kInfeasible) {
          witness = r.witness;
          pruned = k;
        }
      } else {
        RaisingResult r;
        if (solver == "fptk") {
          if (variant != Variant::exact) throw ParseError("--solver fptk supports --variant exact only");
          r = solve_raising_exact_fptk(tree, data, k, t, box_opts);
        } else if (solver == "subsets") {
          if (variant != Variant::at_least) throw ParseError("--solver subsets supports --variant at_least only");
          r = solve_raising_subsets(tree, data, k, t);
        } else {
          r = solve_raising_boxdp(tree, data, {Operation::raising, variant, k, t}, box_opts);
        }
        feasible = r.feasible;
        min_errors = r.min_errors;
        if (r.min_errors < kInfeasible) {
          if (!is_prunable_to(tree, r.witness)) throw Error("witness is not reachable by raising");
          witness = r.witness;
          pruned = r.pruned;
        }
      }
      if (witness && count_errors(*witness, data) != min_errors)
        throw Error("witness error count does not match the reported minimum");
      const auto wall = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
      if (witness && !output.empty()) write_tree(output, *witness, data.d());
      nlohmann::json summary = {{"feasible", feasible},
                                {"k", k},
                                {"t", t},
                                {"min_errors", min_errors < kInfeasible ? nlohmann::json(min_errors) : nlohmann::json()},
                                {"pruned_nodes", pruned},
                                {"wall_ms", wall.count()}};
      detail::emit(summary_path, out, [&](std::ostream& os) { os << summary.dump(2) << '\n'; });
      return feasible ? kExitOk : kExitInfeasible;
    }

    if (*pareto) {
      auto [data, tree] = detail::load_pair(tree_path, data_path, csv);
      const Operation op = detail::parse_op(op_s);
      const Variant variant = detail::parse_variant(variant_s);
      ParetoFront front;
      std::string label;
      if (op == Operation::replacement) {
        front = pareto_replacement(tree, data);
      } else if (per_budget) {
        front = detail::raising_front_per_budget(tree, data, variant, box_opts);
        label = to_string(variant);
      } else {
        front = pareto_raising(tree, data, variant, box_opts);
        label = to_string(variant);
      }
      detail::emit(output, out, [&](std::ostream& os) { write_front_csv(os, front, label); });
      return kExitOk;
    }

    if (*gen) {
      std::filesystem::create_directories(output);
      const auto dir = std::filesystem::path(output);
      auto save = [&](const Dataset& data, const DecisionTree& tree) {
        write_dataset_csv((dir / "data.csv").string(), data);
        write_tree((dir / "tree.json").string(), tree, data.d());
      };
      if (kind == "nonmono") {
        if (k < 2) throw ParseError("gen nonmono needs -k >= 2");
        Instance inst = gen_nonmonotone(k);
        save(inst.data, inst.tree);
      } else if (kind == "indset") {
        if (graph_path.empty()) throw ParseError("gen indset needs --graph");
        ReductionInstance inst = gen_independent_set(read_graph(graph_path), kappa);
        save(inst.data, inst.tree);
        detail::write_spec_json((dir / "spec.json").string(), inst.spec, inst.truth);
      } else if (kind == "hitset") {
        if (sets_path.empty()) throw ParseError("gen hitset needs --sets");
        auto [universe, sets] = detail::parse_set_system(prunex::detail::read_file(sets_path));
        ReductionInstance inst;
        try {
          inst = gen_hitting_set(universe, sets, kappa);
        } catch (const std::invalid_argument& e) {
          throw ParseError(e.what());
        }
        save(inst.data, inst.tree);
        detail::write_spec_json((dir / "spec.json").string(), inst.spec, inst.truth);
      } else {
        rp.min_leaf = min_leaf;
        rp.max_depth = depth_limit;
        Instance inst = gen_random(seed, rp);
        save(inst.data, inst.tree);
      }
      return kExitOk;
    }

    if (*oracle) {
      auto [data, tree] = detail::load_pair(tree_path, data_path, csv);
      const Operation op = detail::parse_op(op_s);
      const Variant variant = detail::parse_variant(variant_s);
      ParetoFront front = oracle_pareto(tree, data, op, variant, cap);
      detail::emit(output, out, [&](std::ostream& os) {
        write_front_csv(os, front, op == Operation::raising ? to_string(variant) : "");
      });
      return kExitOk;
    }

    if (*compare) {
      if (trees.size() != datas.size()) throw ParseError("--tree and --data must be given the same number of times");
      if (!names.empty() && names.size() != trees.size()) throw ParseError("--name must be given once per tree");
      std::vector<detail::CompareRow> rows;
      for (std::size_t i = 0; i < trees.size(); ++i) {
        auto [data, tree] = detail::load_pair(trees[i], datas[i], csv);
        std::string row_name = names.empty() ? std::filesystem::path(datas[i]).stem().string() : names[i];
        rows.push_back(detail::compare_instance(row_name, tree, data, detail::parse_op(op_s), box_opts));
      }
      detail::emit(output, out, [&](std::ostream& os) {
        os << "dataset,s,k_heur,t_heur,k_star,t_star\n";
        for (const auto& r : rows)
          os << r.name << ',' << r.s << ',' << r.k_heur << ',' << r.t_heur << ',' << r.k_star << ',' << r.t_star << '\n';
      });
      return kExitOk;
    }
  } catch (const TimeBudgetExceeded& e) {
    err << "prunex: " << e.what() << '\n';
    return kExitTimeBudget;
  } catch (const CapExceeded& e) {
    err << "prunex: " << e.what() << '\n';
    return kExitInputError;
  } catch (const ParseError& e) {
    err << "prunex: " << e.what() << '\n';
    return kExitInputError;
  } catch (const StructuralError& e) {
    err << "prunex: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    err << "prunex: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "prunex: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace prunex::cli
