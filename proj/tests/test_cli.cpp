#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "helpers.hpp"

namespace fs = std::filesystem;
using namespace prunex;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("prunex_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string at(const std::string& name) const { return (dir / name).string(); }
  void write(const std::string& name, const std::string& text) const { std::ofstream(dir / name) << text; }
  fs::path dir;
};

}  // namespace

TEST_F(Cli, GenNonMonotoneAndPareto) {
  ASSERT_EQ(run({"gen", "nonmono", "-k", "2", "-o", at("nm")}).code, 0);
  EXPECT_TRUE(fs::exists(dir / "nm" / "data.csv"));
  Outcome exact = run({"pareto", "raise", "--tree", at("nm/tree.json"), "--data", at("nm/data.csv")});
  ASSERT_EQ(exact.code, 0) << exact.err;
  EXPECT_EQ(exact.out, "k,min_errors,variant\n0,0,exact\n1,1,exact\n2,0,exact\n3,2,exact\n");
  Outcome at_least =
      run({"pareto", "raise", "--variant", "at_least", "--tree", at("nm/tree.json"), "--data", at("nm/data.csv")});
  EXPECT_EQ(at_least.out, "k,min_errors,variant\n0,0,at_least\n1,0,at_least\n2,0,at_least\n3,2,at_least\n");
  setenv("PRUNEX_THREADS", "2", 1);
  Outcome per = run({"pareto", "raise", "--per-budget", "--tree", at("nm/tree.json"), "--data", at("nm/data.csv")});
  unsetenv("PRUNEX_THREADS");
  EXPECT_EQ(per.out, exact.out);
  Outcome oracle = run({"oracle", "--op", "raise", "--tree", at("nm/tree.json"), "--data", at("nm/data.csv")});
  EXPECT_EQ(oracle.out, exact.out);
}

TEST_F(Cli, PruneSummaryAndWitness) {
  ASSERT_EQ(run({"gen", "nonmono", "-k", "3", "-o", at("nm")}).code, 0);
  const std::string tree = at("nm/tree.json"), data = at("nm/data.csv");
  for (std::string solver : {"boxdp", "fptk"}) {
    Outcome r = run({"prune", "raise", "--tree", tree, "--data", data, "--k", "3", "--t", "0", "--solver", solver, "-o",
                 at("w.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = nlohmann::json::parse(r.out);
    EXPECT_TRUE(j["feasible"].get<bool>());
    EXPECT_EQ(j["min_errors"].get<int>(), 0);
    EXPECT_EQ(j["pruned_nodes"].get<int>(), 3);
    EXPECT_TRUE(j.contains("wall_ms"));
    TreeDocument w = read_tree(at("w.json"));
    EXPECT_EQ(w.tree.size(), 2u);
  }
  Outcome infeasible = run({"prune", "raise", "--tree", tree, "--data", data, "--k", "1", "--t", "0"});
  EXPECT_EQ(infeasible.code, 1);
  auto summary = nlohmann::json::parse(infeasible.out);
  EXPECT_FALSE(summary["feasible"].get<bool>());
  EXPECT_EQ(summary["min_errors"].get<int>(), 1);
  Outcome loose = run({"prune", "raise", "--tree", tree, "--data", data, "--k", "4", "--t", "5"});
  EXPECT_EQ(loose.code, 0);
  summary = nlohmann::json::parse(loose.out);
  EXPECT_EQ(summary["min_errors"].get<int>(), 2);
  EXPECT_EQ(summary["pruned_nodes"].get<int>(), 4);
  Outcome subsets = run({"prune", "raise", "--tree", tree, "--data", data, "--k", "1", "--t", "0", "--variant", "at_least",
                     "--solver", "subsets", "--summary", at("s.json")});
  EXPECT_EQ(subsets.code, 0);
  EXPECT_TRUE(nlohmann::json::parse(slurp(dir / "s.json"))["feasible"].get<bool>());
  Outcome rep = run({"prune", "rep", "--tree", tree, "--data", data, "--k", "5", "--t", "2"});
  EXPECT_EQ(rep.code, 0) << rep.err;
}

TEST_F(Cli, InputErrors) {
  ASSERT_EQ(run({"gen", "nonmono", "-k", "2", "-o", at("nm")}).code, 0);
  const std::string tree = at("nm/tree.json"), data = at("nm/data.csv");
  EXPECT_EQ(run({"pareto", "rep", "--variant", "exact", "--tree", tree, "--data", data}).code, 2);
  EXPECT_EQ(run({"prune", "raise", "--tree", tree, "--data", at("missing.csv"), "--k", "1", "--t", "0"}).code, 2);
  EXPECT_EQ(run({"prune", "bogus", "--tree", tree, "--data", data, "--k", "1", "--t", "0"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  write("bad.json", "{\"d\":1,\"root\":\"a\",\"nodes\":{}}");
  Outcome bad = run({"validate", "--tree", at("bad.json"), "--data", data});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("a"), std::string::npos);
  write("ragged.csv", "x,c\n1,blue\n2\n");
  EXPECT_EQ(run({"induce", "--data", at("ragged.csv")}).code, 2);
  EXPECT_EQ(run({"prune", "raise", "--tree", tree, "--data", data, "--k", "1", "--t", "0", "--solver", "fptk",
                 "--variant", "at_least"})
                .code,
            2);
}

TEST_F(Cli, OracleCap) {
  ASSERT_EQ(run({"gen", "nonmono", "-k", "6", "-o", at("nm")}).code, 0);
  Outcome r = run({"oracle", "--op", "raise", "--cap", "5", "--tree", at("nm/tree.json"), "--data", at("nm/data.csv")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("11"), std::string::npos);
}

TEST_F(Cli, InduceValidateClassify) {
  write("d.csv", "x,y,class\n0,0,a\n0,1,b\n1,0,b\n1,1,a\n2,2,a\n");
  ASSERT_EQ(run({"induce", "--data", at("d.csv"), "-o", at("t.json")}).code, 0);
  Outcome v = run({"validate", "--tree", at("t.json"), "--data", at("d.csv")});
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find("reasonable"), std::string::npos);
  Outcome naive = run({"classify", "--tree", at("t.json"), "--data", at("d.csv")});
  Outcome hld = run({"classify", "--hld", "--tree", at("t.json"), "--data", at("d.csv")});
  EXPECT_EQ(naive.code, 0);
  EXPECT_EQ(naive.out, hld.out);
  EXPECT_EQ(naive.out.substr(0, 16), "id,predicted,lea");

  write("leaf.json", R"({"d":2,"root":"a","nodes":{"a":{"kind":"leaf","class":"red"}}})");
  Outcome unreasonable = run({"validate", "--tree", at("leaf.json"), "--data", at("d.csv")});
  EXPECT_EQ(unreasonable.code, 1);
}

TEST_F(Cli, ReductionGenerators) {
  write("g.txt", "3\n0 1\n1 2\n");
  ASSERT_EQ(run({"gen", "indset", "--graph", at("g.txt"), "--kappa", "2", "-o", at("is")}).code, 0);
  auto spec = nlohmann::json::parse(slurp(dir / "is" / "spec.json"));
  EXPECT_TRUE(spec["truth"].get<bool>());
  Outcome p = run({"prune", "raise", "--tree", at("is/tree.json"), "--data", at("is/data.csv"), "--k",
               std::to_string(spec["k"].get<int>()), "--t", std::to_string(spec["t"].get<int>())});
  EXPECT_EQ(p.code, 0);

  write("s.txt", "2\n0\n1\n");
  ASSERT_EQ(run({"gen", "hitset", "--sets", at("s.txt"), "--kappa", "1", "-o", at("hs")}).code, 0);
  spec = nlohmann::json::parse(slurp(dir / "hs" / "spec.json"));
  EXPECT_FALSE(spec["truth"].get<bool>());
  write("bad.txt", "2\n0 x\n");
  EXPECT_EQ(run({"gen", "hitset", "--sets", at("bad.txt"), "--kappa", "1", "-o", at("hs2")}).code, 2);
}

TEST_F(Cli, RandomGenerationIsDeterministic) {
  ASSERT_EQ(run({"gen", "random", "--seed", "7", "--n", "40", "--d", "3", "-o", at("a")}).code, 0);
  ASSERT_EQ(run({"gen", "random", "--seed", "7", "--n", "40", "--d", "3", "-o", at("b")}).code, 0);
  EXPECT_EQ(slurp(dir / "a" / "data.csv"), slurp(dir / "b" / "data.csv"));
  EXPECT_EQ(slurp(dir / "a" / "tree.json"), slurp(dir / "b" / "tree.json"));
  Outcome f1 = run({"pareto", "raise", "--tree", at("a/tree.json"), "--data", at("a/data.csv")});
  Outcome f2 = run({"pareto", "raise", "--tree", at("a/tree.json"), "--data", at("a/data.csv")});
  EXPECT_EQ(f1.out, f2.out);
}

TEST_F(Cli, Compare) {
  ASSERT_EQ(run({"gen", "random", "--seed", "3", "--n", "30", "-o", at("r")}).code, 0);
  Outcome r = run({"compare", "--op", "raise", "--tree", at("r/tree.json"), "--data", at("r/data.csv"), "--name", "r3"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  EXPECT_EQ(header, "dataset,s,k_heur,t_heur,k_star,t_star");
  EXPECT_EQ(row.substr(0, 3), "r3,");
  int s, kh, th, ks, ts;
  char c;
  std::istringstream fields(row.substr(3));
  fields >> s >> c >> kh >> c >> th >> c >> ks >> c >> ts;
  EXPECT_GE(ks, kh);
  EXPECT_LE(ts, th);
}

TEST_F(Cli, TimeBudgetExitCode) {
  ASSERT_EQ(run({"gen", "random", "--seed", "42", "--n", "600", "--d", "10", "--value-range", "10", "--min-leaf", "6",
                 "-o", at("big")})
                .code,
            0);
  Outcome r = run({"pareto", "raise", "--time-budget", "1", "--tree", at("big/tree.json"), "--data", at("big/data.csv")});
  EXPECT_EQ(r.code, 3);
  EXPECT_FALSE(r.err.empty());
}
