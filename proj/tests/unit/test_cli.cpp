#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ggmsel_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CliResult run(const std::string& args) const {
    const fs::path out = dir_ / "stdout.txt";
    const fs::path err = dir_ / "stderr.txt";
    const std::string cmd =
        std::string("\"") + GGMSEL_CLI_PATH + "\" " + args + " >\"" + out.string() + "\" 2>\"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  fs::path path(const std::string& name) const { return dir_ / name; }

  void write(const std::string& name, const std::string& content) const {
    std::ofstream(path(name), std::ios::binary) << content;
  }

  fs::path dir_;
};

int data_lines(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  int count = 0;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') ++count;
  return count;
}

}  // namespace

TEST_F(Cli, PenTableRowsAndDeterminism) {
  const CliResult a = run("pen-table --n 15 --p 10 --K 2 --dmax 4");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(data_lines(a.out), 6);  // header + 5 rows
  EXPECT_NE(a.out.find("d,pen\n0,0\n"), std::string::npos);
  EXPECT_NE(a.out.find("# n=15"), std::string::npos);
  EXPECT_EQ(run("pen-table --n 15 --p 10 --K 2 --dmax 4").out, a.out);
}

TEST_F(Cli, PenTableUndefinedPenaltyIsUsageError) {
  const CliResult r = run("pen-table --n 15 --p 10 --dmax 14");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("penalty undefined: n−d−1 ≤ 0"), std::string::npos) << r.err;
}

TEST_F(Cli, MissingRequiredFlagsAreUsageErrors) {
  EXPECT_EQ(run("pen-table --n 15").code, 2);
  EXPECT_EQ(run("simulate --n 15 --p 10 --graphs 1 --reps 1").code, 2);
  EXPECT_EQ(run("simulate --q 0.1 --s 1 --graphs 1 --reps 1").code, 2);
  EXPECT_EQ(run("estimate --data x.csv --strategy greedy").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
}

TEST_F(Cli, EstimateFindsCollinearPair) {
  std::ostringstream csv;
  csv << "a,b,c,d\n";
  const double noise[] = {0.3, -1.2, 0.8, 1.9, -0.4, 0.1, -2.2, 0.7, 1.1, -0.9, 0.5, -0.3, 1.4, -1.6, 0.2};
  const double other[] = {1.0, 0.2, -0.7, 0.4, 1.3, -1.1, 0.6, -0.2, -1.5, 0.9, 0.05, 1.7, -0.6, 0.35, -0.8};
  const double third[] = {-0.5, 0.9, 0.1, -1.3, 0.7, 1.6, -0.4, 0.25, -0.9, 1.2, -1.8, 0.45, 0.3, -0.1, 1.05};
  for (int i = 0; i < 15; ++i) {
    csv << noise[i] << ',' << other[i] << ',' << 2.0 * noise[i] + 0.01 * third[i] << ',' << third[i] << '\n';
  }
  write("data.csv", csv.str());
  const std::string args = "estimate --data " + path("data.csv").string() + " --family deg-directed --dmax 2 --K 2";
  const CliResult a = run(args + " --out " + path("a.json").string());
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_NE(a.err.find("degree"), std::string::npos);
  const std::string json = slurp(path("a.json"));
  const nlohmann::json doc = nlohmann::json::parse(json);
  const auto arcs = doc.at("arcs").get<std::vector<std::pair<int, int>>>();
  EXPECT_NE(std::find(arcs.begin(), arcs.end(), std::pair{1, 3}), arcs.end()) << json;
  EXPECT_NE(std::find(arcs.begin(), arcs.end(), std::pair{3, 1}), arcs.end()) << json;
  EXPECT_TRUE(doc.contains("theta"));
  ASSERT_EQ(run(args + " --out " + path("b.json").string()).code, 0);
  EXPECT_EQ(slurp(path("b.json")), json);
}

TEST_F(Cli, EstimateReportsParseErrorsWithLine) {
  write("bad.csv", "1,2,3\n4,5,6\n7,x,9\n1,2,3\n");
  const CliResult r = run("estimate --data " + path("bad.csv").string());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("bad.csv:3:"), std::string::npos) << r.err;
}

TEST_F(Cli, EstimateRejectsInfeasibleFamilyStrategyPair) {
  write("ok.csv", "1,2,3\n4,5,7\n7,1,9\n1,2,2\n5,5,5\n");
  EXPECT_EQ(run("estimate --data " + path("ok.csv").string() + " --family deg --strategy exact_decomposed").code, 2);
}

TEST_F(Cli, SimulateSmokeWritesSelfDescribingFiles) {
  const CliResult r = run("simulate --n 15 --p 10 --q 0.1 --graphs 1 --reps 2 --methods ours,mb --seed 9 --threads 1 --out " +
                    path("smoke").string());
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(path("smoke.csv"));
  EXPECT_NE(csv.find("# seed=9"), std::string::npos);
  EXPECT_NE(csv.find("mb,summary,"), std::string::npos);
  const std::string json = slurp(path("smoke.json"));
  EXPECT_EQ(nlohmann::json::parse(json).at("config").at("seed"), 9) << json.substr(0, 400);
  EXPECT_NE(r.out.find("power"), std::string::npos);
}

TEST_F(Cli, SimulateBytesIndependentOfThreads) {
  const std::string base = "simulate --n 15 --p 8 --s 1 --graphs 4 --reps 3 --K 2,2.5 --methods ours,mb --seed 3";
  ASSERT_EQ(run(base + " --threads 1 --out " + path("t1").string()).code, 0);
  ASSERT_EQ(run(base + " --threads 4 --out " + path("t4").string()).code, 0);
  EXPECT_EQ(slurp(path("t1.csv")), slurp(path("t4.csv")));
  EXPECT_EQ(slurp(path("t1.json")), slurp(path("t4.json")));
}

TEST_F(Cli, ConfigFileWithFlagOverride) {
  write("run.conf", "# benchmark\nn = 15\np = 10\nq = 0.1\ngraphs = 1\nreps = 1\nseed = 5\n");
  const CliResult r = run("--config " + path("run.conf").string() + " simulate --seed 6 --threads 1 --out " +
                    path("cfg").string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(slurp(path("cfg.csv")).find("# seed=6"), std::string::npos);
  write("broken.conf", "n 15\n");
  EXPECT_EQ(run("--config " + path("broken.conf").string() + " simulate").code, 2);
}

TEST_F(Cli, Prop1WarnsWhenHypothesisFails) {
  const CliResult r = run("prop1 --n 20 --p 12 --dmax 3 --reps 2 --out " + path("prop1.csv").string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("warning"), std::string::npos) << r.err;
  const std::string csv = slurp(path("prop1.csv"));
  EXPECT_NE(csv.find("penalty,kind,size,count\n"), std::string::npos);
  EXPECT_GT(data_lines(csv), 1);
}
