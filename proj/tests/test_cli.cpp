#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <nlohmann/json.hpp>

#include "maple/maple.hpp"

namespace fs = std::filesystem;
using namespace maple;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("maple_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string tmp(const std::string& name) const { return (dir_ / name).string(); }
  static std::string data(const std::string& name) { return std::string(MAPLE_TEST_DATA) + "/" + name; }

  CliRun run(const std::string& args) const {
    const std::string err_path = tmp("stderr.txt");
    const std::string cmd = std::string(MAPLE_CLI_PATH) + " " + args + " 2>" + err_path;
    CliRun r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    while (std::size_t k = std::fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, k);
    const int status = ::pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = read_file(err_path);
    return r;
  }

  fs::path dir_;
};

std::string error_tag_of(const CliRun& r) { return nlohmann::json::parse(r.err).at("error").get<std::string>(); }

}  // namespace

TEST_F(Cli, ExtractWritesPool) {
  const auto r = run("extract --instance " + data("sum4.json") + " --num-starts 50 --epochs 100 --out " +
                     tmp("pool.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("pool_size:"), std::string::npos);
  EXPECT_NE(r.out.find("ple_ms:"), std::string::npos);
  const auto pool = parse_pool(read_file(tmp("pool.json")));
  EXPECT_EQ(pool.n, 2u);
  for (const auto& g : pool.directions) EXPECT_EQ(g[0] + g[1], 0);
}

TEST_F(Cli, ExtractMissingFileIsIoError) {
  const auto r = run("extract --instance " + tmp("nope.json") + " --out " + tmp("pool.json"));
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(error_tag_of(r), "io");
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run("extract --instance " + data("sum4.json") + " --num-starts 0 --out " + tmp("p.json")).code, 2);
  EXPECT_EQ(run("extract --instance " + data("sum4.json") + " --bogus --out " + tmp("p.json")).code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("").code, 2);
}

TEST_F(Cli, SolveWorkedInstance) {
  const auto r = run("solve --instance " + data("sum4.json") + " --num-starts 100 --out " + tmp("report.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("best_objective: 0"), std::string::npos) << r.out;
  const auto report = parse_report(read_file(tmp("report.json")));
  ASSERT_TRUE(report.best.has_value());
  EXPECT_EQ(report.best->objective, 0.0);
  EXPECT_EQ(report.best->x, (IntVector{2, 2}));
}

TEST_F(Cli, SolveReusesPoolForNewRightHandSide) {
  ASSERT_EQ(run("extract --instance " + data("sum4.json") + " --num-starts 50 --out " + tmp("pool.json")).code, 0);
  const auto r = run("solve --instance " + data("sum2.json") + " --pool " + tmp("pool.json") + " --out " +
                     tmp("report.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("ple_ms: 0.000"), std::string::npos) << r.out;
  const auto report = parse_report(read_file(tmp("report.json")));
  ASSERT_TRUE(report.best.has_value());
  EXPECT_EQ(report.best->x, (IntVector{1, 1}));
  EXPECT_EQ(report.best->objective, 2.0);
}

TEST_F(Cli, SolveRejectsPoolOfWrongShape) {
  write_file(tmp("pool.json"), R"({"n": 3, "m": 1, "box": {"lo": [-1, -1, -1], "hi": [1, 1, 1]}, "directions": []})");
  const auto r = run("solve --instance " + data("sum4.json") + " --pool " + tmp("pool.json") + " --out " +
                     tmp("report.json"));
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(error_tag_of(r), "dimension");
}

TEST_F(Cli, OracleExactAndStable) {
  const auto r = run("oracle --instance " + data("sum4.json") + " --out " + tmp("g1.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto pool = parse_pool(read_file(tmp("g1.json")));
  EXPECT_EQ(pool.directions, (DirectionSet{{-1, 1}, {1, -1}}));
  ASSERT_EQ(run("oracle --instance " + data("sum4.json") + " --out " + tmp("g2.json")).code, 0);
  EXPECT_EQ(read_file(tmp("g1.json")), read_file(tmp("g2.json")));
  EXPECT_LT(read_file(tmp("g1.json")).find("[-1,1]"), read_file(tmp("g1.json")).find("[1,-1]"));
}

TEST_F(Cli, OracleTooLarge) {
  const auto r = run("oracle --instance " + data("wide30.json") + " --out " + tmp("g.json"));
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(error_tag_of(r), "too_large");
}

TEST_F(Cli, CheckLattice) {
  const auto r = run("check-lattice --instance " + data("sum4.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j.at("AC_equals_H0").get<bool>());
  EXPECT_TRUE(j.at("reduced_is_lll").get<bool>());
  EXPECT_TRUE(j.at("A_times_reduced_is_zero").get<bool>());
}

TEST_F(Cli, SeedDeterminism) {
  const std::string base = "solve --instance " + data("bench/sep2.json") + " --num-starts 40 --seed 7 --out ";
  ASSERT_EQ(run(base + tmp("a.json") + " --threads 1").code, 0);
  ASSERT_EQ(run(base + tmp("b.json") + " --threads 3").code, 0);
  auto strip = [](std::string text) {
    auto j = nlohmann::json::parse(text);
    j.erase("timings_ms");
    return j.dump();
  };
  EXPECT_EQ(strip(read_file(tmp("a.json"))), strip(read_file(tmp("b.json"))));
}

TEST_F(Cli, BenchWithOraclePoolHasZeroGap) {
  const auto r = run("bench --dir " + data("bench") + " --oracle-pool --num-feasible-starts 10");
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "name\tn\tm\tMA_ms\tPLE_ms\tobj\tbrute_obj\tgap");
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    EXPECT_EQ(line.substr(line.rfind('\t') + 1), "0") << line;
  }
  EXPECT_EQ(rows, 5);
}

TEST_F(Cli, BenchEmptyAndCorrupt) {
  fs::create_directories(tmp("empty"));
  const auto empty = run("bench --dir " + tmp("empty"));
  EXPECT_EQ(empty.code, 0);
  EXPECT_EQ(empty.out, "name\tn\tm\tMA_ms\tPLE_ms\tobj\tbrute_obj\tgap\n");
  const auto corrupt = run("bench --dir " + data("bench_corrupt") + " --num-starts 50");
  EXPECT_EQ(corrupt.code, 0);
  EXPECT_NE(corrupt.out.find("broken.json\t-\t-\t-\t-\tparse_error"), std::string::npos) << corrupt.out;
  EXPECT_NE(corrupt.out.find("sep0.json\t"), std::string::npos);
}
