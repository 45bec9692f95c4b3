#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_support.hpp"

using namespace solarquad;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int status = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(SOLARQUAD_CLI) + " " + args + " 2>/dev/null";
  RunResult r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("solarquad_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& content) const {
    std::ofstream(path(name)) << content;
    return path(name);
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(run("rule --order 0").status, 2);
  EXPECT_EQ(run("rule --order 201").status, 2);
  EXPECT_EQ(run("rule").status, 2);
  EXPECT_EQ(run("").status, 2);
  EXPECT_EQ(run("rule --order 3 --column sideways").status, 2);
  EXPECT_EQ(run("oracle --sin 50 --poly 1").status, 2);
  EXPECT_EQ(run("oracle").status, 2);
  EXPECT_EQ(run("rule --order 3 --modifier bogus").status, 2);
  EXPECT_EQ(run("--help").status, 0);
}

TEST_F(CliTest, RuleCsvOnFullBand) {
  const auto r = run("rule --band 280,4000 --order 15");
  ASSERT_EQ(r.status, 0);
  const auto rule = read_rule(r.out);
  EXPECT_EQ(rule.order(), 15u);
  EXPECT_EQ(rule.meta().source_id, "ASTMG173");
  EXPECT_EQ(rule.meta().column, "global_tilt");
  EXPECT_EQ(count_lines(r.out), 11u + 15u);
}

TEST_F(CliTest, RuleMatchesLibraryAndRoundTrips) {
  const std::string file = path("rule.json");
  ASSERT_EQ(run("rule --order 10 --format json --out " + file).status, 0);
  const auto lib = build_rule(solarquad::testing::astm_full(), 10);
  std::ifstream in(file);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto disk = read_rule(ss.str());
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_EQ(disk.nodes()[i], lib.nodes()[i]);
    EXPECT_EQ(disk.weights()[i], lib.weights()[i]);
  }

  const auto one = run("integrate --rule " + file + " --poly 1");
  ASSERT_EQ(one.status, 0);
  EXPECT_NEAR(std::stod(one.out), lib.total_weight(), 1e-15 * lib.total_weight());

  const auto sine = run("integrate --rule " + file + " --sin 500");
  ASSERT_EQ(sine.status, 0);
  EXPECT_NEAR(std::stod(sine.out), apply_rule(lib, TestIntegrand::f1()), 1e-15 * 100.0);

  EXPECT_EQ(std::stod(run("integrate --rule " + file + " --poly 0").out), 0.0);
}

TEST_F(CliTest, RestrictedBandNodesStayInside) {
  const auto r = run("rule --band 280,1100 --order 99");
  ASSERT_EQ(r.status, 0);
  const auto rule = read_rule(r.out);
  ASSERT_EQ(rule.order(), 99u);
  EXPECT_GT(rule.nodes().front(), 280.0);
  EXPECT_LT(rule.nodes().back(), 1100.0);
}

TEST_F(CliTest, BandOutsideDataFails) {
  EXPECT_EQ(run("rule --band 200,1000 --order 3").status, 1);
  EXPECT_EQ(run("rule --band 1000,500 --order 3").status, 1);
}

TEST_F(CliTest, TableIntegrandOutOfRangeFails) {
  const std::string rule = path("r.csv");
  ASSERT_EQ(run("rule --order 5 --out " + rule).status, 0);
  const auto narrow = write("f.csv", "500,1\n600,1\n700,1\n800,1\n");
  EXPECT_EQ(run("integrate --rule " + rule + " --table " + narrow).status, 1);
  const auto wide = write("g.csv", "lambda,f\n280,2\n1500,2\n3000,2\n4000,2\n");
  const auto r = run("integrate --rule " + rule + " --table " + wide);
  ASSERT_EQ(r.status, 0);
  EXPECT_NEAR(std::stod(r.out), 2.0 * build_rule(solarquad::testing::astm_full(), 5).total_weight(), 1e-9);
}

TEST_F(CliTest, OracleOnConstantSpectrum) {
  std::string csv = "wavelength,irradiance\n";
  for (int i = 0; i <= 8; ++i) csv += std::to_string(0.25 * i) + ",1\n";
  const auto spec = write("flat.csv", csv);
  const auto r = run("oracle --spectrum " + spec + " --band 0,2 --poly 1");
  ASSERT_EQ(r.status, 0);
  ASSERT_EQ(r.out.rfind("value,error_estimate\n", 0), 0u);
  const auto body = r.out.substr(r.out.find('\n') + 1);
  EXPECT_NEAR(std::stod(body.substr(0, body.find(','))), 2.0, 1e-14);
}

TEST_F(CliTest, MissingFileFails) {
  EXPECT_EQ(run("rule --order 3 --spectrum " + path("nope.csv")).status, 1);
  EXPECT_EQ(run("integrate --rule " + path("nope.csv") + " --poly 1").status, 1);
}

TEST_F(CliTest, ConvergenceIsDeterministic) {
  const auto a = run("convergence --orders 15 --sin 500");
  ASSERT_EQ(a.status, 0);
  EXPECT_EQ(count_lines(a.out), 2u);
  EXPECT_EQ(a.out.rfind("N,value,oracle,rel_error,evals\n15,", 0), 0u);
  const auto b = run("convergence --orders 15 --sin 500");
  EXPECT_EQ(a.out, b.out);

  const auto range = run("convergence --orders 2:3:11 --poly 1,0.001");
  ASSERT_EQ(range.status, 0);
  EXPECT_EQ(count_lines(range.out), 5u);  // header + N = 2, 5, 8, 11
  EXPECT_EQ(run("convergence --orders 5:0:9 --sin 50").status, 2);
}

TEST_F(CliTest, ProbeListsNodes) {
  const std::string rule = path("r.csv");
  ASSERT_EQ(run("rule --order 4 --out " + rule).status, 0);
  const auto r = run("probe --rule " + rule + " --poly 3");
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(count_lines(r.out), 5u);
  EXPECT_EQ(r.out.rfind("node_nm,f\n", 0), 0u);
  EXPECT_NE(r.out.find(",3\n"), std::string::npos);
}
