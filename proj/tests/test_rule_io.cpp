#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "test_support.hpp"

using namespace solarquad;

namespace {

QuadratureRule random_rule(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double lo = 200.0 + 1000.0 * u(rng);
  const double hi = lo + 1e-3 + 3000.0 * u(rng);
  const std::size_t n = 1 + rng() % 60;
  std::vector<double> x;
  for (std::size_t i = 0; i < n; ++i) x.push_back(lo + (hi - lo) * (i + 0.1 + 0.8 * u(rng)) / n);
  std::vector<double> w;
  for (std::size_t i = 0; i < n; ++i) w.push_back(std::exp(-40.0 * u(rng)) * 1e3);
  RuleMeta m{"src-" + std::to_string(rng() % 1000), "global_tilt", "planck:5778", 1e-11, rng() % 100000};
  return QuadratureRule(x, w, Band{lo, hi}, m);
}

void expect_identical(const QuadratureRule& a, const QuadratureRule& b) {
  ASSERT_EQ(a.order(), b.order());
  EXPECT_EQ(a.band(), b.band());
  for (std::size_t i = 0; i < a.order(); ++i) {
    EXPECT_EQ(a.nodes()[i], b.nodes()[i]);
    EXPECT_EQ(a.weights()[i], b.weights()[i]);
  }
  EXPECT_EQ(a.meta().source_id, b.meta().source_id);
  EXPECT_EQ(a.meta().column, b.meta().column);
  EXPECT_EQ(a.meta().modifier, b.meta().modifier);
  EXPECT_EQ(a.meta().rel_tol, b.meta().rel_tol);
  EXPECT_EQ(a.meta().evaluations, b.meta().evaluations);
}

std::string to_csv(const QuadratureRule& r) {
  std::ostringstream os;
  write_rule_csv(os, r);
  return os.str();
}

std::string to_json(const QuadratureRule& r) {
  std::ostringstream os;
  write_rule_json(os, r);
  return os.str();
}

}  // namespace

TEST(RuleIo, CsvLayout) {
  const QuadratureRule r({1.0, 2.5}, {0.25, 0.75}, Band{0.0, 3.0}, RuleMeta{"ASTMG173", "global_tilt", "none", 1e-11, 42});
  const std::string text = to_csv(r);
  EXPECT_EQ(text,
            "# solarquad rule\n"
            "# source_id=ASTMG173\n"
            "# column=global_tilt\n"
            "# band_lo_nm=0\n"
            "# band_hi_nm=3\n"
            "# order=2\n"
            "# modifier=none\n"
            "# rel_tol=9.9999999999999994e-12\n"
            "# evaluations=42\n"
            "# version=1.0.0\n"
            "node_nm,weight\n"
            "1,0.25\n"
            "2.5,0.75\n");
}

TEST(RuleIo, JsonLayout) {
  const QuadratureRule r({1.0}, {2.0}, Band{0.0, 3.0}, RuleMeta{"x", "direct_circumsolar", "lambda", 1e-9, 7});
  const auto j = nlohmann::json::parse(to_json(r));
  EXPECT_EQ(j.at("meta").at("order"), 1);
  EXPECT_EQ(j.at("meta").at("modifier"), "lambda");
  EXPECT_EQ(j.at("meta").at("version"), "1.0.0");
  EXPECT_EQ(j.at("meta").at("band_nm")[1], 3.0);
  EXPECT_EQ(j.at("nodes")[0], 1.0);
  EXPECT_EQ(j.at("weights")[0], 2.0);
}

TEST(RuleIo, RoundTripIsBitExact) {
  std::mt19937_64 rng(20240601);
  for (int trial = 0; trial < 200; ++trial) {
    const auto r = random_rule(rng);
    expect_identical(r, read_rule(to_csv(r)));
    expect_identical(r, read_rule(to_json(r)));
  }
}

TEST(RuleIo, SolarRuleRoundTrip) {
  const auto rule = build_rule(solarquad::testing::astm_full(), 12);
  const auto back = read_rule(to_csv(rule));
  expect_identical(rule, back);
  const auto f = TestIntegrand::f1();
  EXPECT_EQ(apply_rule(rule, f), apply_rule(back, f));
}

TEST(RuleIo, WritingIsDeterministic) {
  const auto& m = solarquad::testing::astm_full();
  EXPECT_EQ(to_csv(build_rule(m, 9)), to_csv(build_rule(m, 9)));
  EXPECT_EQ(to_json(build_rule(m, 9)), to_json(build_rule(m, 9)));
}

TEST(RuleIo, RejectsMalformedInput) {
  const QuadratureRule r({1.0, 2.0}, {1.0, 1.0}, Band{0.0, 3.0});
  std::string text = to_csv(r);
  EXPECT_THROW(read_rule(text + "2.5,1\n"), ParseError);  // row count mismatch
  EXPECT_THROW(read_rule("1,1\n2,1\n"), ParseError);       // no header
  EXPECT_THROW(read_rule("node_nm,weight\n1,1\n"), ParseError);  // no metadata
  EXPECT_THROW(read_rule(text.substr(0, text.size() - 4) + "x\n"), ParseError);
  EXPECT_THROW(read_rule("{\"meta\": {}}"), ParseError);
  EXPECT_THROW(read_rule("{not json"), ParseError);

  std::string bad = text;
  bad.replace(bad.find("2,1"), 3, "4,1");  // node outside the band
  EXPECT_THROW(read_rule(bad), StructuralError);
}

TEST(RuleIo, ConvergenceCsv) {
  std::vector<ConvergenceRow> rows{{15, 1.5, 2.0, 0.25, false, 1000}};
  std::ostringstream os;
  write_convergence_csv(os, rows);
  EXPECT_EQ(os.str(), "N,value,oracle,rel_error,evals\n15,1.5,2,0.25,1000\n");
}
