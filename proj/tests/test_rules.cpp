#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <string>

#include "sparsemt/bfdr.hpp"
#include "sparsemt/error.hpp"
#include "sparsemt/procedures.hpp"
#include "sparsemt/rules.hpp"

using namespace sparsemt;

namespace {

TestingSetting setting(double p, double u, double m) {
  return TestingSetting(MixtureModel(p, 1.0, u), Losses(), m);
}

}  // namespace

TEST(Rules, ParseEachKind) {
  EXPECT_TRUE(std::holds_alternative<OracleRule>(parse_rule("oracle")));
  EXPECT_EQ(std::get<FixedRule>(parse_rule("fixed:c_sq=4")).c_sq, 4.0);
  EXPECT_EQ(std::get<UniversalRule>(parse_rule("universal")).d, 0.0);
  EXPECT_EQ(std::get<UniversalRule>(parse_rule("universal:d=-1.5")).d, -1.5);
  const auto rep = std::get<ReplicateRule>(parse_rule("replicate:n=100,d=0.5"));
  EXPECT_EQ(rep.n, 100.0);
  EXPECT_EQ(rep.d, 0.5);
  EXPECT_FALSE(std::get<ReplicateRule>(parse_rule("replicate")).n);
  const auto lv = std::get<LogVRule>(parse_rule("logv:coef=-3,offset=2"));
  EXPECT_EQ(lv.coef, -3.0);
  EXPECT_EQ(lv.offset, 2.0);
  EXPECT_EQ(std::get<BonferroniRule>(parse_rule("bonferroni:alpha=0.05")).alpha, 0.05);
  EXPECT_EQ(std::get<BfdrRule>(parse_rule("bfdr:alpha=0.1")).alpha, 0.1);
  EXPECT_EQ(std::get<GwRule>(parse_rule("gw:alpha=0.1")).alpha, 0.1);
  EXPECT_FALSE(std::get<BhRule>(parse_rule("bh")).alpha);
}

TEST(Rules, ParseErrors) {
  for (const char* bad : {"", "nonsense", "fixed", "fixed:c_sq=", "fixed:c_sq=abc", "fixed:c_sq=-1",
                          "bh:alpha=1.5", "bh:beta=0.1", "universal:d", "oracle:x=1",
                          "bfdr:alpha=0.1,alpha2=3"})
    EXPECT_THROW(parse_rule(bad), std::invalid_argument) << bad;
}

TEST(Rules, TextRoundTrip) {
  for (const char* text : {"oracle", "fixed:c_sq=4", "universal:d=-1.5", "replicate:n=100,d=0",
                           "replicate:d=0", "logv:coef=-3,offset=0", "bonferroni:alpha=0.05",
                           "bfdr:alpha=0.1", "gw", "bh:alpha=0.2"}) {
    const Rule r = parse_rule(text);
    EXPECT_EQ(to_string(parse_rule(to_string(r))), to_string(r)) << text;
  }
  EXPECT_EQ(to_string(parse_rule("bh:alpha=0.2")), "bh:alpha=0.2");
  EXPECT_EQ(to_string(parse_rule("oracle")), "oracle");
  EXPECT_EQ(std::get<BfdrRule>(parse_rule(to_string(BfdrRule{0.1 + 1e-17}))).alpha, 0.1 + 1e-17);
}

TEST(Rules, BindFillsOnlyUnsetParameters) {
  const Rule bound = sparsemt::bind(parse_rule("bfdr"), 0.2, std::nullopt);
  EXPECT_EQ(rule_level(bound), 0.2);
  EXPECT_EQ(rule_level(sparsemt::bind(parse_rule("bfdr:alpha=0.1"), 0.2, std::nullopt)), 0.1);
  EXPECT_EQ(std::get<ReplicateRule>(sparsemt::bind(parse_rule("replicate"), 0.3, 50.0)).n, 50.0);
  EXPECT_FALSE(rule_level(parse_rule("oracle")));
  EXPECT_FALSE(rule_level(parse_rule("bh")));
}

TEST(Rules, FixedThresholds) {
  const auto s = setting(0.1, 3.0, 100.0);
  EXPECT_EQ(fixed_threshold(parse_rule("oracle"), s), oracle_threshold_sq(derive(s)).c_sq);
  EXPECT_EQ(fixed_threshold(parse_rule("fixed:c_sq=4"), s).value(), 4.0);
  EXPECT_EQ(fixed_threshold(parse_rule("universal:d=0"), s), universal_threshold(100.0, 0.0));
  EXPECT_EQ(fixed_threshold(parse_rule("replicate:n=100"), s), replicate_threshold(100.0, 100.0, 0.0));
  EXPECT_EQ(fixed_threshold(parse_rule("bonferroni:alpha=0.05"), s), bonferroni_threshold(100.0, 0.05));
  EXPECT_EQ(fixed_threshold(parse_rule("bfdr:alpha=0.1"), s),
            bfdr_threshold(s.model(), BfdrLevel(0.1)));
  EXPECT_EQ(fixed_threshold(parse_rule("gw:alpha=0.1"), s), gw_threshold(s.model(), BfdrLevel(0.1)));

  const double log_v = derive(s).log_v;
  EXPECT_NEAR(fixed_threshold(parse_rule("logv:coef=-1,offset=0.5"), s).value(),
              log_v - std::log(log_v) + 0.5, 1e-13);
  EXPECT_EQ(fixed_threshold(parse_rule("logv:offset=-1000"), s).value(), 0.0);

  EXPECT_TRUE(is_fixed_threshold(parse_rule("gw:alpha=0.1")));
  EXPECT_FALSE(is_fixed_threshold(parse_rule("bh:alpha=0.1")));
  EXPECT_THROW(fixed_threshold(parse_rule("bh:alpha=0.1"), s), std::invalid_argument);
  EXPECT_THROW(fixed_threshold(parse_rule("bfdr"), s), std::invalid_argument);
  EXPECT_THROW(fixed_threshold(parse_rule("replicate"), s), std::invalid_argument);
  EXPECT_THROW(fixed_threshold(parse_rule("bfdr:alpha=0.95"), s), LevelOutOfRange);
  EXPECT_THROW(fixed_threshold(parse_rule("logv"), setting(0.5, 1.0, 10.0)), std::invalid_argument);
}
