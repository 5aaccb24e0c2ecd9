#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <thread>
#include <vector>

#include "sparsemt/sparsemt.h"

namespace {

struct SettingPtr {
  smt_setting* p = nullptr;
  ~SettingPtr() { smt_setting_destroy(p); }
};
struct RulePtr {
  smt_rule* p = nullptr;
  ~RulePtr() { smt_rule_destroy(p); }
};
struct StudyPtr {
  smt_study* p = nullptr;
  ~StudyPtr() { smt_study_destroy(p); }
};
struct TablePtr {
  smt_table* p = nullptr;
  ~TablePtr() { smt_table_destroy(p); }
};

std::string rule_text(const smt_rule* r) {
  size_t needed = 0;
  EXPECT_EQ(smt_rule_text(r, nullptr, 0, &needed), SMT_OK);
  std::string s(needed, '\0');
  EXPECT_EQ(smt_rule_text(r, s.data(), needed + 1, &needed), SMT_OK);
  return s;
}

}  // namespace

TEST(CApi, VersionAndStatusNames) {
  EXPECT_STRNE(smt_version(), "");
  EXPECT_STREQ(smt_status_name(SMT_OK), "ok");
  EXPECT_STRNE(smt_status_name(SMT_LEVEL_OUT_OF_RANGE), smt_status_name(SMT_DOMAIN_ERROR));
}

TEST(CApi, NormalFunctions) {
  EXPECT_NEAR(smt_normal_pdf(0.0), 0.3989422804014327, 1e-16);
  EXPECT_NEAR(smt_normal_cdf(1.959963985), 0.975, 1e-9);
  EXPECT_NEAR(smt_normal_sf(6.0) / (0.5 * 1.9731752900753963e-9), 1.0, 1e-14);
  double q = 0.0;
  EXPECT_EQ(smt_normal_quantile(0.975, &q), SMT_OK);
  EXPECT_NEAR(q, 1.959963984540054, 1e-14);
  EXPECT_EQ(smt_normal_quantile(1.5, &q), SMT_INVALID_ARGUMENT);
  EXPECT_STRNE(smt_last_error(), "");
  EXPECT_EQ(smt_normal_quantile(0.5, nullptr), SMT_NULL_POINTER);
}

TEST(CApi, SettingLifecycle) {
  SettingPtr s;
  ASSERT_EQ(smt_setting_create(0.01, 1.0, 9.0, 2.0, 1.0, 100.0, &s.p), SMT_OK);
  smt_derived d{};
  ASSERT_EQ(smt_setting_derived(s.p, &d), SMT_OK);
  EXPECT_NEAR(d.v / 352836.0, 1.0, 1e-12);
  double p, sig, tau, d0, dA, m;
  ASSERT_EQ(smt_setting_params(s.p, &p, &sig, &tau, &d0, &dA, &m), SMT_OK);
  EXPECT_EQ(p, 0.01);
  EXPECT_EQ(tau, 9.0);
  EXPECT_EQ(m, 100.0);

  smt_setting* bad = nullptr;
  EXPECT_EQ(smt_setting_create(1.5, 1.0, 1.0, 1.0, 1.0, 1.0, &bad), SMT_INVALID_ARGUMENT);
  EXPECT_EQ(bad, nullptr);
  EXPECT_NE(std::string(smt_last_error()).find("p"), std::string::npos);
  EXPECT_EQ(smt_setting_create(0.1, 1.0, 1.0, 1.0, 1.0, 1.0, nullptr), SMT_NULL_POINTER);
  EXPECT_EQ(smt_setting_derived(nullptr, &d), SMT_NULL_POINTER);
  smt_setting_destroy(nullptr);
}

TEST(CApi, ThresholdsAndRisk) {
  SettingPtr s;
  ASSERT_EQ(smt_setting_create(0.1, 1.0, 3.0, 1.0, 1.0, 1.0, &s.p), SMT_OK);
  double c = 0.0;
  int reject_all = -1;
  ASSERT_EQ(smt_oracle_threshold(s.p, &c, &reject_all), SMT_OK);
  EXPECT_NEAR(c, 7.707658021056439, 1e-13);
  EXPECT_EQ(reject_all, 0);

  smt_risk r{};
  ASSERT_EQ(smt_fixed_threshold_risk(s.p, 2.0, &r), SMT_OK);
  EXPECT_NEAR(r.total, 0.19361927412656128, 1e-15);
  ASSERT_EQ(smt_optimal_risk(s.p, &r), SMT_OK);
  EXPECT_NEAR(r.total, 0.08843919312073742, 1e-15);
  EXPECT_EQ(smt_fixed_threshold_risk(s.p, -1.0, &r), SMT_INVALID_ARGUMENT);

  double b = 0.0;
  ASSERT_EQ(smt_bfdr_of_threshold(s.p, 3.841459, &b), SMT_OK);
  EXPECT_NEAR(b, 0.5790797545071101, 1e-14);
  ASSERT_EQ(smt_bfdr_threshold(s.p, b, &c), SMT_OK);
  EXPECT_NEAR(c, 3.841459, 1e-6);
  double gw = 0.0, bf = 0.0;
  ASSERT_EQ(smt_gw_threshold(s.p, 0.1, &gw), SMT_OK);
  ASSERT_EQ(smt_bfdr_threshold(s.p, 0.09, &bf), SMT_OK);
  EXPECT_NEAR(gw, bf, 1e-10);

  EXPECT_EQ(smt_bfdr_threshold(s.p, 0.95, &c), SMT_LEVEL_OUT_OF_RANGE);
  EXPECT_NEAR(smt_last_supremum(), 0.9, 1e-15);
  EXPECT_EQ(smt_bfdr_threshold(s.p, 0.0, &c), SMT_INVALID_ARGUMENT);
  EXPECT_TRUE(std::isnan(smt_last_supremum()));

  ASSERT_EQ(smt_bonferroni_threshold(20.0, 0.05, &c), SMT_OK);
  EXPECT_NEAR(std::sqrt(c), 3.023341439739147, 1e-12);
  ASSERT_EQ(smt_universal_threshold(100.0, 0.0, &c), SMT_OK);
  EXPECT_NEAR(c, 9.210340371976182, 1e-14);
  ASSERT_EQ(smt_replicate_threshold(100.0, 100.0, 0.0, &c), SMT_OK);
  EXPECT_NEAR(c, 13.815510557964274, 1e-13);
  ASSERT_EQ(smt_type1(2.0, &c), SMT_OK);
  EXPECT_NEAR(c, 0.15729920705028513, 1e-15);
  ASSERT_EQ(smt_type2(2.0, 3.0, &c), SMT_OK);
  EXPECT_NEAR(c, 0.5204998778130465, 1e-15);
}

TEST(CApi, ErrorsAreThreadLocal) {
  double c = 0.0;
  EXPECT_EQ(smt_type1(-1.0, &c), SMT_INVALID_ARGUMENT);
  const std::string mine = smt_last_error();
  std::string other;
  std::thread([&] {
    double q;
    smt_normal_quantile(0.5, &q);
    other = smt_last_error();
  }).join();
  EXPECT_EQ(other, "");
  EXPECT_EQ(std::string(smt_last_error()), mine);
}

TEST(CApi, Rules) {
  RulePtr r;
  ASSERT_EQ(smt_rule_parse("bfdr:alpha=0.1", &r.p), SMT_OK);
  EXPECT_EQ(rule_text(r.p), "bfdr:alpha=0.1");
  EXPECT_EQ(smt_rule_is_fixed(r.p), 1);
  double a = 0.0;
  int has = 0;
  ASSERT_EQ(smt_rule_level(r.p, &a, &has), SMT_OK);
  EXPECT_EQ(has, 1);
  EXPECT_EQ(a, 0.1);

  char small[4];
  size_t needed = 0;
  ASSERT_EQ(smt_rule_text(r.p, small, sizeof small, &needed), SMT_OK);
  EXPECT_EQ(needed, std::strlen("bfdr:alpha=0.1"));
  EXPECT_STREQ(small, "bfd");

  SettingPtr s;
  ASSERT_EQ(smt_setting_create(0.1, 1.0, 3.0, 1.0, 1.0, 100.0, &s.p), SMT_OK);
  double c = 0.0, ref = 0.0;
  ASSERT_EQ(smt_rule_threshold(r.p, s.p, &c), SMT_OK);
  ASSERT_EQ(smt_bfdr_threshold(s.p, 0.1, &ref), SMT_OK);
  EXPECT_EQ(c, ref);

  RulePtr bh;
  ASSERT_EQ(smt_rule_parse("bh", &bh.p), SMT_OK);
  EXPECT_EQ(smt_rule_is_fixed(bh.p), 0);
  ASSERT_EQ(smt_rule_level(bh.p, &a, &has), SMT_OK);
  EXPECT_EQ(has, 0);
  EXPECT_EQ(smt_rule_threshold(bh.p, s.p, &c), SMT_INVALID_ARGUMENT);

  smt_rule* bad = nullptr;
  EXPECT_EQ(smt_rule_parse("bogus", &bad), SMT_INVALID_ARGUMENT);
  EXPECT_EQ(bad, nullptr);
  EXPECT_EQ(smt_rule_parse(nullptr, &bad), SMT_NULL_POINTER);
}

TEST(CApi, MonteCarlo) {
  SettingPtr s;
  ASSERT_EQ(smt_setting_create(0.05, 1.0, 16.0, 1.0, 1.0, 2000.0, &s.p), SMT_OK);
  RulePtr oracle;
  ASSERT_EQ(smt_rule_parse("oracle", &oracle.p), SMT_OK);
  smt_mc_options opts{500, 3, 1};
  smt_mc_report a{}, b{};
  ASSERT_EQ(smt_mc_run(s.p, oracle.p, &opts, &a), SMT_OK);
  opts.workers = 4;
  ASSERT_EQ(smt_mc_run(s.p, oracle.p, &opts, &b), SMT_OK);
  EXPECT_EQ(std::memcmp(&a, &b, sizeof a), 0);
  EXPECT_EQ(a.has_threshold_gap, 0);
  EXPECT_EQ(a.risk.reps, 500u);
  smt_risk opt{};
  ASSERT_EQ(smt_optimal_risk(s.p, &opt), SMT_OK);
  EXPECT_LE(std::abs(a.risk.mean - opt.total), 3.0 * a.risk.std_error);

  RulePtr bh;
  ASSERT_EQ(smt_rule_parse("bh:alpha=0.2", &bh.p), SMT_OK);
  smt_mc_report k{};
  ASSERT_EQ(smt_mc_conditional(s.p, bh.p, 2000, &opts, &k), SMT_OK);
  EXPECT_EQ(k.ev.mean, 0.0);
  EXPECT_EQ(k.has_threshold_gap, 1);
  EXPECT_EQ(smt_mc_conditional(s.p, bh.p, 2001, &opts, &k), SMT_INVALID_ARGUMENT);

  smt_gap_study g{};
  ASSERT_EQ(smt_threshold_gap(s.p, 0.1, INFINITY, &opts, 0, 0, &g), SMT_OK);
  EXPECT_EQ(g.exceed_frac, 0.0);
  double bon = 0.0;
  ASSERT_EQ(smt_bonferroni_threshold(2000.0, 0.1, &bon), SMT_OK);
  EXPECT_NEAR(g.c_bon, std::sqrt(bon), 1e-15);
  EXPECT_EQ(smt_mc_run(s.p, oracle.p, nullptr, &a), SMT_NULL_POINTER);
}

TEST(CApi, Studies) {
  ASSERT_EQ(smt_preset_count(), 11u);
  EXPECT_STREQ(smt_preset_name(0), "oracle_verge");
  EXPECT_EQ(smt_preset_name(99), nullptr);

  StudyPtr st;
  ASSERT_EQ(smt_study_open("lemma_universal", &st.p), SMT_OK);
  EXPECT_NE(std::string(smt_study_summary(st.p)).find("2 log m"), std::string::npos);
  RulePtr r;
  ASSERT_EQ(smt_study_rule(st.p, &r.p), SMT_OK);
  EXPECT_EQ(rule_text(r.p), "universal:d=0");

  const double grid[] = {1e3, 1e4, 1e5};
  ASSERT_EQ(smt_study_set_grid(st.p, grid, 3), SMT_OK);
  const double* g = nullptr;
  size_t n = 0;
  ASSERT_EQ(smt_study_grid(st.p, &g, &n), SMT_OK);
  ASSERT_EQ(n, 3u);
  EXPECT_EQ(g[1], 1e4);
  const double bad_grid[] = {1e4, 1e3};
  EXPECT_EQ(smt_study_set_grid(st.p, bad_grid, 2), SMT_INVALID_ARGUMENT);

  TablePtr t;
  ASSERT_EQ(smt_study_run(st.p, SMT_MODE_EXACT, nullptr, &t.p), SMT_OK);
  ASSERT_EQ(smt_table_rows(t.p), 3u);
  ASSERT_EQ(smt_table_columns(t.p), 22u);
  EXPECT_STREQ(smt_table_column_name(t.p, 7), "ratio");
  EXPECT_EQ(smt_table_column_name(t.p, 22), nullptr);
  double m = 0.0, ratio1 = 0.0, ratio2 = 0.0;
  ASSERT_EQ(smt_table_value(t.p, 1, 0, &m), SMT_OK);
  EXPECT_EQ(m, 1e4);
  ASSERT_EQ(smt_table_value(t.p, 0, 7, &ratio1), SMT_OK);
  ASSERT_EQ(smt_table_value(t.p, 2, 7, &ratio2), SMT_OK);
  EXPECT_LT(ratio2, ratio1);
  EXPECT_EQ(smt_table_value(t.p, 3, 0, &m), SMT_INVALID_ARGUMENT);

  SettingPtr ps;
  RulePtr pr;
  ASSERT_EQ(smt_study_point(st.p, 1e4, &ps.p, &pr.p), SMT_OK);
  smt_derived d{};
  ASSERT_EQ(smt_setting_derived(ps.p, &d), SMT_OK);
  EXPECT_NEAR(d.u, 18.420680743952367, 1e-13);

  RulePtr oracle;
  ASSERT_EQ(smt_rule_parse("oracle", &oracle.p), SMT_OK);
  ASSERT_EQ(smt_study_set_rule(st.p, oracle.p), SMT_OK);
  TablePtr t2;
  ASSERT_EQ(smt_study_run(st.p, SMT_MODE_EXACT, nullptr, &t2.p), SMT_OK);
  ASSERT_EQ(smt_table_value(t2.p, 2, 7, &ratio2), SMT_OK);
  EXPECT_NEAR(ratio2, 1.0, 1e-12);

  StudyPtr bh;
  ASSERT_EQ(smt_study_open("bh_fixed_alpha", &bh.p), SMT_OK);
  TablePtr t3;
  EXPECT_EQ(smt_study_run(bh.p, SMT_MODE_EXACT, nullptr, &t3.p), SMT_INVALID_ARGUMENT);
  smt_study* none = nullptr;
  EXPECT_EQ(smt_study_open("missing", &none), SMT_INVALID_ARGUMENT);
}
