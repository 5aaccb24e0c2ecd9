#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "sparsemt/experiments.hpp"
#include "sparsemt/risk.hpp"

using namespace sparsemt;

namespace {

std::vector<double> column(const std::vector<ConvergenceRow>& rows, double ConvergenceRow::*field) {
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(r.*field);
  return out;
}

}  // namespace

TEST(Experiments, Grids) {
  const auto g = default_exact_grid();
  ASSERT_EQ(g.size(), 29u);
  EXPECT_EQ(g.front(), 100.0);
  EXPECT_EQ(g[2], 1000.0);
  EXPECT_EQ(g.back(), 1e16);
  EXPECT_NEAR(g[1], std::sqrt(10.0) * 100.0, 1e-12);
  EXPECT_EQ(default_mc_grid(), (std::vector<double>{1e3, 1e4, 1e5, 1e6}));
  EXPECT_EQ(decade_grid(3.0, 3.0, 4).size(), 1u);
  EXPECT_THROW(decade_grid(3.0, 2.0, 1), std::invalid_argument);
  EXPECT_THROW(decade_grid(1.0, 2.0, 0), std::invalid_argument);
}

TEST(Experiments, SparsityAndDelta) {
  const Sparsity power{Sparsity::Kind::power, 2.0, 0.5, 0.0};
  EXPECT_NEAR(power.p_at(1e4), 0.02, 1e-15);
  const Sparsity extreme{Sparsity::Kind::extreme, 1.0, 1.0, 2.0};
  EXPECT_NEAR(extreme.p_at(1e4), std::pow(std::log(1e4), 2.0) / 1e4, 1e-15);
  EXPECT_EQ((Sparsity{Sparsity::Kind::extreme, 1.0, 1.0, 0.0}.p_at(std::numeric_limits<double>::max())), 1e-300);
  EXPECT_NEAR((DeltaRule{2.0, 1.0}.delta_at(1e4)), 2.0 / std::log(1e4), 1e-15);
  EXPECT_EQ((DeltaRule{3.0, 0.0}.delta_at(1e9)), 3.0);
}

TEST(Experiments, RegimeVerge) {
  const auto r = regime_verge(2.0, {Sparsity::Kind::extreme, 1.0, 1.0, 0.0}, {1.0, 0.0});
  EXPECT_EQ(r.C_declared, 1.0);
  const auto pt = r.at(1e4);
  EXPECT_NEAR(pt.u, 18.4207, 1e-4);
  EXPECT_NEAR(pt.u, 2.0 * std::log(1e4), 1e-14);
  EXPECT_NEAR(pt.p, 1e-4, 1e-18);
  EXPECT_NEAR(pt.C_point, pt.derived.log_v / pt.derived.u, 1e-15);

  const auto pts = r.points();
  ASSERT_EQ(pts.size(), 29u);
  for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_EQ(pts[i].index, i);
  // log v / u drifts towards the declared limit.
  EXPECT_LT(std::abs(pts.back().C_point - 1.0), std::abs(pts.front().C_point - 1.0));

  const auto half = regime_verge(4.0, {Sparsity::Kind::power, 1.0, 0.5, 0.0}, {1.0, 0.0});
  EXPECT_EQ(half.C_declared, 0.25);

  EXPECT_THROW(regime_verge(0.0, {}, {}), std::invalid_argument);
  EXPECT_THROW(regime_verge(2.0, {Sparsity::Kind::power, 1.0, 1.5, 0.0}, {}), std::invalid_argument);
  EXPECT_THROW(regime_verge(2.0, {}, {1.0, -1.0}), std::invalid_argument);
  EXPECT_THROW(regime_verge(2.0, {}, {}, {10.0, 5.0}), std::invalid_argument);
  EXPECT_THROW(regime_verge(2.0, {}, {}, {}), std::invalid_argument);
}

TEST(Experiments, ReplicatePoint) {
  const auto pt = make_replicate_point(1000.0, 0.001, 20.0, 2.0, 3.0, 1.0, 1.0);
  EXPECT_EQ(pt.n, 20.0);
  EXPECT_NEAR(pt.sigma_sq, 0.1, 1e-16);
  EXPECT_NEAR(pt.u, 30.0, 1e-13);
  EXPECT_NEAR(pt.derived.u, 30.0, 1e-13);
  EXPECT_THROW(make_replicate_point(10.0, 0.1, 0.5, 1.0, 1.0, 1.0, 1.0), std::invalid_argument);
}

TEST(Experiments, PresetCatalogue) {
  const auto names = preset_names();
  EXPECT_EQ(names.size(), 11u);
  for (const auto& n : names) {
    const auto p = preset(n);
    EXPECT_EQ(p.name, n);
    EXPECT_EQ(p.regime.name, n);
    EXPECT_FALSE(p.summary.empty());
    EXPECT_FALSE(p.regime.grid.empty());
    EXPECT_NO_THROW(p.regime.at(p.regime.grid.front()));
  }
  EXPECT_THROW(preset("nope"), std::invalid_argument);
  EXPECT_EQ(preset("bh_fixed_alpha").regime.grid, default_mc_grid());
  EXPECT_EQ(preset("bfdr_fixed_alpha").regime.at(1e6).alpha, 0.1);
  EXPECT_NEAR(*preset("bfdr_replicates").regime.at(1e6).alpha,
              0.1 / std::sqrt(2.0 * std::log(1e6)), 1e-15);
}

TEST(Experiments, ColumnsMatchRowValues) {
  const auto& cols = convergence_columns();
  ASSERT_EQ(cols.size(), 22u);
  const std::vector<std::string> core{"m", "p", "u", "v", "c_sq", "risk", "risk_opt", "ratio", "z_t", "crit2"};
  for (std::size_t i = 0; i < core.size(); ++i) EXPECT_EQ(cols[i], core[i]);
  EXPECT_EQ(row_values(ConvergenceRow{}).size(), cols.size());
  ConvergenceRow r;
  r.ratio = 1.25;
  r.risk_se = 0.5;
  EXPECT_EQ(row_values(r)[7], 1.25);
  EXPECT_EQ(row_values(r).back(), 0.5);
}

TEST(Experiments, OracleStudyHasUnitRatio) {
  const auto p = preset("oracle_verge");
  const auto rows = run_convergence(p.regime, p.rule, StudyMode::exact);
  ASSERT_EQ(rows.size(), 29u);
  for (const auto& r : rows) {
    EXPECT_NEAR(r.ratio, 1.0, 1e-12);
    EXPECT_TRUE(std::isnan(r.alpha));
    EXPECT_TRUE(std::isnan(r.s_t));
    EXPECT_EQ(r.risk_se, 0.0);
  }
}

TEST(Experiments, UniversalRatioDecreases) {
  const auto p = preset("lemma_universal");
  const auto rows = run_convergence(p.regime, p.rule, StudyMode::exact);
  const auto t = summarize_trend(column(rows, &ConvergenceRow::ratio), p.regime.tail_length);
  EXPECT_TRUE(t.tail_decreasing);
  EXPECT_GT(t.last, 1.0);
  for (const auto& r : rows) EXPECT_NEAR(r.c_sq, 2.0 * std::log(r.m), 1e-12 * r.c_sq);
}

TEST(Experiments, NonconformingStaysAway) {
  const auto p = preset("nonconforming");
  const auto rows = run_convergence(p.regime, p.rule, StudyMode::exact);
  for (std::size_t i = rows.size() - 10; i < rows.size(); ++i) EXPECT_GT(rows[i].ratio - 1.0, 0.05);
}

TEST(Experiments, BfdrPresetDiagnostics) {
  const auto p = preset("bfdr_fixed_alpha");
  const auto rows = run_convergence(p.regime, p.rule, StudyMode::exact);
  for (const auto& r : rows) {
    EXPECT_EQ(r.alpha, 0.1);
    EXPECT_TRUE(std::isfinite(r.s_t));
    EXPECT_TRUE(std::isfinite(r.c_sq_expansion));
    EXPECT_NEAR(r.bo_bh_lead, 2.0 * std::log(2.0 * std::log(1.0 / r.p)) + 2.0 * std::log(0.1), 1e-12);
  }
  std::vector<double> ratio_gap;
  for (const auto& r : rows) ratio_gap.push_back(r.ratio - 1.0);
  EXPECT_TRUE(summarize_trend(ratio_gap, 10).tail_decreasing);
}

TEST(Experiments, ExactModeRejectsBh) {
  const auto p = preset("bh_fixed_alpha");
  EXPECT_THROW(run_convergence(p.regime, p.rule, StudyMode::exact), std::invalid_argument);
}

TEST(Experiments, McModeIsDeterministic) {
  auto p = preset("bh_fixed_alpha");
  p.regime.grid = {1000.0, 3000.0};
  const McOptions a{.reps = 30, .seed = 4, .workers = 1};
  const McOptions b{.reps = 30, .seed = 4, .workers = 5};
  const auto ra = run_convergence(p.regime, p.rule, StudyMode::mc, a);
  const auto rb = run_convergence(p.regime, p.rule, StudyMode::mc, b);
  ASSERT_EQ(ra.size(), 2u);
  for (std::size_t i = 0; i < ra.size(); ++i) {
    const auto va = row_values(ra[i]), vb = row_values(rb[i]);
    for (std::size_t j = 0; j < va.size(); ++j) {
      if (std::isnan(va[j])) EXPECT_TRUE(std::isnan(vb[j]));
      else EXPECT_EQ(va[j], vb[j]);
    }
    EXPECT_GT(ra[i].risk_se, 0.0);
    EXPECT_GT(ra[i].c_sq, 0.0);
  }

  auto oracle = preset("oracle_verge");
  oracle.regime.grid = {1000.0, std::sqrt(10.0) * 1000.0};
  EXPECT_THROW(run_convergence(oracle.regime, oracle.rule, StudyMode::mc, a), std::invalid_argument);
}
