#include "sparsemt/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sparsemt/bfdr.hpp"
#include "sparsemt/error.hpp"
#include "sparsemt/procedures.hpp"
#include "sparsemt/risk.hpp"
#include "sparsemt/rng.hpp"

namespace sparsemt {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kMinP = 1e-300;
constexpr double kMaxP = 1.0 - 1e-12;

double clamp_p(double p) { return std::clamp(p, kMinP, kMaxP); }

void fill_derived(RegimePoint& pt) {
  pt.derived = derive(pt.setting());
  pt.C_point = pt.derived.log_v / pt.derived.u;
}

// Wraps a regime so every point also carries a level alpha(m).
Regime with_level(Regime regime, std::function<double(double)> alpha) {
  regime.at = [base = regime.at, alpha = std::move(alpha)](double m) {
    RegimePoint pt = base(m);
    pt.alpha = alpha(m);
    return pt;
  };
  return regime;
}

// Replicate design with p = 1/m and n = 2 log m replicates, sigma_s = tau = 1,
// so u = n and log v / u -> 1.
Regime replicate_regime(std::string name) {
  Regime r;
  r.name = std::move(name);
  r.grid = default_exact_grid();
  r.C_declared = 1.0;
  r.at = [](double m) {
    const double n = 2.0 * std::log(m);
    return make_replicate_point(m, 1.0 / m, n, 1.0, 1.0, 1.0, 1.0);
  };
  return r;
}

std::optional<double> bfdr_expansion(const Rule& rule, const RegimePoint& pt) {
  const auto level = rule_level(rule);
  if (!level) return std::nullopt;
  try {
    const AsymptoticConstants consts(pt.C_declared);
    if (std::holds_alternative<BfdrRule>(rule)) {
      return bfdr_threshold_asymptotic(pt.derived.f, BfdrLevel(*level), consts);
    }
    if (std::holds_alternative<GwRule>(rule)) {
      return bfdr_threshold_asymptotic(pt.derived.f, BfdrLevel(*level * (1.0 - pt.p)), consts);
    }
    if (std::holds_alternative<BonferroniRule>(rule)) {
      return bonferroni_threshold_asymptotic(pt.m, *level).value();
    }
  } catch (const std::invalid_argument&) {
  }
  return std::nullopt;
}

}  // namespace

TestingSetting RegimePoint::setting() const {
  return TestingSetting(MixtureModel(p, sigma_sq, tau_sq), Losses(delta, 1.0), m);
}

RegimePoint make_point(double m, double p, double u, double delta, double C_declared) {
  RegimePoint pt;
  pt.m = m;
  pt.p = clamp_p(p);
  pt.u = u;
  pt.delta = delta;
  pt.sigma_sq = 1.0;
  pt.tau_sq = u;
  pt.C_declared = C_declared;
  fill_derived(pt);
  return pt;
}

RegimePoint make_replicate_point(double m, double p, double n, double sigma_s_sq, double tau_sq,
                                 double delta, double C_declared) {
  if (!(n >= 1.0)) detail::fail_argument("n must be >= 1");
  RegimePoint pt;
  pt.m = m;
  pt.p = clamp_p(p);
  pt.n = n;
  pt.sigma_sq = sigma_s_sq / n;
  pt.tau_sq = tau_sq;
  pt.u = tau_sq / pt.sigma_sq;
  pt.delta = delta;
  pt.C_declared = C_declared;
  fill_derived(pt);
  return pt;
}

std::vector<RegimePoint> Regime::points() const {
  std::vector<RegimePoint> out;
  out.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.push_back(at(grid[i]));
    out.back().index = i;
  }
  return out;
}

std::vector<double> decade_grid(double lo, double hi, int per_decade) {
  if (per_decade < 1) detail::fail_argument("per_decade must be >= 1");
  if (!(hi >= lo)) detail::fail_argument("grid bounds must satisfy lo <= hi");
  std::vector<double> out;
  const auto steps = static_cast<long>(std::llround((hi - lo) * per_decade));
  for (long i = 0; i <= steps; ++i) {
    out.push_back(std::pow(10.0, lo + static_cast<double>(i) / per_decade));
  }
  return out;
}

std::vector<double> default_exact_grid() { return decade_grid(2.0, 16.0, 2); }
std::vector<double> default_mc_grid() { return decade_grid(3.0, 6.0, 1); }

double Sparsity::p_at(double m) const {
  if (kind == Kind::power) return clamp_p(a * std::pow(m, -kappa));
  return clamp_p(a * std::pow(std::log(m), zeta) / m);
}

double DeltaRule::delta_at(double m) const { return c * std::pow(std::log(m), -g); }

Regime regime_verge(double beta, const Sparsity& sparsity, const DeltaRule& delta,
                    std::vector<double> grid) {
  if (!(beta > 0.0) || !std::isfinite(beta)) detail::fail_argument("beta must be > 0");
  if (!(sparsity.a > 0.0) || !std::isfinite(sparsity.a)) {
    detail::fail_argument("sparsity scale a must be > 0");
  }
  if (sparsity.kind == Sparsity::Kind::power &&
      !(sparsity.kappa > 0.0 && sparsity.kappa <= 1.0)) {
    detail::fail_argument("power sparsity needs kappa in (0, 1]");
  }
  if (sparsity.kind == Sparsity::Kind::extreme && !std::isfinite(sparsity.zeta)) {
    detail::fail_argument("extreme sparsity needs a finite zeta");
  }
  if (!(delta.c > 0.0) || !std::isfinite(delta.c)) detail::fail_argument("delta scale must be > 0");
  if (!(delta.g >= 0.0) || !std::isfinite(delta.g)) detail::fail_argument("delta decay g must be >= 0");
  if (grid.empty()) detail::fail_argument("grid must not be empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 1.0) || (i > 0 && !(grid[i] > grid[i - 1]))) {
      detail::fail_argument("grid must be increasing with every m > 1");
    }
  }

  const double kappa = sparsity.kind == Sparsity::Kind::power ? sparsity.kappa : 1.0;
  Regime r;
  r.name = "verge";
  r.grid = std::move(grid);
  r.C_declared = 2.0 * kappa / beta;
  r.at = [beta, sparsity, delta, C = r.C_declared](double m) {
    return make_point(m, sparsity.p_at(m), beta * std::log(m), delta.delta_at(m), C);
  };
  return r;
}

std::vector<std::string> preset_names() {
  return {"oracle_verge",     "lemma_universal",  "lemma_replicates", "nonconforming",
          "bfdr_replicates",  "bfdr_fixed_alpha", "bfdr_fixed_delta", "gw_fixed_alpha",
          "bonferroni_extreme", "bh_fixed_alpha", "bh_fixed_delta"};
}

Preset preset(std::string_view name) {
  const Sparsity one_over_m{Sparsity::Kind::extreme, 1.0, 1.0, 0.0};
  const Sparsity root_m{Sparsity::Kind::power, 1.0, 0.5, 0.0};
  const DeltaRule unit{1.0, 0.0};
  const DeltaRule inv_log{1.0, 1.0};
  const auto inv_log_m = [](double m) { return 1.0 / std::log(m); };
  const auto fixed = [](double a) { return [a](double) { return a; }; };

  Preset out;
  out.name = std::string(name);
  if (name == "oracle_verge") {
    out.summary = "p = 1/m, u = 2 log m, delta = 1; Bayes oracle";
    out.regime = regime_verge(2.0, one_over_m, unit);
    out.rule = OracleRule{};
  } else if (name == "lemma_universal") {
    out.summary = "p = 1/m, u = 2 log m, delta = 1; c^2 = 2 log m";
    out.regime = regime_verge(2.0, one_over_m, unit);
    out.rule = UniversalRule{0.0};
  } else if (name == "lemma_replicates") {
    out.summary = "p = 1/m, n = 2 log m replicates, sigma^2 = 1/n, tau = 1; c^2 = log n + 2 log m";
    out.regime = replicate_regime("lemma_replicates");
    out.rule = ReplicateRule{std::nullopt, 0.0};
  } else if (name == "nonconforming") {
    out.summary = "p = 1/m, u = 2 log m, delta = 1; c^2 = log v - 3 log log v";
    out.regime = regime_verge(2.0, one_over_m, unit);
    out.rule = LogVRule{-3.0, 0.0};
  } else if (name == "bfdr_replicates") {
    out.summary = "replicate design as lemma_replicates; BFDR at 0.1 / sqrt(n)";
    out.regime = replicate_regime("bfdr_replicates");
    out.regime.at = [base = out.regime.at](double m) {
      RegimePoint pt = base(m);
      pt.alpha = 0.1 / std::sqrt(*pt.n);
      return pt;
    };
    out.rule = BfdrRule{};
  } else if (name == "bfdr_fixed_alpha") {
    out.summary = "p = m^-1/2, u = 2 log m, delta = 1/log m; BFDR at 0.1";
    out.regime = with_level(regime_verge(2.0, root_m, inv_log), fixed(0.1));
    out.rule = BfdrRule{};
  } else if (name == "bfdr_fixed_delta") {
    out.summary = "p = m^-1/2, u = 2 log m, delta = 1; BFDR at 1/log m";
    out.regime = with_level(regime_verge(2.0, root_m, unit), inv_log_m);
    out.rule = BfdrRule{};
  } else if (name == "gw_fixed_alpha") {
    out.summary = "p = m^-1/2, u = 2 log m, delta = 1/log m; GW threshold at 0.1";
    out.regime = with_level(regime_verge(2.0, root_m, inv_log), fixed(0.1));
    out.rule = GwRule{};
  } else if (name == "bonferroni_extreme") {
    out.summary = "p = 1/m, u = 2 log m, delta = 1; Bonferroni at FWER 1/log m";
    out.regime = with_level(regime_verge(2.0, one_over_m, unit), inv_log_m);
    out.rule = BonferroniRule{};
  } else if (name == "bh_fixed_alpha") {
    out.summary = "p = m^-1/2, u = 2 log m, delta = 1/log m; BH at 0.1";
    out.regime = with_level(regime_verge(2.0, root_m, inv_log, default_mc_grid()), fixed(0.1));
    out.rule = BhRule{};
  } else if (name == "bh_fixed_delta") {
    out.summary = "p = m^-1/2, u = 2 log m, delta = 1; BH at 1/log m";
    out.regime = with_level(regime_verge(2.0, root_m, unit, default_mc_grid()), inv_log_m);
    out.rule = BhRule{};
  } else {
    detail::fail_argument("unknown preset '" + std::string(name) + "'");
  }
  out.regime.name = out.name;
  return out;
}

const std::vector<std::string>& convergence_columns() {
  static const std::vector<std::string> columns = {
      "m",        "p",         "u",        "v",          "c_sq",         "risk",
      "risk_opt", "ratio",     "z_t",      "crit2",      "log_v",        "delta",
      "alpha",    "C_point",   "s_t",      "cond_w2",    "t_uvd",        "exp_true_rej",
      "exp_false_rej", "c_sq_expansion", "bo_bh_lead", "risk_se"};
  return columns;
}

std::vector<double> row_values(const ConvergenceRow& r) {
  return {r.m,        r.p,        r.u,           r.v,           r.c_sq,         r.risk,
          r.risk_opt, r.ratio,    r.z_t,         r.crit2,       r.log_v,        r.delta,
          r.alpha,    r.C_point,  r.s_t,         r.cond_w2,     r.t_uvd,        r.exp_true_rej,
          r.exp_false_rej, r.c_sq_expansion, r.bo_bh_lead, r.risk_se};
}

std::vector<ConvergenceRow> run_convergence(const Regime& regime, const Rule& rule,
                                            StudyMode mode, const McOptions& mc) {
  if (mode == StudyMode::exact && !is_fixed_threshold(rule)) {
    detail::fail_argument("exact mode needs a fixed-threshold rule; BH requires mc mode");
  }
  std::vector<ConvergenceRow> rows;
  for (const RegimePoint& pt : regime.points()) {
    const Rule bound = bind(rule, pt.alpha, pt.n);
    const TestingSetting setting = pt.setting();
    const DerivedParams& d = pt.derived;

    ConvergenceRow row;
    row.m = pt.m;
    row.p = pt.p;
    row.u = d.u;
    row.v = d.v;
    row.log_v = d.log_v;
    row.delta = d.delta;
    row.alpha = rule_level(bound).value_or(kNaN);
    row.C_point = pt.C_point;
    row.risk_opt = optimal_risk_exact(setting).total;

    ThresholdSq c_sq;
    if (mode == StudyMode::exact) {
      c_sq = fixed_threshold(bound, setting);
      row.risk = fixed_threshold_risk(setting, c_sq).total;
      row.risk_se = 0.0;
    } else {
      McOptions opts = mc;
      opts.seed = stream_seed(mc.seed, pt.index);
      const McReport rep = mc_run(setting, bound, opts);
      row.risk = rep.risk.mean;
      row.risk_se = rep.risk.std_error;
      c_sq = is_fixed_threshold(bound) ? fixed_threshold(bound, setting)
                                       : ThresholdSq(rep.threshold.mean * rep.threshold.mean);
    }
    row.c_sq = c_sq.value();
    row.ratio = row.risk / row.risk_opt;

    row.z_t = row.crit2 = kNaN;
    if (d.log_v > 0.0) {
      const OptimalityDiagnostics diag = optimality_diagnostics_log(c_sq, d.log_v);
      row.z_t = diag.z_t;
      row.crit2 = diag.crit2;
    }

    row.s_t = row.cond_w2 = row.t_uvd = kNaN;
    if (std::isfinite(row.alpha)) {
      try {
        const BfdrDiagnostics bd = bfdr_optimality_diagnostics(d, BfdrLevel(row.alpha));
        row.s_t = bd.s_t;
        row.cond_w2 = bd.cond_w2;
        row.t_uvd = bd.t_uvd;
      } catch (const std::invalid_argument&) {
      }
      row.bo_bh_lead = 2.0 * std::log(2.0 * std::log(1.0 / pt.p)) + 2.0 * std::log(row.alpha);
    } else {
      row.bo_bh_lead = kNaN;
    }

    row.exp_true_rej = pt.m * pt.p * power_exact(c_sq, d.u);
    row.exp_false_rej = pt.m * (1.0 - pt.p) * type1_exact(c_sq);
    row.c_sq_expansion = bfdr_expansion(bound, pt).value_or(kNaN);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace sparsemt
