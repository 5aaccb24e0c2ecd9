#pragma once

// Parameter regimes indexed by the number of tests m, preset studies that
// pair a regime with the rule claimed to be optimal on it, and convergence
// tables of R / R_opt along the grid.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sparsemt/model.hpp"
#include "sparsemt/montecarlo.hpp"
#include "sparsemt/rules.hpp"

namespace sparsemt {

struct RegimePoint {
  std::size_t index = 0;
  double m = 0.0;
  double p = 0.0;
  double u = 0.0;
  double delta = 1.0;
  std::optional<double> alpha;
  std::optional<double> n;  ///< replicates per test statistic
  double sigma_sq = 1.0;
  double tau_sq = 0.0;
  DerivedParams derived;
  double C_point = 0.0;     ///< log v / u at this point
  double C_declared = 0.0;  ///< limit of log v / u along the regime

  TestingSetting setting() const;
};

/// sigma^2 = 1, tau^2 = u; p is clamped to [1e-300, 1 - 1e-12].
RegimePoint make_point(double m, double p, double u, double delta, double C_declared);
/// Replicate design: sigma^2 = sigma_s^2 / n, tau^2 fixed.
RegimePoint make_replicate_point(double m, double p, double n, double sigma_s_sq, double tau_sq,
                                 double delta, double C_declared);

struct Regime {
  std::string name;
  std::function<RegimePoint(double m)> at;
  std::vector<double> grid;  ///< increasing values of m
  double C_declared = 0.0;
  std::size_t tail_length = 10;

  std::vector<RegimePoint> points() const;
};

/// m = 10^lo, 10^(lo + 1/per_decade), ..., 10^hi. Integral exponents give
/// exact powers of ten.
std::vector<double> decade_grid(double lo, double hi, int per_decade);
/// 10^2 ... 10^16 in half decades.
std::vector<double> default_exact_grid();
/// 10^3 ... 10^6 in decades.
std::vector<double> default_mc_grid();

/// p = a m^-kappa (kappa in (0, 1]) or p = a (log m)^zeta / m.
struct Sparsity {
  enum class Kind { power, extreme };
  Kind kind = Kind::extreme;
  double a = 1.0;
  double kappa = 1.0;
  double zeta = 0.0;

  double p_at(double m) const;
};

/// delta = c (log m)^-g, g >= 0.
struct DeltaRule {
  double c = 1.0;
  double g = 0.0;

  double delta_at(double m) const;
};

/// u = beta log m with the given sparsity and loss ratio; the declared C is
/// 2 kappa / beta (kappa = 1 for extreme sparsity).
Regime regime_verge(double beta, const Sparsity& sparsity, const DeltaRule& delta,
                    std::vector<double> grid = default_exact_grid());

struct Preset {
  std::string name;
  std::string summary;
  Regime regime;
  Rule rule;
};

/// Throws std::invalid_argument for unknown names.
Preset preset(std::string_view name);
std::vector<std::string> preset_names();

enum class StudyMode { exact, mc };

/// One grid point. Inapplicable fields are NaN.
struct ConvergenceRow {
  double m = 0.0;
  double p = 0.0;
  double u = 0.0;
  double v = 0.0;
  double c_sq = 0.0;
  double risk = 0.0;
  double risk_opt = 0.0;
  double ratio = 0.0;
  double z_t = 0.0;
  double crit2 = 0.0;
  double log_v = 0.0;
  double delta = 0.0;
  double alpha = 0.0;
  double C_point = 0.0;
  double s_t = 0.0;
  double cond_w2 = 0.0;
  double t_uvd = 0.0;
  double exp_true_rej = 0.0;
  double exp_false_rej = 0.0;
  double c_sq_expansion = 0.0;  ///< closed-form expansion of c^2 for level rules
  double bo_bh_lead = 0.0;      ///< 2 log(2 log(1/p)) + 2 log alpha
  double risk_se = 0.0;
};

/// Column names in output order; the first ten are the fixed core.
const std::vector<std::string>& convergence_columns();
std::vector<double> row_values(const ConvergenceRow& row);

/// Exact mode evaluates closed forms and rejects BH. In mc mode grid point i
/// runs with master seed stream_seed(mc.seed, i) and needs integral m.
std::vector<ConvergenceRow> run_convergence(const Regime& regime, const Rule& rule,
                                            StudyMode mode, const McOptions& mc = {});

}  // namespace sparsemt
