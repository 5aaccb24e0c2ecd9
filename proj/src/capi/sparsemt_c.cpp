#include "sparsemt/sparsemt.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <exception>
#include <limits>
#include <memory>
#include <new>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sparsemt/bfdr.hpp"
#include "sparsemt/error.hpp"
#include "sparsemt/experiments.hpp"
#include "sparsemt/montecarlo.hpp"
#include "sparsemt/normal.hpp"
#include "sparsemt/procedures.hpp"
#include "sparsemt/risk.hpp"
#include "sparsemt/rules.hpp"

struct smt_setting {
  sparsemt::TestingSetting value;
};

struct smt_rule {
  sparsemt::Rule value;
};

struct smt_study {
  sparsemt::Preset preset;
};

struct smt_table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

thread_local std::string last_error;
thread_local double last_supremum = kNaN;

smt_status fail(smt_status status, const char* message) {
  last_error = message;
  return status;
}

void clear_error() {
  last_error.clear();
  last_supremum = kNaN;
}

template <class F>
smt_status guarded(F&& body) {
  clear_error();
  try {
    body();
    return SMT_OK;
  } catch (const sparsemt::LevelOutOfRange& e) {
    last_supremum = e.supremum();
    return fail(SMT_LEVEL_OUT_OF_RANGE, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(SMT_INVALID_ARGUMENT, e.what());
  } catch (const std::domain_error& e) {
    return fail(SMT_DOMAIN_ERROR, e.what());
  } catch (const std::bad_alloc&) {
    return fail(SMT_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(SMT_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(SMT_INTERNAL_ERROR, "unknown error");
  }
}

template <class... Ptrs>
bool any_null(const Ptrs*... ptrs) {
  return ((ptrs == nullptr) || ...);
}

#define SMT_REQUIRE(...)                                            \
  do {                                                              \
    clear_error();                                                  \
    if (any_null(__VA_ARGS__)) {                                    \
      return fail(SMT_NULL_POINTER, "required pointer argument is NULL"); \
    }                                                               \
  } while (0)

smt_estimate to_c(const sparsemt::McEstimate& e) { return {e.mean, e.std_error, e.reps}; }

smt_mc_report to_c(const sparsemt::McReport& r) {
  smt_mc_report out{};
  out.risk = to_c(r.risk);
  out.fdr = to_c(r.fdr);
  out.fwer = to_c(r.fwer);
  out.ev = to_c(r.ev);
  out.power = to_c(r.power);
  out.type1 = to_c(r.type1);
  out.type2 = to_c(r.type2);
  out.rejections = to_c(r.rejections);
  out.threshold = to_c(r.threshold);
  out.has_threshold_gap = r.threshold_gap ? 1 : 0;
  out.threshold_gap = r.threshold_gap ? to_c(*r.threshold_gap) : smt_estimate{kNaN, 0.0, 0};
  return out;
}

sparsemt::McOptions from_c(const smt_mc_options& o) {
  sparsemt::McOptions out;
  out.reps = static_cast<std::size_t>(o.reps);
  out.seed = o.seed;
  out.workers = o.workers;
  return out;
}

smt_risk to_c(const sparsemt::RiskBreakdown& r) { return {r.r1, r.r2, r.total}; }

}  // namespace

extern "C" {

const char* smt_version(void) { return SPARSEMT_VERSION_STRING; }

const char* smt_last_error(void) { return last_error.c_str(); }

double smt_last_supremum(void) { return last_supremum; }

const char* smt_status_name(smt_status status) {
  switch (status) {
    case SMT_OK: return "ok";
    case SMT_INVALID_ARGUMENT: return "invalid argument";
    case SMT_DOMAIN_ERROR: return "domain error";
    case SMT_LEVEL_OUT_OF_RANGE: return "level out of range";
    case SMT_NULL_POINTER: return "null pointer";
    case SMT_INTERNAL_ERROR: return "internal error";
  }
  return "unknown status";
}

double smt_normal_pdf(double x) { return std::isfinite(x) ? sparsemt::normal::pdf(x) : 0.0; }

double smt_normal_cdf(double x) { return std::isnan(x) ? kNaN : sparsemt::normal::cdf(x); }

double smt_normal_sf(double x) { return std::isnan(x) ? kNaN : sparsemt::normal::sf(x); }

smt_status smt_normal_quantile(double q, double* out) {
  SMT_REQUIRE(out);
  return guarded([&] { *out = sparsemt::normal::quantile(q); });
}

smt_status smt_setting_create(double p, double sigma_sq, double tau_sq, double delta0,
                              double deltaA, double m, smt_setting** out) {
  SMT_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    *out = new smt_setting{sparsemt::TestingSetting(sparsemt::MixtureModel(p, sigma_sq, tau_sq),
                                                    sparsemt::Losses(delta0, deltaA), m)};
  });
}

void smt_setting_destroy(smt_setting* setting) { delete setting; }

smt_status smt_setting_derived(const smt_setting* setting, smt_derived* out) {
  SMT_REQUIRE(setting, out);
  return guarded([&] {
    const auto d = sparsemt::derive(setting->value);
    *out = {d.u, d.f, d.delta, d.v, d.log_v, d.log_f};
  });
}

smt_status smt_setting_params(const smt_setting* setting, double* p, double* sigma_sq,
                              double* tau_sq, double* delta0, double* deltaA, double* m) {
  SMT_REQUIRE(setting);
  const auto& s = setting->value;
  if (p) *p = s.model().p();
  if (sigma_sq) *sigma_sq = s.model().sigma_sq();
  if (tau_sq) *tau_sq = s.model().tau_sq();
  if (delta0) *delta0 = s.losses().delta0();
  if (deltaA) *deltaA = s.losses().deltaA();
  if (m) *m = s.m();
  return SMT_OK;
}

smt_status smt_oracle_threshold(const smt_setting* setting, double* c_sq, int* reject_all) {
  SMT_REQUIRE(setting, c_sq);
  return guarded([&] {
    const auto t = sparsemt::oracle_threshold_sq(sparsemt::derive(setting->value));
    *c_sq = t.c_sq.value();
    if (reject_all) *reject_all = t.reject_all ? 1 : 0;
  });
}

smt_status smt_bfdr_threshold(const smt_setting* setting, double alpha, double* c_sq) {
  SMT_REQUIRE(setting, c_sq);
  return guarded([&] {
    *c_sq = sparsemt::bfdr_threshold(setting->value.model(), sparsemt::BfdrLevel(alpha)).value();
  });
}

smt_status smt_gw_threshold(const smt_setting* setting, double alpha, double* c_sq) {
  SMT_REQUIRE(setting, c_sq);
  return guarded([&] {
    *c_sq = sparsemt::gw_threshold(setting->value.model(), sparsemt::BfdrLevel(alpha)).value();
  });
}

smt_status smt_bonferroni_threshold(double m, double alpha, double* c_sq) {
  SMT_REQUIRE(c_sq);
  return guarded([&] { *c_sq = sparsemt::bonferroni_threshold(m, alpha).value(); });
}

smt_status smt_universal_threshold(double m, double d, double* c_sq) {
  SMT_REQUIRE(c_sq);
  return guarded([&] { *c_sq = sparsemt::universal_threshold(m, d).value(); });
}

smt_status smt_replicate_threshold(double m, double n, double d, double* c_sq) {
  SMT_REQUIRE(c_sq);
  return guarded([&] { *c_sq = sparsemt::replicate_threshold(m, n, d).value(); });
}

smt_status smt_bfdr_of_threshold(const smt_setting* setting, double c_sq, double* out) {
  SMT_REQUIRE(setting, out);
  return guarded([&] {
    *out = sparsemt::bfdr_of_threshold(setting->value.model(), sparsemt::ThresholdSq(c_sq));
  });
}

smt_status smt_type1(double c_sq, double* out) {
  SMT_REQUIRE(out);
  return guarded([&] { *out = sparsemt::type1_exact(sparsemt::ThresholdSq(c_sq)); });
}

smt_status smt_type2(double c_sq, double u, double* out) {
  SMT_REQUIRE(out);
  return guarded([&] { *out = sparsemt::type2_exact(sparsemt::ThresholdSq(c_sq), u); });
}

smt_status smt_fixed_threshold_risk(const smt_setting* setting, double c_sq, smt_risk* out) {
  SMT_REQUIRE(setting, out);
  return guarded([&] {
    *out = to_c(sparsemt::fixed_threshold_risk(setting->value, sparsemt::ThresholdSq(c_sq)));
  });
}

smt_status smt_optimal_risk(const smt_setting* setting, smt_risk* out) {
  SMT_REQUIRE(setting, out);
  return guarded([&] { *out = to_c(sparsemt::optimal_risk_exact(setting->value)); });
}

smt_status smt_rule_parse(const char* text, smt_rule** out) {
  SMT_REQUIRE(text, out);
  *out = nullptr;
  return guarded([&] { *out = new smt_rule{sparsemt::parse_rule(text)}; });
}

void smt_rule_destroy(smt_rule* rule) { delete rule; }

smt_status smt_rule_text(const smt_rule* rule, char* buf, size_t cap, size_t* needed) {
  SMT_REQUIRE(rule);
  return guarded([&] {
    const std::string text = sparsemt::to_string(rule->value);
    if (needed) *needed = text.size();
    if (buf && cap > 0) {
      const size_t n = std::min(cap - 1, text.size());
      std::memcpy(buf, text.data(), n);
      buf[n] = '\0';
    }
  });
}

int smt_rule_is_fixed(const smt_rule* rule) {
  return rule != nullptr && sparsemt::is_fixed_threshold(rule->value) ? 1 : 0;
}

smt_status smt_rule_level(const smt_rule* rule, double* alpha, int* has_level) {
  SMT_REQUIRE(rule, alpha, has_level);
  const auto level = sparsemt::rule_level(rule->value);
  *has_level = level ? 1 : 0;
  *alpha = level.value_or(kNaN);
  return SMT_OK;
}

smt_status smt_rule_threshold(const smt_rule* rule, const smt_setting* setting, double* c_sq) {
  SMT_REQUIRE(rule, setting, c_sq);
  return guarded([&] { *c_sq = sparsemt::fixed_threshold(rule->value, setting->value).value(); });
}

smt_status smt_mc_run(const smt_setting* setting, const smt_rule* rule, const smt_mc_options* opts,
                      smt_mc_report* out) {
  SMT_REQUIRE(setting, rule, opts, out);
  return guarded(
      [&] { *out = to_c(sparsemt::mc_run(setting->value, rule->value, from_c(*opts))); });
}

smt_status smt_mc_conditional(const smt_setting* setting, const smt_rule* rule, uint64_t k,
                              const smt_mc_options* opts, smt_mc_report* out) {
  SMT_REQUIRE(setting, rule, opts, out);
  return guarded([&] {
    *out = to_c(sparsemt::mc_conditional_k(setting->value, rule->value, k, from_c(*opts)));
  });
}

smt_status smt_threshold_gap(const smt_setting* setting, double alpha, double epsilon,
                             const smt_mc_options* opts, int has_k, uint64_t k,
                             smt_gap_study* out) {
  SMT_REQUIRE(setting, opts, out);
  return guarded([&] {
    std::optional<std::uint64_t> kk;
    if (has_k) kk = k;
    const auto g = sparsemt::threshold_gap_study(setting->value, alpha, epsilon, from_c(*opts), kk);
    *out = {to_c(g.gap), g.median_gap, g.exceed_frac, g.c_gw, g.c_bon};
  });
}

size_t smt_preset_count(void) { return sparsemt::preset_names().size(); }

const char* smt_preset_name(size_t index) {
  static const std::vector<std::string> names = sparsemt::preset_names();
  return index < names.size() ? names[index].c_str() : nullptr;
}

smt_status smt_study_open(const char* preset, smt_study** out) {
  SMT_REQUIRE(preset, out);
  *out = nullptr;
  return guarded([&] { *out = new smt_study{sparsemt::preset(preset)}; });
}

void smt_study_destroy(smt_study* study) { delete study; }

const char* smt_study_summary(const smt_study* study) {
  return study ? study->preset.summary.c_str() : "";
}

smt_status smt_study_rule(const smt_study* study, smt_rule** out) {
  SMT_REQUIRE(study, out);
  *out = nullptr;
  return guarded([&] { *out = new smt_rule{study->preset.rule}; });
}

smt_status smt_study_set_rule(smt_study* study, const smt_rule* rule) {
  SMT_REQUIRE(study, rule);
  study->preset.rule = rule->value;
  return SMT_OK;
}

smt_status smt_study_set_grid(smt_study* study, const double* m, size_t count) {
  SMT_REQUIRE(study, m);
  return guarded([&] {
    if (count == 0) sparsemt::detail::fail_argument("grid must not be empty");
    std::vector<double> grid(m, m + count);
    for (size_t i = 0; i < count; ++i) {
      if (!(grid[i] > 1.0) || !std::isfinite(grid[i]) || (i > 0 && !(grid[i] > grid[i - 1]))) {
        sparsemt::detail::fail_argument("grid must be increasing and finite with every m > 1");
      }
    }
    study->preset.regime.grid = std::move(grid);
  });
}

smt_status smt_study_grid(const smt_study* study, const double** m, size_t* count) {
  SMT_REQUIRE(study, m, count);
  *m = study->preset.regime.grid.data();
  *count = study->preset.regime.grid.size();
  return SMT_OK;
}

smt_status smt_study_point(const smt_study* study, double m, smt_setting** setting,
                           smt_rule** rule) {
  SMT_REQUIRE(study, setting);
  *setting = nullptr;
  if (rule) *rule = nullptr;
  return guarded([&] {
    if (!(m > 1.0) || !std::isfinite(m)) sparsemt::detail::fail_argument("m must be > 1 and finite");
    const sparsemt::RegimePoint pt = study->preset.regime.at(m);
    auto s = std::make_unique<smt_setting>(smt_setting{pt.setting()});
    if (rule) *rule = new smt_rule{sparsemt::bind(study->preset.rule, pt.alpha, pt.n)};
    *setting = s.release();
  });
}

smt_status smt_study_run(const smt_study* study, smt_mode mode, const smt_mc_options* opts,
                         smt_table** out) {
  SMT_REQUIRE(study, out);
  *out = nullptr;
  if (mode == SMT_MODE_MC && opts == nullptr) {
    return fail(SMT_NULL_POINTER, "mc mode needs options");
  }
  return guarded([&] {
    if (mode != SMT_MODE_EXACT && mode != SMT_MODE_MC) {
      sparsemt::detail::fail_argument("unknown study mode");
    }
    const auto m = mode == SMT_MODE_EXACT ? sparsemt::StudyMode::exact : sparsemt::StudyMode::mc;
    const auto rows = sparsemt::run_convergence(study->preset.regime, study->preset.rule, m,
                                                opts ? from_c(*opts) : sparsemt::McOptions{});
    auto table = std::make_unique<smt_table>();
    table->columns = sparsemt::convergence_columns();
    for (const auto& row : rows) table->rows.push_back(sparsemt::row_values(row));
    *out = table.release();
  });
}

void smt_table_destroy(smt_table* table) { delete table; }

size_t smt_table_columns(const smt_table* table) { return table ? table->columns.size() : 0; }

size_t smt_table_rows(const smt_table* table) { return table ? table->rows.size() : 0; }

const char* smt_table_column_name(const smt_table* table, size_t col) {
  if (!table || col >= table->columns.size()) return nullptr;
  return table->columns[col].c_str();
}

smt_status smt_table_value(const smt_table* table, size_t row, size_t col, double* out) {
  SMT_REQUIRE(table, out);
  if (row >= table->rows.size() || col >= table->columns.size()) {
    return fail(SMT_INVALID_ARGUMENT, "table index out of range");
  }
  *out = table->rows[row][col];
  return SMT_OK;
}

}  // extern "C"
