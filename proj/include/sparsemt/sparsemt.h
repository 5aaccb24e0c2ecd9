#ifndef SPARSEMT_SPARSEMT_H
#define SPARSEMT_SPARSEMT_H

/* C interface to the sparse multiple testing toolkit.
 *
 * Every fallible call returns an smt_status; on failure the message is
 * available from smt_last_error() on the same thread until the next call.
 * Handles are opaque, owned by the caller and released with the matching
 * *_destroy function (which accepts NULL).
 *
 * Thresholds are squared, on the X^2 / sigma^2 scale. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(SPARSEMT_BUILDING)
#define SMT_API __declspec(dllexport)
#else
#define SMT_API __declspec(dllimport)
#endif
#else
#define SMT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum smt_status {
  SMT_OK = 0,
  SMT_INVALID_ARGUMENT = 1,
  SMT_DOMAIN_ERROR = 2,
  SMT_LEVEL_OUT_OF_RANGE = 3,
  SMT_NULL_POINTER = 4,
  SMT_INTERNAL_ERROR = 5
} smt_status;

typedef enum smt_mode { SMT_MODE_EXACT = 0, SMT_MODE_MC = 1 } smt_mode;

typedef struct smt_setting smt_setting;
typedef struct smt_rule smt_rule;
typedef struct smt_study smt_study;
typedef struct smt_table smt_table;

SMT_API const char* smt_version(void);
SMT_API const char* smt_last_error(void);
/* Largest attainable level after SMT_LEVEL_OUT_OF_RANGE, NaN otherwise. */
SMT_API double smt_last_supremum(void);
SMT_API const char* smt_status_name(smt_status status);

/* Normal distribution. */
SMT_API double smt_normal_pdf(double x);
SMT_API double smt_normal_cdf(double x);
SMT_API double smt_normal_sf(double x);
SMT_API smt_status smt_normal_quantile(double q, double* out);

/* Settings: X ~ (1-p) N(0, sigma^2) + p N(0, sigma^2 + tau^2), losses
 * delta0 / deltaA, m tests (real, >= 1). */
SMT_API smt_status smt_setting_create(double p, double sigma_sq, double tau_sq, double delta0,
                                      double deltaA, double m, smt_setting** out);
SMT_API void smt_setting_destroy(smt_setting* setting);

typedef struct smt_derived {
  double u;
  double f;
  double delta;
  double v;
  double log_v;
  double log_f;
} smt_derived;

SMT_API smt_status smt_setting_derived(const smt_setting* setting, smt_derived* out);
SMT_API smt_status smt_setting_params(const smt_setting* setting, double* p, double* sigma_sq,
                                      double* tau_sq, double* delta0, double* deltaA, double* m);

/* Thresholds. */
SMT_API smt_status smt_oracle_threshold(const smt_setting* setting, double* c_sq, int* reject_all);
SMT_API smt_status smt_bfdr_threshold(const smt_setting* setting, double alpha, double* c_sq);
SMT_API smt_status smt_gw_threshold(const smt_setting* setting, double alpha, double* c_sq);
SMT_API smt_status smt_bonferroni_threshold(double m, double alpha, double* c_sq);
SMT_API smt_status smt_universal_threshold(double m, double d, double* c_sq);
SMT_API smt_status smt_replicate_threshold(double m, double n, double d, double* c_sq);
SMT_API smt_status smt_bfdr_of_threshold(const smt_setting* setting, double c_sq, double* out);

/* Error rates and risk. */
SMT_API smt_status smt_type1(double c_sq, double* out);
SMT_API smt_status smt_type2(double c_sq, double u, double* out);

typedef struct smt_risk {
  double r1;
  double r2;
  double total;
} smt_risk;

SMT_API smt_status smt_fixed_threshold_risk(const smt_setting* setting, double c_sq,
                                            smt_risk* out);
SMT_API smt_status smt_optimal_risk(const smt_setting* setting, smt_risk* out);

/* Rules, written as name[:key=value,...]: oracle, fixed:c_sq=, universal:d=,
 * replicate:n=,d=, logv:coef=,offset=, bonferroni:alpha=, bfdr:alpha=,
 * gw:alpha=, bh:alpha=. */
SMT_API smt_status smt_rule_parse(const char* text, smt_rule** out);
SMT_API void smt_rule_destroy(smt_rule* rule);
/* Canonical text into buf (NUL-terminated, truncated to cap); *needed
 * receives the full length without the terminator. */
SMT_API smt_status smt_rule_text(const smt_rule* rule, char* buf, size_t cap, size_t* needed);
SMT_API int smt_rule_is_fixed(const smt_rule* rule);
/* *has_level is 0 for rules without a level or with the level unset. */
SMT_API smt_status smt_rule_level(const smt_rule* rule, double* alpha, int* has_level);
SMT_API smt_status smt_rule_threshold(const smt_rule* rule, const smt_setting* setting,
                                      double* c_sq);

/* Monte Carlo. */
typedef struct smt_mc_options {
  uint64_t reps;
  uint64_t seed;
  unsigned workers; /* 0: one per hardware thread */
} smt_mc_options;

typedef struct smt_estimate {
  double mean;
  double std_error;
  uint64_t reps;
} smt_estimate;

typedef struct smt_mc_report {
  smt_estimate risk;
  smt_estimate fdr;
  smt_estimate fwer;
  smt_estimate ev;
  smt_estimate power;
  smt_estimate type1;
  smt_estimate type2;
  smt_estimate rejections;
  smt_estimate threshold;
  smt_estimate threshold_gap;
  int has_threshold_gap;
} smt_mc_report;

SMT_API smt_status smt_mc_run(const smt_setting* setting, const smt_rule* rule,
                              const smt_mc_options* opts, smt_mc_report* out);
SMT_API smt_status smt_mc_conditional(const smt_setting* setting, const smt_rule* rule,
                                      uint64_t k, const smt_mc_options* opts, smt_mc_report* out);

typedef struct smt_gap_study {
  smt_estimate gap;
  double median_gap;
  double exceed_frac;
  double c_gw;
  double c_bon;
} smt_gap_study;

/* has_k != 0 fixes the number of signals at k in every replicate. */
SMT_API smt_status smt_threshold_gap(const smt_setting* setting, double alpha, double epsilon,
                                     const smt_mc_options* opts, int has_k, uint64_t k,
                                     smt_gap_study* out);

/* Preset convergence studies. */
SMT_API size_t smt_preset_count(void);
SMT_API const char* smt_preset_name(size_t index);

SMT_API smt_status smt_study_open(const char* preset, smt_study** out);
SMT_API void smt_study_destroy(smt_study* study);
SMT_API const char* smt_study_summary(const smt_study* study);
/* Copy of the study's current rule. */
SMT_API smt_status smt_study_rule(const smt_study* study, smt_rule** out);
SMT_API smt_status smt_study_set_rule(smt_study* study, const smt_rule* rule);
SMT_API smt_status smt_study_set_grid(smt_study* study, const double* m, size_t count);
SMT_API smt_status smt_study_grid(const smt_study* study, const double** m, size_t* count);
/* Setting and rule (level and replicate count filled in) at one value of m. */
SMT_API smt_status smt_study_point(const smt_study* study, double m, smt_setting** setting,
                                   smt_rule** rule);
SMT_API smt_status smt_study_run(const smt_study* study, smt_mode mode,
                                 const smt_mc_options* opts, smt_table** out);

/* Result tables: named columns of doubles. */
SMT_API void smt_table_destroy(smt_table* table);
SMT_API size_t smt_table_columns(const smt_table* table);
SMT_API size_t smt_table_rows(const smt_table* table);
SMT_API const char* smt_table_column_name(const smt_table* table, size_t col);
SMT_API smt_status smt_table_value(const smt_table* table, size_t row, size_t col, double* out);

#ifdef __cplusplus
}
#endif

#endif
