/* Builds against the public header as plain C and exercises a handle round trip. */
#include <math.h>
#include <stdio.h>

#include "sparsemt/sparsemt.h"

int main(void) {
  smt_setting* s = NULL;
  double c_sq = 0.0;
  int reject_all = 0;
  smt_risk risk;

  if (smt_setting_create(0.1, 1.0, 3.0, 1.0, 1.0, 1.0, &s) != SMT_OK) return 1;
  if (smt_oracle_threshold(s, &c_sq, &reject_all) != SMT_OK) return 1;
  if (fabs(c_sq - 7.707658021056439) > 1e-12 || reject_all) return 1;
  if (smt_optimal_risk(s, &risk) != SMT_OK) return 1;
  smt_setting_destroy(s);

  if (smt_setting_create(2.0, 1.0, 3.0, 1.0, 1.0, 1.0, &s) != SMT_INVALID_ARGUMENT) return 1;
  printf("c_sq=%.17g risk=%.17g (%s)\n", c_sq, risk.total, smt_last_error());
  return 0;
}
