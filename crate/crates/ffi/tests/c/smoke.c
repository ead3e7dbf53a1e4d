#include <stdio.h>
#include <string.h>
#include "orbinv.h"

int main(void) {
  OrbinvField *f = NULL;
  OrbinvPoly *p = NULL;
  OrbinvMatrix *m = NULL;
  char *report = NULL;
  if (orbinv_field_new(3, &f) != ORBINV_STATUS_OK) return 10;
  if (orbinv_poly_parse(f, "x^2 - T", &p) != ORBINV_STATUS_OK) return 11;
  if (orbinv_invariants_json(p, 48, &report) != ORBINV_STATUS_OK) return 12;
  if (strstr(report, "\"mu_exp\":0") == NULL) return 13;
  orbinv_string_free(report);
  if (orbinv_matrix_companion(p, &m) != ORBINV_STATUS_OK) return 14;
  if (orbinv_classify_json(m, 48, &report) != ORBINV_STATUS_OK) return 15;
  if (strstr(report, "\"quasi_regular_elliptic\":true") == NULL) return 16;
  orbinv_string_free(report);
  OrbinvPoly *bad = NULL;
  if (orbinv_poly_parse(f, "x^2 +", &bad) != ORBINV_STATUS_INVALID_INPUT) return 17;
  if (orbinv_last_error() == NULL) return 18;
  orbinv_matrix_free(m);
  orbinv_poly_free(p);
  orbinv_field_free(f);
  printf("ok %s\n", orbinv_version());
  return 0;
}
