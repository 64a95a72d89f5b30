#include <stdio.h>
#include <string.h>

#include "gl2lab.h"

#define CHECK(x)                                                      \
  do {                                                                \
    if (!(x)) {                                                       \
      fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__, #x,     \
              gl2lab_last_error());                                   \
      return 1;                                                       \
    }                                                                 \
  } while (0)

int main(void) {
  Gl2Mat2 *gamma = NULL;
  CHECK(gl2lab_mat2_parse(11, "1,1,0,1", &gamma) == GL2_STATUS_OK);
  uint64_t order = 0;
  CHECK(gl2lab_mat2_order(gamma, &order) == GL2_STATUS_OK && order == 11);

  const Gl2Mat2 *gens[] = {gamma};
  Gl2Subgroup *g = NULL;
  CHECK(gl2lab_subgroup_generate(11, gens, 1, &g) == GL2_STATUS_OK);

  Gl2Subgroup *b0 = NULL;
  CHECK(gl2lab_subgroup_named("B0", 11, &b0) == GL2_STATUS_OK);
  bool found = false;
  Gl2Mat2 *witness = NULL;
  CHECK(gl2lab_conjugate_contains(b0, g, &found, &witness) == GL2_STATUS_OK && found);

  char *json = NULL;
  CHECK(gl2lab_classify_json(g, &json) == GL2_STATUS_OK);
  CHECK(strstr(json, "BorelConj") != NULL);
  gl2lab_string_free(json);

  CHECK(gl2lab_mat2_parse(11, "1,1", &witness) == GL2_STATUS_PARSE);
  CHECK(strlen(gl2lab_last_error()) > 0);

  gl2lab_subgroup_free(g);
  gl2lab_subgroup_free(b0);
  gl2lab_mat2_free(gamma);
  puts("ok");
  return 0;
}
