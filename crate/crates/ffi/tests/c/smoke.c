#include <math.h>
#include <stdio.h>
#include <stdlib.h>

#include "constwidth.h"

#define CHECK(cond)                                                  \
  do {                                                               \
    if (!(cond)) {                                                   \
      fprintf(stderr, "%s:%d: check failed: %s\n", __FILE__, __LINE__, #cond); \
      return 1;                                                      \
    }                                                                \
  } while (0)

int main(void) {
  CwBody *body = NULL;
  CHECK(cw_body_new(3, &body) == CW_STATUS_OK);
  CHECK(cw_body_dimension(body) == 3);

  double inside[3] = {0.5, -0.2, 0.1};
  double outside[3] = {1.5, 0.0, 0.0};
  bool member = false;
  CHECK(cw_body_contains(body, inside, 3, 1e-12, &member) == CW_STATUS_OK && member);
  CHECK(cw_body_contains(body, outside, 3, 1e-12, &member) == CW_STATUS_OK && !member);
  CHECK(cw_body_contains_definitional(body, inside, 3, 1e-12, &member) == CW_STATUS_OK && member);

  double theta[3] = {0.6, -0.8, 0.0};
  double width = 0.0;
  CHECK(cw_body_width(body, theta, 3, &width) == CW_STATUS_OK);
  CHECK(fabs(width - 2.0) < 1e-12);

  double short_vec[2] = {0.0, 0.0};
  CHECK(cw_body_contains(body, short_vec, 2, 0.0, &member) == CW_STATUS_DIMENSION_MISMATCH);
  CHECK(cw_last_error_message() != NULL);
  cw_body_free(body);

  CHECK(cw_body_new(0, &body) == CW_STATUS_INVALID_ARGUMENT);
  CHECK(cw_body_new(3, NULL) == CW_STATUS_NULL_POINTER);

  CwVolume vol;
  CHECK(cw_exact_volume(2, &vol) == CW_STATUS_OK);
  CHECK(vol.method == CW_VOLUME_METHOD_QUADRATURE && !vol.has_ci);
  CHECK(fabs(exp(vol.log_volume) - (3.0 * M_PI - sqrt(2.0) * M_PI - 2.0)) < 1e-8);

  CwSOptimum opt;
  CHECK(cw_minimize_s(&opt) == CW_STATUS_OK);
  CHECK(fabs(opt.s - 2.0 * cw_least_positive_root()) < 1e-12);

  CwMesh *mesh = NULL;
  CHECK(cw_mesh_new(2, &mesh) == CW_STATUS_OK);
  size_t nv = cw_mesh_vertex_count(mesh), nf = cw_mesh_face_count(mesh);
  CHECK(nv == 18 && nf == 32);
  double *verts = malloc(3 * nv * sizeof(double));
  CHECK(cw_mesh_copy_vertices(mesh, verts, 3 * nv) == CW_STATUS_OK);
  CHECK(cw_mesh_copy_vertices(mesh, verts, 3) == CW_STATUS_BUFFER_TOO_SMALL);
  free(verts);
  cw_mesh_free(mesh);

  printf("constwidth %s ok\n", cw_version());
  return 0;
}
