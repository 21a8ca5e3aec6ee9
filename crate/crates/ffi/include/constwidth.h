#ifndef CONSTWIDTH_H
#define CONSTWIDTH_H

/* Generated by cbindgen from crates/ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum CwStatus {
  CW_STATUS_OK = 0,
  CW_STATUS_NULL_POINTER = 1,
  CW_STATUS_INVALID_ARGUMENT = 2,
  CW_STATUS_DIMENSION_MISMATCH = 3,
  CW_STATUS_NOT_UNIT = 4,
  CW_STATUS_NUMERICAL_FAILURE = 5,
  CW_STATUS_IO = 6,
  CW_STATUS_BUFFER_TOO_SMALL = 7,
  CW_STATUS_PANIC = 99,
} CwStatus;

typedef enum CwVolumeMethod {
  CW_VOLUME_METHOD_QUADRATURE = 0,
  CW_VOLUME_METHOD_MC_REJECTION = 1,
  CW_VOLUME_METHOD_MC_RADIAL = 2,
} CwVolumeMethod;

/**
 * Opaque body handle.
 */
typedef struct CwBody CwBody;

/**
 * Opaque 3D mesh handle.
 */
typedef struct CwMesh CwMesh;

/**
 * Volume estimate. The interval fields are meaningful only when `has_ci`.
 */
typedef struct CwVolume {
  size_t n;
  double log_volume;
  double effective_radius;
  enum CwVolumeMethod method;
  bool has_ci;
  double log_ci_low;
  double log_ci_high;
  uint64_t samples;
  uint64_t seed;
} CwVolume;

typedef struct CwSOptimum {
  double s;
  double alpha_star;
  double beta_star;
  double x_star;
  double residual;
  double s_numeric;
  double constraint_residual;
} CwSOptimum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *cw_version(void);

/**
 * Static description of a status code; unknown codes map to
 * `"unknown status"`.
 */
const char *cw_status_message(int32_t code);

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next call into the library from the same thread.
 */
const char *cw_last_error_message(void);

/**
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum CwStatus cw_body_new(size_t n, struct CwBody **out);

/**
 * # Safety
 * `body` must be null or a handle from [`cw_body_new`] not yet freed.
 */
void cw_body_free(struct CwBody *body);

/**
 * Dimension of the body, 0 for a null handle.
 *
 * # Safety
 * `body` must be null or a live handle.
 */
size_t cw_body_dimension(const struct CwBody *body);

/**
 * Membership via `(|v₊|, |v₋|) ∈ A`.
 *
 * # Safety
 * `v` must point to `len` doubles; `body` and `out` must be valid.
 */
enum CwStatus cw_body_contains(const struct CwBody *body,
                               const double *v,
                               size_t len,
                               double tol,
                               bool *out);

/**
 * Membership from the ball-intersection definition.
 *
 * # Safety
 * As [`cw_body_contains`].
 */
enum CwStatus cw_body_contains_definitional(const struct CwBody *body,
                                            const double *v,
                                            size_t len,
                                            double tol,
                                            bool *out);

/**
 * # Safety
 * `theta` must point to `len` doubles; `body` and `out` must be valid.
 */
enum CwStatus cw_body_support(const struct CwBody *body,
                              const double *theta,
                              size_t len,
                              double *out);

/**
 * # Safety
 * As [`cw_body_support`].
 */
enum CwStatus cw_body_width(const struct CwBody *body,
                            const double *theta,
                            size_t len,
                            double *out);

/**
 * # Safety
 * As [`cw_body_support`].
 */
enum CwStatus cw_body_radial_extent(const struct CwBody *body,
                                    const double *u,
                                    size_t len,
                                    double *out);

/**
 * `(|v₊|, |v₋|)` of a vector.
 *
 * # Safety
 * `v` must point to `len` doubles; both outputs must be valid.
 */
enum CwStatus cw_split_norms(const double *v, size_t len, double *norm_plus, double *norm_minus);

bool cw_disk_segment_contains(double a, double b, double tol);

/**
 * Exact volume by orthant quadrature.
 *
 * # Safety
 * `out` must be valid.
 */
enum CwStatus cw_exact_volume(size_t n, struct CwVolume *out);

/**
 * # Safety
 * `out` must be valid.
 */
enum CwStatus cw_mc_volume(size_t n, uint64_t samples, uint64_t seed, struct CwVolume *out);

/**
 * # Safety
 * `out` must be valid.
 */
enum CwStatus cw_mc_volume_radial(size_t n, uint64_t samples, uint64_t seed, struct CwVolume *out);

/**
 * # Safety
 * `out` must be valid.
 */
enum CwStatus cw_minimize_s(struct CwSOptimum *out);

double cw_least_positive_root(void);

double cw_schramm_lower_bound(size_t n);

/**
 * # Safety
 * Both outputs must be valid.
 */
enum CwStatus cw_triangle_feasible(double alpha, double beta, bool *feasible, double *s_candidate);

/**
 * # Safety
 * `out` must be valid.
 */
enum CwStatus cw_eq3_upper_bound(size_t n, double alpha, double beta, double *out);

/**
 * Two-call helper: with `buf` null, stores the number of doubles needed
 * (`2 × vertices`) in `count`; otherwise fills `buf` with `x, y` pairs.
 *
 * # Safety
 * `buf`, when non-null, must hold `buf_len` doubles; `count` must be valid.
 */
enum CwStatus cw_boundary_polyline_2d(size_t points_per_arc,
                                      double *buf,
                                      size_t buf_len,
                                      size_t *count);

/**
 * # Safety
 * `out` must be valid.
 */
enum CwStatus cw_mesh_new(uint32_t level, struct CwMesh **out);

/**
 * # Safety
 * `mesh` must be null or a live handle from [`cw_mesh_new`].
 */
void cw_mesh_free(struct CwMesh *mesh);

/**
 * # Safety
 * `mesh` must be null or a live handle.
 */
size_t cw_mesh_vertex_count(const struct CwMesh *mesh);

/**
 * # Safety
 * `mesh` must be null or a live handle.
 */
size_t cw_mesh_face_count(const struct CwMesh *mesh);

/**
 * Divergence-theorem volume; NaN for a null handle.
 *
 * # Safety
 * `mesh` must be null or a live handle.
 */
double cw_mesh_signed_volume(const struct CwMesh *mesh);

/**
 * Copies `3 × vertex_count` doubles (`x, y, z` per vertex).
 *
 * # Safety
 * `buf` must hold `buf_len` doubles.
 */
enum CwStatus cw_mesh_copy_vertices(const struct CwMesh *mesh, double *buf, size_t buf_len);

/**
 * Copies `3 × face_count` zero-based vertex indices.
 *
 * # Safety
 * `buf` must hold `buf_len` indices.
 */
enum CwStatus cw_mesh_copy_faces(const struct CwMesh *mesh, uint64_t *buf, size_t buf_len);

/**
 * Writes the mesh as Wavefront OBJ to `path`.
 *
 * # Safety
 * `mesh` must be live and `path` a NUL-terminated UTF-8 string.
 */
enum CwStatus cw_mesh_write_obj(const struct CwMesh *mesh, const char *path, bool colorize);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONSTWIDTH_H */
