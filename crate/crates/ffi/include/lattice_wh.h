#ifndef LATTICE_WH_H
#define LATTICE_WH_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LwStatus {
  LW_STATUS_OK = 0,
  LW_STATUS_NULL_POINTER = 1,
  LW_STATUS_INVALID_ARGUMENT = 2,
  LW_STATUS_BELOW_CUTOFF = 3,
  LW_STATUS_UNSUPPORTED = 4,
  LW_STATUS_DEGENERATE = 5,
  LW_STATUS_NON_CONVERGENCE = 6,
  LW_STATUS_BUFFER_TOO_SMALL = 7,
  LW_STATUS_PANIC = 8,
} LwStatus;

typedef enum LwMethod {
  // Pole removal; symmetric geometry and odd incident mode only.
  LW_METHOD_POLE_REMOVAL = 0,
  LW_METHOD_BOUNDARY_EQUATIONS = 1,
} LwMethod;

typedef enum LwFieldKind {
  LW_FIELD_KIND_SCATTERED = 0,
  LW_FIELD_KIND_TOTAL = 1,
} LwFieldKind;

typedef struct LwGeometry LwGeometry;

typedef struct LwSolution LwSolution;

// Reflection and transmission coefficients of one propagating mode.
typedef struct LwModeCoefficient {
  int64_t q;
  double re_r;
  double im_r;
  double re_t;
  double im_t;
  double group_velocity;
} LwModeCoefficient;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of this thread into `buf` and returns its length
// without the terminator. Returns 0 when no error has been recorded.
//
// # Safety
// `buf` must be null or valid for `len` bytes.
size_t lw_last_error(char *buf, size_t len);

// Creates a geometry with screen rows `n1..=n2` inside walls at `-big_n1` and `big_n2`.
//
// # Safety
// `out` must be valid for writes.
enum LwStatus lw_geometry_new(int64_t n1,
                              int64_t n2,
                              int64_t big_n1,
                              int64_t big_n2,
                              struct LwGeometry **out);

// Creates the symmetric geometry with gaps of `ell` rows and a screen of `ell0` rows.
//
// # Safety
// `out` must be valid for writes.
enum LwStatus lw_geometry_symmetric(int64_t ell, int64_t ell0, struct LwGeometry **out);

// # Safety
// `geometry` must be null or a handle from this library not yet freed.
void lw_geometry_free(struct LwGeometry *geometry);

// Number of rows between the walls, including both walls.
//
// # Safety
// `geometry` must be a live handle and `out` valid for writes.
enum LwStatus lw_geometry_rows(const struct LwGeometry *geometry, size_t *out);

// Lower and upper edge of the propagation band of mode `q`.
//
// # Safety
// `geometry` must be a live handle; `lower` and `upper` valid for writes.
enum LwStatus lw_band_edges(const struct LwGeometry *geometry,
                            int64_t q,
                            double *lower,
                            double *upper);

// Solves the scattering problem for incident mode `p` at frequency `omega`
// with damping `eps`.
//
// # Safety
// `geometry` must be a live handle and `out` valid for writes.
enum LwStatus lw_solve(const struct LwGeometry *geometry,
                       double omega,
                       double eps,
                       int64_t p,
                       enum LwMethod method,
                       struct LwSolution **out);

// # Safety
// `solution` must be null or a handle from this library not yet freed.
void lw_solution_free(struct LwSolution *solution);

// Deviation of the weighted coefficients from energy conservation.
//
// # Safety
// `solution` must be a live handle and `out` valid for writes.
enum LwStatus lw_solution_energy_residual(const struct LwSolution *solution, double *out);

// Writes the coefficients of the propagating modes into `buf`.
// `written` receives the number of modes; if it exceeds `cap`, nothing is
// copied and `LW_STATUS_BUFFER_TOO_SMALL` is returned.
//
// # Safety
// `solution` must be a live handle, `buf` valid for `cap` elements (or null
// when `cap` is 0) and `written` valid for writes.
enum LwStatus lw_solution_coefficients(const struct LwSolution *solution,
                                       struct LwModeCoefficient *buf,
                                       size_t cap,
                                       size_t *written);

// Evaluates the field on columns `m_min..=m_max`. Values are stored column by
// column, each column holding every row from the lower to the upper wall, so
// `re` and `im` need `(m_max - m_min + 1) * rows` elements.
//
// # Safety
// `solution` must be a live handle; `re` and `im` valid for `len` elements.
enum LwStatus lw_solution_field(const struct LwSolution *solution,
                                int64_t m_min,
                                int64_t m_max,
                                enum LwFieldKind kind,
                                double *re,
                                double *im,
                                size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LATTICE_WH_H */
