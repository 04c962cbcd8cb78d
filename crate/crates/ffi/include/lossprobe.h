#ifndef LOSSPROBE_H
#define LOSSPROBE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum LpStatus {
  LP_STATUS_OK = 0,
  LP_STATUS_NULL_POINTER = 1,
  LP_STATUS_DOMAIN = 2,
  LP_STATUS_DIMENSION = 3,
  LP_STATUS_UNPHYSICAL = 4,
  LP_STATUS_NUMERICAL = 5,
  LP_STATUS_TRUNCATION = 6,
  LP_STATUS_NO_THRESHOLD = 7,
  LP_STATUS_BUFFER_TOO_SMALL = 8,
  LP_STATUS_PANIC = 99,
} LpStatus;

// Convention for the mutual information prefactor.
typedef enum LpMutualInfo {
  LP_MUTUAL_INFO_PRINTED = 0,
  LP_MUTUAL_INFO_STANDARD = 1,
} LpMutualInfo;

// Covariance matrix of a one- or two-mode Gaussian state.
typedef struct LpCovariance LpCovariance;

// A squeezed thermal state. `modes` is 1 or 2; `n_t2` is ignored for one mode.
typedef struct LpSqueezedThermal {
  uint32_t modes;
  double r;
  double n_t1;
  double n_t2;
} LpSqueezedThermal;

// Chernoff bound and error-probability bounds. Unavailable bounds are NaN.
typedef struct LpDiscrimination {
  double q;
  double s_star;
  double fidelity;
  uint32_t copies;
  double pe_upper;
  double pe_lower;
  double pe_fidelity_upper;
} LpDiscrimination;

typedef struct LpCorrelations {
  double negativity;
  double discord;
  double mutual_information;
  double d_tilde_minus;
} LpCorrelations;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Valid until the next call.
const char *lp_last_error(void);

// Builds a covariance matrix from `4 * modes^2` row-major entries.
//
// # Safety
// `entries` must point to that many doubles and `out_cm` must be writable.
enum LpStatus lp_covariance_new(uint32_t modes,
                                const double *entries,
                                struct LpCovariance **out_cm);

// Covariance matrix of a squeezed thermal state.
//
// # Safety
// `out_cm` must be writable.
enum LpStatus lp_covariance_squeezed_thermal(struct LpSqueezedThermal s,
                                             struct LpCovariance **out_cm);

// # Safety
// `cm` must come from this library and not be used afterwards. Null is ignored.
void lp_covariance_free(struct LpCovariance *cm);

// Number of modes, or 0 for a null handle.
//
// # Safety
// `cm` must be null or a live handle.
uint32_t lp_covariance_modes(const struct LpCovariance *cm);

// Copies the row-major entries into `buf` of length `len`.
//
// # Safety
// `cm` must be a live handle and `buf` must hold `len` doubles.
enum LpStatus lp_covariance_entries(const struct LpCovariance *cm, double *buf, size_t len);

// Symplectic eigenvalues in descending order; `len` must be at least the mode count.
//
// # Safety
// `cm` must be a live handle and `buf` must hold `len` doubles.
enum LpStatus lp_symplectic_eigenvalues(const struct LpCovariance *cm, double *buf, size_t len);

// Sends the first mode through a loss channel of transmissivity `eta`.
//
// # Safety
// `cm` must be a live handle and `out_cm` writable.
enum LpStatus lp_evolve(const struct LpCovariance *cm, double eta, struct LpCovariance **out_cm);

// Chernoff bound between two squeezed thermal states with the same mode count.
//
// # Safety
// `report` must be writable.
enum LpStatus lp_qcb(struct LpSqueezedThermal a,
                     struct LpSqueezedThermal b,
                     uint32_t copies,
                     struct LpDiscrimination *report);

// Chernoff bound for loss detection with a single-mode probe of energy `n`.
//
// # Safety
// `q` must be writable.
enum LpStatus lp_q1(double n, double beta, double eta, double *q);

// Same for the two-mode probe with thermal split `gamma`.
//
// # Safety
// `q` must be writable.
enum LpStatus lp_q2(double n, double beta, double gamma, double eta, double *q);

// Closed form for the squeezed vacuum probe.
//
// # Safety
// `q` must be writable.
enum LpStatus lp_q1_analytic(double n, double eta, double *q);

// Closed form for the two-mode squeezed vacuum probe.
//
// # Safety
// `q` must be writable.
enum LpStatus lp_q2_analytic(double n, double eta, double *q);

// Energy above which the two-mode squeezed vacuum beats the single-mode one.
//
// # Safety
// `n_th` must be writable.
enum LpStatus lp_threshold_energy(double eta, double *n_th);

// Transmissivity below which the two-mode probe wins at every energy.
double lp_critical_transmissivity(void);

// Negativity, discord and mutual information of a two-mode state.
//
// # Safety
// `cm` must be a live handle and `report` writable.
enum LpStatus lp_correlations(const struct LpCovariance *cm,
                              enum LpMutualInfo convention,
                              struct LpCorrelations *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LOSSPROBE_H */
