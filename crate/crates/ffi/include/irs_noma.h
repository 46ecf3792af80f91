#ifndef IRS_NOMA_H
#define IRS_NOMA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  IRS_STATUS_OK = 0,
  IRS_STATUS_NULL_POINTER = 1,
  IRS_STATUS_INVALID_PARAMETER = 2,
  IRS_STATUS_LENGTH_MISMATCH = 3,
  IRS_STATUS_UNSUPPORTED_PARAMETERS = 4,
  IRS_STATUS_INFEASIBLE_ALLOCATION = 5,
  IRS_STATUS_INSUFFICIENT_DATA = 6,
  IRS_STATUS_CONFIG_ERROR = 7,
  IRS_STATUS_IO_ERROR = 8,
  IRS_STATUS_BUFFER_TOO_SMALL = 9,
  IRS_STATUS_PANIC = 10,
} IrsStatus;

/**
 * NOMA power allocation and target rates.
 */
typedef struct IrsNoma IrsNoma;

/**
 * Channel and IRS parameters of one scenario.
 */
typedef struct IrsScenario IrsScenario;

/**
 * Analytic outage bounds and diversity order.
 */
typedef struct {
  double upper;
  double lower;
  double diversity;
} IrsBounds;

/**
 * Outage estimate of one user.
 */
typedef struct {
  size_t user;
  uint64_t trials;
  uint64_t failures;
  double p_hat;
  double ci_low;
  double ci_high;
} IrsEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` as a
 * NUL-terminated string, truncating if needed. Returns the full message
 * length in bytes, excluding the terminator.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t irs_last_error_message(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *irs_version(void);

/**
 * Gamma function for `x > 0`.
 *
 * # Safety
 * `result` must be null or a valid pointer.
 */
IrsStatus irs_gamma(double x, double *result);

/**
 * Creates a scenario. `scenario` is 1 (no direct link) or 2 (direct
 * link); `bits = 0` selects continuous phases.
 *
 * # Safety
 * `handle` must be null or a valid pointer.
 */
IrsStatus irs_scenario_new(uint32_t scenario,
                           size_t users,
                           size_t elements,
                           uint32_t bits,
                           double beta,
                           double m_big_g,
                           double m_g,
                           double m_h,
                           IrsScenario **handle);

/**
 * Releases a scenario. Null is ignored.
 *
 * # Safety
 * `handle` must come from [`irs_scenario_new`] and not be used afterwards.
 */
void irs_scenario_free(IrsScenario *handle);

/**
 * Creates a NOMA configuration from `users` power coefficients and rates.
 *
 * # Safety
 * `alphas` and `rates` must be valid for `users` elements; `handle` must be
 * null or a valid pointer.
 */
IrsStatus irs_noma_new(const double *alphas, const double *rates, size_t users, IrsNoma **handle);

/**
 * Default allocation for 2, 3 or 4 users.
 *
 * # Safety
 * `handle` must be null or a valid pointer.
 */
IrsStatus irs_noma_default(size_t users, IrsNoma **handle);

/**
 * Releases a NOMA configuration. Null is ignored.
 *
 * # Safety
 * `handle` must come from [`irs_noma_new`] or [`irs_noma_default`] and not
 * be used afterwards.
 */
void irs_noma_free(IrsNoma *handle);

/**
 * Analytic outage bounds of user `user` (1-based, strongest last) at
 * transmit SNR `rho_db`. `scheme` is 0 for NOMA, 1 for OMA.
 *
 * # Safety
 * Pointers must be valid handles / writable.
 */
IrsStatus irs_outage_bounds(const IrsScenario *scenario,
                            const IrsNoma *noma,
                            uint32_t scheme,
                            size_t user,
                            double rho_db,
                            IrsBounds *result);

/**
 * Monte Carlo outage estimate for every user at `rho_db`. `results` must
 * hold `capacity >= users` entries.
 *
 * # Safety
 * Pointers must be valid handles; `results` valid for `capacity` entries.
 */
IrsStatus irs_estimate_outage(const IrsScenario *scenario,
                              const IrsNoma *noma,
                              uint32_t scheme,
                              double rho_db,
                              uint64_t trials,
                              uint64_t seed,
                              IrsEstimate *results,
                              size_t capacity);

/**
 * Mean discrete-phase gain over mean continuous-phase gain for the
 * scenario's resolution.
 *
 * # Safety
 * `scenario` must be a valid handle; `result` writable.
 */
IrsStatus irs_gain_ratio(const IrsScenario *scenario,
                         uint64_t trials,
                         uint64_t seed,
                         double *result);

/**
 * Runs the experiment in config file `path` and writes its CSV to the
 * configured output. `rows`, if not null, receives the row count.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `rows` null or writable.
 */
IrsStatus irs_run_config(const char *path, size_t *rows);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IRS_NOMA_H */
