#ifndef COGBEAM_H
#define COGBEAM_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define CB_METHOD_PROPOSED 0

#define CB_METHOD_MDBA 1

#define CB_METHOD_BDBA 2

/**
 * Result code of every fallible call.
 */
typedef enum CbStatus {
  CB_STATUS_OK = 0,
  CB_STATUS_NULL_POINTER = 1,
  CB_STATUS_INVALID_ARGUMENT = 2,
  CB_STATUS_CAPACITY = 3,
  CB_STATUS_PARSE = 4,
  CB_STATUS_CALIBRATION = 5,
  CB_STATUS_IO = 6,
  CB_STATUS_PANIC = 7,
} CbStatus;

/**
 * Opaque scenario handle.
 */
typedef struct CbScenario CbScenario;

/**
 * Opaque signature-table handle.
 */
typedef struct CbSignatureTable CbSignatureTable;

/**
 * Monte-Carlo metrics. Undefined ratios are NaN with their flag cleared.
 */
typedef struct CbMetrics {
  double pmo;
  double pci;
  double throughput;
  double detector_error;
  double stderr_pmo;
  double stderr_pci;
  double stderr_thru;
  bool pmo_defined;
  bool pci_defined;
  uint64_t intervals;
} CbMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *cb_last_error(void);

/**
 * Synthetic scenario with default parameters.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CbStatus cb_scenario_synthetic(uint64_t seed, struct CbScenario **out);

/**
 * Scenario described by experiment-config TOML text.
 *
 * # Safety
 * `config` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum CbStatus cb_scenario_from_config(const char *config, struct CbScenario **out);

/**
 * # Safety
 * `scenario` must come from this library and not be used afterwards.
 */
void cb_scenario_free(struct CbScenario *scenario);

/**
 * Beam and UE counts of a scenario.
 *
 * # Safety
 * `scenario` must be a live handle; the out pointers must be valid.
 */
enum CbStatus cb_scenario_dims(const struct CbScenario *scenario,
                               uint32_t *pbs_beams,
                               uint32_t *sbs_beams,
                               uint32_t *num_ues);

/**
 * Sets the SBS power to the PBS power scaled by `ratio_db`.
 *
 * # Safety
 * `scenario` must be a live handle.
 */
enum CbStatus cb_scenario_set_power_ratio_db(struct CbScenario *scenario, double ratio_db);

/**
 * MPC text export. Release the string with [`cb_string_free`].
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be valid for writes.
 */
enum CbStatus cb_scenario_export_mpcs(const struct CbScenario *scenario, char **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void cb_string_free(char *s);

/**
 * Monte-Carlo run of one method with exact signatures.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be valid for writes.
 */
enum CbStatus cb_monte_carlo(const struct CbScenario *scenario,
                             double theta_db,
                             double cap,
                             uint32_t samples,
                             uint32_t intervals,
                             uint32_t method_code,
                             uint64_t seed,
                             struct CbMetrics *out);

/**
 * Exact signatures of every PBS mask.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be valid for writes.
 */
enum CbStatus cb_signatures_exact(const struct CbScenario *scenario, struct CbSignatureTable **out);

/**
 * # Safety
 * `table` must come from this library and not be used afterwards.
 */
void cb_signatures_free(struct CbSignatureTable *table);

/**
 * Maximum-likelihood PBS mask for an energy vector of one entry per SBS
 * beam. Bit `k` of `mask` is PBS beam `k`.
 *
 * # Safety
 * `energies` must point to `len` readable doubles; `mask` must be valid.
 */
enum CbStatus cb_ml_detect(const struct CbSignatureTable *table,
                           const double *energies,
                           size_t len,
                           uint32_t *mask);

/**
 * Beam selection for a PBS mask. Bit `l` of `sbs_mask` is SBS beam `l`.
 *
 * # Safety
 * `scenario` must be a live handle; `sbs_mask` must be valid for writes.
 */
enum CbStatus cb_select_sbs_beams(const struct CbScenario *scenario,
                                  double theta_db,
                                  double cap,
                                  uint32_t pbs_mask,
                                  uint32_t *sbs_mask);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COGBEAM_H */
