#ifndef PCADCA_H
#define PCADCA_H

/* Generated by cbindgen from crates/ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PcadcaStatus {
  PCADCA_STATUS_OK = 0,
  PCADCA_STATUS_NULL_POINTER = 1,
  PCADCA_STATUS_INVALID_ARGUMENT = 2,
  PCADCA_STATUS_DATA = 3,
  PCADCA_STATUS_NUMERICAL = 4,
  PCADCA_STATUS_IO = 5,
  PCADCA_STATUS_PANIC = 6,
} PcadcaStatus;

/**
 * Opaque DCA engine.
 */
typedef struct PcadcaEngine PcadcaEngine;

/**
 * Opaque per-antigen score series.
 */
typedef struct PcadcaKAlpha PcadcaKAlpha;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *pcadca_last_error(void);

/**
 * Fuses one signal instance into `(csm, k)`. NULL weight rows select the
 * defaults `csm = (2, 1, 2)`, `k = (2, 1, -3)`.
 *
 * # Safety
 * Non-NULL `csm_weights`/`k_weights` must point to 3 readable doubles;
 * `out_csm` and `out_k` must be writable.
 */
enum PcadcaStatus pcadca_transform_signals(double pamp,
                                           double danger,
                                           double safe,
                                           const double *csm_weights,
                                           const double *k_weights,
                                           double *out_csm,
                                           double *out_k);

/**
 * Antigen copies for a normalised antigen value `x`.
 *
 * # Safety
 * `out` must be writable.
 */
enum PcadcaStatus pcadca_antigen_frequency(double x, uint32_t f_min, uint32_t f_max, uint32_t *out);

/**
 * Eigendecomposition of a symmetric `n x n` row-major matrix. Eigenvalues
 * are written descending; row `j` of `out_vectors` is the unit eigenvector
 * of eigenvalue `j`.
 *
 * # Safety
 * `matrix` and `out_vectors` must hold `n * n` doubles, `out_values` `n`.
 */
enum PcadcaStatus pcadca_jacobi_eigen(size_t n,
                                      const double *matrix,
                                      double *out_values,
                                      double *out_vectors);

/**
 * Segment statistic `L` at threshold `th`; `*out_anomalous` is set when
 * `L >= 0`.
 *
 * # Safety
 * `ks` must hold `len` doubles; outputs must be writable.
 */
enum PcadcaStatus pcadca_classify_segment(const double *ks,
                                          size_t len,
                                          double th,
                                          double *out_l,
                                          bool *out_anomalous);

/**
 * Creates an engine of `population` cells with thresholds `i * delta`.
 * `delta <= 0` selects `3 * csm_max / population`. NULL weight rows select
 * the defaults.
 *
 * # Safety
 * Non-NULL weight rows must hold 3 doubles; `out` must be writable.
 */
enum PcadcaStatus pcadca_engine_new(size_t population,
                                    double delta,
                                    const double *csm_weights,
                                    const double *k_weights,
                                    struct PcadcaEngine **out);

/**
 * # Safety
 * `engine` must come from [`pcadca_engine_new`] and not be used afterwards.
 */
void pcadca_engine_free(struct PcadcaEngine *engine);

/**
 * Processes one second: `multiplicity` copies of `antigen` with the given
 * signals.
 *
 * # Safety
 * `engine` must be a live handle.
 */
enum PcadcaStatus pcadca_engine_step(struct PcadcaEngine *engine,
                                     size_t antigen,
                                     uint32_t multiplicity,
                                     double pamp,
                                     double danger,
                                     double safe);

/**
 * Presents every antigen still held by a cell.
 *
 * # Safety
 * `engine` must be a live handle.
 */
enum PcadcaStatus pcadca_engine_flush(struct PcadcaEngine *engine);

/**
 * Number of logged presentations.
 *
 * # Safety
 * `engine` must be a live handle; `out` writable.
 */
enum PcadcaStatus pcadca_engine_presentations(const struct PcadcaEngine *engine, size_t *out);

/**
 * Scores the presentations logged so far.
 *
 * # Safety
 * `engine` must be a live handle; `out` writable. Release the result with
 * [`pcadca_kalpha_free`].
 */
enum PcadcaStatus pcadca_engine_k_alpha(const struct PcadcaEngine *engine,
                                        struct PcadcaKAlpha **out);

/**
 * # Safety
 * `series` must be NULL or a live handle.
 */
size_t pcadca_kalpha_len(const struct PcadcaKAlpha *series);

/**
 * Entry `index` in antigen order.
 *
 * # Safety
 * `series` must be a live handle; outputs writable.
 */
enum PcadcaStatus pcadca_kalpha_get(const struct PcadcaKAlpha *series,
                                    size_t index,
                                    size_t *out_antigen,
                                    double *out_k_alpha,
                                    uint64_t *out_presented);

/**
 * # Safety
 * `series` must come from [`pcadca_engine_k_alpha`] and not be used
 * afterwards.
 */
void pcadca_kalpha_free(struct PcadcaKAlpha *series);

/**
 * Runs the full pipeline from a `key = value` config file, writing every
 * artefact to the configured output directory. `out_dir` overrides it when
 * non-NULL. The ROC area is stored in `out_auc` when non-NULL.
 *
 * # Safety
 * `config_path` must be a NUL-terminated string; `out_dir` NULL or one.
 */
enum PcadcaStatus pcadca_run_config(const char *config_path, const char *out_dir, double *out_auc);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PCADCA_H */
