#ifndef DESCENT_H
#define DESCENT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DsStatus {
  DS_STATUS_OK = 0,
  DS_STATUS_INVALID_ARGUMENT = 1,
  DS_STATUS_NULL_POINTER = 2,
  DS_STATUS_RESOURCE_LIMIT = 3,
  DS_STATUS_IO = 4,
  DS_STATUS_FORMAT = 5,
  DS_STATUS_PANIC = 6,
} DsStatus;

// Exact `β_n(S)` for every `S ⊆ [n-1]`, `n <= 24`.
typedef struct DsBetaTable DsBetaTable;

// Cyclotomic factors found by [`ds_scan_factors`].
typedef struct DsFactorReport DsFactorReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. Valid until the
// next failing call on the same thread; do not free.
const char *ds_last_error_message(void);

enum DsStatus ds_beta_table_build(uint32_t n, struct DsBetaTable **out);

void ds_beta_table_free(struct DsBetaTable *table);

uint32_t ds_beta_table_n(const struct DsBetaTable *table);

// Number of subsets, `2^(n-1)`; 0 for NULL.
uint64_t ds_beta_table_len(const struct DsBetaTable *table);

// `β_n(S)` where bit `i-1` of `mask` marks element `i` of `S`.
enum DsStatus ds_beta_table_get(const struct DsBetaTable *table, uint64_t mask, uint64_t *out);

enum DsStatus ds_beta_table_save(const struct DsBetaTable *table, const char *path);

enum DsStatus ds_beta_table_load(const char *path, struct DsBetaTable **out);

// The proportion of subsets with odd `β_n(S)` as a reduced fraction, `1 <= n <= 32`.
enum DsStatus ds_rho(uint32_t n, uint64_t *numerator, uint64_t *denominator);

// Whether `Φ_m` divides `Q_n(t)`.
enum DsStatus ds_divides(const struct DsBetaTable *table, uint64_t m, bool *out);

// 0 if `Φ_m` does not divide `Q_n`, 1 if it divides once, 2 if `Φ_m^2` divides.
enum DsStatus ds_multiplicity(const struct DsBetaTable *table, uint64_t m, uint32_t *out);

// Every `Φ_m` with `m <= m_max` dividing `Q_n`; odd `m > 1` only if `include_odd`.
enum DsStatus ds_scan_factors(const struct DsBetaTable *table,
                              uint64_t m_max,
                              bool include_odd,
                              struct DsFactorReport **out);

void ds_factor_report_free(struct DsFactorReport *report);

size_t ds_factor_report_len(const struct DsFactorReport *report);

// The `index`-th factor in increasing `m`; multiplicity is 1 or 2 (meaning at least 2).
enum DsStatus ds_factor_report_get(const struct DsFactorReport *report,
                                   size_t index,
                                   uint64_t *m,
                                   uint32_t *multiplicity);

// JSON rendering; release with [`ds_string_free`]. NULL on error.
char *ds_factor_report_to_json(const struct DsFactorReport *report);

void ds_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DESCENT_H */
