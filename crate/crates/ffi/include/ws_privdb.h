#ifndef WS_PRIVDB_H
#define WS_PRIVDB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Most transmission parameters reported in [`WsRunStats`].
 */
#define WS_MAX_PARAMS 8

typedef enum WsStatus {
  WS_STATUS_OK = 0,
  WS_STATUS_NULL_POINTER = 1,
  WS_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Insert found no free slot; the filter is unchanged.
   */
  WS_STATUS_FILTER_FULL = 3,
  /**
   * The database filter could not hold its rows.
   */
  WS_STATUS_CAPACITY = 4,
  WS_STATUS_MALFORMED = 5,
  WS_STATUS_BUFFER_TOO_SMALL = 6,
  WS_STATUS_PROTOCOL = 7,
  WS_STATUS_PANIC = 8,
} WsStatus;

typedef enum WsProtocol {
  WS_PROTOCOL_LPDB = 0,
  WS_PROTOCOL_LPDB_LEAK_X = 1,
  WS_PROTOCOL_LPDB_LEAK_Y = 2,
  WS_PROTOCOL_LPDBQS = 3,
} WsProtocol;

typedef enum WsScheme {
  WS_SCHEME_LPDB = 0,
  WS_SCHEME_LPDB_LEAKAGE = 1,
  WS_SCHEME_LPDBQS = 2,
  WS_SCHEME_PRI_SPECTRUM = 3,
  WS_SCHEME_TROJA15 = 4,
  WS_SCHEME_TROJA14 = 5,
} WsScheme;

typedef enum WsParty {
  WS_PARTY_DB = 0,
  WS_PARTY_SU = 1,
  WS_PARTY_QP = 2,
} WsParty;

typedef enum WsPrivacyScheme {
  WS_PRIVACY_SCHEME_LPDB = 0,
  WS_PRIVACY_SCHEME_LPDB_LEAKAGE = 1,
  WS_PRIVACY_SCHEME_LPDBQS = 2,
  WS_PRIVACY_SCHEME_K_ANONYMITY = 3,
  WS_PRIVACY_SCHEME_GEO_INDISTINGUISHABILITY = 4,
  WS_PRIVACY_SCHEME_PRI_SPECTRUM = 5,
  WS_PRIVACY_SCHEME_TROJA15 = 6,
  WS_PRIVACY_SCHEME_TROJA14 = 7,
} WsPrivacyScheme;

/**
 * Spectrum ground-truth handle.
 */
typedef struct WsDb WsDb;

/**
 * Cuckoo filter handle.
 */
typedef struct WsFilter WsFilter;

/**
 * Result of one protocol run. Byte counts are message payloads; framing is
 * in `frame_overhead`.
 */
typedef struct WsRunStats {
  uint64_t bytes_su_db;
  uint64_t bytes_db_su;
  uint64_t bytes_db_qp;
  uint64_t bytes_su_qp;
  uint64_t bytes_qp_su;
  uint64_t frame_overhead;
  uint64_t query_bytes;
  uint64_t filter_items;
  uint64_t filter_bytes;
  uint64_t inserts;
  uint64_t lookups;
  uint64_t hashes;
  uint64_t hmacs;
  uint64_t sensing_calls;
  uint64_t probes;
  bool available;
  uint16_t channel;
  uint32_t param_count;
  uint32_t param_values[WS_MAX_PARAMS];
} WsRunStats;

/**
 * Cost-model inputs. Baseline fields set to NaN are treated as absent.
 */
typedef struct WsCostParams {
  double m;
  double n_ch;
  double rho;
  double epsilon;
  uint32_t beta;
  double alpha;
  double sigma_qr_bytes;
  double sigma_hmac_bytes;
  double p_bits;
  double q_bits;
  double b;
  double n_g;
  double v;
  double d;
  double troja15_n;
} WsCostParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last non-OK status on this thread. Never null.
 */
const char *ws_last_error_message(void);

/**
 * Creates an empty filter sized for `capacity` items at false-positive
 * rate `epsilon`. With `exact_sizing` the bucket count is the smallest
 * sufficient integer, otherwise the next power of two.
 *
 * # Safety
 * `out_filter` must be valid for writes.
 */
enum WsStatus ws_filter_new(double epsilon,
                            uint32_t beta,
                            double alpha,
                            uint64_t capacity,
                            bool exact_sizing,
                            uint64_t seed,
                            struct WsFilter **out_filter);

/**
 * # Safety
 * `filter` must come from this library and not be used afterwards. Null is
 * ignored.
 */
void ws_filter_free(struct WsFilter *filter);

/**
 * # Safety
 * `filter` must be a live handle and `item` valid for `len` bytes.
 */
enum WsStatus ws_filter_insert(struct WsFilter *filter, const uint8_t *item, size_t len);

/**
 * Inserts HMAC-SHA-256(key, item).
 *
 * # Safety
 * `filter` must be a live handle, `key` valid for 32 bytes and `item` for
 * `len` bytes.
 */
enum WsStatus ws_filter_keyed_insert(struct WsFilter *filter,
                                     const uint8_t *key_bytes,
                                     const uint8_t *item,
                                     size_t len);

/**
 * # Safety
 * `filter` must be a live handle, `item` valid for `len` bytes and `found`
 * valid for writes.
 */
enum WsStatus ws_filter_lookup(const struct WsFilter *filter,
                               const uint8_t *item,
                               size_t len,
                               bool *found);

/**
 * # Safety
 * As [`ws_filter_lookup`], plus `key` valid for 32 bytes.
 */
enum WsStatus ws_filter_keyed_lookup(const struct WsFilter *filter,
                                     const uint8_t *key_bytes,
                                     const uint8_t *item,
                                     size_t len,
                                     bool *found);

/**
 * # Safety
 * `filter` must be a live handle and `count` valid for writes.
 */
enum WsStatus ws_filter_item_count(const struct WsFilter *filter, uint64_t *count);

/**
 * Writes the wire encoding into `buf`. `written` always receives the
 * encoded length; pass a null `buf` to query it.
 *
 * # Safety
 * `filter` must be a live handle, `buf` null or valid for `cap` bytes, and
 * `written` valid for writes.
 */
enum WsStatus ws_filter_serialize(const struct WsFilter *filter,
                                  uint8_t *buf,
                                  size_t cap,
                                  size_t *written);

/**
 * # Safety
 * `buf` must be valid for `len` bytes and `out_filter` for writes.
 */
enum WsStatus ws_filter_deserialize(const uint8_t *buf, size_t len, struct WsFilter **out_filter);

/**
 * Generates a `side × side` grid with `n_ch` channels, each row available
 * with probability `rho`, using the default parameter domain.
 *
 * # Safety
 * `out_db` must be valid for writes.
 */
enum WsStatus ws_db_generate(uint32_t side,
                             uint16_t n_ch,
                             double rho,
                             uint64_t day,
                             uint64_t seed,
                             struct WsDb **out_db);

/**
 * # Safety
 * `db` must come from this library and not be used afterwards. Null is
 * ignored.
 */
void ws_db_free(struct WsDb *db);

/**
 * # Safety
 * `db` must be a live handle and `available` valid for writes.
 */
enum WsStatus ws_db_is_available(const struct WsDb *db,
                                 uint32_t lx,
                                 uint32_t ly,
                                 uint16_t chn,
                                 bool *available);

/**
 * Runs one protocol execution for an SU at `(lx, ly)` with a full-range
 * device.
 *
 * # Safety
 * `db` must be a live handle and `stats` valid for writes.
 */
enum WsStatus ws_protocol_run(const struct WsDb *db,
                              enum WsProtocol protocol,
                              uint32_t lx,
                              uint32_t ly,
                              double epsilon,
                              uint32_t beta,
                              double alpha,
                              double sensing_accuracy,
                              uint64_t seed,
                              struct WsRunStats *stats);

/**
 * Fills `params` with the evaluation defaults and no baseline fields.
 *
 * # Safety
 * `params` must be valid for writes.
 */
enum WsStatus ws_cost_params_default(struct WsCostParams *params);

/**
 * Communication cost of one query in bits.
 *
 * # Safety
 * `params` must be readable and `bits` valid for writes.
 */
enum WsStatus ws_cost_comm_bits(enum WsScheme s, const struct WsCostParams *params, double *bits);

/**
 * Computation cost for one party in unit operations, every primitive
 * weighted 1.
 *
 * # Safety
 * `params` must be readable and `units` valid for writes.
 */
enum WsStatus ws_cost_comp_units(enum WsScheme s,
                                 enum WsParty party,
                                 const struct WsCostParams *params,
                                 double *units);

/**
 * Probability that the database localizes the SU to its cell. `k` is used
 * by k-anonymity and `r` by geo-indistinguishability.
 *
 * # Safety
 * `probability` must be valid for writes.
 */
enum WsStatus ws_localization_probability(enum WsPrivacyScheme s,
                                          double m,
                                          double k,
                                          double r,
                                          double *probability);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WS_PRIVDB_H */
