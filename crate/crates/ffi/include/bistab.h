#ifndef BISTAB_H
#define BISTAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Branch of the criterion that decided a network.
 */
typedef enum BistabCase {
  BISTAB_CASE_A = 0,
  BISTAB_CASE_B1 = 1,
  BISTAB_CASE_B2 = 2,
  BISTAB_CASE_B3 = 3,
  BISTAB_CASE_B4 = 4,
  BISTAB_CASE_C1 = 5,
  BISTAB_CASE_C2 = 6,
  BISTAB_CASE_C_OTHER_PAIR = 7,
  BISTAB_CASE_D = 8,
  BISTAB_CASE_NOT_APPLICABLE = 9,
} BistabCase;

/**
 * Result codes of fallible calls.
 */
typedef enum BistabStatus {
  BISTAB_STATUS_OK = 0,
  BISTAB_STATUS_NULL_POINTER = 1,
  BISTAB_STATUS_INVALID_UTF8 = 2,
  BISTAB_STATUS_PARSE_ERROR = 3,
  BISTAB_STATUS_NOT_APPLICABLE = 4,
  BISTAB_STATUS_NOT_MULTISTABLE = 5,
  BISTAB_STATUS_CONSTRUCTION_FAILED = 6,
  BISTAB_STATUS_DIMENSION_MISMATCH = 7,
  BISTAB_STATUS_INVALID_ARGUMENT = 8,
  BISTAB_STATUS_OUT_OF_RANGE = 9,
  BISTAB_STATUS_PANIC = 10,
} BistabStatus;

/**
 * Opaque parsed network.
 */
typedef struct BistabNetwork BistabNetwork;

/**
 * Opaque list of steady states with the parameters that produced them.
 */
typedef struct BistabSteadyStates BistabSteadyStates;

/**
 * Multistability decision.
 */
typedef struct BistabVerdict {
  bool multistable;
  enum BistabCase case_;
  /**
   * Certificate integers, largest first (`chain[0] > chain[1] > ...`).
   */
  uint64_t chain[3];
  size_t chain_len;
  /**
   * Bit i set when species i (0-based) is in the certifying subset.
   */
  uint64_t subset_mask;
} BistabVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *bistab_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *bistab_version(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void bistab_string_free(char *s);

/**
 * Parses network text into a new handle stored in `*out`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum BistabStatus bistab_network_parse(const char *text, struct BistabNetwork **out);

/**
 * # Safety
 * `net` must be null or a handle from [`bistab_network_parse`].
 */
void bistab_network_free(struct BistabNetwork *net);

/**
 * Number of species, or 0 for a null handle.
 *
 * # Safety
 * `net` must be null or a live network handle.
 */
size_t bistab_network_species_count(const struct BistabNetwork *net);

/**
 * Name of species `index` (0-based); null if out of range. Free with
 * [`bistab_string_free`].
 *
 * # Safety
 * `net` must be null or a live network handle.
 */
char *bistab_network_species_name(const struct BistabNetwork *net, size_t index);

/**
 * Canonical text of the network. Free with [`bistab_string_free`].
 *
 * # Safety
 * `net` must be null or a live network handle.
 */
char *bistab_network_serialize(const struct BistabNetwork *net);

/**
 * Decides multistability.
 *
 * # Safety
 * `net` must be a live network handle and `out` a valid pointer.
 */
enum BistabStatus bistab_decide(const struct BistabNetwork *net, struct BistabVerdict *out);

/**
 * Builds a certified witness; `*out` receives its steady states together
 * with the rate constants and total constants.
 *
 * # Safety
 * `net` must be a live network handle and `out` a valid pointer.
 */
enum BistabStatus bistab_witness(const struct BistabNetwork *net,
                                 uint64_t seed,
                                 struct BistabSteadyStates **out);

/**
 * Enumerates the positive steady states for rate constants (k1, k2) and
 * the `c_len` total constants at `c`.
 *
 * # Safety
 * `net` must be a live network handle, `c` must point to `c_len` doubles
 * (or be null when `c_len` is 0) and `out` must be a valid pointer.
 */
enum BistabStatus bistab_verify(const struct BistabNetwork *net,
                                double k1,
                                double k2,
                                const double *c,
                                size_t c_len,
                                struct BistabSteadyStates **out);

/**
 * # Safety
 * `states` must be null or a handle from [`bistab_witness`] or [`bistab_verify`].
 */
void bistab_states_free(struct BistabSteadyStates *states);

/**
 * Number of steady states, or 0 for a null handle.
 *
 * # Safety
 * `states` must be null or a live handle.
 */
size_t bistab_states_count(const struct BistabSteadyStates *states);

/**
 * Number of species per state.
 *
 * # Safety
 * `states` must be null or a live handle.
 */
size_t bistab_states_dimension(const struct BistabSteadyStates *states);

/**
 * Copies state `index` into `buf`, which holds `buf_len` doubles.
 *
 * # Safety
 * `states` must be a live handle and `buf` must point to `buf_len` doubles.
 */
enum BistabStatus bistab_states_get(const struct BistabSteadyStates *states,
                                    size_t index,
                                    double *buf,
                                    size_t buf_len);

/**
 * Whether state `index` is exponentially stable; false when out of range.
 *
 * # Safety
 * `states` must be null or a live handle.
 */
bool bistab_states_is_stable(const struct BistabSteadyStates *states, size_t index);

/**
 * The nonzero Jacobian eigenvalue at state `index`.
 *
 * # Safety
 * `states` must be a live handle and `out` a valid pointer.
 */
enum BistabStatus bistab_states_eigenvalue(const struct BistabSteadyStates *states,
                                           size_t index,
                                           double *out);

/**
 * Writes the rate constants (k1, k2) to `out[0..2]`.
 *
 * # Safety
 * `states` must be a live handle and `out` must point to 2 doubles.
 */
enum BistabStatus bistab_states_kappa(const struct BistabSteadyStates *states, double *out);

/**
 * Copies the total constants (species count minus one values) into `buf`.
 *
 * # Safety
 * `states` must be a live handle and `buf` must point to `buf_len` doubles.
 */
enum BistabStatus bistab_states_total_constants(const struct BistabSteadyStates *states,
                                                double *buf,
                                                size_t buf_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BISTAB_H */
