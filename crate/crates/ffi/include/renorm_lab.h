#ifndef RENORM_LAB_H
#define RENORM_LAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible function.
 */
typedef enum RlStatus {
  /**
   * Success.
   */
  RlStatus_Ok = 0,
  /**
   * A required pointer argument was null.
   */
  RlStatus_NullPointer = 1,
  /**
   * Invalid configuration, text or argument.
   */
  RlStatus_InvalidArgument = 2,
  /**
   * Solver, period or precision failure.
   */
  RlStatus_SolverFailure = 3,
  /**
   * A pair failed validation.
   */
  RlStatus_InvariantViolation = 4,
  /**
   * A caller-provided buffer is too small.
   */
  RlStatus_BufferTooSmall = 5,
  /**
   * An internal panic was caught.
   */
  RlStatus_Panic = 6,
} RlStatus;

/**
 * Opaque handle to a circle map with its closest-returns record.
 */
typedef struct RlMap RlMap;

/**
 * Opaque handle to a commuting pair.
 */
typedef struct RlPair RlPair;

/**
 * Message of the last failure on this thread; valid until the next failing call.
 */
const char *rl_last_error(void);

/**
 * Creates a map from a JSON family spec such as `{"id":"arnold","params":{"d":1}}`
 * and a parameter `omega` given as decimal or `p/q` text, and records `max_level`
 * continued-fraction digits of its rotation number.
 *
 * # Safety
 * `spec_json` and `omega` must be NUL-terminated strings; `out` must be writable.
 */
enum RlStatus rl_map_new(const char *spec_json,
                         const char *omega,
                         uint32_t precision,
                         uint32_t max_level,
                         struct RlMap **out);

/**
 * Solves the family for the rotation number `[prefix, tail, tail, ...]` to `depth` digits.
 *
 * # Safety
 * `spec_json` must be a NUL-terminated string, `prefix`/`tail` must point to
 * `prefix_len`/`tail_len` integers (or be null when the length is 0), and `out` must be writable.
 */
enum RlStatus rl_map_solve(const char *spec_json,
                           const uint64_t *prefix,
                           uintptr_t prefix_len,
                           const uint64_t *tail,
                           uintptr_t tail_len,
                           uint32_t depth,
                           uint32_t precision,
                           struct RlMap **out);

/**
 * Releases a map handle; null is ignored.
 *
 * # Safety
 * `map` must come from this library and not be used afterwards.
 */
void rl_map_free(struct RlMap *map);

/**
 * Copies the recorded digits into `buf` (capacity `cap`) and stores their count in `len`.
 *
 * # Safety
 * `map` must be a live handle, `buf` must hold `cap` integers and `len` must be writable.
 */
enum RlStatus rl_map_digits(const struct RlMap *map, uint64_t *buf, uintptr_t cap, uintptr_t *len);

/**
 * The map parameter as a newly allocated decimal string; release with [`rl_string_free`].
 *
 * # Safety
 * `map` must be a live handle.
 */
char *rl_map_omega(const struct RlMap *map);

/**
 * Extracts the commuting pair of `level`.
 *
 * # Safety
 * `map` must be a live handle and `out` writable.
 */
enum RlStatus rl_pair_extract(const struct RlMap *map, uint32_t level, struct RlPair **out);

/**
 * Releases a pair handle; null is ignored.
 *
 * # Safety
 * `pair` must come from this library and not be used afterwards.
 */
void rl_pair_free(struct RlPair *pair);

/**
 * Period of the pair; `u64::MAX` stands for an infinite period.
 *
 * # Safety
 * `pair` must be a live handle and `out` writable.
 */
enum RlStatus rl_pair_period(const struct RlPair *pair, uint64_t *out);

/**
 * Renormalization (pre-renormalization followed by normalization) of a pair.
 *
 * # Safety
 * `pair` must be a live handle and `out` writable.
 */
enum RlStatus rl_pair_renormalize(const struct RlPair *pair, struct RlPair **out);

/**
 * Normalization of a pair (`η(0) = −1`).
 *
 * # Safety
 * `pair` must be a live handle and `out` writable.
 */
enum RlStatus rl_pair_normalize(const struct RlPair *pair, struct RlPair **out);

/**
 * Möbius-framed `C^r` distance (`r` in 0..=2) on `grid` points per side, as a double.
 *
 * # Safety
 * `a`, `b` must be live handles and `out` writable.
 */
enum RlStatus rl_pair_distance(const struct RlPair *a,
                               const struct RlPair *b,
                               uint32_t r,
                               uint32_t grid,
                               double *out);

/**
 * Serialized pair record as a newly allocated JSON string; release with [`rl_string_free`].
 *
 * # Safety
 * `pair` must be a live handle.
 */
char *rl_pair_to_json(const struct RlPair *pair);

/**
 * Releases a string returned by this library; null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void rl_string_free(char *s);

#endif /* RENORM_LAB_H */
