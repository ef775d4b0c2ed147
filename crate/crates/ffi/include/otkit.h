#ifndef OTKIT_H
#define OTKIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Values from 10 up mirror the library's error variants.
 */
typedef enum OtkitStatus {
  OTKIT_STATUS_OK = 0,
  OTKIT_STATUS_NULL_POINTER = 1,
  OTKIT_STATUS_INVALID_UTF8 = 2,
  OTKIT_STATUS_INVALID_JSON = 3,
  OTKIT_STATUS_BUFFER_TOO_SMALL = 4,
  OTKIT_STATUS_PANIC = 5,
  OTKIT_STATUS_PRIME_SEARCH_EXHAUSTED = 10,
  OTKIT_STATUS_INPUT_TOO_SHORT = 11,
  OTKIT_STATUS_LENGTH_MISMATCH = 12,
  OTKIT_STATUS_PLAINTEXT_OUT_OF_RANGE = 13,
  OTKIT_STATUS_MALFORMED_CIPHERTEXT = 14,
  OTKIT_STATUS_CONSISTENCY_ABORT = 15,
  OTKIT_STATUS_INDEX_OUT_OF_RANGE = 16,
  OTKIT_STATUS_NO_TAG_MATCH = 17,
  OTKIT_STATUS_AMBIGUOUS_TAG = 18,
  OTKIT_STATUS_KEY_TOO_SMALL = 19,
  OTKIT_STATUS_EMBEDDING_OVERFLOW = 20,
  OTKIT_STATUS_DECODE_ERROR = 21,
  OTKIT_STATUS_TRUNCATED_FRAME = 22,
  OTKIT_STATUS_UNKNOWN_TAG = 23,
  OTKIT_STATUS_UNKNOWN_ROLE = 24,
  OTKIT_STATUS_INVALID_BIT = 25,
  OTKIT_STATUS_INVALID_PARAMETER = 26,
  OTKIT_STATUS_FLOW = 27,
} OtkitStatus;

/**
 * Public group parameters `(P, q, g, C)`.
 */
typedef struct OtkitGroup OtkitGroup;

/**
 * A finished protocol session.
 */
typedef struct OtkitTranscript OtkitTranscript;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static name of a status code.
 */
const char *otkit_status_name(enum OtkitStatus status);

/**
 * Message of the last failure on this thread; valid until the next call
 * into the library from the same thread.
 */
const char *otkit_last_error_message(void);

/**
 * Runs the session described by a JSON configuration object, for example
 * `{"protocol":"dq-ot","seed":7,"s":1}`. A protocol abort still yields a
 * transcript; query it with `otkit_transcript_failure`.
 *
 * # Safety
 * `config_json` must be a NUL-terminated string and `out` writable.
 */
enum OtkitStatus otkit_run_session_json(const char *config_json, struct OtkitTranscript **out);

/**
 * `OTKIT_STATUS_OK` when the receiver produced an output, otherwise the
 * code of the error that ended the session.
 *
 * # Safety
 * `t` must come from `otkit_run_session_json` and not be freed.
 */
enum OtkitStatus otkit_transcript_failure(const struct OtkitTranscript *t);

/**
 * Copies the receiver's output bytes.
 *
 * # Safety
 * `t` must be a live transcript; `buf` must hold `cap` bytes; `len` must be
 * writable.
 */
enum OtkitStatus otkit_transcript_receiver_output(const struct OtkitTranscript *t,
                                                  uint8_t *buf,
                                                  size_t cap,
                                                  size_t *len);

/**
 * Number of envelopes exchanged.
 *
 * # Safety
 * `t` must be a live transcript or NULL.
 */
size_t otkit_transcript_event_count(const struct OtkitTranscript *t);

/**
 * Writes the line-delimited JSON export followed by a NUL; `*len`
 * excludes the NUL.
 *
 * # Safety
 * `t` must be a live transcript; `buf` must hold `cap` bytes; `len` must be
 * writable.
 */
enum OtkitStatus otkit_transcript_export_jsonl(const struct OtkitTranscript *t,
                                               char *buf,
                                               size_t cap,
                                               size_t *len);

/**
 * Concatenated wire frames of every envelope.
 *
 * # Safety
 * As for `otkit_transcript_receiver_output`.
 */
enum OtkitStatus otkit_transcript_frames(const struct OtkitTranscript *t,
                                         uint8_t *buf,
                                         size_t cap,
                                         size_t *len);

/**
 * # Safety
 * `t` must come from `otkit_run_session_json` and not be used afterwards.
 */
void otkit_transcript_free(struct OtkitTranscript *t);

/**
 * Safe-prime group with a `q_bits`-bit subgroup order, or the toy group
 * `P = 23` when `q_bits` is 0.
 *
 * # Safety
 * `out` must be writable.
 */
enum OtkitStatus otkit_group_generate(uint64_t q_bits, uint64_t seed, struct OtkitGroup **out);

/**
 * Bit length of `P`.
 *
 * # Safety
 * `g` must be a live group or NULL.
 */
uint64_t otkit_group_p_bits(const struct OtkitGroup *g);

/**
 * Serialized `(P, q, g, C)`.
 *
 * # Safety
 * `g` must be a live group; `buf` must hold `cap` bytes; `len` writable.
 */
enum OtkitStatus otkit_group_to_bytes(const struct OtkitGroup *g,
                                      uint8_t *buf,
                                      size_t cap,
                                      size_t *len);

/**
 * # Safety
 * `g` must come from `otkit_group_generate` and not be used afterwards.
 */
void otkit_group_free(struct OtkitGroup *g);

/**
 * Sender step of Supersonic OT: `swap(q1, (m0 ^ k0, m1 ^ k1))`. All six
 * buffers are `len` bytes.
 *
 * # Safety
 * Inputs must be readable and outputs writable for `len` bytes.
 */
enum OtkitStatus otkit_sup_gen_res(const uint8_t *m0,
                                   const uint8_t *m1,
                                   const uint8_t *k0,
                                   const uint8_t *k1,
                                   size_t len,
                                   uint8_t q1,
                                   uint8_t *out0,
                                   uint8_t *out1);

/**
 * Server step: the head of `swap(q2, (c0, c1))`.
 *
 * # Safety
 * Inputs must be readable and `out` writable for `len` bytes.
 */
enum OtkitStatus otkit_sup_obl_filter(const uint8_t *c0,
                                      const uint8_t *c1,
                                      size_t len,
                                      uint8_t q2,
                                      uint8_t *out);

/**
 * Receiver step: `c ^ k_s`.
 *
 * # Safety
 * Inputs must be readable and `out` writable for `len` bytes.
 */
enum OtkitStatus otkit_sup_retrieve(const uint8_t *c,
                                    const uint8_t *k0,
                                    const uint8_t *k1,
                                    size_t len,
                                    uint8_t s,
                                    uint8_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OTKIT_H */
