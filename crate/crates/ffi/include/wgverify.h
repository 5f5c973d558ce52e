#ifndef WGVERIFY_H
#define WGVERIFY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum WgvStatus {
  WGV_STATUS_OK = 0,
  WGV_STATUS_NULL_POINTER = 1,
  WGV_STATUS_INPUT = 2,
  WGV_STATUS_CAPABILITY = 3,
  WGV_STATUS_CONFIG = 4,
  WGV_STATUS_STATE = 5,
  WGV_STATUS_SOURCE = 6,
  WGV_STATUS_BUFFER_TOO_SMALL = 7,
  WGV_STATUS_PANIC = 8,
} WgvStatus;

typedef enum WgvProtocolKind {
  WGV_PROTOCOL_KIND_ADAPTIVE_EXACT = 0,
  WGV_PROTOCOL_KIND_ADAPTIVE_H = 1,
  WGV_PROTOCOL_KIND_NONADAPTIVE_E = 2,
  WGV_PROTOCOL_KIND_NONADAPTIVE_H = 3,
} WgvProtocolKind;

/**
 * Opaque independence cover.
 */
typedef struct WgvCover WgvCover;

/**
 * Opaque weighted graph.
 */
typedef struct WgvGraph WgvGraph;

/**
 * Settings for [`wgv_run`].
 */
typedef struct WgvRunParams {
  enum WgvProtocolKind kind;
  /**
   * Basis count for the grid protocols; ignored otherwise.
   */
  uint32_t h;
  /**
   * One basis label per copy instead of per vertex (nonadaptive_h only).
   */
  bool shared_draw;
  /**
   * Tested copies N.
   */
  size_t copies;
  double beta;
  /**
   * Depolarizing probability of the simulated source; 0 is honest.
   */
  double noise;
  uint64_t seed;
  /**
   * RNG stream, so that runs sharing a seed stay independent.
   */
  uint64_t stream;
} WgvRunParams;

/**
 * Outcome of [`wgv_run`].
 */
typedef struct WgvRunResult {
  bool accepted;
  /**
   * 1-based position of the withheld copy.
   */
  size_t withheld;
  size_t failed_copies;
  /**
   * Fidelity lower bound; NaN when the run was rejected.
   */
  double certificate;
  double completeness_bound;
} WgvRunResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the buffer size needed for the full message.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t wgv_last_error(char *buf, size_t len);

/**
 * Parses a graph in text format (`n N`, `edge j k angle`).
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum WgvStatus wgv_graph_parse(const char *text, struct WgvGraph **out);

/**
 * Builds a graph from parallel arrays of 1-based endpoints and weights.
 *
 * # Safety
 * `j`, `k` and `theta` must be valid for `edges` reads (or null when
 * `edges` is 0); `out` must be valid for writes.
 */
enum WgvStatus wgv_graph_from_edges(size_t n,
                                    const size_t *j,
                                    const size_t *k,
                                    const double *theta,
                                    size_t edges,
                                    struct WgvGraph **out);

/**
 * # Safety
 * `g` must be null or a handle from a `wgv_graph_*` constructor, not yet freed.
 */
void wgv_graph_free(struct WgvGraph *g);

/**
 * Number of vertices, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live graph handle.
 */
size_t wgv_graph_vertex_count(const struct WgvGraph *g);

/**
 * Writes the 2^n amplitudes of the graph state as interleaved (re, im)
 * pairs. `*needed` receives the required length in doubles; a short
 * buffer yields `BufferTooSmall` without writing.
 *
 * # Safety
 * `g` must be a live graph handle; `buf` valid for `len` doubles or null;
 * `needed` null or valid for writes.
 */
enum WgvStatus wgv_graph_state(const struct WgvGraph *g, double *buf, size_t len, size_t *needed);

/**
 * Greedy cover in vertex order.
 *
 * # Safety
 * `g` must be a live graph handle; `out` valid for writes.
 */
enum WgvStatus wgv_cover_greedy(const struct WgvGraph *g, struct WgvCover **out);

/**
 * Cover from 0-based colors, one per vertex.
 *
 * # Safety
 * `g` must be a live graph handle; `colors` valid for `len` reads; `out`
 * valid for writes.
 */
enum WgvStatus wgv_cover_from_colors(const struct WgvGraph *g,
                                     const size_t *colors,
                                     size_t len,
                                     struct WgvCover **out);

/**
 * Number of parts m, or 0 for a null handle.
 *
 * # Safety
 * `c` must be null or a live cover handle.
 */
size_t wgv_cover_part_count(const struct WgvCover *c);

/**
 * # Safety
 * `c` must be null or a cover handle not yet freed.
 */
void wgv_cover_free(struct WgvCover *c);

/**
 * Spectral gap of the exact-basis test operator: adaptive when `hvec` is
 * null, otherwise nonadaptive with per-vertex basis counts `hvec[0..len]`.
 *
 * # Safety
 * `g` and `c` must be live handles; `hvec` null or valid for `len` reads;
 * `out` valid for writes.
 */
enum WgvStatus wgv_spectral_gap(const struct WgvGraph *g,
                                const struct WgvCover *c,
                                const uint32_t *hvec,
                                size_t len,
                                double *out);

/**
 * Fidelity certificate for an accepted run. `resource` is h for the grid
 * protocols and max e(k) for nonadaptive_e.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum WgvStatus wgv_certificate_bound(enum WgvProtocolKind kind,
                                     size_t n,
                                     size_t m,
                                     size_t copies,
                                     double beta,
                                     uint32_t resource,
                                     double *out);

/**
 * Sufficient copy count for error `epsilon` at significance `beta`.
 * `resource` is max e(k) for nonadaptive_e and the scale b for adaptive_h;
 * it is ignored otherwise. `*h` receives the basis count (0 when unused).
 *
 * # Safety
 * `copies` and `h` must be valid for writes.
 */
enum WgvStatus wgv_copies_required(enum WgvProtocolKind kind,
                                   size_t n,
                                   size_t m,
                                   double epsilon,
                                   double beta,
                                   double resource,
                                   uint64_t *copies,
                                   uint32_t *h);

/**
 * One sampling test against a simulated (optionally depolarized) source.
 *
 * # Safety
 * `g`, `c` must be live handles; `params` valid for reads; `out` valid
 * for writes.
 */
enum WgvStatus wgv_run(const struct WgvGraph *g,
                       const struct WgvCover *c,
                       const struct WgvRunParams *params,
                       struct WgvRunResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WGVERIFY_H */
