#ifndef FAIRSPREAD_H
#define FAIRSPREAD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Seed selector for [`fs_select`].
 */
typedef enum FsMethod {
  FS_METHOD_UTILITARIAN = 0,
  FS_METHOD_WELFARE = 1,
  FS_METHOD_MAXIMIN = 2,
  FS_METHOD_DC = 3,
} FsMethod;

/**
 * Result code of every fallible call.
 */
typedef enum FsStatus {
  FS_STATUS_OK = 0,
  FS_STATUS_NULL_POINTER = 1,
  FS_STATUS_INVALID_ARGUMENT = 2,
  FS_STATUS_FILE_ERROR = 3,
  FS_STATUS_MALFORMED = 4,
  FS_STATUS_INFEASIBLE = 5,
  FS_STATUS_BUFFER_TOO_SMALL = 6,
  FS_STATUS_PANIC = 7,
} FsStatus;

/**
 * A graph together with its community partition.
 */
typedef struct FsGraph FsGraph;

/**
 * Live-edge sketches sampled from one graph.
 */
typedef struct FsSketches FsSketches;

/**
 * Parameters for [`fs_select`]. `epsilon <= 0` means the default floor `1/(2n)`.
 */
typedef struct FsSelectOptions {
  enum FsMethod method;
  size_t k;
  double alpha;
  double epsilon;
  /**
   * Tolerance for the maximin and DC selectors.
   */
  double tol;
  /**
   * Seed for the sketches behind the DC bounds.
   */
  uint64_t dc_seed;
} FsSelectOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *fs_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *fs_version(void);

/**
 * Loads a graph document from a file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FsStatus fs_graph_load(const char *path, struct FsGraph **out);

/**
 * Parses a graph document from JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FsStatus fs_graph_parse(const char *json, struct FsGraph **out);

/**
 * Samples a stochastic block model from a JSON spec
 * (`community_sizes`, `within_prob`, `between_prob`, optional `p`).
 *
 * # Safety
 * `spec_json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FsStatus fs_graph_generate_sbm(const char *spec_json, uint64_t seed, struct FsGraph **out);

/**
 * # Safety
 * `graph` must come from an `fs_graph_*` constructor and not be used afterwards.
 */
void fs_graph_free(struct FsGraph *graph);

/**
 * Vertex count, or 0 for a null handle.
 *
 * # Safety
 * `graph` must be null or a live handle.
 */
size_t fs_graph_vertex_count(const struct FsGraph *graph);

/**
 * Number of communities, or 0 for a null handle.
 *
 * # Safety
 * `graph` must be null or a live handle.
 */
size_t fs_graph_community_count(const struct FsGraph *graph);

/**
 * Community sizes into `out` (capacity `capacity`); `written` receives the count.
 *
 * # Safety
 * Pointers must be valid for the stated lengths.
 */
enum FsStatus fs_graph_community_sizes(const struct FsGraph *graph,
                                       size_t *out,
                                       size_t capacity,
                                       size_t *written);

/**
 * Samples `r` live-edge sketches; the same `(graph, r, seed)` always gives the same set.
 *
 * # Safety
 * `graph` must be a live handle and `out` a valid pointer.
 */
enum FsStatus fs_sketches_sample(const struct FsGraph *graph,
                                 size_t r,
                                 uint64_t seed,
                                 struct FsSketches **out);

/**
 * # Safety
 * `sketches` must come from [`fs_sketches_sample`] and not be used afterwards.
 */
void fs_sketches_free(struct FsSketches *sketches);

/**
 * Sketch estimate of per-community influenced fractions of `seeds`.
 *
 * # Safety
 * Handles must be live; `seeds` holds `seed_count` ids and `out` has room for
 * `capacity` values.
 */
enum FsStatus fs_estimate_utilities(const struct FsGraph *graph,
                                    const struct FsSketches *sketches,
                                    const size_t *seeds,
                                    size_t seed_count,
                                    double *out,
                                    size_t capacity,
                                    size_t *written);

/**
 * Exact per-community influenced fractions (small or forest-shaped graphs).
 *
 * # Safety
 * As [`fs_estimate_utilities`].
 */
enum FsStatus fs_exact_utilities(const struct FsGraph *graph,
                                 const size_t *seeds,
                                 size_t seed_count,
                                 double *out,
                                 size_t capacity,
                                 size_t *written);

/**
 * Options with the library defaults for `method` and budget `k`.
 */
struct FsSelectOptions fs_select_options_default(enum FsMethod method, size_t k);

/**
 * Chooses up to `k` seeds; ids go to `out_seeds` in ascending order.
 *
 * # Safety
 * Handles must be live, `options` valid, and `out_seeds` has room for `capacity` ids.
 */
enum FsStatus fs_select(const struct FsGraph *graph,
                        const struct FsSketches *sketches,
                        const struct FsSelectOptions *options,
                        size_t *out_seeds,
                        size_t capacity,
                        size_t *written);

/**
 * Isoelastic welfare of `utilities` weighted by `sizes`.
 *
 * # Safety
 * `utilities` and `sizes` hold `count` entries; `out` is valid.
 */
enum FsStatus fs_welfare(const double *utilities,
                         const size_t *sizes,
                         size_t count,
                         double alpha,
                         double epsilon,
                         double *out);

/**
 * Largest minus smallest entry.
 *
 * # Safety
 * `utilities` holds `count` entries; `out` is valid.
 */
enum FsStatus fs_utility_gap(const double *utilities, size_t count, double *out);

/**
 * Price of fairness `1 - fair_total / im_total`, clamped to `[0, 1]`.
 *
 * # Safety
 * `out` must be valid.
 */
enum FsStatus fs_price_of_fairness(double fair_total, double im_total, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FAIRSPREAD_H */
