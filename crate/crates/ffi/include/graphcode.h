#ifndef GRAPHCODE_H
#define GRAPHCODE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  GC_FORMAT_AUTO = 0,
  GC_FORMAT_PRESENTATION = 1,
  GC_FORMAT_SIMPLICIAL = 2,
} GcFormat;

typedef enum {
  GC_SLICING_EQUIDISTANT = 0,
  GC_SLICING_QUANTILE = 1,
} GcSlicing;

typedef enum {
  GC_STATUS_OK = 0,
  GC_STATUS_NULL_POINTER = 1,
  GC_STATUS_INVALID_UTF8 = 2,
  GC_STATUS_INVALID_ARGUMENT = 3,
  GC_STATUS_PARSE = 4,
  GC_STATUS_INVALID_INPUT = 5,
  GC_STATUS_OUT_OF_RANGE = 6,
  GC_STATUS_INTERNAL = 7,
} GcStatus;

/**
 * Opaque graphcode handle.
 */
typedef struct GcGraphcode GcGraphcode;

typedef struct {
  GcFormat format;
  uint32_t degree;
  uint32_t slices;
  double threshold;
  /**
   * 1 or 2.
   */
  uint8_t primary_parameter;
  GcSlicing slicing;
} GcOptions;

typedef struct {
  /**
   * 1-based.
   */
  uint32_t layer;
  double birth;
  double death;
  bool essential;
} GcNode;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failing call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *gc_last_error(void);

GcOptions gc_options_default(void);

/**
 * Computes the thresholded graphcode of a presentation or a simplicial
 * bifiltration given as text. `options` may be NULL for the defaults. On
 * success `*out` owns a handle to release with `gc_graphcode_free`.
 *
 * # Safety
 * `text` must be a NUL-terminated string, `options` NULL or valid, `out` valid
 * for writes.
 */
GcStatus gc_compute(const char *text, const GcOptions *options, GcGraphcode **out);

/**
 * # Safety
 * `gc` must be NULL or a handle from `gc_compute` not yet freed.
 */
void gc_graphcode_free(GcGraphcode *gc);

/**
 * # Safety
 * `gc` must be NULL or a live handle.
 */
size_t gc_graphcode_slices(const GcGraphcode *gc);

/**
 * # Safety
 * `gc` must be NULL or a live handle.
 */
size_t gc_graphcode_node_count(const GcGraphcode *gc);

/**
 * # Safety
 * `gc` must be NULL or a live handle.
 */
size_t gc_graphcode_edge_count(const GcGraphcode *gc);

/**
 * # Safety
 * `gc` must be a live handle and `out` valid for writes.
 */
GcStatus gc_graphcode_node(const GcGraphcode *gc, size_t index, GcNode *out);

/**
 * Writes the node ids of edge `index`, which runs from layer `l` to `l + 1`.
 *
 * # Safety
 * `gc` must be a live handle, `source` and `target` valid for writes.
 */
GcStatus gc_graphcode_edge(const GcGraphcode *gc, size_t index, size_t *source, size_t *target);

/**
 * Graphcode as JSON, to release with `gc_string_free`. NULL on failure.
 *
 * # Safety
 * `gc` must be NULL or a live handle.
 */
char *gc_graphcode_to_json(const GcGraphcode *gc, bool with_attributes);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library not yet freed.
 */
void gc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GRAPHCODE_H */
