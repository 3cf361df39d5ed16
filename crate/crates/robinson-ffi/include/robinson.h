#ifndef ROBINSON_H
#define ROBINSON_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

// Result of a call. The first three match the exit codes of the
// command-line tool.
typedef enum RobinsonStatus {
  ROBINSON_STATUS_OK = 0,
  // The matrix is not Robinson.
  ROBINSON_STATUS_NOT_ROBINSON = 1,
  // Malformed, invalid or mismatched input.
  ROBINSON_STATUS_INVALID_INPUT = 2,
  // A required pointer argument was null.
  ROBINSON_STATUS_NULL_ARGUMENT = 3,
  // A caller buffer is too small; the required length was reported.
  ROBINSON_STATUS_BUFFER_TOO_SMALL = 4,
  // An internal error; the library state is unaffected.
  ROBINSON_STATUS_INTERNAL = 5,
} RobinsonStatus;

// Which tree to build.
typedef enum RobinsonTreeKind {
  ROBINSON_TREE_KIND_PQ = 0,
  ROBINSON_TREE_KIND_MMODULE = 1,
  ROBINSON_TREE_KIND_DENDROGRAM = 2,
} RobinsonTreeKind;

// A validated dissimilarity matrix.
typedef struct RobinsonMatrix RobinsonMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failure on this thread; empty if none. The
// pointer stays valid until the next failing call on this thread.
const char *robinson_last_error(void);

// Parse and validate a matrix in the text format (full square or upper
// triangle, decimal entries). On success `*out` receives a handle to
// release with [`robinson_matrix_free`].
enum RobinsonStatus robinson_matrix_parse(const char *text, struct RobinsonMatrix **out);

// Build a matrix from `n * n` integer entries in row-major order. The
// entries must be symmetric with a zero diagonal.
enum RobinsonStatus robinson_matrix_from_values(size_t n,
                                                const uint64_t *values,
                                                struct RobinsonMatrix **out);

// Release a matrix handle. Null is ignored.
void robinson_matrix_free(struct RobinsonMatrix *matrix);

// Number of points of a matrix; 0 for null.
size_t robinson_matrix_size(const struct RobinsonMatrix *matrix);

// Decide whether the matrix is Robinson. On success a compatible order
// (0-based indices) is written to `order`, which must hold `capacity`
// entries; `order` may be null when `capacity` is 0. `*order_len`, if not
// null, receives the number of points whenever the matrix is Robinson,
// including when the buffer is too small.
enum RobinsonStatus robinson_recognize(const struct RobinsonMatrix *matrix,
                                       size_t *order,
                                       size_t capacity,
                                       size_t *order_len);

// Build one tree of the matrix as a JSON document. The PQ-tree and the
// mmodule tree require a Robinson matrix; the dendrogram does not.
enum RobinsonStatus robinson_tree_json(const struct RobinsonMatrix *matrix,
                                       enum RobinsonTreeKind kind,
                                       char **out);

// Translate a `pq` document into the `mmodule` document of the same
// matrix, or back.
enum RobinsonStatus robinson_translate_json(const struct RobinsonMatrix *matrix,
                                            const char *document,
                                            char **out);

// Release a string returned by this library. Null is ignored.
void robinson_string_free(char *s);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* ROBINSON_H */
