#ifndef GEOMCONST_H
#define GEOMCONST_H

/* Generated by cbindgen from geomconst-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call. `Ok` is zero; everything else
 * leaves a message retrievable with `gc_last_error_message`.
 */
typedef enum GcStatus {
  GcStatus_Ok = 0,
  GcStatus_NullArgument = 1,
  GcStatus_InvalidUtf8 = 2,
  GcStatus_ParseError = 3,
  GcStatus_ValidationError = 4,
  GcStatus_DimensionMismatch = 5,
  GcStatus_Degenerate = 6,
  GcStatus_NotAvailable = 7,
  GcStatus_NumericError = 8,
} GcStatus;

/**
 * Opaque estimate handle: value, certification, witness, search counters.
 */
typedef struct GcEstimate GcEstimate;

/**
 * Opaque normed-space handle.
 */
typedef struct GcSpace GcSpace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Version of the library as a static string; do not free.
 */
const char *gc_version(void);

/**
 * Static name of a status code; do not free.
 */
const char *gc_status_name(enum GcStatus status);

/**
 * Message from the most recent failure on the calling thread; empty when
 * nothing failed yet. Borrowed; valid until the next failing call on
 * this thread.
 */
const char *gc_last_error_message(void);

/**
 * Frees a string returned through an out-parameter. Null is ignored.
 */
void gc_string_free(char *s);

/**
 * Builds a space from a JSON document, for example
 * `{"family":"lp","p":1.5,"dim":3}` or
 * `{"family":"polyhedral","functionals":[[1.0,0.0],[0.0,1.0],[0.7,0.7]]}`.
 */
enum GcStatus gc_space_parse(const char *doc, struct GcSpace **out);

/**
 * Builds the sequence space `l_p` of the given dimension; pass
 * `INFINITY` for the max norm.
 */
enum GcStatus gc_space_lp(double p, size_t dim, struct GcSpace **out);

/**
 * Releases a space handle. Null is ignored.
 */
void gc_space_free(struct GcSpace *space);

/**
 * Dimension of the space, or 0 for a null handle.
 */
size_t gc_space_dim(const struct GcSpace *space);

/**
 * Writes the short label of the space (such as `lp:1.5:3`) as a new
 * string; free it with `gc_string_free`.
 */
enum GcStatus gc_space_label(const struct GcSpace *space, char **out);

/**
 * Norm of the coordinate vector `coords[0..len]` in this space.
 */
enum GcStatus gc_space_norm(const struct GcSpace *space,
                            const double *coords,
                            size_t len,
                            double *out);

/**
 * Estimates a named constant on a space.
 *
 * `name` accepts the same spellings as the command line (for example
 * `"A2"`, `"C_NJ'"`, `"L_YJ^I"`, `"delta"`). Parameters that a constant
 * does not take must be `NAN`; parameters it requires must be finite
 * (`tau`/`upsilon` for the two-parameter quadratic means, `t` for the
 * skewed means, `eps` for the modulus of convexity). `mode` selects the
 * evaluation route: 0 keeps the constant's natural route, 1 forces the
 * free-pair form, 2 forces the isosceles-orthogonal form. `restarts`
 * and `seed` control the deterministic multistart search.
 */
enum GcStatus gc_estimate_constant(const struct GcSpace *space,
                                   const char *name,
                                   double tau,
                                   double upsilon,
                                   double t,
                                   double eps,
                                   int mode,
                                   uint32_t restarts,
                                   uint64_t seed,
                                   struct GcEstimate **out);

/**
 * Estimated value, or NAN for a null handle.
 */
double gc_estimate_value(const struct GcEstimate *est);

/**
 * Number of objective evaluations behind the estimate; 0 for null.
 */
uint64_t gc_estimate_evals(const struct GcEstimate *est);

/**
 * Number of evaluations skipped as non-finite; 0 for null.
 */
uint64_t gc_estimate_skipped(const struct GcEstimate *est);

/**
 * Largest neighbor-to-neighbor value change seen on a certified grid,
 * or NAN when the estimate did not come from a grid scan.
 */
double gc_estimate_window(const struct GcEstimate *est);

/**
 * Static certification label: `grid-certified`,
 * `heuristic-lower-bound`, or `heuristic-upper-bound`. Do not free.
 * Null for a null handle.
 */
const char *gc_estimate_certification(const struct GcEstimate *est);

/**
 * Dimension of the witness vectors; 0 for null.
 */
size_t gc_estimate_witness_dim(const struct GcEstimate *est);

/**
 * Copies a witness vector into `buf[0..len]`: `which` 0 is the first
 * vector, 1 the second. `len` must equal the witness dimension.
 */
enum GcStatus gc_estimate_witness(const struct GcEstimate *est, int which, double *buf, size_t len);

/**
 * Scale factor applied to the second witness vector by a constrained
 * search, or NAN when the witness is a plain unit pair.
 */
double gc_estimate_lambda(const struct GcEstimate *est);

/**
 * Releases an estimate handle. Null is ignored.
 */
void gc_estimate_free(struct GcEstimate *est);

/**
 * Closed-form value of a constant on a Hilbert space, written to `out`.
 * Fails with `NotAvailable` when the catalog has no closed form for the
 * query.
 */
enum GcStatus gc_hilbert_reference(const char *name,
                                   double tau,
                                   double upsilon,
                                   double t,
                                   double eps,
                                   double *out);

/**
 * Writes the identity catalog as a JSON array of `{"id", "summary"}`
 * objects; free the string with `gc_string_free`.
 */
enum GcStatus gc_identity_catalog_json(char **out);

/**
 * Runs a verification suite and writes the full report as JSON; free
 * the string with `gc_string_free`.
 *
 * `corpus_json` is either null or `"default"` for the built-in corpus,
 * or a JSON array of space documents as accepted by `gc_space_parse`.
 * `suite` is `"core"`, `"full"`, or null for core. The caller inspects
 * the per-identity `status` fields in the report; a failed identity is
 * still `GcStatus_Ok` here because the run itself succeeded.
 */
enum GcStatus gc_verify_suite_json(const char *corpus_json,
                                   const char *suite,
                                   uint32_t restarts,
                                   uint64_t seed,
                                   char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* GEOMCONST_H */
