#ifndef FIBERENT_H
#define FIBERENT_H

/* C API for the entropy-rate maximization library.
 *
 * All high-level calls exchange JSON strings. Returned strings are owned by
 * the caller and must be released with fib_string_free. On any non-OK
 * status, fib_last_error() describes the failure (thread-local).
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  FIB_OK = 0,
  FIB_ERR_INVALID_ARGUMENT = 1,
  FIB_ERR_PARSE = 2,
  FIB_ERR_INFEASIBLE = 3,
  FIB_ERR_NUMERIC = 4,
  FIB_ERR_SCOPE = 5
} fib_status;

uint32_t fib_abi_version(void);
const char* fib_last_error(void);
void fib_string_free(char* s);

/* Opaque handle to a block law (a distribution on length-(r+1) windows). */
typedef struct fib_law fib_law;

fib_status fib_law_parse(const char* json, fib_law** out);
void fib_law_free(fib_law* law);
fib_status fib_law_dump(const fib_law* law, char** json_out);
fib_status fib_law_entropy_rate(const fib_law* law, double* out);
fib_status fib_law_conditional_mutual_information(const fib_law* law, double* out);
fib_status fib_law_stationarity_residual(const fib_law* law, double* out);

/* Maximize the entropy rate over the stationary class cut out by the
 * feature set. face_json and config_json may be NULL.
 * Result: {"status","u_star","value_nats","iterations","certificate",...}. */
fib_status fib_solve(const char* features_json, const char* face_json, const char* config_json,
                     char** result_json);

/* Closed forms. Request: {"kind":"iid","pi":[...]} or
 * {"kind":"markov_extension","mu":{"alphabet":..,"r":..,"probs":[...]}} or
 * {"kind":"binary_fixed_mean","m":..}. */
fib_status fib_closed_form(const char* request_json, char** result_json);

/* Entropy rate, conditional mutual information and stationarity residual of
 * a block law. */
fib_status fib_gap(const char* law_json, char** result_json);

/* Local geometry of the binary fixed-mean chart at a given mean:
 * {"m":..,"deltas":[...]} -> selector Jacobian, envelope identities and the
 * quadratic gap ratio table. */
fib_status fib_geometry(const char* request_json, char** result_json);

/* Simulate a path. Request: {"kernel"|"law":..., "eta":[...]?, "n":..,
 * "seed":.., "hidden":{"thetas":[...],"weights":[...]}?}. */
fib_status fib_simulate(const char* request_json, char** result_json);

/* Estimate from a path and locally re-maximize. Request: {"path":"0101..",
 * "alphabet":..,"r":..,"features":{...},"reference":[...],"radius":..}. */
fib_status fib_estimate(const char* request_json, char** result_json);

/* Simulate/estimate/solve grid experiment. Request: {"kernel":...,
 * "eta":[...],"features":{...},"u_star":[...],"radius":..,
 * "n_grid":[...],"seeds":[...]}. */
fib_status fib_experiment(const char* request_json, char** result_json);

/* Aliased hidden-state worked example at mean m:
 * {"m":..,"plot_points":N?}. */
fib_status fib_alias_demo(const char* request_json, char** result_json);

#ifdef __cplusplus
}
#endif

#endif /* FIBERENT_H */
