#ifndef SPECTEL_SPECTEL_H
#define SPECTEL_SPECTEL_H

#include <stddef.h>
#include <stdint.h>

#if defined(SPECTEL_BUILDING_LIBRARY)
#define SPECTEL_API __attribute__((visibility("default")))
#else
#define SPECTEL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum spectel_status {
  SPECTEL_OK = 0,
  SPECTEL_ERR_DOMAIN = 1,
  SPECTEL_ERR_PARSE = 2,
  SPECTEL_ERR_RESOURCE = 3,
  SPECTEL_ERR_NUMERICAL = 4,
  SPECTEL_ERR_STATISTICAL = 5,
  SPECTEL_ERR_INVALID_ARGUMENT = 6,
  SPECTEL_ERR_INTERNAL = 7
} spectel_status;

typedef struct spectel_target spectel_target;
typedef struct spectel_sampler spectel_sampler;

typedef struct spectel_tolerances {
  double telescope;
  double bound;
  double lemma;
  double psd;
} spectel_tolerances;

typedef struct spectel_cube_options {
  size_t n;
  size_t steps;
  uint64_t seed;
  size_t tv_points;
  size_t contraction_draws;
  size_t eigen_degree;
} spectel_cube_options;

SPECTEL_API const char* spectel_version(void);

/* Message of the last failure on the calling thread; empty if none. */
SPECTEL_API const char* spectel_last_error(void);

SPECTEL_API spectel_tolerances spectel_default_tolerances(void);
SPECTEL_API spectel_cube_options spectel_default_cube_options(void);

/* Strings returned through char** are owned by the caller. */
SPECTEL_API void spectel_string_free(char* text);

/* Targets. Probabilities are row-major with the last axis fastest. */
SPECTEL_API spectel_status spectel_target_create(const size_t* axes, size_t n, const double* probs, size_t count,
                                                 spectel_target** out);
SPECTEL_API spectel_status spectel_target_from_json(const char* text, spectel_target** out);
/* Dirichlet(1) over the full tensor. */
SPECTEL_API spectel_status spectel_target_random_dirichlet(const size_t* axes, size_t n, uint64_t seed,
                                                           spectel_target** out);
SPECTEL_API spectel_status spectel_target_to_json(const spectel_target* target, char** out);
SPECTEL_API size_t spectel_target_dims(const spectel_target* target);
SPECTEL_API void spectel_target_free(spectel_target* target);

/* Verification suites. The report is a JSON document; *pass is 1 iff every check passed. */
SPECTEL_API spectel_status spectel_verify_finite(const spectel_target* const* targets, size_t count, size_t l,
                                                 uint64_t seed, const spectel_tolerances* tol, char** report,
                                                 int* pass);
/* `count` Dirichlet(1) targets with the given axes, drawn from one stream seeded by `seed`. */
SPECTEL_API spectel_status spectel_verify_finite_random(size_t count, const size_t* axes, size_t n, size_t l,
                                                        uint64_t seed, const spectel_tolerances* tol,
                                                        char** report, int* pass);
SPECTEL_API spectel_status spectel_verify_cube(const spectel_cube_options* options, char** report, int* pass);
SPECTEL_API spectel_status spectel_report_merge(const char* const* reports, size_t count, char** merged, int* pass);

/* Samplers. Finite states hold 0-based alphabet values; corner states hold coordinates. */
SPECTEL_API spectel_status spectel_sampler_finite(const spectel_target* target, size_t l, uint64_t seed,
                                                  spectel_sampler** out);
SPECTEL_API spectel_status spectel_sampler_cube(size_t n, uint64_t seed, spectel_sampler** out);
SPECTEL_API size_t spectel_sampler_dims(const spectel_sampler* sampler);
SPECTEL_API spectel_status spectel_sampler_step(spectel_sampler* sampler, size_t steps);
SPECTEL_API spectel_status spectel_sampler_state(const spectel_sampler* sampler, double* out, size_t capacity);
/* Current state as one line of JSON, without a trailing newline. */
SPECTEL_API spectel_status spectel_sampler_state_json(const spectel_sampler* sampler, char** out);
SPECTEL_API void spectel_sampler_free(spectel_sampler* sampler);

#ifdef __cplusplus
}
#endif

#endif
