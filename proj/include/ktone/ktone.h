#ifndef KTONE_KTONE_H
#define KTONE_KTONE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(KTONE_BUILDING_LIBRARY)
#    define KTONE_API __declspec(dllexport)
#  else
#    define KTONE_API __declspec(dllimport)
#  endif
#else
#  define KTONE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ktone_status {
  KTONE_OK = 0,
  KTONE_E_CONTRACT = 1,
  KTONE_E_DOMAIN = 2,
  KTONE_E_CAPABILITY = 3,
  KTONE_E_NUMERICAL = 4,
  KTONE_E_CONFIG = 5,
  KTONE_E_PARSE = 6,
  KTONE_E_UNKNOWN_FUNCTION = 7,
  KTONE_E_INTERNAL = 8
} ktone_status;

typedef enum ktone_verdict { KTONE_PASS = 0, KTONE_REFUTED = 1, KTONE_INCONCLUSIVE = 2 } ktone_verdict;

typedef enum ktone_criterion {
  KTONE_CRITERION_DEFINITION = 0,
  KTONE_CRITERION_DERIVATIVE = 1,
  KTONE_CRITERION_REMAINDER = 2,
  KTONE_CRITERION_CHAIN = 3,
  KTONE_CRITERION_CONE_CHAIN = 4,
  KTONE_CRITERION_PROFILE = 5
} ktone_criterion;

typedef enum ktone_deriv_method { KTONE_DERIV_EIGENBASIS = 0, KTONE_DERIV_FINITE_DIFFERENCE = 1 } ktone_deriv_method;

typedef struct ktone_function ktone_function;
typedef struct ktone_matrix ktone_matrix;
typedef struct ktone_result ktone_result;

/* Infinite ends are +-INFINITY. */
typedef struct ktone_interval {
  double lo;
  double hi;
  double margin;
  double cap;
} ktone_interval;

typedef struct ktone_check_options {
  int k;
  const int* dims;
  int n_dims;
  int trials;
  int partitions_per_trial;
  uint64_t seed;
  double tol;
  int threads;
  int symmetric_directions;
  const double* alphas;
  int n_alphas;
  /* cone chain */
  int lmax;
  double chain_alpha; /* NaN selects the interval's finite left end */
  /* chain inequality */
  int chain_grid;
  /* monotonicity profile */
  int profile_order;
} ktone_check_options;

typedef struct ktone_fit_options {
  int grid_size; /* 0 picks 201 on (-1,1) and 301 on (0,inf) */
  double lambda_max;
  int tuples;
  double confluent_fraction;
  uint64_t seed;
  double tikhonov;
  double tol;
  int threads;
} ktone_fit_options;

KTONE_API const char* ktone_version(void);
/* Message of the last failing call on this thread; empty when none. */
KTONE_API const char* ktone_last_error(void);
KTONE_API const char* ktone_status_name(ktone_status s);

KTONE_API ktone_status ktone_function_create(const char* name, ktone_function** out);
KTONE_API ktone_status ktone_function_negate(const ktone_function* f, ktone_function** out);
KTONE_API void ktone_function_destroy(ktone_function* f);
KTONE_API const char* ktone_function_name(const ktone_function* f);
/* Interval on which the shipped table is stated. */
KTONE_API ktone_status ktone_function_interval(const ktone_function* f, ktone_interval* out);
KTONE_API ktone_status ktone_function_deriv(const ktone_function* f, int order, double x, double* out);
/* "plus", "minus", "both" or "neither"; static storage. */
KTONE_API ktone_status ktone_function_expected(const ktone_function* f, int k, const char** out);

KTONE_API ktone_status ktone_interval_parse(const char* text, ktone_interval* out);

KTONE_API ktone_status ktone_matrix_create(int dim, const double* row_major, ktone_matrix** out);
/* Plain text rows or JSON {"dim", "data"}. */
KTONE_API ktone_status ktone_matrix_parse(const char* text, ktone_matrix** out);
KTONE_API int ktone_matrix_dim(const ktone_matrix* m);
KTONE_API ktone_status ktone_matrix_copy(const ktone_matrix* m, double* row_major, size_t len);
KTONE_API void ktone_matrix_destroy(ktone_matrix* m);

KTONE_API ktone_status ktone_random_ordered_pair(const ktone_interval* iv, int dim, uint64_t seed, ktone_matrix** a,
                                                 ktone_matrix** b);
KTONE_API ktone_status ktone_random_in_window(const ktone_interval* iv, int dim, uint64_t seed, ktone_matrix** out);
KTONE_API ktone_status ktone_random_symmetric(int dim, uint64_t seed, double scale, ktone_matrix** out);

KTONE_API void ktone_check_options_init(ktone_check_options* opts);
KTONE_API void ktone_fit_options_init(ktone_fit_options* opts);

KTONE_API ktone_status ktone_check(const ktone_function* f, const ktone_interval* iv, ktone_criterion criterion,
                                   const ktone_check_options* opts, ktone_result** out);
/* Re-evaluates the counterexample of a serialized report. Verdict is REFUTED when the
   stored violation is reproduced, INCONCLUSIVE otherwise. */
KTONE_API ktone_status ktone_replay(const char* report_json, double match_tol, ktone_result** out);
/* iv may be NULL to use each entry's table interval. Verdict PASS iff every row agrees. */
KTONE_API ktone_status ktone_sweep(const char* family, const double* params, int n_params, int kmin, int kmax,
                                   const ktone_interval* iv, const ktone_check_options* opts, ktone_result** out);
/* Fits on (-1,1) or (0,inf) according to iv. Verdict PASS iff the residual is within tolerance. */
KTONE_API ktone_status ktone_fit(const ktone_function* f, int k, const ktone_interval* iv,
                                 const ktone_fit_options* opts, ktone_result** out);
KTONE_API ktone_status ktone_deriv(const ktone_function* f, const ktone_matrix* a, const ktone_matrix* x, int k,
                                   ktone_deriv_method method, ktone_result** out);
KTONE_API ktone_status ktone_divdiff(const ktone_function* f, const ktone_matrix* a, const ktone_matrix* b,
                                     const double* ts, int n_ts, ktone_result** out);

KTONE_API ktone_verdict ktone_result_verdict(const ktone_result* r);
/* Versioned JSON document; owned by the result. */
KTONE_API const char* ktone_result_json(const ktone_result* r, int with_timestamp);
KTONE_API const char* ktone_result_csv(const ktone_result* r);
/* Matrix payload of deriv/divdiff results; NULL otherwise. Owned by the result. */
KTONE_API const ktone_matrix* ktone_result_matrix(const ktone_result* r);
/* Smallest eigenvalue of the stored counterexample; NaN when none. */
KTONE_API double ktone_result_min_eig(const ktone_result* r);
KTONE_API void ktone_result_destroy(ktone_result* r);

#ifdef __cplusplus
}
#endif

#endif
