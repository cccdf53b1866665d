#ifndef SCOREMAX_H
#define SCOREMAX_H

#include <stddef.h>

#if defined(_WIN32)
#define SCOREMAX_API __declspec(dllexport)
#else
#define SCOREMAX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum scoremax_status {
  SCOREMAX_OK = 0,
  SCOREMAX_INVALID_RATE,
  SCOREMAX_LABEL_VIOLATION,
  SCOREMAX_DRIFT_VIOLATION,
  SCOREMAX_INVALID_PRIOR,
  SCOREMAX_INVALID_COST,
  SCOREMAX_INVALID_ARGUMENT,
  SCOREMAX_INDEX_OUT_OF_RANGE,
  SCOREMAX_INVALID_KINK,
  SCOREMAX_EMPTY_MENU,
  SCOREMAX_DOMAIN_VIOLATION,
  SCOREMAX_DIMENSION_MISMATCH,
  SCOREMAX_INFEASIBLE_CANONICALIZATION,
  SCOREMAX_HORIZON_TOO_LARGE,
  SCOREMAX_NUMERICAL_BREAKDOWN,
  SCOREMAX_CONVERGENCE_FAILURE,
  SCOREMAX_NOT_SINGLE_SIGNAL,
  SCOREMAX_PARSE_ERROR,
  SCOREMAX_VALIDATION_ERROR,
  SCOREMAX_GRID_TOO_LARGE,
  SCOREMAX_IO_ERROR,
  SCOREMAX_NULL_ARGUMENT,
  SCOREMAX_INTERNAL_ERROR
} scoremax_status;

typedef enum scoremax_mode {
  SCOREMAX_MODE_DYNAMIC = 0,
  SCOREMAX_MODE_STATIC = 1
} scoremax_mode;

typedef struct scoremax_env scoremax_env;
typedef struct scoremax_contract scoremax_contract;
typedef struct scoremax_config scoremax_config;

SCOREMAX_API const char* scoremax_version(void);
SCOREMAX_API const char* scoremax_status_name(scoremax_status status);
/* Message of the last failing call on this thread; "" after a success. */
SCOREMAX_API const char* scoremax_last_error(void);
SCOREMAX_API void scoremax_string_free(char* s);

SCOREMAX_API scoremax_status scoremax_env_create(double delta, int periods, double prior,
                                                 double cost, double g1, double g0, double b1,
                                                 double b0, scoremax_env** out);
SCOREMAX_API scoremax_status scoremax_env_from_json(const char* json, scoremax_env** out);
SCOREMAX_API void scoremax_env_free(scoremax_env* env);
SCOREMAX_API scoremax_status scoremax_env_periods(const scoremax_env* env, int* out);
SCOREMAX_API scoremax_status scoremax_env_no_info(const scoremax_env* env, int k, double* out);
SCOREMAX_API scoremax_status scoremax_env_max_horizon(const scoremax_env* env, int* out);

/* Solves for the effort-maximizing contract; *contract may be NULL when the
   caller only wants tau_star. */
SCOREMAX_API scoremax_status scoremax_solve(const scoremax_env* env, scoremax_mode mode,
                                            double tol, int* tau_star,
                                            scoremax_contract** contract);
/* Accepts either CSV layout: period,kind,r0,r1 or option,r0,r1. */
SCOREMAX_API scoremax_status scoremax_contract_from_csv(const char* csv,
                                                        scoremax_contract** out);
SCOREMAX_API scoremax_status scoremax_contract_to_csv(const scoremax_contract* contract,
                                                      char** out);
SCOREMAX_API void scoremax_contract_free(scoremax_contract* contract);
SCOREMAX_API scoremax_status scoremax_best_response(const scoremax_env* env,
                                                    const scoremax_contract* contract,
                                                    int* tau_star, double* value);

/* Run configurations. A partial config may omit mode and out; the setters
   fill them in before scoremax_run. */
SCOREMAX_API scoremax_status scoremax_config_load(const char* path, int partial,
                                                  scoremax_config** out);
SCOREMAX_API scoremax_status scoremax_config_parse(const char* json, const char* base_dir,
                                                   int partial, scoremax_config** out);
SCOREMAX_API scoremax_status scoremax_config_create(scoremax_config** out);
SCOREMAX_API void scoremax_config_free(scoremax_config* config);
SCOREMAX_API scoremax_status scoremax_config_set_mode(scoremax_config* config, const char* mode);
SCOREMAX_API scoremax_status scoremax_config_set_out(scoremax_config* config, const char* prefix);
SCOREMAX_API scoremax_status scoremax_config_set_contract(scoremax_config* config,
                                                          const char* path);
SCOREMAX_API scoremax_status scoremax_config_set_fixtures(scoremax_config* config,
                                                          const char* dir);
SCOREMAX_API scoremax_status scoremax_config_set_tol(scoremax_config* config, double tol);

/* Writes the run's files. *exit_code is 0 on success, 1 on a solver or input
   error (embedded in the report), 2 when verification fails. The return
   value is non-OK only when the report itself cannot be produced. */
SCOREMAX_API scoremax_status scoremax_run(const scoremax_config* config, int* exit_code);

#ifdef __cplusplus
}
#endif

#endif
