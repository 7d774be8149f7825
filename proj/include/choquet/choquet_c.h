#ifndef CHOQUET_C_H
#define CHOQUET_C_H

/* C interface to the choquet library. Objects are opaque handles released with
   the matching _free call; strings returned through char** are released with
   chq_string_free. Every call returns a status; on failure chq_last_error()
   describes the problem for the calling thread. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CHQ_API __declspec(dllexport)
#else
#define CHQ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum chq_status {
  CHQ_OK = 0,
  CHQ_E_INVALID_ARGUMENT = 1,
  CHQ_E_PARSE = 2,
  CHQ_E_UNIVERSE_MISMATCH = 3,
  CHQ_E_DOMAIN = 4,
  CHQ_E_UNSUPPORTED = 5,
  CHQ_E_PRECONDITION = 6,
  CHQ_E_MALFORMED_UTILITY = 7,
  CHQ_E_DIVISION = 8,
  CHQ_E_INTERNAL = 9,
  CHQ_E_NULL_ARGUMENT = 10
} chq_status;

typedef struct chq_capacity chq_capacity;
typedef struct chq_economy chq_economy;

typedef struct chq_options {
  int has_seed;
  uint64_t seed;
  int grid;   /* 0 keeps the scenario value */
  double tol; /* negative keeps the scenario value */
  int pretty; /* text report instead of JSON */
} chq_options;

CHQ_API const char* chq_version(void);
CHQ_API const char* chq_last_error(void);
CHQ_API const char* chq_status_name(chq_status s);
CHQ_API void chq_options_init(chq_options* opts);
CHQ_API void chq_string_free(char* s);

/* Runs a scenario document. command restricts the run to one CLI subcommand
   ("economy walras", ...) or is NULL. exit_code receives 0 (all pass) or 1. */
CHQ_API chq_status chq_run_scenario(const char* scenario_json, const chq_options* opts, const char* command,
                                    char** report, int* exit_code);
CHQ_API chq_status chq_run_demo(const char* name, const chq_options* opts, char** report, int* exit_code);
/* Newline-separated demo names. */
CHQ_API chq_status chq_demo_list(char** names);
/* Exit code a CLI should use for a failed call: 3 for internal errors, 2 otherwise. */
CHQ_API int chq_status_exit_code(chq_status s);

CHQ_API chq_status chq_capacity_from_json(const char* json, chq_capacity** out);
CHQ_API void chq_capacity_free(chq_capacity* mu);
CHQ_API chq_status chq_capacity_total(const chq_capacity* mu, double* out);
CHQ_API chq_status chq_capacity_evaluate(const chq_capacity* mu, const char* region_json, double* out);
/* property: "monotone", "subadditive", "submodular" or "zero_sets_union_stable". */
CHQ_API chq_status chq_capacity_check(const chq_capacity* mu, const char* property, uint64_t seed, size_t samples,
                                      double tol, int* passed);

CHQ_API chq_status chq_economy_from_json(const char* json, chq_economy** out);
CHQ_API void chq_economy_free(chq_economy* eco);
CHQ_API chq_status chq_economy_shape(const chq_economy* eco, size_t* blocks, size_t* commodities);
/* bundles: blocks x commodities values, row-major, one row per block. */
CHQ_API chq_status chq_economy_feasible(const chq_economy* eco, const double* bundles, int* feasible);
CHQ_API chq_status chq_economy_core_check(const chq_economy* eco, const double* bundles, int* in_core);
/* price may be NULL: a supporting price is then derived. price_out (commodities
   values) may be NULL. */
CHQ_API chq_status chq_economy_walras(const chq_economy* eco, const double* bundles, const double* price,
                                      double* price_out, int* passed);
/* masses_out (blocks values) may be NULL. */
CHQ_API chq_status chq_economy_oracle(const chq_economy* eco, const double* bundles, int strong, int grid,
                                      int* improved, double* masses_out);

#ifdef __cplusplus
}
#endif

#endif
