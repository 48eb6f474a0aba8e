#ifndef NLHEAT_NLHEAT_H
#define NLHEAT_NLHEAT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define NLH_API __declspec(dllimport)
#  ifdef NLHEAT_BUILDING
#    undef NLH_API
#    define NLH_API __declspec(dllexport)
#  endif
#else
#  define NLH_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nlh_status {
  NLH_OK = 0,
  NLH_ERR_INVALID_ARGUMENT = 1,
  NLH_ERR_NONPOSITIVE_LENGTH = 2,
  NLH_ERR_SHAPE_MISMATCH = 3,
  NLH_ERR_NON_FINITE = 4,
  NLH_ERR_OUT_OF_DOMAIN = 5,
  NLH_ERR_PROJECTION_STALL = 6,
  NLH_ERR_UNRESOLVED_INTERFACE = 7,
  NLH_ERR_SEED_CONSTRUCTION = 8,
  NLH_ERR_PARSE = 9,
  NLH_ERR_VALIDATION = 10,
  NLH_ERR_IO = 11,
  NLH_ERR_INTERNAL = 12
} nlh_status;

typedef enum nlh_check_status { NLH_CHECK_PASS = 0, NLH_CHECK_FAIL = 1, NLH_CHECK_NOT_APPLICABLE = 2 } nlh_check_status;

typedef struct nlh_config nlh_config;
typedef struct nlh_result nlh_result;

/* Borrowed views; strings stay valid until the owning result is freed. */
typedef struct nlh_check {
  const char* name;
  nlh_check_status status;
  double measured;
  double expected;
  double tol;
  const char* anchor;
  const char* detail;
} nlh_check;

NLH_API const char* nlh_version(void);
NLH_API const char* nlh_status_name(nlh_status status);
/* Message of the last failing call on this thread ("" if none). */
NLH_API const char* nlh_last_error(void);

/* kind accepts config names (blowup_criterion) and subcommand names (blowup). */
NLH_API nlh_status nlh_config_default(const char* kind, nlh_config** out);
NLH_API nlh_status nlh_config_parse(const char* text, const char* origin, nlh_config** out);
NLH_API nlh_status nlh_config_load(const char* path, nlh_config** out);
NLH_API void nlh_config_free(nlh_config* config);

NLH_API nlh_status nlh_config_kind(const nlh_config* config, const char** kind);
NLH_API nlh_status nlh_config_name(const nlh_config* config, const char** name);
NLH_API nlh_status nlh_config_output_dir(const nlh_config* config, const char** dir);
NLH_API nlh_status nlh_config_set_output_dir(nlh_config* config, const char* dir);
/* Replaces the seed list with a single seed. */
NLH_API nlh_status nlh_config_set_seed(nlh_config* config, uint64_t seed);

/* Runs the experiment. A result is produced even when checks fail; only errors
   that stop the run (bad config, solver failure, seed construction) return non-OK. */
NLH_API nlh_status nlh_experiment_run(const nlh_config* config, nlh_result** out);
NLH_API void nlh_result_free(nlh_result* result);

NLH_API nlh_status nlh_result_check_count(const nlh_result* result, size_t* count);
NLH_API nlh_status nlh_result_fail_count(const nlh_result* result, size_t* count);
NLH_API nlh_status nlh_result_check(const nlh_result* result, size_t index, nlh_check* out);
NLH_API nlh_status nlh_result_wall_seconds(const nlh_result* result, double* seconds);
/* report.txt contents. */
NLH_API nlh_status nlh_result_report(const nlh_result* result, const char** text);
NLH_API nlh_status nlh_result_file_count(const nlh_result* result, size_t* count);
NLH_API nlh_status nlh_result_file(const nlh_result* result, size_t index, const char** name, const char** content,
                                   size_t* size);
/* Writes report.txt and every file into dir (created if missing). */
NLH_API nlh_status nlh_result_write(const nlh_result* result, const char* dir);

NLH_API nlh_status nlh_verify_manifest_count(size_t* count);
NLH_API nlh_status nlh_verify_manifest_entry(size_t index, const char** id, const char** module);

/* A few library constants, mostly for bindings and smoke tests. */
NLH_API nlh_status nlh_mobility_constant(double p, double* out);
NLH_API nlh_status nlh_lambda1_star(int dim, double* out);
NLH_API nlh_status nlh_blowup_threshold(double length, int points, double p, double* out);

#ifdef __cplusplus
}
#endif

#endif
