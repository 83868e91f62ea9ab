/* C interface to the active view planning simulator.
 *
 * All functions return an avp_status. On failure a message for the calling
 * thread is available from avp_last_error() until the next call. Handles are
 * opaque and must be released with the matching *_free function. */
#ifndef AVP_AVP_H
#define AVP_AVP_H

#include <stddef.h>
#include <stdint.h>

#if defined(AVP_BUILDING_LIBRARY)
#define AVP_API __attribute__((visibility("default")))
#else
#define AVP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum avp_status {
  AVP_OK = 0,
  AVP_E_INVALID_ARGUMENT = 1,
  AVP_E_DEGENERATE_INPUT = 2,
  AVP_E_DEGENERATE_DESCRIPTOR = 3,
  AVP_E_TRAINING_INPUT = 4,
  AVP_E_NUMERICAL_UNDERFLOW = 5,
  AVP_E_INTERNAL = 6,
  AVP_E_RESOURCE_LIMIT = 7,
  AVP_E_PROTOCOL_VIOLATION = 8,
  AVP_E_HASH_MISMATCH = 9,
  AVP_E_IO = 10,
  AVP_E_UNKNOWN = 99
} avp_status;

typedef struct avp_scenario avp_scenario;
typedef struct avp_artifacts avp_artifacts;

/* Receives one progress line at a time. */
typedef void (*avp_log_fn)(const char* line, void* user);

AVP_API const char* avp_version(void);
AVP_API const char* avp_status_name(int status);
AVP_API const char* avp_last_error(void);

AVP_API int avp_scenario_load(const char* config_path, avp_scenario** out);
AVP_API int avp_scenario_set_seed(avp_scenario* scenario, uint64_t seed);
AVP_API int avp_scenario_set_output_dir(avp_scenario* scenario, const char* dir);
/* Effective configuration as JSON; release with avp_string_free. */
AVP_API int avp_scenario_json(const avp_scenario* scenario, char** out_json);
AVP_API void avp_scenario_free(avp_scenario* scenario);

/* stage: "train-vptree", "build-obsmodel", "derive-obsmodel", "solve",
 * "bench" or "orient-sweep". summary_json may be NULL; otherwise it receives
 * the stage summary, released with avp_string_free. */
AVP_API int avp_run_stage(const avp_scenario* scenario, const char* stage, int threads,
                          avp_log_fn log, void* user, char** summary_json);

/* Writes the scenario's model database as .tri files into dir. */
AVP_API int avp_export_models(const avp_scenario* scenario, const char* dir);

AVP_API void avp_string_free(char* s);

/* Built artifacts of a scenario, loaded with all hash checks. */
AVP_API int avp_artifacts_load(const avp_scenario* scenario, avp_artifacts** out);
AVP_API void avp_artifacts_free(avp_artifacts* artifacts);
AVP_API int avp_artifacts_shape(const avp_artifacts* artifacts, int* n_views, int* n_hypotheses,
                                int* n_observations);
/* Hypothesis label, e.g. "c0_y60" or "null"; release with avp_string_free. */
AVP_API int avp_hypothesis_label(const avp_artifacts* artifacts, int hypothesis, char** out);
/* Posterior after observing z (1-based) at viewpoint x in occlusion state
 * psi (0..15). belief and out hold n_hypotheses values; they may alias. */
AVP_API int avp_bayes_update(const avp_artifacts* artifacts, const double* belief, int x, int z,
                             int psi, double* out);
/* Action of the solved nonmyopic policy at viewpoint x. kind is 0 for a move
 * (target = viewpoint) and 1 for a decision (target = hypothesis). */
AVP_API int avp_policy_action(const avp_artifacts* artifacts, int x, const double* belief,
                              int* kind, int* target);

#ifdef __cplusplus
}
#endif

#endif /* AVP_AVP_H */
