/* C interface to the vqmorl simulator and learners.
 *
 * Objects are opaque handles created by *_create / *_load functions and
 * released by the matching *_destroy. Every fallible call returns a
 * vqm_status; on failure vqm_last_error() describes the problem (the message
 * is thread-local and valid until the next failing call on that thread). */
#ifndef VQMORL_VQMORL_H
#define VQMORL_VQMORL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(VQMORL_BUILDING_LIBRARY)
#define VQM_API __declspec(dllexport)
#else
#define VQM_API __declspec(dllimport)
#endif
#else
#define VQM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vqm_status {
  VQM_OK = 0,
  VQM_ERR_INVALID_ARGUMENT = 1,
  VQM_ERR_INVALID_GATE = 2,
  VQM_ERR_ENCODING_RANGE = 3,
  VQM_ERR_CONFIG = 4,
  VQM_ERR_IO = 5,
  VQM_ERR_STATE = 6,
  VQM_ERR_TRAINING = 7,
  VQM_ERR_ARCHITECTURE = 8,
  VQM_ERR_INTERNAL = 99
} vqm_status;

#define VQM_FEATURES 5
#define VQM_ACTIONS 15

/* Run flags for vqm_train / vqm_eval / vqm_sweep. */
#define VQM_FLAG_WALLCLOCK 1u /* record wall-clock time (output no longer reproducible) */
#define VQM_FLAG_TRACE 2u     /* write per-step logs and traces */
#define VQM_FLAG_FIXED_SEED 4u /* sweep: every repetition reuses the base seed */

typedef struct vqm_config vqm_config;
typedef struct vqm_env vqm_env;
typedef struct vqm_model vqm_model;

VQM_API const char* vqm_version(void);
VQM_API const char* vqm_last_error(void);
VQM_API const char* vqm_status_name(vqm_status status);

/* ---- configuration ---- */
VQM_API vqm_status vqm_config_load(const char* path, vqm_config** out);
VQM_API vqm_status vqm_config_parse(const char* json_text, vqm_config** out);
VQM_API vqm_status vqm_config_default(vqm_config** out);
VQM_API void vqm_config_destroy(vqm_config* config);
VQM_API vqm_status vqm_config_set_seed(vqm_config* config, uint64_t seed);
VQM_API vqm_status vqm_config_set_backend(vqm_config* config, const char* backend);
VQM_API vqm_status vqm_config_set_episodes(vqm_config* config, int32_t episodes);
VQM_API vqm_status vqm_config_set_eval_episodes(vqm_config* config, int32_t episodes);
VQM_API vqm_status vqm_config_set_output_dir(vqm_config* config, const char* dir);
/* Validates the configuration after overrides. */
VQM_API vqm_status vqm_config_validate(const vqm_config* config);
/* Resolved JSON. Writes at most `capacity` bytes (NUL included) and stores
 * the full length + 1 in *needed. */
VQM_API vqm_status vqm_config_to_json(const vqm_config* config, char* buffer, size_t capacity, size_t* needed);
VQM_API vqm_status vqm_config_output_dir(const vqm_config* config, char* buffer, size_t capacity, size_t* needed);

/* ---- experiment runs ---- */
/* `out_dir` may be NULL to use the configured output_dir. */
VQM_API vqm_status vqm_train(const vqm_config* config, const char* out_dir, uint32_t flags);
/* episodes <= 0 uses the configured eval_episodes. */
VQM_API vqm_status vqm_eval(const vqm_config* config, const char* checkpoint_path, int32_t episodes, const char* out_dir,
                            uint32_t flags);
/* parameter: "n_background" or "desired_velocity". */
VQM_API vqm_status vqm_sweep(const vqm_config* config, const char* parameter, const double* values, size_t value_count,
                             int32_t repetitions, const char* out_dir, uint32_t flags);

/* ---- environment ---- */
VQM_API vqm_status vqm_env_create(const vqm_config* config, vqm_env** out);
VQM_API void vqm_env_destroy(vqm_env* env);
VQM_API vqm_status vqm_env_reset(vqm_env* env, uint64_t seed, double features[VQM_FEATURES]);
/* reward receives {r_tran, r_tele, total}. */
VQM_API vqm_status vqm_env_step(vqm_env* env, int32_t flat_action, double features[VQM_FEATURES], double reward[3],
                                int32_t* done);

/* ---- Q-function models ---- */
/* Fresh model for the configured backend, initialized from the config seed. */
VQM_API vqm_status vqm_model_create(const vqm_config* config, vqm_model** out);
VQM_API vqm_status vqm_model_load(const char* checkpoint_path, vqm_model** out);
VQM_API vqm_status vqm_model_save(const vqm_model* model, const char* checkpoint_path);
VQM_API void vqm_model_destroy(vqm_model* model);
VQM_API vqm_status vqm_model_q_values(const vqm_model* model, const double features[VQM_FEATURES], double q[VQM_ACTIONS]);
VQM_API size_t vqm_model_parameter_count(const vqm_model* model);
/* dQ[action]/dparams into `grad` (parameter_count entries); *value gets Q[action]. */
VQM_API vqm_status vqm_model_gradient(const vqm_model* model, const double features[VQM_FEATURES], int32_t action,
                                      double* grad, size_t capacity, double* value);

#ifdef __cplusplus
}
#endif

#endif /* VQMORL_VQMORL_H */
