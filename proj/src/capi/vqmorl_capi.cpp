#include "vqmorl/vqmorl.h"

#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <string>

#include "common/error.hpp"
#include "env/momdp_env.hpp"
#include "experiment/config.hpp"
#include "experiment/runner.hpp"
#include "learn/q_function.hpp"

struct vqm_config {
  vqmorl::experiment::TrainConfig cfg;
};

struct vqm_env {
  std::unique_ptr<vqmorl::env::MomdpEnv> env;
};

struct vqm_model {
  std::unique_ptr<vqmorl::learn::QFunction> q;
};

namespace {

thread_local std::string g_last_error;

vqm_status to_status(vqmorl::ErrorCode code) {
  switch (code) {
    case vqmorl::ErrorCode::InvalidArgument: return VQM_ERR_INVALID_ARGUMENT;
    case vqmorl::ErrorCode::InvalidGate: return VQM_ERR_INVALID_GATE;
    case vqmorl::ErrorCode::EncodingRange: return VQM_ERR_ENCODING_RANGE;
    case vqmorl::ErrorCode::Config: return VQM_ERR_CONFIG;
    case vqmorl::ErrorCode::Io: return VQM_ERR_IO;
    case vqmorl::ErrorCode::State: return VQM_ERR_STATE;
    case vqmorl::ErrorCode::Training: return VQM_ERR_TRAINING;
    case vqmorl::ErrorCode::Architecture: return VQM_ERR_ARCHITECTURE;
  }
  return VQM_ERR_INTERNAL;
}

vqm_status fail(vqm_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

// runs f, turning any exception into a status
template <class F>
vqm_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return VQM_OK;
  } catch (const vqmorl::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(VQM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(VQM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(VQM_ERR_INTERNAL, "unknown error");
  }
}

vqm_status copy_out(const std::string& s, char* buffer, size_t capacity, size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (!buffer || capacity == 0) return buffer ? fail(VQM_ERR_INVALID_ARGUMENT, "buffer too small") : VQM_OK;
  if (capacity < s.size() + 1) {
    std::memcpy(buffer, s.data(), capacity - 1);
    buffer[capacity - 1] = '\0';
    return fail(VQM_ERR_INVALID_ARGUMENT, "buffer too small");
  }
  std::memcpy(buffer, s.c_str(), s.size() + 1);
  return VQM_OK;
}

vqmorl::experiment::RunFlags run_flags(uint32_t flags) {
  vqmorl::experiment::RunFlags f;
  f.record_wallclock = (flags & VQM_FLAG_WALLCLOCK) != 0;
  f.trace = (flags & VQM_FLAG_TRACE) != 0;
  return f;
}

vqmorl::experiment::TrainConfig resolved(const vqm_config* c) {
  auto cfg = c->cfg;
  cfg.resolve();
  cfg.validate();
  return cfg;
}

std::string out_dir_or(const vqmorl::experiment::TrainConfig& cfg, const char* out_dir) {
  return vqmorl::experiment::resolve_output_dir(out_dir ? std::string(out_dir) : cfg.output_dir);
}

vqmorl::FeatureVector read_features(const double* f) {
  vqmorl::FeatureVector v;
  for (std::size_t i = 0; i < vqmorl::kFeatureCount; ++i) v.values[i] = f[i];
  return v;
}

void write_features(const vqmorl::FeatureVector& v, double* out) {
  for (std::size_t i = 0; i < vqmorl::kFeatureCount; ++i) out[i] = v.values[i];
}

#define VQM_REQUIRE(cond, msg) \
  if (!(cond)) return fail(VQM_ERR_INVALID_ARGUMENT, msg)

}  // namespace

extern "C" {

const char* vqm_version(void) { return "0.1.0"; }

const char* vqm_last_error(void) { return g_last_error.c_str(); }

const char* vqm_status_name(vqm_status status) {
  switch (status) {
    case VQM_OK: return "ok";
    case VQM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case VQM_ERR_INVALID_GATE: return "invalid gate";
    case VQM_ERR_ENCODING_RANGE: return "encoding range";
    case VQM_ERR_CONFIG: return "config error";
    case VQM_ERR_IO: return "i/o error";
    case VQM_ERR_STATE: return "invalid state";
    case VQM_ERR_TRAINING: return "training error";
    case VQM_ERR_ARCHITECTURE: return "architecture mismatch";
    case VQM_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

vqm_status vqm_config_load(const char* path, vqm_config** out) {
  VQM_REQUIRE(path && out, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new vqm_config{vqmorl::experiment::load_config(path)}; });
}

vqm_status vqm_config_parse(const char* json_text, vqm_config** out) {
  VQM_REQUIRE(json_text && out, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new vqm_config{vqmorl::experiment::parse_config(json_text)}; });
}

vqm_status vqm_config_default(vqm_config** out) {
  VQM_REQUIRE(out, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new vqm_config{}; });
}

void vqm_config_destroy(vqm_config* config) { delete config; }

vqm_status vqm_config_set_seed(vqm_config* config, uint64_t seed) {
  VQM_REQUIRE(config, "null config");
  config->cfg.seed = seed;
  return VQM_OK;
}

vqm_status vqm_config_set_backend(vqm_config* config, const char* backend) {
  VQM_REQUIRE(config && backend, "null argument");
  return guarded([&] { config->cfg.backend = vqmorl::experiment::backend_from_string(backend); });
}

vqm_status vqm_config_set_episodes(vqm_config* config, int32_t episodes) {
  VQM_REQUIRE(config, "null config");
  if (episodes < 1) return fail(VQM_ERR_CONFIG, "episodes must be >= 1");
  config->cfg.episodes = episodes;
  return VQM_OK;
}

vqm_status vqm_config_set_eval_episodes(vqm_config* config, int32_t episodes) {
  VQM_REQUIRE(config, "null config");
  if (episodes < 1) return fail(VQM_ERR_CONFIG, "eval_episodes must be >= 1");
  config->cfg.eval_episodes = episodes;
  return VQM_OK;
}

vqm_status vqm_config_set_output_dir(vqm_config* config, const char* dir) {
  VQM_REQUIRE(config && dir, "null argument");
  config->cfg.output_dir = dir;
  return VQM_OK;
}

vqm_status vqm_config_validate(const vqm_config* config) {
  VQM_REQUIRE(config, "null config");
  return guarded([&] { (void)resolved(config); });
}

vqm_status vqm_config_to_json(const vqm_config* config, char* buffer, size_t capacity, size_t* needed) {
  VQM_REQUIRE(config, "null config");
  std::string text;
  vqm_status s = guarded([&] {
    auto cfg = config->cfg;
    cfg.resolve();
    text = vqmorl::experiment::to_json(cfg);
  });
  if (s != VQM_OK) return s;
  return copy_out(text, buffer, capacity, needed);
}

vqm_status vqm_config_output_dir(const vqm_config* config, char* buffer, size_t capacity, size_t* needed) {
  VQM_REQUIRE(config, "null config");
  return copy_out(vqmorl::experiment::resolve_output_dir(config->cfg.output_dir), buffer, capacity, needed);
}

vqm_status vqm_train(const vqm_config* config, const char* out_dir, uint32_t flags) {
  VQM_REQUIRE(config, "null config");
  return guarded([&] {
    auto cfg = resolved(config);
    vqmorl::experiment::run_train(cfg, out_dir_or(cfg, out_dir), run_flags(flags));
  });
}

vqm_status vqm_eval(const vqm_config* config, const char* checkpoint_path, int32_t episodes, const char* out_dir,
                    uint32_t flags) {
  VQM_REQUIRE(config && checkpoint_path, "null argument");
  return guarded([&] {
    auto cfg = resolved(config);
    int n = episodes > 0 ? episodes : cfg.eval_episodes;
    vqmorl::experiment::run_eval(cfg, checkpoint_path, n, out_dir_or(cfg, out_dir), run_flags(flags));
  });
}

vqm_status vqm_sweep(const vqm_config* config, const char* parameter, const double* values, size_t value_count,
                     int32_t repetitions, const char* out_dir, uint32_t flags) {
  VQM_REQUIRE(config && parameter && (values || value_count == 0), "null argument");
  return guarded([&] {
    auto cfg = resolved(config);
    vqmorl::experiment::SweepSpec spec;
    spec.parameter = parameter;
    spec.values.assign(values, values + value_count);
    spec.repetitions = repetitions;
    spec.vary_seed = (flags & VQM_FLAG_FIXED_SEED) == 0;
    spec.validate();
    vqmorl::experiment::run_sweep(cfg, spec, out_dir_or(cfg, out_dir), run_flags(flags));
  });
}

vqm_status vqm_env_create(const vqm_config* config, vqm_env** out) {
  VQM_REQUIRE(config && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto cfg = resolved(config);
    *out = new vqm_env{std::make_unique<vqmorl::env::MomdpEnv>(cfg.env)};
  });
}

void vqm_env_destroy(vqm_env* env) { delete env; }

vqm_status vqm_env_reset(vqm_env* env, uint64_t seed, double features[VQM_FEATURES]) {
  VQM_REQUIRE(env && features, "null argument");
  return guarded([&] { write_features(env->env->reset(seed), features); });
}

vqm_status vqm_env_step(vqm_env* env, int32_t flat_action, double features[VQM_FEATURES], double reward[3],
                        int32_t* done) {
  VQM_REQUIRE(env, "null env");
  VQM_REQUIRE(flat_action >= 0 && flat_action < VQM_ACTIONS, "action out of range");
  return guarded([&] {
    auto fb = env->env->step(static_cast<std::size_t>(flat_action));
    if (features) write_features(fb.next, features);
    if (reward) {
      const auto& r = env->env->last_reward();
      reward[0] = r.r_tran;
      reward[1] = r.r_tele;
      reward[2] = r.total;
    }
    if (done) *done = (fb.terminal || fb.truncated) ? 1 : 0;
  });
}

vqm_status vqm_model_create(const vqm_config* config, vqm_model** out) {
  VQM_REQUIRE(config && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto cfg = resolved(config);
    *out = new vqm_model{vqmorl::experiment::make_model(cfg)};
  });
}

vqm_status vqm_model_load(const char* checkpoint_path, vqm_model** out) {
  VQM_REQUIRE(checkpoint_path && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    std::ifstream in(checkpoint_path, std::ios::binary);
    if (!in) throw vqmorl::Error(vqmorl::ErrorCode::Io, std::string("cannot open checkpoint ") + checkpoint_path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    *out = new vqm_model{vqmorl::learn::load_checkpoint(text)};
  });
}

vqm_status vqm_model_save(const vqm_model* model, const char* checkpoint_path) {
  VQM_REQUIRE(model && checkpoint_path, "null argument");
  return guarded([&] {
    std::ofstream out(checkpoint_path, std::ios::binary | std::ios::trunc);
    if (!out) throw vqmorl::Error(vqmorl::ErrorCode::Io, std::string("cannot write checkpoint ") + checkpoint_path);
    out << model->q->to_checkpoint();
    if (!out) throw vqmorl::Error(vqmorl::ErrorCode::Io, std::string("write failed: ") + checkpoint_path);
  });
}

void vqm_model_destroy(vqm_model* model) { delete model; }

vqm_status vqm_model_q_values(const vqm_model* model, const double features[VQM_FEATURES], double q[VQM_ACTIONS]) {
  VQM_REQUIRE(model && features && q, "null argument");
  return guarded([&] {
    auto values = model->q->q_values(read_features(features));
    for (std::size_t a = 0; a < vqmorl::kActionCount; ++a) q[a] = values[a];
  });
}

size_t vqm_model_parameter_count(const vqm_model* model) { return model ? model->q->parameter_count() : 0; }

vqm_status vqm_model_gradient(const vqm_model* model, const double features[VQM_FEATURES], int32_t action,
                              double* grad, size_t capacity, double* value) {
  VQM_REQUIRE(model && features && grad, "null argument");
  VQM_REQUIRE(action >= 0 && action < VQM_ACTIONS, "action out of range");
  VQM_REQUIRE(capacity >= model->q->parameter_count(), "gradient buffer too small");
  return guarded([&] {
    double v = model->q->gradient(read_features(features), static_cast<std::size_t>(action),
                                  std::span<double>(grad, model->q->parameter_count()));
    if (value) *value = v;
  });
}

}  // extern "C"
