#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "vqmorl/vqmorl.h"

namespace {

const char* kQuick = R"({"seed": 4, "episodes": 2, "eval_episodes": 1, "env": {"horizon": 5},
                         "agent": {"warmup": 4, "batch_size": 4}})";

std::string root() {
  const char* r = std::getenv("VQMORL_OUTPUT_ROOT");
  return r && *r ? r : ".";
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::strlen(vqm_version()) > 0);
  CHECK(std::string(vqm_status_name(VQM_OK)) == "ok");
  CHECK(std::string(vqm_status_name(VQM_ERR_CONFIG)) == "config error");
}

TEST_CASE("config handles") {
  vqm_config* c = nullptr;
  REQUIRE(vqm_config_parse("{}", &c) == VQM_OK);
  CHECK(vqm_config_validate(c) == VQM_OK);
  CHECK(vqm_config_set_backend(c, "neural") == VQM_OK);
  CHECK(vqm_config_set_backend(c, "abacus") == VQM_ERR_CONFIG);
  CHECK(std::strlen(vqm_last_error()) > 0);
  CHECK(vqm_config_set_episodes(c, 0) == VQM_ERR_CONFIG);

  size_t needed = 0;
  CHECK(vqm_config_to_json(c, nullptr, 0, &needed) == VQM_OK);
  REQUIRE(needed > 1);
  std::vector<char> buf(needed);
  CHECK(vqm_config_to_json(c, buf.data(), buf.size(), &needed) == VQM_OK);
  std::string json(buf.data());
  CHECK(json.find("\"neural\"") != std::string::npos);
  char tiny[4];
  CHECK(vqm_config_to_json(c, tiny, sizeof tiny, &needed) == VQM_ERR_INVALID_ARGUMENT);
  CHECK(tiny[3] == '\0');

  vqm_config* back = nullptr;
  REQUIRE(vqm_config_parse(json.c_str(), &back) == VQM_OK);
  std::vector<char> buf2(needed);
  CHECK(vqm_config_to_json(back, buf2.data(), buf2.size(), &needed) == VQM_OK);
  CHECK(json == std::string(buf2.data()));
  vqm_config_destroy(back);
  vqm_config_destroy(c);

  vqm_config* bad = nullptr;
  CHECK(vqm_config_parse("{\"agent\": {\"nope\": 1}}", &bad) == VQM_ERR_CONFIG);
  CHECK(bad == nullptr);
  CHECK(std::string(vqm_last_error()).find("agent.nope") != std::string::npos);
  CHECK(vqm_config_parse("{\"agent\": {\"gamma\": 1.5}}", &bad) == VQM_ERR_CONFIG);
  CHECK(std::string(vqm_last_error()).find("gamma") != std::string::npos);
  CHECK(vqm_config_load("/nonexistent.json", &bad) != VQM_OK);
  CHECK(vqm_config_parse(nullptr, &bad) == VQM_ERR_INVALID_ARGUMENT);
  vqm_config_destroy(nullptr);
}

TEST_CASE("environment handle") {
  vqm_config* c = nullptr;
  REQUIRE(vqm_config_parse(kQuick, &c) == VQM_OK);
  vqm_env* e = nullptr;
  REQUIRE(vqm_env_create(c, &e) == VQM_OK);
  double f[VQM_FEATURES], r[3];
  int32_t done = 0;
  CHECK(vqm_env_step(e, 0, f, r, &done) == VQM_ERR_STATE);
  REQUIRE(vqm_env_reset(e, 3, f) == VQM_OK);
  for (double x : f) CHECK(std::abs(x) <= 1.0);
  CHECK(vqm_env_step(e, 15, f, r, &done) == VQM_ERR_INVALID_ARGUMENT);
  int steps = 0;
  while (!done) {
    REQUIRE(vqm_env_step(e, 5, f, r, &done) == VQM_OK);
    CHECK(r[2] == doctest::Approx(r[0] + r[1]));
    ++steps;
  }
  CHECK(steps <= 5);
  vqm_env_destroy(e);
  vqm_config_destroy(c);
}

TEST_CASE("model handle") {
  vqm_config* c = nullptr;
  REQUIRE(vqm_config_parse(kQuick, &c) == VQM_OK);
  vqm_model* m = nullptr;
  REQUIRE(vqm_model_create(c, &m) == VQM_OK);
  CHECK(vqm_model_parameter_count(m) == 30 + 15);

  double f[VQM_FEATURES] = {0.1, -0.2, 0.3, 0.0, 0.9};
  double q[VQM_ACTIONS];
  REQUIRE(vqm_model_q_values(m, f, q) == VQM_OK);
  std::vector<double> g(vqm_model_parameter_count(m));
  double v = 0;
  REQUIRE(vqm_model_gradient(m, f, 7, g.data(), g.size(), &v) == VQM_OK);
  CHECK(v == q[7]);
  CHECK(vqm_model_gradient(m, f, 7, g.data(), 3, &v) == VQM_ERR_INVALID_ARGUMENT);
  double out_of_range[VQM_FEATURES] = {2.0, 0, 0, 0, 0};
  CHECK(vqm_model_q_values(m, out_of_range, q) == VQM_ERR_ENCODING_RANGE);

  std::string path = root() + "/capi_model.json";
  REQUIRE(vqm_model_save(m, path.c_str()) == VQM_OK);
  vqm_model* back = nullptr;
  REQUIRE(vqm_model_load(path.c_str(), &back) == VQM_OK);
  double q2[VQM_ACTIONS];
  REQUIRE(vqm_model_q_values(back, f, q2) == VQM_OK);
  for (int a = 0; a < VQM_ACTIONS; ++a) CHECK(q[a] == q2[a]);
  CHECK(vqm_model_load("/nonexistent.json", &back) == VQM_ERR_IO);
  vqm_model_destroy(back);
  vqm_model_destroy(m);
  vqm_config_destroy(c);
}

TEST_CASE("train, eval and sweep through the C interface") {
  vqm_config* c = nullptr;
  REQUIRE(vqm_config_parse(kQuick, &c) == VQM_OK);
  std::string a = root() + "/capi_train_a", b = root() + "/capi_train_b";
  REQUIRE(vqm_train(c, a.c_str(), 0) == VQM_OK);
  REQUIRE(vqm_train(c, b.c_str(), 0) == VQM_OK);
  CHECK(slurp(a + "/metrics.csv") == slurp(b + "/metrics.csv"));
  CHECK(!slurp(a + "/metrics.csv").empty());

  std::string e = root() + "/capi_eval";
  CHECK(vqm_eval(c, (a + "/checkpoint.json").c_str(), 2, e.c_str(), VQM_FLAG_TRACE) == VQM_OK);
  CHECK(!slurp(e + "/eval.csv").empty());
  CHECK(!slurp(e + "/traces/episode_0000_traffic.csv").empty());

  vqm_config_set_backend(c, "neural");
  CHECK(vqm_eval(c, (a + "/checkpoint.json").c_str(), 1, e.c_str(), 0) == VQM_ERR_ARCHITECTURE);
  vqm_config_set_backend(c, "vqc");

  double values[] = {2, 4};
  std::string s = root() + "/capi_sweep";
  CHECK(vqm_sweep(c, "n_background", values, 2, 1, s.c_str(), 0) == VQM_OK);
  CHECK(!slurp(s + "/aggregate.csv").empty());
  CHECK(vqm_sweep(c, "lanes", values, 2, 1, s.c_str(), 0) == VQM_ERR_CONFIG);
  vqm_config_destroy(c);
}
