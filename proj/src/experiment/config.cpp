#include "experiment/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace vqmorl::experiment {

using json = nlohmann::ordered_json;

namespace {

/// One configurable key: how to read it from JSON and how to echo it.
struct Field {
  std::string name;
  std::function<void(const json&, const std::string& path)> read;
  std::function<json()> write;
};

std::string type_name(const json& j) { return j.type_name(); }

[[noreturn]] void type_error(const std::string& path, const char* expected, const json& got) {
  throw ConfigError("config key '" + path + "': expected " + expected + ", got " + type_name(got));
}

Field number(const std::string& name, double& target) {
  return {name,
          [&target](const json& j, const std::string& path) {
            if (!j.is_number()) type_error(path, "a number", j);
            target = j.get<double>();
          },
          [&target] { return json(target); }};
}

Field integer(const std::string& name, int& target) {
  return {name,
          [&target](const json& j, const std::string& path) {
            if (!j.is_number_integer()) type_error(path, "an integer", j);
            const auto v = j.get<std::int64_t>();
            if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
              throw ConfigError("config key '" + path + "': integer out of range");
            target = static_cast<int>(v);
          },
          [&target] { return json(target); }};
}

Field count(const std::string& name, std::size_t& target) {
  return {name,
          [&target](const json& j, const std::string& path) {
            if (!j.is_number_integer() || j.get<std::int64_t>() < 0) type_error(path, "a non-negative integer", j);
            target = j.get<std::size_t>();
          },
          [&target] { return json(target); }};
}

Field boolean(const std::string& name, bool& target) {
  return {name,
          [&target](const json& j, const std::string& path) {
            if (!j.is_boolean()) type_error(path, "a boolean", j);
            target = j.get<bool>();
          },
          [&target] { return json(target); }};
}

void read_section(const json& obj, const std::string& section, std::vector<Field>& fields) {
  if (!obj.is_object()) type_error(section, "an object", obj);
  for (const auto& [key, value] : obj.items()) {
    const std::string path = section.empty() ? key : section + "." + key;
    bool known = false;
    for (auto& f : fields) {
      if (f.name == key) {
        f.read(value, path);
        known = true;
        break;
      }
    }
    if (!known) throw ConfigError("unknown config key '" + path + "'");
  }
}

json write_section(const std::vector<Field>& fields) {
  json out = json::object();
  for (const auto& f : fields) out[f.name] = f.write();
  return out;
}

std::vector<Field> env_fields(env::EnvConfig& e) {
  return {number("omega1", e.omega1),  number("omega2", e.omega2),         number("omega3", e.omega3),
          integer("horizon", e.horizon), integer("n_background", e.n_background), number("desired_velocity", e.desired_velocity)};
}

std::vector<Field> agent_fields(learn::AgentConfig& a) {
  return {number("gamma", a.gamma),
          number("lr", a.lr),
          count("batch_size", a.batch_size),
          count("capacity", a.capacity),
          count("target_sync_period", a.target_sync_period),
          number("epsilon_start", a.epsilon_start),
          number("epsilon_min", a.epsilon_min),
          number("epsilon_decay", a.epsilon_decay),
          boolean("double_q", a.double_q),
          count("warmup", a.warmup)};
}

std::vector<Field> traffic_fields(traffic::RoadConfig& r, traffic::IdmParams& idm) {
  return {integer("lanes", r.lanes),
          number("lane_width", r.lane_width),
          number("length", r.length),
          number("dt", r.dt),
          integer("action_repeat", r.action_repeat),
          number("v_min", r.v_min),
          number("v_max", r.v_max),
          number("v_hard_max", r.v_hard_max),
          number("a_ego_step", r.a_ego_step),
          number("vehicle_length", r.vehicle_length),
          number("b_emergency", r.b_emergency),
          number("idm_T", idm.T),
          number("idm_a_max", idm.a_max),
          number("idm_b", idm.b),
          number("idm_s0", idm.s0),
          number("idm_delta", idm.delta)};
}

std::vector<Field> radio_fields(radio::RadioConfig& c) {
  return {number("rf_carrier_hz", c.rf_carrier_hz),
          number("rf_pathloss_exponent", c.rf_pathloss_exponent),
          number("rf_tx_power_dbm", c.rf_tx_power_dbm),
          number("rf_antenna_gain_dbi", c.rf_antenna_gain_dbi),
          number("rf_bandwidth_hz", c.rf_bandwidth_hz),
          integer("rf_quota", c.rf_quota),
          number("rf_ho_penalty", c.rf_ho_penalty),
          number("rf_spacing_m", c.rf_spacing_m),
          number("rf_height_m", c.rf_height_m),
          boolean("rf_fading", c.rf_fading),
          number("thz_carrier_hz", c.thz_carrier_hz),
          number("thz_absorption_per_m", c.thz_absorption_per_m),
          number("thz_main_lobe_gain_dbi", c.thz_main_lobe_gain_dbi),
          number("thz_side_lobe_gain_dbi", c.thz_side_lobe_gain_dbi),
          number("thz_alignment_prob", c.thz_alignment_prob),
          number("thz_tx_power_dbm", c.thz_tx_power_dbm),
          number("thz_bandwidth_hz", c.thz_bandwidth_hz),
          integer("thz_quota", c.thz_quota),
          number("thz_ho_penalty", c.thz_ho_penalty),
          number("thz_spacing_m", c.thz_spacing_m),
          number("thz_height_m", c.thz_height_m),
          number("noise_dbm_per_hz", c.noise_dbm_per_hz),
          number("sinr_threshold_db", c.sinr_threshold_db),
          number("bs_lateral_offset_m", c.bs_lateral_offset_m),
          number("av_antenna_height_m", c.av_antenna_height_m)};
}

std::vector<Field> vqc_fields(VqcConfig& v) {
  return {integer("layers", v.layers),
          {"init",
           [&v](const json& j, const std::string& path) {
             if (!j.is_string()) type_error(path, "a string", j);
             const auto s = j.get<std::string>();
             if (s == "uniform")
               v.init = quantum::InitScheme::Uniform;
             else if (s == "zero")
               v.init = quantum::InitScheme::Zero;
             else
               throw ConfigError("config key '" + path + "': expected \"uniform\" or \"zero\", got \"" + s + "\"");
           },
           [&v] { return json(v.init == quantum::InitScheme::Uniform ? "uniform" : "zero"); }},
          number("init_scale", v.init_scale)};
}

std::vector<Field> neural_fields(NeuralConfig& n) {
  return {{"hidden",
           [&n](const json& j, const std::string& path) {
             if (!j.is_array()) type_error(path, "an array of integers", j);
             n.hidden.clear();
             for (const auto& h : j) {
               if (!h.is_number_integer()) type_error(path, "an array of integers", j);
               n.hidden.push_back(h.get<int>());
             }
           },
           [&n] { return json(n.hidden); }}};
}

/// Top-level fields plus nested sections, bound to `c`.
struct Schema {
  explicit Schema(TrainConfig& c)
      : env(env_fields(c.env.env)),
        agent(agent_fields(c.agent)),
        traffic(traffic_fields(c.env.road, c.env.idm)),
        radio(radio_fields(c.env.radio)),
        vqc(vqc_fields(c.vqc)),
        neural(neural_fields(c.neural)),
        top{{"seed",
             [&c](const json& j, const std::string& path) {
               if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
                 type_error(path, "an unsigned 64-bit integer", j);
               c.seed = j.get<std::uint64_t>();
             },
             [&c] { return json(c.seed); }},
            {"backend",
             [&c](const json& j, const std::string& path) {
               if (!j.is_string()) type_error(path, "a string", j);
               try {
                 c.backend = backend_from_string(j.get<std::string>());
               } catch (const ConfigError& e) {
                 throw ConfigError("config key '" + path + "': " + e.what());
               }
             },
             [&c] { return json(to_string(c.backend)); }},
            integer("episodes", c.episodes),
            integer("eval_episodes", c.eval_episodes),
            {"output_dir",
             [&c](const json& j, const std::string& path) {
               if (!j.is_string()) type_error(path, "a string", j);
               c.output_dir = j.get<std::string>();
             },
             [&c] { return json(c.output_dir); }}} {}

  std::vector<Field> env, agent, traffic, radio, vqc, neural, top;

  std::vector<Field>* section(const std::string& name) {
    if (name == "env") return &env;
    if (name == "agent") return &agent;
    if (name == "traffic") return &traffic;
    if (name == "radio") return &radio;
    if (name == "vqc") return &vqc;
    if (name == "neural") return &neural;
    return nullptr;
  }
};

}  // namespace

Backend backend_from_string(const std::string& name) {
  if (name == "vqc") return Backend::Vqc;
  if (name == "neural") return Backend::Neural;
  throw ConfigError("backend must be \"vqc\" or \"neural\", got \"" + name + "\"");
}

std::string to_string(Backend backend) { return backend == Backend::Vqc ? "vqc" : "neural"; }

TrainConfig::TrainConfig() { agent.lr = std::numeric_limits<double>::quiet_NaN(); }

void TrainConfig::resolve() {
  if (std::isnan(agent.lr)) agent.lr = backend == Backend::Vqc ? kDefaultVqcLr : kDefaultNeuralLr;
}

void TrainConfig::validate() const {
  env.validate();
  TrainConfig copy = *this;
  copy.resolve();
  copy.agent.validate();
  if (episodes < 0) throw ConfigError("episodes must be >= 0");
  if (eval_episodes < 1) throw ConfigError("eval_episodes must be >= 1");
  if (vqc.layers < 1) throw ConfigError("vqc.layers must be >= 1");
  if (!(vqc.init_scale >= 0) || !std::isfinite(vqc.init_scale)) throw ConfigError("vqc.init_scale must be finite and >= 0");
  if (neural.hidden.empty()) throw ConfigError("neural.hidden must list at least one layer");
  for (int h : neural.hidden)
    if (h < 1) throw ConfigError("neural.hidden widths must be >= 1");
}

bool TrainConfig::operator==(const TrainConfig& other) const { return to_json(*this) == to_json(other); }

TrainConfig parse_config(const std::string& text) {
  TrainConfig config;
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    config.validate();
    return config;
  }
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  Schema schema(config);
  for (const auto& [key, value] : doc.items()) {
    if (auto* section = schema.section(key)) {
      read_section(value, key, *section);
      continue;
    }
    bool known = false;
    for (auto& f : schema.top) {
      if (f.name == key) {
        f.read(value, key);
        known = true;
        break;
      }
    }
    if (!known) throw ConfigError("unknown config key '" + key + "'");
  }
  config.validate();
  return config;
}

TrainConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string to_json(const TrainConfig& config) {
  TrainConfig copy = config;
  copy.resolve();
  Schema schema(copy);
  json doc = json::object();
  for (const auto& f : schema.top) doc[f.name] = f.write();
  doc["env"] = write_section(schema.env);
  doc["agent"] = write_section(schema.agent);
  doc["traffic"] = write_section(schema.traffic);
  doc["radio"] = write_section(schema.radio);
  doc["vqc"] = write_section(schema.vqc);
  doc["neural"] = write_section(schema.neural);
  return doc.dump(2) + "\n";
}

}  // namespace vqmorl::experiment
