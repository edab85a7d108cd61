#include "airhockey/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace airhockey {

using nlohmann::json;

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("config: " + what);
}

json vec_json(Vec2 v) { return json::array({v.x, v.y}); }

Vec2 vec_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

template <typename T>
void read(const json& j, const char* key, T& dst) {
  if (auto it = j.find(key); it != j.end()) dst = it->get<T>();
}

void read_vec(const json& j, const char* key, Vec2& dst) {
  if (auto it = j.find(key); it != j.end()) dst = vec_from(*it);
}

}  // namespace

void TrainConfig::validate() const {
  env.validate();
  network.validate();
  require(network.inputs() == env::kFeatureCount, "network input size must be 8");
  const auto actions = static_cast<std::size_t>(env.grid_levels) * env.grid_levels;
  require(network.outputs() == actions, "network output size must equal grid_levels^2");
  require(optimizer.learning_rate > 0, "learning_rate must be positive");
  require(optimizer.decay > 0 && optimizer.decay < 1, "rmsprop decay must be in (0, 1)");
  require(optimizer.epsilon > 0, "rmsprop epsilon must be positive");
  require(epsilon >= 0 && epsilon <= 1, "epsilon must be in [0, 1]");
  require(guide_prob >= 0 && guide_prob <= 1, "guide_prob must be in [0, 1]");
  require(buffer_capacity > 0, "buffer_capacity must be positive");
  require(batch_size > 0, "batch_size must be positive");
  require(target_period >= 1, "target_period must be >= 1");
  require(target_expansion >= 1, "target_expansion (C_r) must be >= 1");
  require(gamma > 0 && gamma <= 1, "gamma must be in (0, 1]");
  require(ou_theta > 0, "ou_theta must be positive");
  require(ou_sigma >= 0, "ou_sigma must be non-negative");
  require(episodes > 0, "episodes must be positive");
  require(eval_every > 0, "eval_every must be positive");
  require(eval_random_episodes >= 0, "eval_random_episodes must be non-negative");
  require(probe_states > 0, "probe_states must be positive");
}

TrainConfig default_config() { return TrainConfig{}; }

TrainConfig desk_config() {
  TrainConfig c;
  c.label = "GDQN-desk";
  c.episodes = 3000;
  return c;
}

std::vector<std::string> preset_names() { return {"gdqn", "desk", "ddqn200", "ddqn1000", "ddqn5000"}; }

TrainConfig preset(const std::string& name, bool desk) {
  TrainConfig c = desk ? desk_config() : default_config();
  if (name == "gdqn") {
    c.label = desk ? "GDQN-desk" : "GDQN";
    return c;
  }
  if (name == "desk") return desk_config();
  for (int period : {200, 1000, 5000}) {
    if (name == "ddqn" + std::to_string(period)) {
      c.label = "DDQN" + std::to_string(period);
      c.guide_prob = 0.0;
      c.ou_sigma = 0.0;
      c.target_expansion = 1.0;
      c.target_period = period;
      return c;
    }
  }
  throw std::invalid_argument("unknown preset: " + name);
}

bool is_plain_ddqn(const TrainConfig& cfg) {
  return cfg.guide_prob == 0.0 && cfg.target_expansion == 1.0 && cfg.ou_sigma == 0.0;
}

std::string to_json(const TrainConfig& c) {
  const auto& e = c.env;
  json j;
  j["label"] = c.label;
  j["table"] = {{"width", e.table.width},
                {"height", e.table.height},
                {"goal_center_x", e.table.goal_center_x},
                {"goal_width", e.table.goal_width},
                {"mallet_radius", e.table.mallet_radius},
                {"puck_radius", e.table.puck_radius},
                {"goal_line_y", e.table.goal_line_y}};
  j["physics"] = {{"dt", e.physics.dt},
                  {"max_force", e.physics.max_force},
                  {"max_velocity", e.physics.max_velocity},
                  {"restitution", e.physics.restitution}};
  j["reward"] = {{"strike_bonus", e.reward.strike_bonus},
                 {"accuracy_scale", e.reward.accuracy_scale},
                 {"window", e.reward.window},
                 {"decay", e.reward.decay},
                 {"time_penalty", e.reward.time_penalty},
                 {"aim_x", e.reward.aim_x}};
  j["environment"] = {{"max_episode_steps", e.max_episode_steps},
                      {"grid_levels", e.grid_levels},
                      {"home", vec_json(e.home)},
                      {"rollout_max_steps", e.rollout_max_steps}};
  j["network"] = {{"layer_sizes", c.network.layer_sizes}};
  j["optimizer"] = {{"learning_rate", c.optimizer.learning_rate},
                    {"decay", c.optimizer.decay},
                    {"epsilon", c.optimizer.epsilon}};
  j["learning"] = {{"epsilon", c.epsilon},
                   {"guide_prob", c.guide_prob},
                   {"buffer_capacity", c.buffer_capacity},
                   {"batch_size", c.batch_size},
                   {"target_period", c.target_period},
                   {"target_expansion", c.target_expansion},
                   {"gamma", c.gamma},
                   {"warmup", c.warmup},
                   {"episodes", c.episodes},
                   {"seed", c.seed}};
  j["ou"] = {{"theta", c.ou_theta}, {"sigma", c.ou_sigma}, {"mu", c.ou_mu}};
  j["evaluation"] = {{"every", c.eval_every},
                     {"random_episodes", c.eval_random_episodes},
                     {"seed", c.eval_seed},
                     {"probe_states", c.probe_states},
                     {"fixed_left", vec_json(c.fixed_left)},
                     {"fixed_middle", vec_json(c.fixed_middle)},
                     {"fixed_right", vec_json(c.fixed_right)}};
  return j.dump(2) + "\n";
}

TrainConfig config_from_json(const std::string& text) {
  const json j = json::parse(text);
  TrainConfig c;
  auto& e = c.env;
  read(j, "label", c.label);
  if (j.contains("table")) {
    const auto& t = j["table"];
    read(t, "width", e.table.width);
    read(t, "height", e.table.height);
    read(t, "goal_center_x", e.table.goal_center_x);
    read(t, "goal_width", e.table.goal_width);
    read(t, "mallet_radius", e.table.mallet_radius);
    read(t, "puck_radius", e.table.puck_radius);
    read(t, "goal_line_y", e.table.goal_line_y);
  }
  if (j.contains("physics")) {
    const auto& p = j["physics"];
    read(p, "dt", e.physics.dt);
    read(p, "max_force", e.physics.max_force);
    read(p, "max_velocity", e.physics.max_velocity);
    read(p, "restitution", e.physics.restitution);
  }
  if (j.contains("reward")) {
    const auto& r = j["reward"];
    read(r, "strike_bonus", e.reward.strike_bonus);
    read(r, "accuracy_scale", e.reward.accuracy_scale);
    read(r, "window", e.reward.window);
    read(r, "decay", e.reward.decay);
    read(r, "time_penalty", e.reward.time_penalty);
    read(r, "aim_x", e.reward.aim_x);
  }
  if (j.contains("environment")) {
    const auto& v = j["environment"];
    read(v, "max_episode_steps", e.max_episode_steps);
    read(v, "grid_levels", e.grid_levels);
    read_vec(v, "home", e.home);
    read(v, "rollout_max_steps", e.rollout_max_steps);
  }
  if (j.contains("network")) read(j["network"], "layer_sizes", c.network.layer_sizes);
  if (j.contains("optimizer")) {
    const auto& o = j["optimizer"];
    read(o, "learning_rate", c.optimizer.learning_rate);
    read(o, "decay", c.optimizer.decay);
    read(o, "epsilon", c.optimizer.epsilon);
  }
  if (j.contains("learning")) {
    const auto& l = j["learning"];
    read(l, "epsilon", c.epsilon);
    read(l, "guide_prob", c.guide_prob);
    read(l, "buffer_capacity", c.buffer_capacity);
    read(l, "batch_size", c.batch_size);
    read(l, "target_period", c.target_period);
    read(l, "target_expansion", c.target_expansion);
    read(l, "gamma", c.gamma);
    read(l, "warmup", c.warmup);
    read(l, "episodes", c.episodes);
    read(l, "seed", c.seed);
  }
  if (j.contains("ou")) {
    const auto& o = j["ou"];
    read(o, "theta", c.ou_theta);
    read(o, "sigma", c.ou_sigma);
    read(o, "mu", c.ou_mu);
  }
  if (j.contains("evaluation")) {
    const auto& v = j["evaluation"];
    read(v, "every", c.eval_every);
    read(v, "random_episodes", c.eval_random_episodes);
    read(v, "seed", c.eval_seed);
    read(v, "probe_states", c.probe_states);
    read_vec(v, "fixed_left", c.fixed_left);
    read_vec(v, "fixed_middle", c.fixed_middle);
    read_vec(v, "fixed_right", c.fixed_right);
  }
  c.validate();
  return c;
}

TrainConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  try {
    return config_from_json(ss.str());
  } catch (const std::exception& ex) {
    throw std::runtime_error(path.string() + ": " + ex.what());
  }
}

void save_config(const TrainConfig& cfg, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write config " + path.string());
  os << to_json(cfg);
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace airhockey
