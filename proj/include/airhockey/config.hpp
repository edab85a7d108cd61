#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "airhockey/env.hpp"
#include "airhockey/mlp.hpp"

namespace airhockey {

// Every knob of a training run. Serialized as pretty-printed JSON.
struct TrainConfig {
  std::string label = "GDQN";

  env::EnvConfig env;
  nn::MlpSpec network;
  nn::RmsPropParams optimizer;  // learning_rate is the Q-learning step size

  double epsilon = 0.1;        // uniform-action probability
  double guide_prob = 0.1;     // probability an episode follows the teacher
  std::size_t buffer_capacity = 200000;
  std::size_t batch_size = 64;
  double target_period = 200;  // initial sync period, in gradient updates
  double target_expansion = 1.2;
  double gamma = 1.0;
  std::size_t warmup = 1000;   // transitions stored before the first update

  double ou_theta = 4.0;
  double ou_sigma = 4.5254833995939041;  // stationary std 0.4 grid spacings at defaults
  double ou_mu = 0.0;

  int episodes = 30000;
  std::uint64_t seed = 1;

  // Periodic greedy evaluation.
  int eval_every = 50;
  int eval_random_episodes = 20;
  std::uint64_t eval_seed = 7;
  int probe_states = 256;
  Vec2 fixed_left{0.25, 0.6};
  Vec2 fixed_middle{0.5, 0.6};
  Vec2 fixed_right{0.75, 0.6};

  // Throws std::invalid_argument naming the offending field.
  void validate() const;

  bool operator==(const TrainConfig&) const = default;
};

// Default full-scale configuration.
TrainConfig default_config();
// Short profile that runs on a laptop core in minutes.
TrainConfig desk_config();
// Named presets: gdqn, desk, ddqn200, ddqn1000, ddqn5000 (desk length for the
// ddqn* presets when desk is true).
TrainConfig preset(const std::string& name, bool desk = false);
std::vector<std::string> preset_names();

// Reduction of the guided learner to plain Double-DQN.
bool is_plain_ddqn(const TrainConfig& cfg);

std::string to_json(const TrainConfig& cfg);
TrainConfig config_from_json(const std::string& text);

TrainConfig load_config(const std::filesystem::path& path);
void save_config(const TrainConfig& cfg, const std::filesystem::path& path);

}  // namespace airhockey
