#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "airhockey/config.hpp"
#include "airhockey/exploration.hpp"
#include "airhockey/learner.hpp"
#include "airhockey/replay_buffer.hpp"

namespace airhockey::rl {

using nn::QNetwork;

// Independent random streams carved out of one run seed, so switching a
// feature off (e.g. OU noise) leaves every other stream untouched.
enum class Stream : std::uint64_t {
  init = 1,
  env = 2,
  policy = 3,
  noise = 4,
  guide = 5,
  replay = 6,
  probe = 7,
  eval = 8,
};

std::uint64_t derive_seed(std::uint64_t seed, Stream stream);

struct EpisodeMetrics {
  int episode = 0;
  double total_reward = 0.0;
  int steps = 0;
  env::TerminalKind terminal_kind = env::TerminalKind::none;
  bool guided = false;
  double target_period = 0.0;
  double mean_max_q = 0.0;
  std::int64_t updates = 0;  // cumulative gradient steps
  double mean_loss = 0.0;    // over this episode's updates, 0 if none
};

struct StepRecord {
  int episode = 0;
  int step = 0;
  env::Features state{};
  int action = 0;
  double reward = 0.0;
  bool bellman_terminal = false;
  bool guided = false;
};

struct TrainObserver {
  std::function<void(const StepRecord&)> on_step;
  // Targets of every gradient step, one per mini-batch row.
  std::function<void(std::span<const float>)> on_update;
  std::function<void(std::int64_t total_updates)> on_sync;
  std::function<void(const EpisodeMetrics&)> on_episode;
};

class NumericalDivergence : public std::runtime_error {
 public:
  NumericalDivergence(const std::string& what, int episode)
      : std::runtime_error(what), episode_(episode) {}
  int episode() const { return episode_; }

 private:
  int episode_;
};

// Probe states for the "average value" statistic: reset states drawn once.
std::vector<float> make_probe_set(const TrainConfig& cfg, std::uint64_t seed);
// Mean over the probe rows of max_a Q(s, a).
double mean_max_q(const QNetwork& net, std::span<const float> probe_rows);

// Guided Double-DQN learner. Each episode is either a teacher episode (with
// probability guide_prob) or an epsilon-greedy episode with OU noise added
// before projection. Every step stores a transition and, once the buffer is
// warm, takes one RMSProp step on Double-DQN targets; target syncs follow an
// expanding TargetSchedule.
class GdqnTrainer {
 public:
  explicit GdqnTrainer(TrainConfig cfg);

  EpisodeMetrics run_episode(const TrainObserver& observer = {});
  void train(int episodes, const TrainObserver& observer = {});

  const TrainConfig& config() const { return cfg_; }
  const QNetwork& online() const { return online_; }
  const QNetwork& target() const { return target_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  const TargetSchedule& schedule() const { return schedule_; }
  const std::vector<float>& probe_rows() const { return probe_; }
  int episodes_done() const { return episode_; }

 private:
  void learn_step(const TrainObserver& observer, double& loss_sum, int& loss_count);

  TrainConfig cfg_;
  env::StrikingEnv env_;
  QNetwork online_;
  QNetwork target_;
  ReplayBuffer buffer_;
  TargetSchedule schedule_;
  Exploration explore_;

  std::mt19937_64 policy_rng_;
  std::mt19937_64 noise_rng_;
  std::mt19937_64 guide_rng_;
  std::mt19937_64 replay_rng_;

  std::vector<float> probe_;
  std::vector<const Transition*> samples_;
  nn::TrainingBatch<float> batch_;
  DdqnBatcher<float> batcher_;
  nn::Workspace<float> ws_;
  nn::ParameterSet<float> grad_;
  int episode_ = 0;
};

// Runs `cfg.episodes` episodes and returns the trained online network.
QNetwork train_gdqn(const TrainConfig& cfg, const TrainObserver& observer = {});

}  // namespace airhockey::rl
