#include "airhockey/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace airhockey::rl {

std::uint64_t derive_seed(std::uint64_t seed, Stream stream) {
  // splitmix64 finalizer over (seed, stream)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(stream) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::vector<float> make_probe_set(const TrainConfig& cfg, std::uint64_t seed) {
  env::StrikingEnv probe_env(cfg.env, seed);
  std::vector<float> rows;
  rows.reserve(static_cast<std::size_t>(cfg.probe_states) * env::kFeatureCount);
  for (int k = 0; k < cfg.probe_states; ++k) {
    probe_env.reset();
    for (double v : probe_env.features()) rows.push_back(static_cast<float>(v));
  }
  return rows;
}

double mean_max_q(const QNetwork& net, std::span<const float> probe_rows) {
  const std::size_t rows = probe_rows.size() / env::kFeatureCount;
  if (rows == 0) return 0.0;
  nn::Workspace<float> ws;
  std::vector<float> q;
  net.forward_batch(probe_rows, rows, ws, q);
  const std::size_t a_dim = net.spec().outputs();
  double sum = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const auto row = std::span<const float>(q).subspan(r * a_dim, a_dim);
    sum += static_cast<double>(*std::max_element(row.begin(), row.end()));
  }
  return sum / static_cast<double>(rows);
}

GdqnTrainer::GdqnTrainer(TrainConfig cfg)
    : cfg_((cfg.validate(), std::move(cfg))),
      env_(cfg_.env, derive_seed(cfg_.seed, Stream::env)),
      online_(QNetwork::initialized(cfg_.network, derive_seed(cfg_.seed, Stream::init))),
      target_(nn::clone_into_target(online_)),
      buffer_(cfg_.buffer_capacity),
      schedule_(cfg_.target_period, cfg_.target_expansion),
      policy_rng_(derive_seed(cfg_.seed, Stream::policy)),
      noise_rng_(derive_seed(cfg_.seed, Stream::noise)),
      guide_rng_(derive_seed(cfg_.seed, Stream::guide)),
      replay_rng_(derive_seed(cfg_.seed, Stream::replay)),
      probe_(make_probe_set(cfg_, derive_seed(cfg_.seed, Stream::probe))) {
  explore_.epsilon = cfg_.epsilon;
  explore_.ou.theta = cfg_.ou_theta;
  explore_.ou.sigma = cfg_.ou_sigma;
  explore_.ou.mu = cfg_.ou_mu;
  explore_.ou.dt = cfg_.env.physics.dt;
  grad_ = nn::zeros_like<float>(cfg_.network);
}

void GdqnTrainer::learn_step(const TrainObserver& observer, double& loss_sum, int& loss_count) {
  const std::size_t needed = std::max(cfg_.warmup, cfg_.batch_size);
  if (buffer_.size() < needed) return;

  buffer_.sample(cfg_.batch_size, replay_rng_, samples_);
  batcher_.build(online_, target_, samples_, cfg_.gamma, batch_);
  if (observer.on_update) observer.on_update(batch_.targets);

  const float loss = online_.backward(batch_, ws_, grad_);
  if (!std::isfinite(loss))
    throw NumericalDivergence("non-finite loss at update " + std::to_string(schedule_.total_updates() + 1),
                              episode_);
  online_.rmsprop_step(grad_, cfg_.optimizer);
  loss_sum += static_cast<double>(loss);
  ++loss_count;

  if (schedule_.on_update()) {
    target_ = nn::clone_into_target(online_);
    if (observer.on_sync) observer.on_sync(schedule_.total_updates());
  }
}

EpisodeMetrics GdqnTrainer::run_episode(const TrainObserver& observer) {
  EpisodeMetrics m;
  m.episode = episode_;

  env::EnvState state = env_.reset();
  explore_.ou.reset();
  std::bernoulli_distribution guide_coin(cfg_.guide_prob);
  const bool guided = guide_coin(guide_rng_);
  m.guided = guided;
  const ActMode mode = guided ? ActMode::guided : ActMode::explore;

  double loss_sum = 0.0;
  int loss_count = 0;
  while (true) {
    const int action = select_action(online_, state, cfg_.env.table, cfg_.env.physics, env_.grid(),
                                     explore_, mode, policy_rng_, noise_rng_);
    const env::Features features = env_.features();
    const env::StepOutcome out = env_.step(action);

    Transition t;
    t.state = features;
    t.action = action;
    t.reward = out.reward;
    t.next_state = env_.features();
    t.bellman_terminal = out.terminal;
    buffer_.push(t);

    if (observer.on_step) {
      observer.on_step(StepRecord{episode_, m.steps, features, action, out.reward, out.terminal, guided});
    }

    m.total_reward += out.reward;
    ++m.steps;
    learn_step(observer, loss_sum, loss_count);

    if (out.episode_over()) {
      m.terminal_kind = out.terminal_kind;
      break;
    }
    state = out.next_state;
  }

  m.target_period = schedule_.period();
  m.updates = schedule_.total_updates();
  m.mean_loss = loss_count > 0 ? loss_sum / loss_count : 0.0;
  m.mean_max_q = mean_max_q(online_, probe_);
  ++episode_;
  if (observer.on_episode) observer.on_episode(m);
  return m;
}

void GdqnTrainer::train(int episodes, const TrainObserver& observer) {
  for (int k = 0; k < episodes; ++k) run_episode(observer);
}

QNetwork train_gdqn(const TrainConfig& cfg, const TrainObserver& observer) {
  GdqnTrainer trainer(cfg);
  trainer.train(cfg.episodes, observer);
  return trainer.online();
}

}  // namespace airhockey::rl
