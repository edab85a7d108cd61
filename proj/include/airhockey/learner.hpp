#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "airhockey/mlp.hpp"
#include "airhockey/replay_buffer.hpp"

namespace airhockey::rl {

// Expanding target-sync period. The period is a real-valued accumulator; a
// sync fires once the integer update count since the last sync reaches
// floor(period), after which period *= expansion. expansion == 1 gives the
// fixed-period schedule.
class TargetSchedule {
 public:
  TargetSchedule(double initial_period, double expansion);

  // Registers one gradient update; true when the target must be synced now.
  bool on_update();

  double period() const { return period_; }
  double expansion() const { return expansion_; }
  std::int64_t updates_since_sync() const { return since_sync_; }
  std::int64_t total_updates() const { return total_; }
  std::int64_t syncs() const { return syncs_; }

 private:
  double period_;
  double expansion_;
  std::int64_t since_sync_ = 0;
  std::int64_t total_ = 0;
  std::int64_t syncs_ = 0;
};

// Double-DQN target for a single transition: the online network picks the
// next action, the target network scores it.
template <typename Real>
double compute_ddqn_target(const nn::Mlp<Real>& online, const nn::Mlp<Real>& target,
                           const Transition& t, double gamma) {
  if (t.bellman_terminal) return t.reward;
  std::array<Real, env::kFeatureCount> x;
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<Real>(t.next_state[i]);
  const auto q_online = online.forward(x);
  const auto q_target = target.forward(x);
  const int a = nn::argmax<Real>(q_online);
  return t.reward + gamma * static_cast<double>(q_target[static_cast<std::size_t>(a)]);
}

// Batched Double-DQN targets and the matching training batch.
template <typename Real>
class DdqnBatcher {
 public:
  // Fills `batch` with states/actions of `samples` and their targets.
  void build(const nn::Mlp<Real>& online, const nn::Mlp<Real>& target,
             std::span<const Transition* const> samples, double gamma,
             nn::TrainingBatch<Real>& batch);

 private:
  std::vector<Real> next_states_;
  std::vector<Real> q_online_;
  std::vector<Real> q_target_;
  nn::Workspace<Real> ws_;
};

}  // namespace airhockey::rl
