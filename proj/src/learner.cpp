#include "airhockey/learner.hpp"

#include <cmath>
#include <stdexcept>

namespace airhockey::rl {

TargetSchedule::TargetSchedule(double initial_period, double expansion)
    : period_(initial_period), expansion_(expansion) {
  if (!(initial_period >= 1.0)) throw std::invalid_argument("target schedule: period must be >= 1");
  if (!(expansion >= 1.0)) throw std::invalid_argument("target schedule: expansion must be >= 1");
}

bool TargetSchedule::on_update() {
  ++total_;
  ++since_sync_;
  if (since_sync_ < static_cast<std::int64_t>(std::floor(period_))) return false;
  since_sync_ = 0;
  ++syncs_;
  period_ *= expansion_;
  return true;
}

template <typename Real>
void DdqnBatcher<Real>::build(const nn::Mlp<Real>& online, const nn::Mlp<Real>& target,
                              std::span<const Transition* const> samples, double gamma,
                              nn::TrainingBatch<Real>& batch) {
  const std::size_t rows = samples.size();
  const std::size_t in = env::kFeatureCount;
  const std::size_t a_dim = online.spec().outputs();

  batch.rows = rows;
  batch.states.resize(rows * in);
  batch.actions.resize(rows);
  batch.targets.resize(rows);
  next_states_.resize(rows * in);

  for (std::size_t r = 0; r < rows; ++r) {
    const Transition& t = *samples[r];
    for (std::size_t i = 0; i < in; ++i) {
      batch.states[r * in + i] = static_cast<Real>(t.state[i]);
      next_states_[r * in + i] = static_cast<Real>(t.next_state[i]);
    }
    batch.actions[r] = t.action;
  }

  online.forward_batch(next_states_, rows, ws_, q_online_);
  target.forward_batch(next_states_, rows, ws_, q_target_);

  for (std::size_t r = 0; r < rows; ++r) {
    const Transition& t = *samples[r];
    if (t.bellman_terminal) {
      batch.targets[r] = static_cast<Real>(t.reward);
      continue;
    }
    const std::span<const Real> row(q_online_.data() + r * a_dim, a_dim);
    const int a = nn::argmax<Real>(row);
    const double bootstrap = static_cast<double>(q_target_[r * a_dim + static_cast<std::size_t>(a)]);
    batch.targets[r] = static_cast<Real>(t.reward + gamma * bootstrap);
  }
}

template class DdqnBatcher<float>;
template class DdqnBatcher<double>;

}  // namespace airhockey::rl
