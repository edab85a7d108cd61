#pragma once

#include <array>
#include <cmath>
#include <random>

#include "airhockey/action_grid.hpp"
#include "airhockey/env.hpp"
#include "airhockey/mlp.hpp"

namespace airhockey::rl {

// Euler-discretized Ornstein-Uhlenbeck process, one independent axis per
// action dimension.
struct OuProcess {
  double theta = 4.0;   // mean reversion, 1/s
  double sigma = 0.0;   // diffusion scale, accel units
  double mu = 0.0;
  double dt = 0.05;
  Vec2 state;

  void reset() { state = {mu, mu}; }

  template <typename Rng>
  Vec2 sample(Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const double diffusion = sigma * std::sqrt(dt);
    const double nx = normal(rng);
    const double ny = normal(rng);
    state.x += theta * (mu - state.x) * dt + diffusion * nx;
    state.y += theta * (mu - state.y) * dt + diffusion * ny;
    return state;
  }

  // Stationary standard deviation of the continuous-time process.
  double stationary_std() const { return sigma / std::sqrt(2.0 * theta); }
};

// Sigma that gives a stationary spread of `fraction` grid spacings.
double ou_sigma_for_spacing(double spacing, double theta, double fraction);

// Prior-knowledge teacher: full acceleration toward the state that heads at
// the puck with maximal speed. Zero when the direction is undefined.
Vec2 guidance_policy(const env::EnvState& state, const physics::PhysicsParams& physics);

enum class ActMode { greedy, explore, guided };

struct Exploration {
  double epsilon = 0.1;
  OuProcess ou;
};

// Picks an action index. `policy_rng` drives the epsilon coin and uniform
// actions; `noise_rng` drives the OU increments. Guided and greedy modes draw
// nothing. Guided mode never touches the network.
template <typename Real, typename Rng>
int select_action(const nn::Mlp<Real>& net, const env::EnvState& state,
                  const env::TableGeometry& geom, const physics::PhysicsParams& physics,
                  const ActionGrid& grid, Exploration& explore, ActMode mode, Rng& policy_rng,
                  Rng& noise_rng) {
  if (mode == ActMode::guided) return grid.project(guidance_policy(state, physics));

  Vec2 noise;
  if (mode == ActMode::explore) {
    noise = explore.ou.sample(noise_rng);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(policy_rng) < explore.epsilon) {
      std::uniform_int_distribution<int> any(0, static_cast<int>(grid.size()) - 1);
      return any(policy_rng);
    }
  }

  const auto f = env::flatten(state, geom, physics);
  std::array<Real, env::kFeatureCount> x;
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<Real>(f[i]);
  const auto q = net.forward(x);
  const int greedy = nn::argmax<Real>(q);
  if (mode == ActMode::greedy) return greedy;
  return grid.project(grid[static_cast<std::size_t>(greedy)] + noise);
}

}  // namespace airhockey::rl
