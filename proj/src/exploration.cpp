#include "airhockey/exploration.hpp"

#include <cmath>

namespace airhockey::rl {

double ou_sigma_for_spacing(double spacing, double theta, double fraction) {
  return fraction * spacing * std::sqrt(2.0 * theta);
}

Vec2 guidance_policy(const env::EnvState& state, const physics::PhysicsParams& physics) {
  const Vec2 to_puck = state.puck.pos - state.mallet.pos;
  if (to_puck.squared_norm() == 0.0) return {};
  const Vec2 v_next = normalized_or_zero(to_puck) * physics.max_velocity;
  const Vec2 demand = (v_next - state.mallet.vel) / physics.dt;
  return normalized_or_zero(demand) * physics.max_force;
}

}  // namespace airhockey::rl
