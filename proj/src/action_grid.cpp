#include "airhockey/action_grid.hpp"

#include <cmath>
#include <stdexcept>

namespace airhockey::rl {

ActionGrid::ActionGrid(int levels_per_axis, double max_accel)
    : n_(levels_per_axis), max_accel_(max_accel) {
  if (n_ < 3 || n_ % 2 == 0)
    throw std::invalid_argument("action grid: levels per axis must be odd and >= 3");
  if (!(max_accel > 0)) throw std::invalid_argument("action grid: max_accel must be positive");

  levels_.resize(n_);
  const int half = n_ / 2;
  for (int i = 0; i < n_; ++i) levels_[i] = max_accel * static_cast<double>(i - half) / half;

  actions_.reserve(static_cast<std::size_t>(n_) * n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) actions_.emplace_back(levels_[i], levels_[j]);
}

int ActionGrid::nearest_level(double v) const {
  int best = 0;
  double best_d = std::abs(v - levels_[0]);
  for (int i = 1; i < n_; ++i) {
    const double d = std::abs(v - levels_[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

// The squared distance separates per axis, so the product of per-axis
// nearest levels is the nearest grid point, and the lowest tied level on each
// axis gives the lowest tied row-major index.
int ActionGrid::project(Vec2 continuous) const {
  return nearest_level(continuous.x) * n_ + nearest_level(continuous.y);
}

}  // namespace airhockey::rl
