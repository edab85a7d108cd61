#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "airhockey/vec2.hpp"

namespace airhockey::rl {

// Cartesian n x n grid of mallet accelerations. Index i*n + j holds
// (levels[i], levels[j]); the levels are evenly spaced over [-a_max, a_max]
// so the zero action and both per-axis extremes are always present.
class ActionGrid {
 public:
  ActionGrid(int levels_per_axis, double max_accel);

  int levels_per_axis() const { return n_; }
  std::size_t size() const { return actions_.size(); }
  double max_accel() const { return max_accel_; }
  double spacing() const { return levels_.size() > 1 ? levels_[1] - levels_[0] : 0.0; }

  Vec2 operator[](std::size_t index) const { return actions_.at(index); }
  std::span<const double> levels() const { return levels_; }
  std::span<const Vec2> actions() const { return actions_; }

  // Index of the nearest grid action (Euclidean); ties go to the lowest index.
  int project(Vec2 continuous) const;

  int zero_action() const { return (n_ / 2) * n_ + n_ / 2; }

 private:
  int nearest_level(double v) const;

  int n_;
  double max_accel_;
  std::vector<double> levels_;
  std::vector<Vec2> actions_;
};

}  // namespace airhockey::rl
