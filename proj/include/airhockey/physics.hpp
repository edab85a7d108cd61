#pragma once

#include <optional>

#include "airhockey/vec2.hpp"

namespace airhockey::physics {

struct BodyState {
  Vec2 pos;
  Vec2 vel;

  bool operator==(const BodyState&) const = default;
};

// Table frame: x spans [0, width], y spans [0, height]. The agent defends
// y = 0 and the opponent goal line sits at goal_line_y (normally y = height).
struct TableGeometry {
  double width = 1.0;
  double height = 2.0;
  double goal_center_x = 0.5;
  double goal_width = 0.25;
  double mallet_radius = 0.05;
  double puck_radius = 0.03;
  double goal_line_y = 2.0;

  // Throws std::invalid_argument on a malformed table.
  void validate() const;
  bool operator==(const TableGeometry&) const = default;
};

struct PhysicsParams {
  double dt = 0.05;
  double max_force = 8.0;     // per-axis acceleration bound, m/s^2
  double max_velocity = 2.0;  // per-axis speed bound, m/s
  double restitution = 0.99;

  void validate() const;
  bool operator==(const PhysicsParams&) const = default;
};

// Bit flags selecting which table boundaries act as walls.
enum Walls : unsigned {
  kLeftWall = 1u << 0,
  kRightWall = 1u << 1,
  kBottomWall = 1u << 2,
  kTopWall = 1u << 3,
  kAllWalls = kLeftWall | kRightWall | kBottomWall | kTopWall,
  // The opponent end is open while the puck travels to the goal line.
  kOpenTop = kLeftWall | kRightWall | kBottomWall,
};

// One step of the second-order model. Position advances with the velocity
// held at the start of the step; the new velocity is clamped per axis.
BodyState integrate_body(const BodyState& state, Vec2 accel, const PhysicsParams& params);

// Per-axis velocity box clamp.
Vec2 clamp_velocity(Vec2 vel, double max_velocity);

// Bounces the puck off every selected wall it touches while moving into it.
// Normal components are reflected and the whole velocity is then scaled by
// the restitution coefficient once, so incidence and reflection angles stay
// equal. The position is mirrored back inside the table.
BodyState resolve_wall_collision(const BodyState& puck, const TableGeometry& geom,
                                 double restitution, unsigned walls = kAllWalls);

struct Contact {
  bool touching = false;
  Vec2 normal{1.0, 0.0};  // unit vector from mallet center to puck center
};

Contact detect_mallet_puck_contact(const BodyState& mallet, const BodyState& puck,
                                   const TableGeometry& geom);

// Impact against a kinematically driven (infinite-mass) mallet. Frictionless:
// only the normal component of the puck velocity changes.
BodyState resolve_strike(const BodyState& mallet, const BodyState& puck, Vec2 normal,
                         double restitution);

// True when the mallet disc touches or crosses any table boundary.
bool mallet_touches_wall(const BodyState& mallet, const TableGeometry& geom);

struct RolloutResult {
  std::optional<double> x_reached;  // crossing point on the goal line
  double v_projection = 0.0;        // post-strike speed toward the aim point
};

// Free flight of the struck puck until its center crosses the goal line.
// Side and bottom walls bounce; the top end is open.
RolloutResult rollout_puck_to_goal_line(const BodyState& puck, const TableGeometry& geom,
                                        const PhysicsParams& params, double aim_x,
                                        int max_steps);

}  // namespace airhockey::physics
