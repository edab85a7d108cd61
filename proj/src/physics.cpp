#include "airhockey/physics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace airhockey::physics {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

double mirror_low(double v, double lo) { return v < lo ? 2.0 * lo - v : v; }
double mirror_high(double v, double hi) { return v > hi ? 2.0 * hi - v : v; }

}  // namespace

void TableGeometry::validate() const {
  require(width > 0 && height > 0, "table: width and height must be positive");
  require(goal_width > 0, "table: goal_width must be positive");
  require(mallet_radius > 0 && puck_radius > 0, "table: radii must be positive");
  require(goal_line_y > 0, "table: goal_line_y must be positive");
  require(goal_center_x >= 0 && goal_center_x <= width, "table: goal_center_x outside [0, width]");
  const double limit = std::min(width, height) / 4.0;
  require(mallet_radius < limit && puck_radius < limit,
          "table: radii must be below min(width, height)/4");
}

void PhysicsParams::validate() const {
  require(dt > 0, "physics: dt must be positive");
  require(max_force > 0, "physics: max_force must be positive");
  require(max_velocity > 0, "physics: max_velocity must be positive");
  require(restitution > 0 && restitution <= 1, "physics: restitution must be in (0, 1]");
}

Vec2 clamp_velocity(Vec2 vel, double max_velocity) {
  return {std::clamp(vel.x, -max_velocity, max_velocity),
          std::clamp(vel.y, -max_velocity, max_velocity)};
}

BodyState integrate_body(const BodyState& state, Vec2 accel, const PhysicsParams& params) {
  BodyState next;
  next.pos = state.pos + state.vel * params.dt;
  next.vel = clamp_velocity(state.vel + accel * params.dt, params.max_velocity);
  return next;
}

BodyState resolve_wall_collision(const BodyState& puck, const TableGeometry& geom,
                                 double restitution, unsigned walls) {
  const double r = geom.puck_radius;
  const double lo_x = r, hi_x = geom.width - r;
  const double lo_y = r, hi_y = geom.height - r;

  BodyState out = puck;
  bool hit = false;

  if ((walls & kLeftWall) && out.pos.x <= lo_x) {
    out.pos.x = mirror_low(out.pos.x, lo_x);
    if (out.vel.x < 0) {
      out.vel.x = -out.vel.x;
      hit = true;
    }
  }
  if ((walls & kRightWall) && out.pos.x >= hi_x) {
    out.pos.x = mirror_high(out.pos.x, hi_x);
    if (out.vel.x > 0) {
      out.vel.x = -out.vel.x;
      hit = true;
    }
  }
  if ((walls & kBottomWall) && out.pos.y <= lo_y) {
    out.pos.y = mirror_low(out.pos.y, lo_y);
    if (out.vel.y < 0) {
      out.vel.y = -out.vel.y;
      hit = true;
    }
  }
  if ((walls & kTopWall) && out.pos.y >= hi_y) {
    out.pos.y = mirror_high(out.pos.y, hi_y);
    if (out.vel.y > 0) {
      out.vel.y = -out.vel.y;
      hit = true;
    }
  }

  // A mirrored overshoot larger than the table is clamped.
  if (walls & (kLeftWall | kRightWall)) out.pos.x = std::clamp(out.pos.x, lo_x, hi_x);
  if (walls & kBottomWall) out.pos.y = std::max(out.pos.y, lo_y);
  if (walls & kTopWall) out.pos.y = std::min(out.pos.y, hi_y);

  if (hit) out.vel *= restitution;
  return out;
}

Contact detect_mallet_puck_contact(const BodyState& mallet, const BodyState& puck,
                                   const TableGeometry& geom) {
  const Vec2 d = puck.pos - mallet.pos;
  const double reach = geom.mallet_radius + geom.puck_radius;
  Contact c;
  c.touching = d.squared_norm() <= reach * reach;
  const double dist = d.norm();
  c.normal = dist > 0.0 ? d / dist : Vec2{1.0, 0.0};
  return c;
}

BodyState resolve_strike(const BodyState& mallet, const BodyState& puck, Vec2 normal,
                         double restitution) {
  const double vm_n = mallet.vel.dot(normal);
  const double vp_n = puck.vel.dot(normal);
  if (vp_n - vm_n >= 0.0) return puck;  // separating or resting contact

  const double vp_n_after = vm_n + restitution * (vm_n - vp_n);
  BodyState out = puck;
  out.vel = puck.vel + normal * (vp_n_after - vp_n);
  return out;
}

bool mallet_touches_wall(const BodyState& mallet, const TableGeometry& geom) {
  const double r = geom.mallet_radius;
  return mallet.pos.x <= r || mallet.pos.x >= geom.width - r || mallet.pos.y <= r ||
         mallet.pos.y >= geom.height - r;
}

RolloutResult rollout_puck_to_goal_line(const BodyState& puck, const TableGeometry& geom,
                                        const PhysicsParams& params, double aim_x,
                                        int max_steps) {
  RolloutResult result;
  if (puck.vel.x == 0.0 && puck.vel.y == 0.0) return result;

  const Vec2 aim_dir = normalized_or_zero(Vec2{aim_x, geom.goal_line_y} - puck.pos);
  result.v_projection = puck.vel.dot(aim_dir);

  BodyState cur = puck;
  for (int k = 0; k < max_steps; ++k) {
    const Vec2 next = cur.pos + cur.vel * params.dt;
    if (cur.pos.y < geom.goal_line_y && next.y >= geom.goal_line_y) {
      const double frac = (geom.goal_line_y - cur.pos.y) / (next.y - cur.pos.y);
      double x = cur.pos.x + frac * (next.x - cur.pos.x);
      const double r = geom.puck_radius;
      x = std::clamp(mirror_high(mirror_low(x, r), geom.width - r), r, geom.width - r);
      result.x_reached = x;
      return result;
    }
    cur.pos = next;
    cur = resolve_wall_collision(cur, geom, params.restitution, kOpenTop);
  }
  return result;
}

}  // namespace airhockey::physics
