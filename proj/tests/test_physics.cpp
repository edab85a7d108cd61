#include <doctest.h>

#include <cmath>
#include <random>

#include "airhockey/physics.hpp"
#include "oracles.hpp"

using namespace airhockey;
using namespace airhockey::physics;

namespace {

TableGeometry wide_table() {
  TableGeometry g;
  g.width = 2.0;
  g.height = 2.0;
  g.goal_center_x = 1.0;
  g.goal_line_y = 2.0;
  return g;
}

double kinetic(const BodyState& b) { return b.vel.squared_norm(); }

}  // namespace

TEST_CASE("integrate_body uses the old velocity for position") {
  PhysicsParams p;
  p.dt = 0.05;
  const BodyState s{{0, 0}, {0, 0}};
  const auto n = integrate_body(s, {1, 0}, p);
  CHECK(n.pos == Vec2{0, 0});
  CHECK(n.vel.x == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(n.vel.y == 0.0);

  const BodyState moving{{0.3, 0.2}, {0.0, 0.0}};
  CHECK(integrate_body(moving, {0, 0}, p) == moving);
}

TEST_CASE("integrate_body clamps velocity per axis") {
  PhysicsParams p;
  const BodyState s{{0.5, 0.5}, {p.max_velocity, -p.max_velocity}};
  const auto n = integrate_body(s, {p.max_force, -p.max_force}, p);
  CHECK(n.vel == Vec2{p.max_velocity, -p.max_velocity});
  // Box clamp, not a norm clamp: the diagonal may exceed max_velocity.
  CHECK(n.vel.norm() > p.max_velocity);
}

TEST_CASE("integration superposes in the velocity row without clamping") {
  PhysicsParams p;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 200; ++k) {
    const BodyState s{{u(rng), u(rng)}, {u(rng) * 0.5, u(rng) * 0.5}};
    const Vec2 a1{u(rng) * 2, u(rng) * 2}, a2{u(rng) * 2, u(rng) * 2};
    const auto twice = integrate_body(integrate_body(s, a1, p), a2, p);
    CHECK(twice.vel.x == doctest::Approx(s.vel.x + p.dt * (a1.x + a2.x)).epsilon(1e-12));
    CHECK(twice.vel.y == doctest::Approx(s.vel.y + p.dt * (a1.y + a2.y)).epsilon(1e-12));
  }
}

TEST_CASE("wall bounce reflects then scales the whole velocity") {
  TableGeometry g;
  BodyState puck{{0.5, 0.02}, {1, -2}};
  auto out = resolve_wall_collision(puck, g, 0.99);
  CHECK(out.vel.x == doctest::Approx(0.99).epsilon(1e-15));
  CHECK(out.vel.y == doctest::Approx(1.98).epsilon(1e-15));
  CHECK(out.pos.y >= g.puck_radius);
  // Angle to the wall normal is unchanged.
  CHECK(std::abs(out.vel.x / out.vel.y) == doctest::Approx(std::abs(puck.vel.x / puck.vel.y)).epsilon(1e-12));

  BodyState normal_hit{{0.5, 0.03}, {0, -1}};
  CHECK(resolve_wall_collision(normal_hit, g, 1.0).vel == Vec2{0, 1});

  BodyState glide{{0.5, g.puck_radius}, {1, 0}};
  CHECK(resolve_wall_collision(glide, g, 0.99) == glide);

  BodyState away{{0.5, 0.02}, {0, 1}};
  CHECK(resolve_wall_collision(away, g, 0.5).vel == Vec2{0, 1});
}

TEST_CASE("corner contact reflects both normals with one scaling") {
  TableGeometry g;
  BodyState puck{{0.01, 0.01}, {-1, -2}};
  const auto out = resolve_wall_collision(puck, g, 0.9);
  CHECK(out.vel.x == doctest::Approx(0.9));
  CHECK(out.vel.y == doctest::Approx(1.8));
  CHECK(out.pos.x >= g.puck_radius);
  CHECK(out.pos.y >= g.puck_radius);
}

TEST_CASE("wall bounces never add energy and keep the puck inside") {
  TableGeometry g;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos_x(-0.02, g.width + 0.02), pos_y(-0.02, g.height + 0.02);
  std::uniform_real_distribution<double> vel(-6, 6), e(0.05, 1.0);
  for (int k = 0; k < 2000; ++k) {
    const BodyState puck{{pos_x(rng), pos_y(rng)}, {vel(rng), vel(rng)}};
    const auto out = resolve_wall_collision(puck, g, e(rng));
    CHECK(kinetic(out) <= kinetic(puck) * (1 + 1e-12));
    CHECK(out.pos.x >= g.puck_radius);
    CHECK(out.pos.x <= g.width - g.puck_radius);
    CHECK(out.pos.y >= g.puck_radius);
    CHECK(out.pos.y <= g.height - g.puck_radius);
  }
}

TEST_CASE("mallet-puck contact detection") {
  TableGeometry g;
  g.mallet_radius = 0.05;
  g.puck_radius = 0.03;
  const BodyState mallet{{0, 0}, {}};
  auto c = detect_mallet_puck_contact(mallet, {{0.08, 0}, {}}, g);
  CHECK(c.touching);
  CHECK(c.normal == Vec2{1, 0});
  CHECK_FALSE(detect_mallet_puck_contact(mallet, {{1, 1}, {}}, g).touching);
  c = detect_mallet_puck_contact(mallet, {{0.06, 0}, {}}, g);
  CHECK(c.touching);
  CHECK(c.normal == Vec2{1, 0});
  c = detect_mallet_puck_contact(mallet, {{0, 0}, {}}, g);
  CHECK(c.touching);
  CHECK(c.normal == Vec2{1, 0});
}

TEST_CASE("strike against an infinite-mass mallet") {
  const BodyState mallet{{0, 0}, {2, 0}};
  const BodyState puck{{0.08, 0}, {0, 0}};
  CHECK(resolve_strike(mallet, puck, {1, 0}, 1.0).vel == Vec2{4, 0});
  CHECK(resolve_strike(mallet, puck, {1, 0}, 0.0).vel == Vec2{2, 0});
  const BodyState retreating{{0, 0}, {-1, 0}};
  CHECK(resolve_strike(retreating, puck, {1, 0}, 1.0) == puck);

  // e = 1 preserves the relative speed.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int k = 0; k < 500; ++k) {
    const double ang = u(rng);
    const Vec2 n{std::cos(ang), std::sin(ang)};
    const BodyState m{{0, 0}, {u(rng), u(rng)}};
    const BodyState p{{0.08 * n.x, 0.08 * n.y}, {u(rng), u(rng)}};
    const auto out = resolve_strike(m, p, n, 1.0);
    const Vec2 expected = oracle::strike_formula(m.vel, p.vel, n, 1.0);
    CHECK(out.vel.x == doctest::Approx(expected.x).epsilon(1e-12));
    CHECK(out.vel.y == doctest::Approx(expected.y).epsilon(1e-12));
    if ((p.vel - m.vel).dot(n) < 0)
      CHECK((out.vel - m.vel).norm() == doctest::Approx((p.vel - m.vel).norm()).epsilon(1e-12));
  }
}

TEST_CASE("rollout straight to the goal line") {
  const auto g = wide_table();
  PhysicsParams p;
  const auto r = rollout_puck_to_goal_line({{1.0, 0.5}, {0, 2}}, g, p, g.goal_center_x, 400);
  REQUIRE(r.x_reached);
  CHECK(*r.x_reached == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.v_projection == doctest::Approx(2.0));
}

TEST_CASE("rollout projection onto the aim direction") {
  TableGeometry g;
  PhysicsParams p;
  const Vec2 start{0.2, 0.5};
  const Vec2 dir = normalized_or_zero(Vec2{g.goal_center_x, g.goal_line_y} - start);
  const auto r = rollout_puck_to_goal_line({start, dir * 3.0}, g, p, g.goal_center_x, 400);
  CHECK(r.v_projection == doctest::Approx(3.0).epsilon(1e-12));
  REQUIRE(r.x_reached);
  CHECK(*r.x_reached == doctest::Approx(g.goal_center_x).epsilon(1e-9));
}

TEST_CASE("rollout edge cases") {
  TableGeometry g;
  PhysicsParams p;
  const auto still = rollout_puck_to_goal_line({{0.5, 0.5}, {0, 0}}, g, p, 0.5, 400);
  CHECK_FALSE(still.x_reached);
  CHECK(still.v_projection == 0.0);

  // Moving away with too few steps to come back.
  const auto away = rollout_puck_to_goal_line({{0.5, 0.5}, {0, -1}}, g, p, 0.5, 5);
  CHECK_FALSE(away.x_reached);
  CHECK(away.v_projection < 0);
}

TEST_CASE("rollout with a wall bounce agrees with a fine-step integrator") {
  TableGeometry g;
  PhysicsParams p;
  const BodyState puck{{0.2, 0.5}, {-1, 1}};
  const auto r = rollout_puck_to_goal_line(puck, g, p, g.goal_center_x, 400);
  const auto fine = oracle::fine_rollout(puck.pos, puck.vel, g.width, g.puck_radius, g.goal_line_y,
                                         p.restitution, p.dt / 100, 400L * 100);
  REQUIRE(r.x_reached);
  REQUIRE(fine);
  CHECK(std::abs(*r.x_reached - *fine) <= g.puck_radius);
}

TEST_CASE("physics functions are deterministic") {
  TableGeometry g;
  PhysicsParams p;
  const BodyState puck{{0.31, 0.42}, {1.7, 3.1}};
  const auto a = rollout_puck_to_goal_line(puck, g, p, 0.5, 400);
  const auto b = rollout_puck_to_goal_line(puck, g, p, 0.5, 400);
  CHECK(a.x_reached == b.x_reached);
  CHECK(a.v_projection == b.v_projection);
}

TEST_CASE("geometry and parameter validation") {
  TableGeometry g;
  CHECK_NOTHROW(g.validate());
  g.puck_radius = 0.3;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  PhysicsParams p;
  p.restitution = 1.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.dt = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
