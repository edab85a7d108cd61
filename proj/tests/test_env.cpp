#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "airhockey/env.hpp"
#include "oracles.hpp"

using namespace airhockey;
using namespace airhockey::env;

TEST_CASE("terminal reward components") {
  RewardParams r;
  CHECK(velocity_reward(2.0) == 4.0);
  CHECK(velocity_reward(-1.5) == -2.25);
  CHECK(accuracy_reward(0.0, r) == r.accuracy_scale);
  CHECK(accuracy_reward(r.window, r) == r.accuracy_scale);
  CHECK(accuracy_reward(r.window + 1.0 / r.decay, r) ==
        doctest::Approx(r.accuracy_scale * std::exp(-1.0)).epsilon(1e-12));
  CHECK(accuracy_reward(r.window + 1.0 / r.decay, r) / r.accuracy_scale ==
        doctest::Approx(0.3679).epsilon(1e-4));
}

TEST_CASE("accuracy reward is continuous and non-increasing") {
  RewardParams r;
  CHECK(accuracy_reward(std::nextafter(r.window, 1.0), r) == doctest::Approx(r.accuracy_scale));
  double prev = accuracy_reward(0.0, r);
  for (double d = 0.0; d < 2.0; d += 0.001) {
    const double v = accuracy_reward(d, r);
    CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("compute_terminal_reward without a goal-line crossing") {
  EnvConfig cfg;
  const BodyState resting{{0.5, 0.5}, {0, 0}};
  const auto b = compute_terminal_reward(resting, cfg.reward, cfg.table, cfg.physics, 400);
  CHECK(b.strike == cfg.reward.strike_bonus);
  CHECK(b.velocity == 0.0);
  CHECK(b.accuracy == 0.0);
  CHECK_FALSE(b.x_reached);
}

TEST_CASE("flatten scales and orders the features") {
  EnvConfig cfg;
  EnvState s;
  s.mallet.pos = {cfg.table.width / 2, cfg.table.height / 2};
  s.puck.pos = s.mallet.pos;
  const Features f = flatten(s, cfg.table, cfg.physics);
  CHECK(f == Features{0.5, 0, 0.5, 0, 0.5, 0, 0.5, 0});

  EnvState corner;
  const Features fc = flatten(corner, cfg.table, cfg.physics);
  CHECK(fc[0] == 0.0);
  CHECK(fc[2] == 0.0);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 100; ++k) {
    EnvState r;
    r.mallet = {{u(rng) + 1, u(rng) + 1}, {u(rng) * 2, u(rng) * 2}};
    r.puck = {{u(rng) + 1, u(rng) + 1}, {u(rng) * 5, u(rng) * 5}};
    const EnvState back = unflatten(flatten(r, cfg.table, cfg.physics), cfg.table, cfg.physics);
    const auto a = raw_features(r), b = raw_features(back);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-12);
  }
}

TEST_CASE("reset places the puck and the mallet") {
  EnvConfig cfg;
  StrikingEnv env(cfg, 1);
  const auto& s = env.reset(Vec2{0.5, 0.3});
  CHECK(s.puck.pos == Vec2{0.5, 0.3});
  CHECK(s.puck.vel == Vec2{0, 0});
  CHECK(s.mallet.pos == cfg.home);
  CHECK(s.mallet.vel == Vec2{0, 0});
  CHECK(s.step_count == 0);

  CHECK_THROWS_AS(env.reset(Vec2{0.5, 1.5}), std::invalid_argument);   // opponent half
  CHECK_THROWS_AS(env.reset(Vec2{0.01, 0.3}), std::invalid_argument);  // on the wall
  CHECK_THROWS_AS(env.reset(cfg.home), std::invalid_argument);          // under the mallet
}

TEST_CASE("random resets are seeded") {
  EnvConfig cfg;
  StrikingEnv a(cfg, 42), b(cfg, 42);
  for (int k = 0; k < 20; ++k) CHECK(a.reset() == b.reset());
}

TEST_CASE("random resets are uniform over the admissible half-court") {
  EnvConfig cfg;
  const auto& t = cfg.table;
  const double margin = 2 * t.puck_radius;
  const double x0 = margin, x1 = t.width - margin, y0 = margin, y1 = t.height / 2 - margin;
  const double reach = t.mallet_radius + t.puck_radius;

  // Expected cell masses by midpoint quadrature over the rectangle minus the
  // disc the sampler rejects around the home position.
  constexpr int kCells = 4, kQuad = 800;
  std::vector<double> mass(kCells * kCells, 0.0);
  double total = 0;
  for (int i = 0; i < kQuad; ++i) {
    for (int j = 0; j < kQuad; ++j) {
      const double x = x0 + (x1 - x0) * (i + 0.5) / kQuad;
      const double y = y0 + (y1 - y0) * (j + 0.5) / kQuad;
      if ((Vec2{x, y} - cfg.home).squared_norm() <= reach * reach) continue;
      mass[(i * kCells / kQuad) * kCells + j * kCells / kQuad] += 1;
      total += 1;
    }
  }

  StrikingEnv env(cfg, 2024);
  constexpr int kDraws = 10000;
  std::vector<double> observed(kCells * kCells, 0.0), expected(kCells * kCells);
  for (int k = 0; k < kDraws; ++k) {
    const Vec2 p = env.reset().puck.pos;
    REQUIRE(p.x >= x0);
    REQUIRE(p.x <= x1);
    REQUIRE(p.y >= y0);
    REQUIRE(p.y <= y1);
    const int cx = std::min(kCells - 1, static_cast<int>((p.x - x0) / (x1 - x0) * kCells));
    const int cy = std::min(kCells - 1, static_cast<int>((p.y - y0) / (y1 - y0) * kCells));
    observed[cx * kCells + cy] += 1;
  }
  for (int c = 0; c < kCells * kCells; ++c) expected[c] = kDraws * mass[c] / total;
  CHECK(oracle::chi_square_p(observed, expected) > 0.01);
}

TEST_CASE("idle episode runs to the step cap with the time penalty only") {
  EnvConfig cfg;
  StrikingEnv env(cfg, 0);
  env.reset(Vec2{0.5, 0.6});
  double total = 0;
  StepOutcome out;
  int steps = 0;
  do {
    out = env.step(env.grid().zero_action());
    total += out.reward;
    ++steps;
    if (!out.episode_over()) CHECK(out.reward == -cfg.reward.time_penalty);
  } while (!out.episode_over());
  CHECK(steps == cfg.max_episode_steps);
  CHECK(out.truncated);
  CHECK_FALSE(out.terminal);
  CHECK(out.terminal_kind == TerminalKind::none);
  CHECK(total == -150.0);
  CHECK_THROWS_AS(env.step(0), std::logic_error);
}

TEST_CASE("driving into a side wall ends the episode with the time penalty") {
  EnvConfig cfg;
  StrikingEnv env(cfg, 0);
  env.reset(Vec2{0.8, 0.8});
  const auto& grid = env.grid();
  const int left = grid.project({-cfg.physics.max_force, 0});
  StepOutcome out;
  do {
    out = env.step(left);
  } while (!out.episode_over());
  CHECK(out.terminal);
  CHECK(out.terminal_kind == TerminalKind::wall);
  CHECK(out.reward == -1.0);
  CHECK(out.next_state.mallet.pos.x >= cfg.table.mallet_radius);
}

TEST_CASE("a strike step pays the composed terminal reward") {
  EnvConfig cfg;
  StrikingEnv env(cfg, 0);
  env.reset(Vec2{0.5, 0.6});
  const int up = env.grid().project({0, cfg.physics.max_force});
  StepOutcome out;
  do {
    out = env.step(up);
  } while (!out.episode_over());
  REQUIRE(out.terminal_kind == TerminalKind::strike);
  REQUIRE(out.breakdown);
  REQUIRE(out.breakdown->x_reached);
  const auto& b = *out.breakdown;
  const auto& puck = out.next_state.puck;

  // Rebuild the reward from the formulas.
  const Vec2 aim = normalized_or_zero(Vec2{cfg.reward.aim_x, cfg.table.goal_line_y} - puck.pos);
  const double v = puck.vel.dot(aim);
  const double miss = std::abs(*b.x_reached - cfg.reward.aim_x);
  const double r_d = miss <= cfg.reward.window
                         ? cfg.reward.accuracy_scale
                         : cfg.reward.accuracy_scale * std::exp(-cfg.reward.decay * (miss - cfg.reward.window));
  CHECK(b.strike == cfg.reward.strike_bonus);
  CHECK(b.velocity == doctest::Approx(std::copysign(v * v, v)).epsilon(1e-12));
  CHECK(b.accuracy == doctest::Approx(r_d).epsilon(1e-12));
  CHECK(out.reward == doctest::Approx(-cfg.reward.time_penalty + cfg.reward.strike_bonus + b.velocity + b.accuracy));
  // Straight-up hit from below scores.
  CHECK(is_scored_goal(b, cfg.table));
}

TEST_CASE("episode return equals terminal reward minus the time penalty per step") {
  EnvConfig cfg;
  StrikingEnv env(cfg, 99);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> any(0, static_cast<int>(env.grid().size()) - 1);
  for (int ep = 0; ep < 200; ++ep) {
    env.reset();
    double total = 0, terminal_reward = 0;
    int n = 0;
    StepOutcome out;
    do {
      out = env.step(any(rng));
      total += out.reward;
      ++n;
    } while (!out.episode_over());
    if (out.breakdown) {
      terminal_reward = out.breakdown->total();
      CHECK(out.breakdown->strike == cfg.reward.strike_bonus);
    }
    CHECK(total == doctest::Approx(terminal_reward - n * cfg.reward.time_penalty).epsilon(1e-12));
    if (out.truncated) CHECK_FALSE(out.terminal);
  }
}

TEST_CASE("trace lines round-trip") {
  std::vector<TraceRecord> recs(2);
  recs[0].step = 0;
  recs[0].state = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
  recs[0].action = 3;
  recs[0].accel = {-8, 4};
  recs[0].reward = -1;
  recs[1].step = 1;
  recs[1].action = 12;
  recs[1].reward = 23.25;
  recs[1].terminal_kind = TerminalKind::strike;
  std::stringstream ss;
  write_trace(ss, recs);
  const auto back = read_trace(ss);
  REQUIRE(back.size() == 2);
  CHECK(back[0].state == recs[0].state);
  CHECK(back[0].accel == recs[0].accel);
  CHECK(back[1].terminal_kind == TerminalKind::strike);
  CHECK(back[1].reward == 23.25);
}
