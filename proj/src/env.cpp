#include "airhockey/env.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace airhockey::env {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void RewardParams::validate() const {
  require(accuracy_scale > 0, "reward: accuracy_scale (c) must be positive");
  require(window >= 0, "reward: window (w) must be non-negative");
  require(decay > 0, "reward: decay (d) must be positive");
  require(time_penalty >= 0, "reward: time_penalty must be non-negative");
}

void EnvConfig::validate() const {
  table.validate();
  physics.validate();
  reward.validate();
  require(max_episode_steps > 0, "env: max_episode_steps must be positive");
  require(rollout_max_steps > 0, "env: rollout_max_steps must be positive");
  require(grid_levels >= 3 && grid_levels % 2 == 1, "env: grid_levels must be odd and >= 3");
  const double r = table.mallet_radius;
  require(home.x > r && home.x < table.width - r && home.y > r && home.y < table.height - r,
          "env: home position must keep the mallet off the walls");
}

std::string_view to_string(TerminalKind kind) {
  switch (kind) {
    case TerminalKind::strike:
      return "strike";
    case TerminalKind::wall:
      return "wall";
    case TerminalKind::none:
      break;
  }
  return "none";
}

TerminalKind terminal_kind_from_string(std::string_view s) {
  if (s == "strike") return TerminalKind::strike;
  if (s == "wall") return TerminalKind::wall;
  if (s == "none") return TerminalKind::none;
  throw std::invalid_argument("unknown terminal kind: " + std::string(s));
}

double accuracy_reward(double miss_distance, const RewardParams& params) {
  if (miss_distance <= params.window) return params.accuracy_scale;
  return params.accuracy_scale * std::exp(-params.decay * (miss_distance - params.window));
}

double velocity_reward(double v) { return v >= 0 ? v * v : -v * v; }

RewardBreakdown compute_terminal_reward(const BodyState& post_strike_puck,
                                        const RewardParams& params, const TableGeometry& geom,
                                        const PhysicsParams& physics, int rollout_max_steps) {
  const auto rollout = physics::rollout_puck_to_goal_line(post_strike_puck, geom, physics,
                                                          params.aim_x, rollout_max_steps);
  RewardBreakdown b;
  b.strike = params.strike_bonus;
  b.v_projection = rollout.v_projection;
  b.velocity = velocity_reward(rollout.v_projection);
  b.x_reached = rollout.x_reached;
  if (rollout.x_reached) b.accuracy = accuracy_reward(std::abs(*rollout.x_reached - params.aim_x), params);
  return b;
}

Features flatten(const EnvState& s, const TableGeometry& geom, const PhysicsParams& physics) {
  const double v = physics.max_velocity;
  return {s.mallet.pos.x / geom.width, s.mallet.vel.x / v, s.mallet.pos.y / geom.height,
          s.mallet.vel.y / v,          s.puck.pos.x / geom.width, s.puck.vel.x / v,
          s.puck.pos.y / geom.height,  s.puck.vel.y / v};
}

EnvState unflatten(const Features& f, const TableGeometry& geom, const PhysicsParams& physics,
                   int step_count) {
  const double v = physics.max_velocity;
  EnvState s;
  s.mallet.pos = {f[0] * geom.width, f[2] * geom.height};
  s.mallet.vel = {f[1] * v, f[3] * v};
  s.puck.pos = {f[4] * geom.width, f[6] * geom.height};
  s.puck.vel = {f[5] * v, f[7] * v};
  s.step_count = step_count;
  return s;
}

Features raw_features(const EnvState& s) {
  return {s.mallet.pos.x, s.mallet.vel.x, s.mallet.pos.y, s.mallet.vel.y,
          s.puck.pos.x,   s.puck.vel.x,   s.puck.pos.y,   s.puck.vel.y};
}

bool is_scored_goal(const RewardBreakdown& b, const TableGeometry& geom) {
  return b.x_reached && std::abs(*b.x_reached - geom.goal_center_x) <= geom.goal_width / 2.0;
}

StrikingEnv::StrikingEnv(EnvConfig config, std::uint64_t seed)
    : config_(std::move(config)),
      grid_(config_.grid_levels, config_.physics.max_force),
      rng_(seed) {
  config_.validate();
}

void StrikingEnv::validate_puck_position(Vec2 pos) const {
  const auto& t = config_.table;
  const double r = t.puck_radius;
  if (!pos.finite() || pos.x < r || pos.x > t.width - r || pos.y < r || pos.y > t.height / 2.0) {
    throw std::invalid_argument("puck position (" + std::to_string(pos.x) + ", " +
                                std::to_string(pos.y) +
                                ") is outside the agent half-court or touches a wall");
  }
  const double reach = t.mallet_radius + t.puck_radius;
  if ((pos - config_.home).squared_norm() <= reach * reach)
    throw std::invalid_argument("puck position overlaps the mallet home position");
}

Vec2 StrikingEnv::sample_puck_position() {
  const auto& t = config_.table;
  const double margin = 2.0 * t.puck_radius;
  const double reach = t.mallet_radius + t.puck_radius;
  std::uniform_real_distribution<double> ux(margin, t.width - margin);
  std::uniform_real_distribution<double> uy(margin, t.height / 2.0 - margin);
  while (true) {
    const Vec2 p{ux(rng_), uy(rng_)};
    if ((p - config_.home).squared_norm() > reach * reach) return p;
  }
}

const EnvState& StrikingEnv::reset(std::optional<Vec2> puck_position) {
  Vec2 p;
  if (puck_position) {
    validate_puck_position(*puck_position);
    p = *puck_position;
  } else {
    p = sample_puck_position();
  }
  state_ = EnvState{};
  state_.mallet.pos = config_.home;
  state_.puck.pos = p;
  done_ = false;
  return state_;
}

StepOutcome StrikingEnv::step(int action_index) {
  if (action_index < 0 || static_cast<std::size_t>(action_index) >= grid_.size())
    throw std::out_of_range("action index " + std::to_string(action_index) + " out of range");
  return step_accel(grid_[action_index]);
}

StepOutcome StrikingEnv::step_accel(Vec2 accel) {
  if (done_) throw std::logic_error("step called on a finished episode; call reset first");
  const auto& t = config_.table;
  const auto& ph = config_.physics;

  StepOutcome out;
  EnvState next;
  next.mallet = physics::integrate_body(state_.mallet, accel, ph);
  next.puck = physics::integrate_body(state_.puck, {}, ph);
  next.step_count = state_.step_count + 1;
  out.reward = -config_.reward.time_penalty;

  const auto contact = physics::detect_mallet_puck_contact(next.mallet, next.puck, t);
  if (contact.touching) {
    next.puck = physics::resolve_strike(next.mallet, next.puck, contact.normal, ph.restitution);
    const auto b = compute_terminal_reward(next.puck, config_.reward, t, ph,
                                           config_.rollout_max_steps);
    out.reward += b.total();
    out.breakdown = b;
    out.terminal = true;
    out.terminal_kind = TerminalKind::strike;
  } else if (physics::mallet_touches_wall(next.mallet, t)) {
    const double r = t.mallet_radius;
    next.mallet.pos.x = std::clamp(next.mallet.pos.x, r, t.width - r);
    next.mallet.pos.y = std::clamp(next.mallet.pos.y, r, t.height - r);
    out.terminal = true;
    out.terminal_kind = TerminalKind::wall;
  } else {
    next.puck = physics::resolve_wall_collision(next.puck, t, ph.restitution);
  }

  if (!out.terminal && next.step_count >= config_.max_episode_steps) out.truncated = true;

  state_ = next;
  out.next_state = next;
  done_ = out.episode_over();
  return out;
}

void write_trace(std::ostream& os, const std::vector<TraceRecord>& records) {
  for (const auto& r : records) {
    nlohmann::json j;
    j["step"] = r.step;
    j["state"] = r.state;
    j["action"] = r.action;
    j["accel"] = {r.accel.x, r.accel.y};
    j["reward"] = r.reward;
    j["terminal_kind"] = std::string(to_string(r.terminal_kind));
    j["truncated"] = r.truncated;
    os << j.dump() << '\n';
  }
}

std::vector<TraceRecord> read_trace(std::istream& is) {
  std::vector<TraceRecord> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    TraceRecord r;
    r.step = j.at("step").get<int>();
    r.state = j.at("state").get<Features>();
    r.action = j.at("action").get<int>();
    r.accel = {j.at("accel").at(0).get<double>(), j.at("accel").at(1).get<double>()};
    r.reward = j.at("reward").get<double>();
    r.terminal_kind = terminal_kind_from_string(j.at("terminal_kind").get<std::string>());
    r.truncated = j.value("truncated", false);
    out.push_back(r);
  }
  return out;
}

}  // namespace airhockey::env
