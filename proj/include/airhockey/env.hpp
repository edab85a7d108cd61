#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "airhockey/action_grid.hpp"
#include "airhockey/physics.hpp"

namespace airhockey::env {

using physics::BodyState;
using physics::PhysicsParams;
using physics::TableGeometry;

inline constexpr std::size_t kFeatureCount = 8;
using Features = std::array<double, kFeatureCount>;

struct EnvState {
  BodyState mallet;
  BodyState puck;
  int step_count = 0;

  bool operator==(const EnvState&) const = default;
};

struct RewardParams {
  double strike_bonus = 5.0;     // r_c
  double accuracy_scale = 10.0;  // c
  double window = 0.125;         // w, half-width of the full-reward window
  double decay = 5.0;            // d, 1/m
  double time_penalty = 1.0;     // r_time per step
  double aim_x = 0.5;            // x_g on the goal line

  void validate() const;
  bool operator==(const RewardParams&) const = default;
};

struct EnvConfig {
  TableGeometry table;
  PhysicsParams physics;
  RewardParams reward;
  int max_episode_steps = 150;
  int grid_levels = 5;
  Vec2 home{0.5, 0.15};
  int rollout_max_steps = 400;

  void validate() const;
  bool operator==(const EnvConfig&) const = default;
};

enum class TerminalKind { none, strike, wall };

std::string_view to_string(TerminalKind kind);
TerminalKind terminal_kind_from_string(std::string_view s);

struct RewardBreakdown {
  double strike = 0.0;    // r_c
  double velocity = 0.0;  // r_v
  double accuracy = 0.0;  // r_d
  std::optional<double> x_reached;
  double v_projection = 0.0;

  double total() const { return strike + velocity + accuracy; }
};

struct StepOutcome {
  EnvState next_state;
  double reward = 0.0;
  bool terminal = false;   // Bellman-terminal: strike or wall
  bool truncated = false;  // step cap reached; the episode ends but bootstraps
  TerminalKind terminal_kind = TerminalKind::none;
  std::optional<RewardBreakdown> breakdown;

  bool episode_over() const { return terminal || truncated; }
};

// r_d as a function of the miss distance |x - x_g|.
double accuracy_reward(double miss_distance, const RewardParams& params);

// sign(V) * V^2.
double velocity_reward(double v_projection);

RewardBreakdown compute_terminal_reward(const BodyState& post_strike_puck,
                                        const RewardParams& params, const TableGeometry& geom,
                                        const PhysicsParams& physics, int rollout_max_steps);

// Normalized network input [m_x, m_Vx, m_y, m_Vy, p_x, p_Vx, p_y, p_Vy]:
// positions divided by the table extent, velocities by max_velocity.
Features flatten(const EnvState& state, const TableGeometry& geom, const PhysicsParams& physics);
EnvState unflatten(const Features& features, const TableGeometry& geom,
                   const PhysicsParams& physics, int step_count = 0);

// Same ordering as flatten, in physical units.
Features raw_features(const EnvState& state);

// Whether a strike outcome puts the puck inside the opponent goal mouth.
bool is_scored_goal(const RewardBreakdown& breakdown, const TableGeometry& geom);

class StrikingEnv {
 public:
  explicit StrikingEnv(EnvConfig config, std::uint64_t seed = 0);

  // Random placement over the agent half-court when no position is given.
  const EnvState& reset(std::optional<Vec2> puck_position = std::nullopt);

  StepOutcome step(int action_index);
  StepOutcome step_accel(Vec2 accel);

  const EnvState& state() const { return state_; }
  const EnvConfig& config() const { return config_; }
  const rl::ActionGrid& grid() const { return grid_; }
  bool done() const { return done_; }

  Features features() const { return flatten(state_, config_.table, config_.physics); }

  // Checks a fixed puck placement; throws std::invalid_argument when it
  // leaves the agent half-court or touches a wall.
  void validate_puck_position(Vec2 pos) const;

  void reseed(std::uint64_t seed) { rng_.seed(seed); }

 private:
  Vec2 sample_puck_position();

  EnvConfig config_;
  rl::ActionGrid grid_;
  std::mt19937_64 rng_;
  EnvState state_;
  bool done_ = true;
};

// One line per step of an episode, written as JSON lines.
struct TraceRecord {
  int step = 0;
  Features state{};  // physical units, pre-action
  int action = -1;
  Vec2 accel;
  double reward = 0.0;
  TerminalKind terminal_kind = TerminalKind::none;
  bool truncated = false;
};

void write_trace(std::ostream& os, const std::vector<TraceRecord>& records);
std::vector<TraceRecord> read_trace(std::istream& is);

}  // namespace airhockey::env
