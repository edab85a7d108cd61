#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "airhockey/config.hpp"
#include "airhockey/trainer.hpp"

namespace airhockey::harness {

using nn::QNetwork;

// An evaluation start condition; a missing position means a random puck.
struct Condition {
  std::string name;
  std::optional<Vec2> puck;
};

// random, left, middle, right
std::vector<Condition> standard_conditions(const TrainConfig& cfg);

struct ConditionResult {
  std::string name;
  int episodes = 0;
  double mean_return = 0.0;
  double strike_rate = 0.0;  // any mallet-puck contact
  double goal_rate = 0.0;    // strike that crosses inside the goal mouth
  double mean_steps = 0.0;
};

struct EvalReport {
  std::vector<ConditionResult> conditions;
  double mean_max_q = 0.0;

  const ConditionResult& at(const std::string& name) const;
};

// Maps a state to an action index. Must be safe to call concurrently.
using Policy = std::function<int(const env::EnvState&)>;

Policy greedy_policy(const QNetwork& net, const env::EnvConfig& env_cfg);

struct EpisodeResult {
  double total_return = 0.0;
  int steps = 0;
  env::TerminalKind terminal_kind = env::TerminalKind::none;
  bool scored = false;
};

EpisodeResult run_episode(env::StrikingEnv& env, const Policy& policy,
                          std::optional<Vec2> puck,
                          std::vector<env::TraceRecord>* trace = nullptr);

// Rolls out `policy` for every condition. Episode k of condition c uses its
// own environment seeded from (seed, c, k), so the result does not depend on
// how episodes are spread across threads.
EvalReport evaluate_policy(const Policy& policy, const TrainConfig& cfg,
                           std::span<const Condition> conditions, int episodes_per_condition,
                           std::uint64_t seed, bool parallel = true);

// Greedy (epsilon = 0, no noise) evaluation of a network, plus the probe-set
// mean max-Q.
EvalReport evaluate(const QNetwork& net, const TrainConfig& cfg,
                    std::span<const Condition> conditions, int episodes_per_condition,
                    std::uint64_t seed, std::span<const float> probe_rows, bool parallel = true);

struct EvalPoint {
  int episode = 0;  // episodes trained when the evaluation ran
  EvalReport report;
};

struct TrainingRun {
  QNetwork network;
  std::vector<rl::EpisodeMetrics> episodes;
  std::vector<EvalPoint> evaluations;
};

struct RunOptions {
  std::ostream* log = nullptr;  // progress lines when set
};

// Trains, evaluating every cfg.eval_every episodes. When out_dir is given it
// receives config.json, metrics.csv, eval.csv and checkpoint.bin. A divergence
// writes diverged.bin there before the error propagates.
TrainingRun run_training(const TrainConfig& cfg, const std::optional<std::filesystem::path>& out_dir,
                         const RunOptions& options = {});

// CSV writers; the header rows are the documented format.
inline constexpr const char* kMetricsHeader =
    "episode,total_reward,steps,terminal_kind,guided,target_period,mean_max_q,updates,mean_loss";
inline constexpr const char* kEvalHeader =
    "episode,condition,episodes,mean_return,strike_rate,goal_rate,mean_steps,mean_max_q";
void write_metrics_row(std::ostream& os, const rl::EpisodeMetrics& m);
void write_eval_rows(std::ostream& os, const EvalPoint& point);

// One greedy episode written as a JSON-lines trace.
std::vector<env::TraceRecord> replay_episode(const QNetwork& net, const TrainConfig& cfg,
                                             std::optional<Vec2> puck,
                                             const std::optional<std::filesystem::path>& out_path);

// Rolling-window view of an evaluation return curve.
struct CurveSummary {
  double peak_window_mean = 0.0;
  double final_window_mean = 0.0;
  std::size_t window = 0;
};
CurveSummary summarize_curve(std::span<const double> values, std::size_t window);

// Runs every *.json config in `config_dir` (sorted by file name) into
// out_dir/<label>/ and writes out_dir/summary.csv.
void run_sweep(const std::filesystem::path& config_dir, const std::filesystem::path& out_dir,
               const RunOptions& options = {});

// Writes the four standard sweep configs (DDQN 200/1000/5000 and GDQN).
void write_sweep_configs(const std::filesystem::path& config_dir, bool desk);

// gnuplot scripts for a run directory or a replay trace.
void write_metrics_plot(const std::filesystem::path& run_dir, const std::filesystem::path& script);
void write_trace_plot(const std::filesystem::path& trace, const std::filesystem::path& script);

}  // namespace airhockey::harness
