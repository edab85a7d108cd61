#include "airhockey/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace airhockey::harness {

namespace fs = std::filesystem;

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return os;
}

std::uint64_t episode_seed(std::uint64_t seed, std::size_t condition, std::size_t episode) {
  const std::uint64_t base = rl::derive_seed(seed, rl::Stream::eval);
  return rl::derive_seed(base ^ (static_cast<std::uint64_t>(condition) << 40) ^ episode,
                         rl::Stream::env);
}

}  // namespace

std::vector<Condition> standard_conditions(const TrainConfig& cfg) {
  return {{"random", std::nullopt},
          {"left", cfg.fixed_left},
          {"middle", cfg.fixed_middle},
          {"right", cfg.fixed_right}};
}

const ConditionResult& EvalReport::at(const std::string& name) const {
  for (const auto& c : conditions)
    if (c.name == name) return c;
  throw std::out_of_range("no evaluation condition named " + name);
}

Policy greedy_policy(const QNetwork& net, const env::EnvConfig& env_cfg) {
  return [&net, env_cfg](const env::EnvState& s) {
    const auto f = env::flatten(s, env_cfg.table, env_cfg.physics);
    std::array<float, env::kFeatureCount> x;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<float>(f[i]);
    return nn::argmax<float>(net.forward(x));
  };
}

EpisodeResult run_episode(env::StrikingEnv& env, const Policy& policy, std::optional<Vec2> puck,
                          std::vector<env::TraceRecord>* trace) {
  EpisodeResult result;
  env.reset(puck);
  while (!env.done()) {
    const env::EnvState before = env.state();
    const int action = policy(before);
    const auto out = env.step(action);
    result.total_return += out.reward;
    ++result.steps;
    if (trace) {
      env::TraceRecord rec;
      rec.step = before.step_count;
      rec.state = env::raw_features(before);
      rec.action = action;
      rec.accel = env.grid()[static_cast<std::size_t>(action)];
      rec.reward = out.reward;
      rec.terminal_kind = out.terminal_kind;
      rec.truncated = out.truncated;
      trace->push_back(rec);
    }
    if (out.episode_over()) {
      result.terminal_kind = out.terminal_kind;
      result.scored = out.breakdown && env::is_scored_goal(*out.breakdown, env.config().table);
    }
  }
  return result;
}

EvalReport evaluate_policy(const Policy& policy, const TrainConfig& cfg,
                           std::span<const Condition> conditions, int episodes_per_condition,
                           std::uint64_t seed, bool parallel) {
  if (episodes_per_condition <= 0) throw std::invalid_argument("evaluate: episodes must be positive");
  {
    const env::StrikingEnv probe(cfg.env);
    for (const auto& c : conditions)
      if (c.puck) probe.validate_puck_position(*c.puck);
  }

  const std::size_t per = static_cast<std::size_t>(episodes_per_condition);
  const std::size_t total = conditions.size() * per;
  std::vector<EpisodeResult> results(total);

#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::size_t k = 0; k < total; ++k) {
    const std::size_t c = k / per;
    env::StrikingEnv env(cfg.env, episode_seed(seed, c, k % per));
    results[k] = run_episode(env, policy, conditions[c].puck);
  }

  EvalReport report;
  for (std::size_t c = 0; c < conditions.size(); ++c) {
    ConditionResult r;
    r.name = conditions[c].name;
    r.episodes = episodes_per_condition;
    for (std::size_t e = 0; e < per; ++e) {
      const auto& ep = results[c * per + e];
      r.mean_return += ep.total_return;
      r.mean_steps += ep.steps;
      r.strike_rate += ep.terminal_kind == env::TerminalKind::strike ? 1.0 : 0.0;
      r.goal_rate += ep.scored ? 1.0 : 0.0;
    }
    const double n = static_cast<double>(per);
    r.mean_return /= n;
    r.mean_steps /= n;
    r.strike_rate /= n;
    r.goal_rate /= n;
    report.conditions.push_back(r);
  }
  return report;
}

EvalReport evaluate(const QNetwork& net, const TrainConfig& cfg,
                    std::span<const Condition> conditions, int episodes_per_condition,
                    std::uint64_t seed, std::span<const float> probe_rows, bool parallel) {
  auto report = evaluate_policy(greedy_policy(net, cfg.env), cfg, conditions,
                                episodes_per_condition, seed, parallel);
  report.mean_max_q = rl::mean_max_q(net, probe_rows);
  return report;
}

void write_metrics_row(std::ostream& os, const rl::EpisodeMetrics& m) {
  os << m.episode << ',' << fmt_double(m.total_reward) << ',' << m.steps << ','
     << env::to_string(m.terminal_kind) << ',' << (m.guided ? 1 : 0) << ','
     << fmt_double(m.target_period) << ',' << fmt_double(m.mean_max_q) << ',' << m.updates << ','
     << fmt_double(m.mean_loss) << '\n';
}

void write_eval_rows(std::ostream& os, const EvalPoint& point) {
  for (const auto& c : point.report.conditions) {
    os << point.episode << ',' << c.name << ',' << c.episodes << ',' << fmt_double(c.mean_return)
       << ',' << fmt_double(c.strike_rate) << ',' << fmt_double(c.goal_rate) << ','
       << fmt_double(c.mean_steps) << ',' << fmt_double(point.report.mean_max_q) << '\n';
  }
}

namespace {

// Evaluation at a checkpoint during training: fixed conditions are
// deterministic, so a single greedy episode each suffices.
EvalReport periodic_eval(const QNetwork& net, const TrainConfig& cfg,
                         std::span<const float> probe_rows) {
  const auto conds = standard_conditions(cfg);
  EvalReport report;
  if (cfg.eval_random_episodes > 0) {
    const Condition random[] = {conds[0]};
    report = evaluate(net, cfg, random, cfg.eval_random_episodes, cfg.eval_seed, probe_rows);
  }
  const auto fixed = evaluate(net, cfg, std::span(conds).subspan(1), 1, cfg.eval_seed, probe_rows);
  for (const auto& c : fixed.conditions) report.conditions.push_back(c);
  report.mean_max_q = fixed.mean_max_q;
  return report;
}

}  // namespace

TrainingRun run_training(const TrainConfig& cfg, const std::optional<fs::path>& out_dir,
                         const RunOptions& options) {
  cfg.validate();
  std::ofstream metrics, evals;
  if (out_dir) {
    fs::create_directories(*out_dir);
    save_config(cfg, *out_dir / "config.json");
    metrics = open_out(*out_dir / "metrics.csv");
    evals = open_out(*out_dir / "eval.csv");
    metrics << kMetricsHeader << '\n';
    evals << kEvalHeader << '\n';
  }

  TrainingRun run;
  rl::GdqnTrainer trainer(cfg);
  rl::TrainObserver observer;
  observer.on_episode = [&](const rl::EpisodeMetrics& m) {
    run.episodes.push_back(m);
    if (out_dir) write_metrics_row(metrics, m);
  };

  try {
    for (int e = 0; e < cfg.episodes; ++e) {
      trainer.run_episode(observer);
      const int done = trainer.episodes_done();
      if (done % cfg.eval_every == 0 || done == cfg.episodes) {
        EvalPoint point{done, periodic_eval(trainer.online(), cfg, trainer.probe_rows())};
        if (out_dir) write_eval_rows(evals, point);
        if (options.log) {
          const auto& rnd = point.report.conditions.front();
          *options.log << cfg.label << " ep " << done << " return(" << rnd.name
                       << ")=" << fmt_double(rnd.mean_return)
                       << " strike=" << fmt_double(rnd.strike_rate)
                       << " goal=" << fmt_double(rnd.goal_rate)
                       << " middle=" << fmt_double(point.report.at("middle").mean_return)
                       << " C=" << fmt_double(trainer.schedule().period())
                       << " Q=" << fmt_double(point.report.mean_max_q) << std::endl;
        }
        run.evaluations.push_back(std::move(point));
      }
    }
  } catch (const rl::NumericalDivergence&) {
    if (out_dir) nn::save_checkpoint(trainer.online(), *out_dir / "diverged.bin");
    throw;
  }

  run.network = trainer.online();
  if (out_dir) {
    nn::save_checkpoint(run.network, *out_dir / "checkpoint.bin");
    if (!metrics || !evals) throw std::runtime_error("write failed under " + out_dir->string());
  }
  return run;
}

std::vector<env::TraceRecord> replay_episode(const QNetwork& net, const TrainConfig& cfg,
                                             std::optional<Vec2> puck,
                                             const std::optional<fs::path>& out_path) {
  env::StrikingEnv env(cfg.env, rl::derive_seed(cfg.eval_seed, rl::Stream::env));
  std::vector<env::TraceRecord> trace;
  run_episode(env, greedy_policy(net, cfg.env), puck, &trace);
  if (out_path) {
    auto os = open_out(*out_path);
    env::write_trace(os, trace);
  }
  return trace;
}

CurveSummary summarize_curve(std::span<const double> values, std::size_t window) {
  CurveSummary s;
  if (values.empty()) return s;
  window = std::clamp<std::size_t>(window, 1, values.size());
  s.window = window;
  double sum = 0.0;
  for (std::size_t k = 0; k < window; ++k) sum += values[k];
  s.peak_window_mean = sum / window;
  for (std::size_t k = window; k < values.size(); ++k) {
    sum += values[k] - values[k - window];
    s.peak_window_mean = std::max(s.peak_window_mean, sum / window);
  }
  double tail = 0.0;
  for (std::size_t k = values.size() - window; k < values.size(); ++k) tail += values[k];
  s.final_window_mean = tail / window;
  return s;
}

void write_sweep_configs(const fs::path& config_dir, bool desk) {
  fs::create_directories(config_dir);
  const char* names[] = {"ddqn200", "ddqn1000", "ddqn5000", "gdqn"};
  int k = 0;
  for (const char* name : names) {
    const auto cfg = preset(name, desk);
    save_config(cfg, config_dir / (std::to_string(k++) + "_" + name + ".json"));
  }
}

void run_sweep(const fs::path& config_dir, const fs::path& out_dir, const RunOptions& options) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(config_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  if (files.empty()) throw std::runtime_error("no *.json configs in " + config_dir.string());
  std::sort(files.begin(), files.end());

  fs::create_directories(out_dir);
  auto summary = open_out(out_dir / "summary.csv");
  summary << "label,episodes,peak_window_return,final_window_return,final_random_return,"
             "final_middle_strike,final_middle_goal\n";
  for (const auto& file : files) {
    const auto cfg = load_config(file);
    const auto run = run_training(cfg, out_dir / cfg.label, options);
    std::vector<double> curve;
    for (const auto& p : run.evaluations) curve.push_back(p.report.at("random").mean_return);
    const std::size_t window = std::max<std::size_t>(1, curve.size() / 10);
    const auto s = summarize_curve(curve, window);
    const auto& last = run.evaluations.back().report;
    summary << cfg.label << ',' << cfg.episodes << ',' << fmt_double(s.peak_window_mean) << ','
            << fmt_double(s.final_window_mean) << ',' << fmt_double(last.at("random").mean_return)
            << ',' << fmt_double(last.at("middle").strike_rate) << ','
            << fmt_double(last.at("middle").goal_rate) << '\n';
  }
}

void write_metrics_plot(const fs::path& run_dir, const fs::path& script) {
  auto os = open_out(script);
  const auto eval = (run_dir / "eval.csv").string();
  const auto metrics = (run_dir / "metrics.csv").string();
  os << "# gnuplot -p " << script.filename().string() << "\n"
     << "set datafile separator ','\n"
     << "set key autotitle columnhead\n"
     << "set multiplot layout 3,2 title 'evaluation returns and average value'\n";
  for (const char* cond : {"random", "left", "middle", "right"}) {
    os << "set title '" << cond << "'\n"
       << "plot '" << eval << "' using 1:(stringcolumn(2) eq '" << cond
       << "' ? $4 : 1/0) with linespoints title 'mean return'\n";
  }
  os << "set title 'average value (probe max-Q)'\n"
     << "plot '" << eval << "' using 1:(stringcolumn(2) eq 'middle' ? $8 : 1/0) with lines title 'mean max Q'\n"
     << "set title 'training episode return'\n"
     << "plot '" << metrics << "' using 1:2 with dots title 'episode return'\n"
     << "unset multiplot\n";
}

void write_trace_plot(const fs::path& trace, const fs::path& script) {
  // The trace is JSON lines; jq flattens it to columns for gnuplot.
  auto os = open_out(script);
  const auto t = trace.string();
  os << "# gnuplot -p " << script.filename().string() << "\n"
     << "data = \"< jq -r '[.step, .state[0], .state[1], .state[2], .state[3], .accel[0], .accel[1]] | @tsv' "
     << t << "\"\n"
     << "set multiplot layout 2,2 title 'greedy episode profiles'\n"
     << "set title 'position'\nplot data using 1:2 with steps title 'x', data using 1:4 with steps title 'y'\n"
     << "set title 'velocity'\nplot data using 1:3 with steps title 'vx', data using 1:5 with steps title 'vy'\n"
     << "set title 'control'\nplot data using 1:6 with steps title 'ax', data using 1:7 with steps title 'ay'\n"
     << "set title 'X-Y trajectory'\nset size ratio -1\nplot data using 2:4 with linespoints title 'mallet'\n"
     << "unset multiplot\n";
}

}  // namespace airhockey::harness
