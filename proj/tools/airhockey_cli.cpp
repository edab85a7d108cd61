// Command-line front end: train, eval, replay, sweep, config, plot.

#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "airhockey/config.hpp"
#include "airhockey/harness.hpp"

namespace fs = std::filesystem;
using namespace airhockey;

namespace {

Vec2 parse_point(const std::string& text) {
  std::istringstream ss(text);
  Vec2 p;
  char comma = 0;
  if (!(ss >> p.x >> comma >> p.y) || comma != ',')
    throw CLI::ValidationError("--puck", "expected x,y but got '" + text + "'");
  return p;
}

// Config given explicitly, else config.json beside the checkpoint, else defaults.
TrainConfig config_for_checkpoint(const std::string& config_path, const fs::path& checkpoint) {
  if (!config_path.empty()) return load_config(config_path);
  const auto sibling = checkpoint.parent_path() / "config.json";
  if (fs::exists(sibling)) return load_config(sibling);
  return default_config();
}

void print_report(const harness::EvalReport& report, bool as_json) {
  if (as_json) {
    nlohmann::json j;
    for (const auto& c : report.conditions) {
      j["conditions"].push_back({{"name", c.name},
                                 {"episodes", c.episodes},
                                 {"mean_return", c.mean_return},
                                 {"strike_rate", c.strike_rate},
                                 {"goal_rate", c.goal_rate},
                                 {"mean_steps", c.mean_steps}});
    }
    j["mean_max_q"] = report.mean_max_q;
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::cout << std::left << std::setw(10) << "condition" << std::right << std::setw(10) << "episodes"
            << std::setw(14) << "mean_return" << std::setw(10) << "strike" << std::setw(10)
            << "goal" << std::setw(10) << "steps" << '\n';
  for (const auto& c : report.conditions) {
    std::cout << std::left << std::setw(10) << c.name << std::right << std::setw(10) << c.episodes
              << std::setw(14) << std::fixed << std::setprecision(3) << c.mean_return
              << std::setw(10) << c.strike_rate << std::setw(10) << c.goal_rate << std::setw(10)
              << c.mean_steps << '\n';
  }
  std::cout << "average value (probe mean max-Q): " << report.mean_max_q << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Air-hockey striking simulator and guided Double-DQN trainer"};
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "Train a Q-network");
  std::string train_config, train_preset = "gdqn", train_out = "run";
  std::optional<std::uint64_t> train_seed;
  std::optional<int> train_episodes;
  bool train_desk = false, quiet = false;
  train->add_option("--config", train_config, "Config file (JSON)");
  train->add_option("--preset", train_preset, "Preset used when no --config is given")
      ->check(CLI::IsMember(preset_names()));
  train->add_flag("--desk", train_desk, "Use the desk-scale episode budget with --preset");
  train->add_option("--seed", train_seed, "Run seed (overrides the config)");
  train->add_option("--episodes", train_episodes, "Episode budget (overrides the config)");
  train->add_option("--out", train_out, "Output directory")->required();
  train->add_flag("-q,--quiet", quiet, "No progress lines");

  // eval
  auto* eval = app.add_subcommand("eval", "Greedy evaluation of a checkpoint");
  std::string eval_ckpt, eval_config;
  int eval_episodes = 100;
  std::uint64_t eval_seed = 7;
  bool eval_json = false;
  eval->add_option("--checkpoint", eval_ckpt, "Checkpoint file")->required()->check(CLI::ExistingFile);
  eval->add_option("--episodes", eval_episodes, "Episodes per condition")->check(CLI::PositiveNumber);
  eval->add_option("--config", eval_config, "Config (default: config.json next to the checkpoint)");
  eval->add_option("--seed", eval_seed, "Evaluation seed");
  eval->add_flag("--json", eval_json, "Print the report as JSON");

  // replay
  auto* replay = app.add_subcommand("replay", "Write a greedy episode trace (JSON lines)");
  std::string replay_ckpt, replay_config, replay_puck, replay_out = "trace.jsonl";
  replay->add_option("--checkpoint", replay_ckpt, "Checkpoint file")->required()->check(CLI::ExistingFile);
  replay->add_option("--puck", replay_puck, "Puck position x,y (default: random)");
  replay->add_option("--config", replay_config, "Config (default: config.json next to the checkpoint)");
  replay->add_option("--out", replay_out, "Trace output path");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run every config in a directory");
  std::string sweep_configs, sweep_out = "sweep";
  bool sweep_init = false, sweep_desk = false;
  sweep->add_option("--configs", sweep_configs, "Directory of *.json configs")->required();
  sweep->add_option("--out", sweep_out, "Output directory");
  sweep->add_flag("--init", sweep_init, "Write the DDQN 200/1000/5000 and GDQN configs first");
  sweep->add_flag("--desk", sweep_desk, "With --init: desk-scale episode budget");

  // config
  auto* config = app.add_subcommand("config", "Write a preset config file");
  std::string config_preset = "gdqn", config_out;
  bool config_desk = false;
  config->add_option("--preset", config_preset, "Preset name")->check(CLI::IsMember(preset_names()));
  config->add_flag("--desk", config_desk, "Desk-scale episode budget");
  config->add_option("--out", config_out, "Output file (default: stdout)");

  // plot
  auto* plot = app.add_subcommand("plot", "Write a gnuplot script for a run or a trace");
  std::string plot_run, plot_trace, plot_out = "plot.gp";
  plot->add_option("--run", plot_run, "Training output directory");
  plot->add_option("--trace", plot_trace, "Replay trace file");
  plot->add_option("--out", plot_out, "Script path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      TrainConfig cfg = train_config.empty() ? preset(train_preset, train_desk) : load_config(train_config);
      if (train_seed) cfg.seed = *train_seed;
      if (train_episodes) cfg.episodes = *train_episodes;
      if (is_plain_ddqn(cfg) && cfg.label.rfind("DDQN", 0) != 0) cfg.label = "DDQN";
      harness::RunOptions opts;
      if (!quiet) opts.log = &std::cerr;
      const auto run = harness::run_training(cfg, fs::path(train_out), opts);
      print_report(run.evaluations.back().report, false);
    } else if (*eval) {
      const auto cfg = config_for_checkpoint(eval_config, eval_ckpt);
      const auto net = nn::load_checkpoint<float>(fs::path(eval_ckpt));
      const auto probe = rl::make_probe_set(cfg, rl::derive_seed(cfg.seed, rl::Stream::probe));
      const auto conds = harness::standard_conditions(cfg);
      print_report(harness::evaluate(net, cfg, conds, eval_episodes, eval_seed, probe), eval_json);
    } else if (*replay) {
      const auto cfg = config_for_checkpoint(replay_config, replay_ckpt);
      const auto net = nn::load_checkpoint<float>(fs::path(replay_ckpt));
      std::optional<Vec2> puck;
      if (!replay_puck.empty()) puck = parse_point(replay_puck);
      const auto trace = harness::replay_episode(net, cfg, puck, fs::path(replay_out));
      std::cout << "wrote " << trace.size() << " steps to " << replay_out << " (terminal: "
                << env::to_string(trace.back().terminal_kind) << ")\n";
    } else if (*sweep) {
      if (sweep_init) harness::write_sweep_configs(sweep_configs, sweep_desk);
      harness::RunOptions opts;
      opts.log = &std::cerr;
      harness::run_sweep(sweep_configs, sweep_out, opts);
      std::cout << "summary: " << (fs::path(sweep_out) / "summary.csv").string() << '\n';
    } else if (*config) {
      const auto cfg = preset(config_preset, config_desk);
      if (config_out.empty()) {
        std::cout << to_json(cfg);
      } else {
        save_config(cfg, config_out);
      }
    } else if (*plot) {
      if (plot_run.empty() == plot_trace.empty())
        throw CLI::ValidationError("plot", "give exactly one of --run or --trace");
      if (!plot_run.empty()) {
        harness::write_metrics_plot(plot_run, plot_out);
      } else {
        harness::write_trace_plot(plot_trace, plot_out);
      }
      std::cout << "run: gnuplot -p " << plot_out << '\n';
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
