// moseac command-line front end: train / eval / compare / env-trace / plot.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "moseac/moseac.hpp"

namespace fs = std::filesystem;
using namespace moseac;

namespace {

Config load_config(const std::string& config_path) {
  if (config_path.empty()) {
    Config cfg;
    cfg.finalize();
    return cfg;
  }
  return parse_config(config_path);
}

std::string label_for(const fs::path& csv) {
  const fs::path parent = csv.parent_path().filename();
  if (!parent.empty() && parent.string() != ".") return parent.string();
  return csv.stem().string();
}

int cmd_train(const std::string& config_path, long seed, const std::string& out,
              const std::string& variant, double fixed_dt, long total_steps) {
  Config cfg = load_config(config_path);
  if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
  if (!variant.empty()) cfg.variant = variant;
  if (fixed_dt > 0) cfg.fixed_dt = fixed_dt;
  if (total_steps > 0) cfg.total_steps = total_steps;
  if (cfg.warmup < 0 || !config_path.empty()) cfg.finalize();
  cfg.validate();
  log_info("training variant=" + cfg.variant + " seed=" + std::to_string(cfg.seed) +
           " steps=" + std::to_string(cfg.total_steps) + " -> " + out);
  const TrainResult res = train(cfg, out);
  log_info("done: " + std::to_string(res.episodes) + " episodes, final checkpoint " +
           res.final_checkpoint.string());
  return 0;
}

int cmd_eval(const std::string& checkpoint, int tasks, long seed, const std::string& out,
             int threads) {
  const Checkpoint ck = checkpoint_load(checkpoint);
  const auto records =
      evaluate(ck, tasks, seed >= 0 ? static_cast<std::uint64_t>(seed) : 0, threads);
  fs::create_directories(out);
  const fs::path csv = fs::path(out) / "eval.csv";
  write_eval_csv(records, csv);
  long goals = 0, crashes = 0;
  double steps_sum = 0, time_sum = 0;
  for (const auto& r : records) {
    goals += r.outcome == Outcome::goal;
    crashes += r.outcome == Outcome::crash;
    steps_sum += static_cast<double>(r.energy);
    time_sum += r.time;
  }
  std::printf("tasks %zu  goal %.1f%%  crash %.1f%%  mean steps %.3f  mean time %.3f s\n",
              records.size(), 100.0 * goals / records.size(),
              100.0 * crashes / records.size(), steps_sum / records.size(),
              time_sum / records.size());
  std::printf("wrote %s\n", csv.string().c_str());
  return 0;
}

int cmd_compare(const std::string& a_csv, const std::string& b_csv, const std::string& out,
                bool two_sided) {
  const auto a = read_eval_csv(a_csv);
  const auto b = read_eval_csv(b_csv);
  compare_report(a, b, label_for(a_csv), label_for(b_csv), out, two_sided);
  std::printf("wrote %s/{paired.csv,report.md,energy_lines.svg,summary_box.svg}\n",
              out.c_str());
  return 0;
}

int cmd_env_trace(long seed, int steps, const std::string& config_path,
                  const std::string& script, const std::string& out) {
  const Config cfg = load_config(config_path);
  const EnvConfig env_cfg = cfg.env_config();
  EnvState env = env_reset(env_cfg, seed >= 0 ? static_cast<std::uint64_t>(seed) : 0);
  Rng rng(derive_seed(seed >= 0 ? seed : 0, 0xACE));

  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out.empty()) {
    file.open(out, std::ios::trunc);
    if (!file) throw io_error("cannot write trace file: " + out);
    os = &file;
  }
  *os << "step,D,Fx,Fy,x,y,vx,vy,R_t,event\n";
  for (int i = 1; i <= steps; ++i) {
    EnvAction a;
    if (script == "random") {
      a.duration = rng.uniform(env_cfg.duration_min, env_cfg.duration_max);
      a.force = {rng.uniform(-env_cfg.force_limit, env_cfg.force_limit),
                 rng.uniform(-env_cfg.force_limit, env_cfg.force_limit)};
    } else {  // goalward: diagonal kick to beat static friction, then steer
      const double dx = env.goal_pos[0] - env.agent_pos[0];
      const double dy = env.goal_pos[1] - env.agent_pos[1];
      const double dist = std::hypot(dx, dy);
      const double speed = vec_norm(env.agent_vel);
      a.duration = 0.1;
      const double fl = env_cfg.force_limit;
      if (speed == 0.0) {
        // per-axis forces cap at 100 N but static friction is 117.7 N, so
        // only a diagonal push can start the agent moving
        a.force = {dx >= 0 ? fl : -fl, dy >= 0 ? fl : -fl};
      } else if (dist < 0.3 && speed > 0.5) {
        a.force = {-fl * env.agent_vel[0] / speed, -fl * env.agent_vel[1] / speed};
      } else if (dist > 1e-9) {
        a.force = {fl * dx / dist, fl * dy / dist};
      }
    }
    const StepOutcome outp = env_step(env, a, env_cfg);
    *os << i << ',' << fmt_double(a.duration) << ',' << fmt_double(a.force[0]) << ','
        << fmt_double(a.force[1]) << ',' << fmt_double(env.agent_pos[0]) << ','
        << fmt_double(env.agent_pos[1]) << ',' << fmt_double(env.agent_vel[0]) << ','
        << fmt_double(env.agent_vel[1]) << ',' << fmt_double(outp.task_reward) << ','
        << event_name(outp.event) << "\n";
    if (outp.terminated || outp.truncated) break;
  }
  return 0;
}

int cmd_plot(const std::vector<std::string>& csvs, const std::string& out, int window,
             const std::vector<std::string>& labels_in) {
  std::vector<fs::path> paths(csvs.begin(), csvs.end());
  std::vector<std::string> labels = labels_in;
  if (labels.empty()) {
    for (const auto& p : paths) labels.push_back(label_for(p));
  }
  plot_curves(paths, labels, out, window);
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MOSEAC variable-time-step RL laboratory"};
  app.require_subcommand(1);

  std::string config_path, out, variant, checkpoint, script = "goalward";
  std::string a_csv, b_csv;
  std::vector<std::string> plot_csvs, plot_labels;
  long seed = -1, total_steps = -1;
  double fixed_dt = -1;
  int tasks = 300, threads = 0, trace_steps = 500, window = 100;
  bool two_sided = false;

  auto* t = app.add_subcommand("train", "train a policy");
  t->add_option("--config", config_path, "config file (key = value lines)");
  t->add_option("--seed", seed, "override the config seed");
  t->add_option("--out", out, "run directory")->required();
  t->add_option("--variant", variant, "moseac | seac | sac_fixed");
  t->add_option("--fixed-dt", fixed_dt, "control period for sac_fixed, seconds");
  t->add_option("--total-steps", total_steps, "override total environment steps");

  auto* e = app.add_subcommand("eval", "evaluate a checkpoint on seeded tasks");
  e->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
  e->add_option("--tasks", tasks, "number of tasks (default 300)");
  e->add_option("--seed", seed, "base task seed");
  e->add_option("--out", out, "output directory")->required();
  e->add_option("--threads", threads, "worker threads (0 = hardware)");

  auto* c = app.add_subcommand("compare", "paired comparison of two eval CSVs");
  c->add_option("a_csv", a_csv, "first eval.csv")->required();
  c->add_option("b_csv", b_csv, "second eval.csv")->required();
  c->add_option("--out", out, "report directory")->required();
  c->add_flag("--two-sided", two_sided, "report two-sided p instead of one-sided");

  auto* v = app.add_subcommand("env-trace", "dump one scripted episode as CSV");
  v->add_option("--seed", seed, "episode seed");
  v->add_option("--steps", trace_steps, "max decision steps");
  v->add_option("--config", config_path, "config file for environment overrides");
  v->add_option("--script", script, "goalward | random");
  v->add_option("--out", out, "output file (default stdout)");

  auto* p = app.add_subcommand("plot", "render training curves from metrics CSVs");
  p->add_option("csv", plot_csvs, "metrics.csv files")->required()->expected(-1);
  p->add_option("--out", out, "output SVG")->required();
  p->add_option("--window", window, "moving-average window (episodes)");
  p->add_option("--labels", plot_labels, "one label per CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& help) {
    return app.exit(help);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return 2;
  }

  try {
    if (t->parsed()) return cmd_train(config_path, seed, out, variant, fixed_dt, total_steps);
    if (e->parsed()) return cmd_eval(checkpoint, tasks, seed, out, threads);
    if (c->parsed()) return cmd_compare(a_csv, b_csv, out, two_sided);
    if (v->parsed()) return cmd_env_trace(seed, trace_steps, config_path, script, out);
    if (p->parsed()) return cmd_plot(plot_csvs, out, window, plot_labels);
  } catch (const std::exception& ex) {
    log_error(ex.what());
    return 1;
  }
  return 2;
}
