#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "moseac/checkpoint.hpp"
#include "moseac/env.hpp"
#include "moseac/errors.hpp"
#include "moseac/num.hpp"
#include "moseac/sac.hpp"
#include "moseac/stats.hpp"
#include "moseac/svg.hpp"
#include "moseac/train.hpp"

namespace moseac {

enum class Outcome { goal, crash, timeout };

inline const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::goal: return "goal";
    case Outcome::crash: return "crash";
    default: return "timeout";
  }
}

inline Outcome outcome_from_name(const std::string& s) {
  if (s == "goal") return Outcome::goal;
  if (s == "crash") return Outcome::crash;
  if (s == "timeout") return Outcome::timeout;
  throw parse_error("unknown outcome '" + s + "'");
}

// One evaluation task: energy is the decision-step count, time the simulated
// seconds, ret the composed return under the checkpoint's reward settings.
struct EvalRecord {
  std::uint64_t task_seed = 0;
  Outcome outcome = Outcome::timeout;
  long energy = 0;
  double time = 0.0;
  double ret = 0.0;
};

namespace detail {

inline EvalRecord run_eval_task(const Checkpoint& ckpt, const SacConfig& sac,
                                const EnvConfig& env_cfg, const RewardParams& params,
                                std::uint64_t task_seed) {
  EvalRecord rec;
  rec.task_seed = task_seed;
  EnvState env = env_reset(env_cfg, task_seed);
  Observation obs = observe(env, env_cfg);
  for (;;) {
    const EnvAction action = policy_mean_action(ckpt.nets, sac, obs).env_action;
    const StepOutcome out = env_step(env, action, env_cfg);
    rec.energy += 1;
    rec.time += out.sim_time_elapsed;
    rec.ret += composed_training_reward(ckpt.config.variant, out.task_reward, action.duration,
                                        params);
    obs = out.observation;
    if (out.terminated) {
      rec.outcome = out.event == Event::goal ? Outcome::goal : Outcome::crash;
      return rec;
    }
    if (out.truncated) {
      rec.outcome = Outcome::timeout;
      return rec;
    }
  }
}

}  // namespace detail

// Deterministic-policy rollouts on tasks seeded base_seed + i. Records come
// back in task order regardless of how many worker threads ran them, so two
// checkpoints evaluated with the same base seed see identical task layouts
// row by row.
inline std::vector<EvalRecord> evaluate(const Checkpoint& ckpt, int n_tasks,
                                        std::uint64_t base_seed, int n_threads = 0) {
  if (n_tasks < 1) throw config_error("evaluate: n_tasks must be >= 1");
  const SacConfig sac = ckpt.config.sac_config();
  const EnvConfig env_cfg = ckpt.config.env_config();
  const RewardParams params(ckpt.alpha_m, ckpt.config.psi, ckpt.config.min_time,
                            ckpt.config.max_time, ckpt.config.alpha_m_ceiling);
  if (n_threads <= 0) {
    n_threads = static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads <= 0) n_threads = 1;
  }
  n_threads = std::min(n_threads, n_tasks);

  std::vector<EvalRecord> records(n_tasks);
  if (n_threads == 1) {
    for (int i = 0; i < n_tasks; ++i) {
      records[i] = detail::run_eval_task(ckpt, sac, env_cfg, params, base_seed + i);
    }
    return records;
  }
  std::vector<std::thread> workers;
  workers.reserve(n_threads);
  for (int w = 0; w < n_threads; ++w) {
    workers.emplace_back([&, w] {
      for (int i = w; i < n_tasks; i += n_threads) {
        records[i] = detail::run_eval_task(ckpt, sac, env_cfg, params, base_seed + i);
      }
    });
  }
  for (auto& t : workers) t.join();
  return records;
}

inline void write_eval_csv(const std::vector<EvalRecord>& records,
                           const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot write eval CSV: " + path.string());
  out << "task_seed,outcome,energy,time,return\n";
  for (const auto& r : records) {
    out << r.task_seed << ',' << outcome_name(r.outcome) << ',' << r.energy << ','
        << fmt_double(r.time) << ',' << fmt_double(r.ret) << "\n";
  }
  if (!out) throw io_error("short write on eval CSV: " + path.string());
}

inline std::vector<EvalRecord> read_eval_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot read eval CSV: " + path.string());
  std::vector<EvalRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "task_seed,outcome,energy,time,return") {
        throw parse_error(path.string() + ":1: unexpected eval CSV header");
      }
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5) {
      throw parse_error(path.string() + ":" + std::to_string(line_no) + ": expected 5 cells");
    }
    EvalRecord r;
    r.task_seed = static_cast<std::uint64_t>(parse_long(cells[0]));
    r.outcome = outcome_from_name(cells[1]);
    r.energy = parse_long(cells[2]);
    r.time = parse_double(cells[3]);
    r.ret = parse_double(cells[4]);
    records.push_back(r);
  }
  return records;
}

namespace detail {

inline std::string fmt3(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

inline std::string paired_test_row(const std::string& label, std::span<const double> a,
                                   std::span<const double> b, bool two_sided) {
  try {
    const PairedResult r = wilcoxon_signed_rank(a, b);
    const double p = two_sided ? r.p_two_sided() : r.p;
    return "| " + label + " | " + fmt3(r.w_statistic) + " | " + fmt3(r.z) + " | " + fmt3(p) +
           " |\n";
  } catch (const degenerate_data_error&) {
    return "| " + label + " | n/a | n/a | n/a (all differences zero) |\n";
  } catch (const insufficient_data_error&) {
    return "| " + label + " | n/a | n/a | n/a (too few non-zero differences) |\n";
  }
}

inline std::string normality_row(const std::string& label, std::span<const double> d) {
  try {
    const ShapiroWilkResult r = shapiro_wilk(d);
    return "| " + label + " | " + fmt3(r.w) + " | " +
           (r.p < 0.001 ? std::string("< .001") : fmt3(r.p)) + " |\n";
  } catch (const degenerate_data_error&) {
    return "| " + label + " | n/a | n/a (constant differences) |\n";
  }
}

inline std::string descriptives_row(const std::string& label, std::span<const double> xs) {
  const Descriptives d = descriptives(xs);
  return "| " + label + " | " + std::to_string(d.n) + " | " + fmt3(d.mean) + " | " +
         fmt3(d.sd) + " | " + fmt3(d.se) + " | " + (d.cov ? fmt3(*d.cov) : "n/a") + " |\n";
}

}  // namespace detail

// Paired comparison of two evaluation runs sharing task seeds: emits the
// paired CSV, a markdown report with the signed-rank, normality and
// descriptives tables (energy and time), and SVG summary charts.
inline void compare_report(const std::vector<EvalRecord>& a, const std::vector<EvalRecord>& b,
                           const std::string& label_a, const std::string& label_b,
                           const std::filesystem::path& out_dir, bool two_sided = false) {
  if (a.size() != b.size()) {
    throw pairing_error("compare_report: runs have different task counts (" +
                        std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw insufficient_data_error("compare_report: no records");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].task_seed != b[i].task_seed) {
      throw pairing_error("compare_report: task seed mismatch at row " + std::to_string(i) +
                          " (" + std::to_string(a[i].task_seed) + " vs " +
                          std::to_string(b[i].task_seed) + ")");
    }
  }
  std::filesystem::create_directories(out_dir);

  std::vector<double> ea, eb, ta, tb, de, dt;
  ea.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    ea.push_back(static_cast<double>(a[i].energy));
    eb.push_back(static_cast<double>(b[i].energy));
    ta.push_back(a[i].time);
    tb.push_back(b[i].time);
    de.push_back(static_cast<double>(a[i].energy - b[i].energy));
    dt.push_back(a[i].time - b[i].time);
  }

  {
    std::ofstream csv(out_dir / "paired.csv", std::ios::trunc);
    if (!csv) throw io_error("cannot write paired.csv in " + out_dir.string());
    csv << "task_seed,a_energy,b_energy,a_time,b_time,a_outcome,b_outcome\n";
    for (std::size_t i = 0; i < a.size(); ++i) {
      csv << a[i].task_seed << ',' << a[i].energy << ',' << b[i].energy << ','
          << fmt_double(a[i].time) << ',' << fmt_double(b[i].time) << ','
          << outcome_name(a[i].outcome) << ',' << outcome_name(b[i].outcome) << "\n";
    }
  }

  std::string md;
  md += "# Paired evaluation: " + label_a + " vs " + label_b + "\n\n";
  md += std::to_string(a.size()) + " shared-seed tasks; energy is the decision-step count, "
        "time the simulated seconds.\n\n";
  md += "## Paired signed-rank test\n\n";
  md += "| Measure | W | z | p |\n|---|---|---|---|\n";
  md += detail::paired_test_row(label_a + " energy - " + label_b + " energy", ea, eb,
                                two_sided);
  md += detail::paired_test_row(label_a + " time - " + label_b + " time", ta, tb, two_sided);
  md += "\n## Test of normality (Shapiro-Wilk)\n\n";
  md += "| Difference | W | p |\n|---|---|---|\n";
  md += detail::normality_row(label_a + " energy - " + label_b + " energy", de);
  md += detail::normality_row(label_a + " time - " + label_b + " time", dt);
  md += "\n## Descriptives\n\n";
  md += "| Series | N | Mean | SD | SE | Coefficient of variation |\n";
  md += "|---|---|---|---|---|---|\n";
  md += detail::descriptives_row(label_a + " energy", ea);
  md += detail::descriptives_row(label_b + " energy", eb);
  md += detail::descriptives_row(label_a + " time", ta);
  md += detail::descriptives_row(label_b + " time", tb);
  md += "\nZero differences are dropped before ranking (classic signed-rank). Reported p is " +
        std::string(two_sided ? "two-sided" : "one-sided for the observed direction") + ".\n";
  {
    std::ofstream rep(out_dir / "report.md", std::ios::trunc);
    if (!rep) throw io_error("cannot write report.md in " + out_dir.string());
    rep << md;
  }

  // per-task energy overlay + box summaries
  std::vector<double> idx(a.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<double>(i);
  std::vector<Series> energy_series{{label_a, idx, ea}, {label_b, idx, eb}};
  {
    std::ofstream svg(out_dir / "energy_lines.svg", std::ios::trunc);
    svg << render_line_chart("Per-task energy (steps)", "task", "steps", energy_series);
  }
  {
    std::ofstream svg(out_dir / "summary_box.svg", std::ios::trunc);
    std::vector<BoxStats> boxes{box_stats(label_a + " energy", ea),
                                box_stats(label_b + " energy", eb),
                                box_stats(label_a + " time", ta),
                                box_stats(label_b + " time", tb)};
    svg << render_box_chart("Energy / time summary", boxes);
  }
}

}  // namespace moseac
