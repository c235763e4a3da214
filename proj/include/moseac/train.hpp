#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "moseac/checkpoint.hpp"
#include "moseac/config.hpp"
#include "moseac/env.hpp"
#include "moseac/errors.hpp"
#include "moseac/log.hpp"
#include "moseac/replay.hpp"
#include "moseac/reward.hpp"
#include "moseac/sac.hpp"

namespace moseac {

// One metrics.csv line, appended at every episode end.
struct MetricsRow {
  long episode = 0;
  long global_step = 0;
  double ep_return = 0.0;
  long ep_steps = 0;
  double ep_sim_time = 0.0;
  double alpha_m = 0.0;
  double alpha_eps = 0.0;
  double k_r = std::numeric_limits<double>::quiet_NaN();
  double actor_loss = std::numeric_limits<double>::quiet_NaN();
  double critic_loss = std::numeric_limits<double>::quiet_NaN();
  double temperature = 0.0;
};

inline const char* metrics_csv_header() {
  return "episode,global_step,ep_return,ep_steps,ep_sim_time,alpha_m,alpha_eps,k_R,"
         "actor_loss,critic_loss,temperature";
}

inline std::string metrics_csv_line(const MetricsRow& r) {
  std::string s;
  s += std::to_string(r.episode);
  s += ',';
  s += std::to_string(r.global_step);
  s += ',';
  s += fmt_double(r.ep_return);
  s += ',';
  s += std::to_string(r.ep_steps);
  s += ',';
  s += fmt_double(r.ep_sim_time);
  s += ',';
  s += fmt_double(r.alpha_m);
  s += ',';
  s += fmt_double(r.alpha_eps);
  s += ',';
  s += fmt_double(r.k_r);
  s += ',';
  s += fmt_double(r.actor_loss);
  s += ',';
  s += fmt_double(r.critic_loss);
  s += ',';
  s += fmt_double(r.temperature);
  return s;
}

struct TrainResult {
  long episodes = 0;
  long steps = 0;
  std::filesystem::path run_dir;
  std::filesystem::path final_checkpoint;
};

namespace detail {

// Variant-specific reward composition applied at collection time. The SEAC
// baseline combines the three cost terms linearly with fixed weights; the
// fixed-rate SAC baseline trains on the raw task reward.
inline double composed_training_reward(const std::string& variant, double task_reward,
                                       double duration, const RewardParams& params) {
  if (variant == "moseac") return compose_reward(task_reward, duration, params);
  if (variant == "seac") {
    const double span = params.duration_max() - params.duration_min();
    return 1.0 * task_reward - 0.1 - 0.1 * (duration - params.duration_min()) / span;
  }
  return task_reward;  // sac_fixed
}

inline EnvAction warmup_action(const SacConfig& sac, Rng& rng) {
  EnvAction a;
  if (sac.action_dim == 3) {
    a.duration = rng.uniform(sac.duration_min, sac.duration_max);
  } else {
    a.duration = sac.fixed_duration;
  }
  a.force = {rng.uniform(-sac.force_limit, sac.force_limit),
             rng.uniform(-sac.force_limit, sac.force_limit)};
  return a;
}

}  // namespace detail

// Full training loop: warmup with uniform random actions, then one gradient
// cycle (critics, actor, temperature, target blend) per environment step, a
// metrics row per episode, and a reward-adaptation check every k_update
// post-warmup episodes. Deterministic for a fixed config: all randomness
// flows from derived streams of config.seed.
inline TrainResult train(const Config& cfg_in, const std::filesystem::path& out_dir) {
  Config cfg = cfg_in;
  cfg.finalize();
  const EnvConfig env_cfg = cfg.env_config();
  const SacConfig sac = cfg.sac_config();
  RewardParams params = cfg.reward_params();
  const bool adaptive = cfg.variant == "moseac";

  std::filesystem::create_directories(out_dir / "checkpoints");
  {
    std::ofstream snap(out_dir / "config.txt", std::ios::trunc);
    if (!snap) throw io_error("cannot write config snapshot in " + out_dir.string());
    snap << serialize_config(cfg);
  }
  std::ofstream metrics(out_dir / "metrics.csv", std::ios::trunc);
  if (!metrics) throw io_error("cannot write metrics.csv in " + out_dir.string());
  metrics << metrics_csv_header() << "\n";

  SacNets nets = make_sac_nets(sac, derive_seed(cfg.seed, 10));
  Rng env_seeds(derive_seed(cfg.seed, 11));
  Rng action_rng(derive_seed(cfg.seed, 12));
  Rng update_rng(derive_seed(cfg.seed, 13));

  ReplayBuffer buffer(static_cast<std::size_t>(cfg.replay_size));
  RewardTrace trace;

  ParamGrads g1 = ParamGrads::zeros_like(nets.q1);
  ParamGrads g2 = ParamGrads::zeros_like(nets.q2);
  ParamGrads ga = ParamGrads::zeros_like(nets.actor);
  std::vector<double> noise(static_cast<std::size_t>(sac.batch_size) * sac.action_dim);

  auto save_ckpt = [&](const std::filesystem::path& p, long step) {
    Checkpoint ck;
    ck.config = cfg;
    ck.step = step;
    ck.alpha_m = params.alpha_m();
    ck.log_temperature = nets.log_temperature;
    ck.nets = nets;
    checkpoint_save(ck, p);
  };

  EnvState env = env_reset(env_cfg, env_seeds.next_u64());
  Observation obs = observe(env, env_cfg);

  long episode = 0;
  long post_warmup_episodes = 0;
  double ep_return = 0.0, ep_sim_time = 0.0, ep_task_return = 0.0;
  long ep_steps = 0;
  double loss_actor_sum = 0.0, loss_critic_sum = 0.0;
  long update_count = 0;
  double latest_k_r = std::numeric_limits<double>::quiet_NaN();

  auto emit_row = [&](long step) {
    MetricsRow row;
    row.episode = episode;
    row.global_step = step;
    row.ep_return = ep_return;
    row.ep_steps = ep_steps;
    row.ep_sim_time = ep_sim_time;
    if (cfg.variant == "seac") {
      row.alpha_m = 1.0;
      row.alpha_eps = 0.1;
    } else if (cfg.variant == "sac_fixed") {
      row.alpha_m = 1.0;
      row.alpha_eps = 0.0;
    } else {
      row.alpha_m = params.alpha_m();
      row.alpha_eps = params.alpha_eps();
    }
    row.k_r = latest_k_r;
    row.actor_loss = update_count > 0 ? loss_actor_sum / update_count
                                      : std::numeric_limits<double>::quiet_NaN();
    row.critic_loss = update_count > 0 ? loss_critic_sum / update_count
                                       : std::numeric_limits<double>::quiet_NaN();
    row.temperature = nets.temperature();
    metrics << metrics_csv_line(row) << "\n";
    metrics.flush();
  };

  for (long step = 1; step <= cfg.total_steps; ++step) {
    EnvAction action;
    if (step <= cfg.warmup) {
      action = detail::warmup_action(sac, action_rng);
    } else {
      action = policy_sample(nets, sac, obs, action_rng).env_action;
    }

    StepOutcome outcome = env_step(env, action, env_cfg);
    const double reward =
        detail::composed_training_reward(cfg.variant, outcome.task_reward, action.duration,
                                         params);

    Transition tr;
    tr.state = obs;
    tr.action_env = {action.duration, action.force[0], action.force[1]};
    tr.reward = reward;
    tr.next_state = outcome.observation;
    tr.done = outcome.terminated;  // timeout truncation keeps bootstrapping
    buffer.push(tr);

    obs = outcome.observation;
    ep_return += reward;
    ep_task_return += outcome.task_reward;
    ep_sim_time += outcome.sim_time_elapsed;
    ep_steps += 1;

    if (step > cfg.warmup) {
      for (int u = 0; u < cfg.updates_per_step; ++u) {
        try {
          TrainBatch batch = buffer.sample(sac.batch_size, update_rng);
          for (auto& n : noise) n = update_rng.normal();
          const std::vector<double> y = compute_td_target(batch, nets, sac, noise);
          g1.zero();
          g2.zero();
          const double critic_loss = critic_loss_and_grads(batch, nets, sac, y, g1, g2);
          adam_step(nets.q1, g1, nets.q1_opt, sac.critic_lr);
          adam_step(nets.q2, g2, nets.q2_opt, sac.critic_lr);
          for (auto& n : noise) n = update_rng.normal();
          ga.zero();
          double mean_log_prob = 0.0;
          const double actor_loss =
              actor_loss_and_grads(batch, nets, sac, noise, ga, mean_log_prob);
          adam_step(nets.actor, ga, nets.actor_opt, sac.actor_lr);
          temperature_update(nets, sac, mean_log_prob);
          soft_update_targets(nets, sac);
          loss_actor_sum += actor_loss;
          loss_critic_sum += critic_loss;
          update_count += 1;
        } catch (const numeric_error& e) {
          const auto diag = out_dir / "checkpoints" /
                            ("diagnostic_step_" + std::to_string(step) + ".ckpt");
          save_ckpt(diag, step);
          log_error(std::string("training aborted: ") + e.what() + "; diagnostic checkpoint " +
                    diag.string());
          throw;
        }
      }
    }

    const bool episode_over = outcome.terminated || outcome.truncated;
    if (episode_over) {
      emit_row(step);
      if (step > cfg.warmup) {
        const double ep_avg = (cfg.adapt_signal == "task" ? ep_task_return : ep_return) /
                              static_cast<double>(ep_steps);
        trace.add(ep_avg);
        post_warmup_episodes += 1;
        if (adaptive && post_warmup_episodes % cfg.k_update == 0) {
          const AdaptOutcome res = maybe_adapt(params, trace);
          latest_k_r = res.slope;
        } else if (!adaptive && post_warmup_episodes % cfg.k_update == 0) {
          // baselines track the trend for the logs but never adapt
          latest_k_r = trace.size() >= 2 ? reward_slope(trace.episode_averages)
                                         : std::numeric_limits<double>::quiet_NaN();
          trace.clear();
        }
      }
      episode += 1;
      ep_return = ep_task_return = ep_sim_time = 0.0;
      ep_steps = 0;
      loss_actor_sum = loss_critic_sum = 0.0;
      update_count = 0;
      env = env_reset(env_cfg, env_seeds.next_u64());
      obs = observe(env, env_cfg);
    }

    if (step % cfg.ckpt_every == 0) {
      save_ckpt(out_dir / "checkpoints" / ("step_" + std::to_string(step) + ".ckpt"), step);
    }
  }

  // a trailing partial episode still gets its metrics row
  if (ep_steps > 0) {
    emit_row(cfg.total_steps);
    episode += 1;
  }

  const auto final_path = out_dir / "final.ckpt";
  save_ckpt(final_path, cfg.total_steps);
  metrics.flush();
  if (!metrics) throw io_error("failed writing metrics.csv in " + out_dir.string());

  TrainResult result;
  result.episodes = episode;
  result.steps = cfg.total_steps;
  result.run_dir = out_dir;
  result.final_checkpoint = final_path;
  return result;
}

}  // namespace moseac
