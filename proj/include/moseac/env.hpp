#pragma once

#include <array>
#include <cmath>
#include <string>

#include "moseac/errors.hpp"
#include "moseac/num.hpp"
#include "moseac/rng.hpp"

namespace moseac {

using Vec2 = std::array<double, 2>;

inline double vec_norm(const Vec2& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1]); }
inline double vec_dist(const Vec2& a, const Vec2& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

// One (duration, force) command.
struct EnvAction {
  double duration = 0.0;  // seconds
  Vec2 force{};           // Newtons
};

enum class Event { none, goal, crash };

inline const char* event_name(Event e) {
  switch (e) {
    case Event::goal: return "goal";
    case Event::crash: return "crash";
    default: return "none";
  }
}

// Point-mass world: 2 m x 2 m box, Coulomb friction, one round obstacle,
// randomized start/goal/obstacle per episode.
struct EnvConfig {
  Vec2 world_size{2.0, 2.0};
  double agent_mass = 20.0;        // kg
  double gravity = 9.80665;        // m/s^2
  double friction_mu = 0.6;
  double obstacle_radius = 0.05;   // m
  double speed_limit = 2.0;        // m/s, per axis
  double force_limit = 100.0;      // N, per axis
  double duration_min = 0.01;      // s
  double duration_max = 1.0;       // s
  double goal_radius = 0.05;       // m
  int max_episode_steps = 500;
  double substep = 0.01;           // s
  double min_separation = 0.3;     // m, between start/goal/obstacle
  bool normalize_obs = false;

  double friction_force() const { return friction_mu * agent_mass * gravity; }

  void validate() const {
    if (world_size[0] <= 0 || world_size[1] <= 0 || agent_mass <= 0 || gravity <= 0 ||
        friction_mu <= 0 || obstacle_radius <= 0 || speed_limit <= 0 || force_limit <= 0 ||
        goal_radius <= 0 || max_episode_steps <= 0 || substep <= 0 || min_separation < 0) {
      throw config_error("EnvConfig: all physical quantities must be positive");
    }
    if (!(duration_min > 0.0 && duration_min < duration_max)) {
      throw config_error("EnvConfig: need 0 < duration_min < duration_max");
    }
  }
};

struct EnvState {
  Vec2 agent_pos{};
  Vec2 agent_vel{};
  Vec2 obstacle_pos{};
  Vec2 goal_pos{};
  Vec2 start_pos{};
  double last_duration = 0.0;
  Vec2 last_force{};
  int step_count = 0;
};

constexpr int kObsDim = 11;
using Observation = std::array<double, kObsDim>;

struct StepOutcome {
  Observation observation{};
  double task_reward = 0.0;
  bool terminated = false;
  bool truncated = false;
  Event event = Event::none;
  double sim_time_elapsed = 0.0;
};

// [pos(2), obstacle(2), goal(2), vel(2), last_duration, last_force(2)].
// With normalize_obs every slot is min-max mapped to [-1, 1].
inline Observation observe(const EnvState& s, const EnvConfig& cfg) {
  Observation obs;
  if (!cfg.normalize_obs) {
    obs = {s.agent_pos[0],    s.agent_pos[1],   s.obstacle_pos[0], s.obstacle_pos[1],
           s.goal_pos[0],     s.goal_pos[1],    s.agent_vel[0],    s.agent_vel[1],
           s.last_duration,   s.last_force[0],  s.last_force[1]};
  } else {
    auto npos = [&](double p, double extent) { return 2.0 * p / extent - 1.0; };
    const double dmid = 0.5 * (cfg.duration_min + cfg.duration_max);
    const double dhalf = 0.5 * (cfg.duration_max - cfg.duration_min);
    obs = {npos(s.agent_pos[0], cfg.world_size[0]),
           npos(s.agent_pos[1], cfg.world_size[1]),
           npos(s.obstacle_pos[0], cfg.world_size[0]),
           npos(s.obstacle_pos[1], cfg.world_size[1]),
           npos(s.goal_pos[0], cfg.world_size[0]),
           npos(s.goal_pos[1], cfg.world_size[1]),
           s.agent_vel[0] / cfg.speed_limit,
           s.agent_vel[1] / cfg.speed_limit,
           (s.last_duration - dmid) / dhalf,
           s.last_force[0] / cfg.force_limit,
           s.last_force[1] / cfg.force_limit};
  }
  return obs;
}

// Start, goal and obstacle are drawn uniformly in the interior (wall margin =
// obstacle radius), redrawn until all pairwise separations reach
// min_separation. Draw order is start, goal, obstacle, (x, y) each.
inline EnvState env_reset(const EnvConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(derive_seed(seed, 0xE57));
  const double mx = cfg.obstacle_radius;
  EnvState s;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Vec2 start{rng.uniform(mx, cfg.world_size[0] - mx), rng.uniform(mx, cfg.world_size[1] - mx)};
    Vec2 goal{rng.uniform(mx, cfg.world_size[0] - mx), rng.uniform(mx, cfg.world_size[1] - mx)};
    Vec2 obst{rng.uniform(mx, cfg.world_size[0] - mx), rng.uniform(mx, cfg.world_size[1] - mx)};
    if (vec_dist(start, goal) < cfg.min_separation ||
        vec_dist(start, obst) < cfg.min_separation ||
        vec_dist(goal, obst) < cfg.min_separation) {
      continue;
    }
    s.agent_pos = start;
    s.start_pos = start;
    s.goal_pos = goal;
    s.obstacle_pos = obst;
    s.agent_vel = {0.0, 0.0};
    s.last_force = {0.0, 0.0};
    s.last_duration = cfg.duration_min;
    s.step_count = 0;
    return s;
  }
  throw config_error("env_reset: could not place start/goal/obstacle after 1000 attempts "
                     "(min_separation too large for this world?)");
}

// One fixed-step integration slice. Coulomb friction acts on the vector
// magnitude: at rest the agent moves only if |F| exceeds mu*m*g; when moving,
// friction of magnitude mu*m*g opposes the velocity direction. If friction
// would drag the along-velocity component through zero within h, the agent
// stops at that instant and stays stopped for the rest of the slice.
// Velocity is clamped per axis to the speed limit, positions to the world
// box (zeroing the velocity component that hit the wall).
inline void physics_substep(EnvState& s, const Vec2& force, double h, const EnvConfig& cfg) {
  const double mu_mg = cfg.friction_force();
  const double speed = vec_norm(s.agent_vel);
  Vec2 f_true;
  if (speed == 0.0) {
    const double fmag = vec_norm(force);
    if (fmag <= mu_mg) return;  // static friction cancels the command
    f_true = {force[0] - mu_mg * force[0] / fmag, force[1] - mu_mg * force[1] / fmag};
  } else {
    f_true = {force[0] - mu_mg * s.agent_vel[0] / speed,
              force[1] - mu_mg * s.agent_vel[1] / speed};
  }
  const Vec2 accel{f_true[0] / cfg.agent_mass, f_true[1] / cfg.agent_mass};

  double t_slice = h;
  bool stops = false;
  if (speed > 0.0) {
    const double a_par = (accel[0] * s.agent_vel[0] + accel[1] * s.agent_vel[1]) / speed;
    if (a_par < 0.0) {
      const double t_zero = -speed / a_par;
      if (t_zero <= h) {
        t_slice = t_zero;
        stops = true;
      }
    }
  }

  auto clamp = [](double v, double lim) { return v > lim ? lim : (v < -lim ? -lim : v); };
  Vec2 v_aim{clamp(s.agent_vel[0] + accel[0] * t_slice, cfg.speed_limit),
             clamp(s.agent_vel[1] + accel[1] * t_slice, cfg.speed_limit)};
  s.agent_pos[0] += 0.5 * (s.agent_vel[0] + v_aim[0]) * t_slice;
  s.agent_pos[1] += 0.5 * (s.agent_vel[1] + v_aim[1]) * t_slice;
  s.agent_vel = stops ? Vec2{0.0, 0.0} : v_aim;

  for (int axis = 0; axis < 2; ++axis) {
    if (s.agent_pos[axis] < 0.0) {
      s.agent_pos[axis] = 0.0;
      s.agent_vel[axis] = 0.0;
    } else if (s.agent_pos[axis] > cfg.world_size[axis]) {
      s.agent_pos[axis] = cfg.world_size[axis];
      s.agent_vel[axis] = 0.0;
    }
  }
}

// Applies (duration, force) by integrating fixed substeps across the
// duration (final partial substep allowed), checking crash then goal after
// each slice; either event ends the step immediately. Task reward: +500 on
// goal, -500 on crash, otherwise |start - goal| - |pos - goal|.
inline StepOutcome env_step(EnvState& s, const EnvAction& action, const EnvConfig& cfg) {
  if (!(action.duration >= cfg.duration_min && action.duration <= cfg.duration_max)) {
    throw contract_error("env_step: duration " + fmt_double(action.duration) +
                         " outside bounds");
  }
  if (std::abs(action.force[0]) > cfg.force_limit + 1e-12 ||
      std::abs(action.force[1]) > cfg.force_limit + 1e-12) {
    throw contract_error("env_step: force exceeds the per-axis limit");
  }

  StepOutcome out;
  double elapsed = 0.0;
  while (elapsed < action.duration - 1e-12) {
    const double h = std::min(cfg.substep, action.duration - elapsed);
    physics_substep(s, action.force, h, cfg);
    elapsed += h;
    if (vec_dist(s.agent_pos, s.obstacle_pos) <= cfg.obstacle_radius) {
      out.event = Event::crash;
      break;
    }
    if (vec_dist(s.agent_pos, s.goal_pos) <= cfg.goal_radius) {
      out.event = Event::goal;
      break;
    }
  }

  s.step_count += 1;
  s.last_duration = action.duration;
  s.last_force = action.force;

  out.sim_time_elapsed = elapsed;
  out.terminated = out.event != Event::none;
  out.truncated = !out.terminated && s.step_count >= cfg.max_episode_steps;
  if (out.event == Event::goal) {
    out.task_reward = 500.0;
  } else if (out.event == Event::crash) {
    out.task_reward = -500.0;
  } else {
    const double d_origin = vec_dist(s.start_pos, s.goal_pos);
    const double d_goal = vec_dist(s.agent_pos, s.goal_pos);
    out.task_reward = d_origin - 1.0 * d_goal;
  }
  out.observation = observe(s, cfg);
  return out;
}

}  // namespace moseac
