#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "moseac/env.hpp"
#include "moseac/errors.hpp"
#include "moseac/num.hpp"
#include "moseac/reward.hpp"
#include "moseac/sac.hpp"

namespace moseac {

// Flat key=value run configuration. Defaults are the full-scale training
// sheet; every hyperparameter of the training stack is reachable from here
// (no hidden constants). Unknown keys are rejected.
struct Config {
  // algorithm
  std::string variant = "moseac";  // moseac | seac | sac_fixed
  long total_steps = 3'000'000;
  long warmup = -1;       // -1: resolved to 5 * max_steps
  int k_update = 10;      // adaptation check cadence, episodes
  int updates_per_step = 1;
  long replay_size = 1'000'000;
  int batch_size = 256;
  double gamma = 0.99;
  double tau = 0.005;
  double a_lr = 3e-5;
  double c_lr = 3e-5;
  double alpha = 0.12;    // initial entropy temperature
  double eta = std::numeric_limits<double>::quiet_NaN();  // resolved to -action_dim
  std::vector<int> net_shape{256, 256};
  int n_critics = 2;
  double alpha_m = 1.0;
  double psi = 1e-4;
  double alpha_m_ceiling = 10.0;
  std::string adapt_signal = "composed";  // composed | task
  double fixed_dt = 0.05;                 // sac_fixed control period, seconds
  long ckpt_every = 100'000;
  std::uint64_t seed = 0;
  // environment
  double world_w = 2.0, world_h = 2.0;
  double agent_mass = 20.0;
  double gravity = 9.80665;
  double friction_mu = 0.6;
  double obstacle_radius = 0.05;
  double speed_limit = 2.0;
  double force_limit = 100.0;
  double min_time = 0.01;
  double max_time = 1.0;
  double goal_radius = 0.05;
  double substep = 0.01;
  double min_separation = 0.3;
  int max_steps = 500;
  bool normalize_obs = false;

  bool operator==(const Config&) const = default;

  int action_dim() const { return variant == "sac_fixed" ? 2 : 3; }

  // Fill derived defaults, then cross-validate.
  void finalize() {
    if (warmup < 0) warmup = 5L * max_steps;
    if (std::isnan(eta)) eta = -static_cast<double>(action_dim());
    validate();
  }

  void validate() const {
    if (variant != "moseac" && variant != "seac" && variant != "sac_fixed") {
      throw config_error("config: unknown variant '" + variant +
                         "' (expected moseac, seac or sac_fixed)");
    }
    if (total_steps <= 0) throw config_error("config: total_steps must be positive");
    if (warmup > total_steps) {
      throw config_error("config: warmup (" + std::to_string(warmup) +
                         ") must not exceed total_steps (" + std::to_string(total_steps) +
                         ")");
    }
    if (warmup < batch_size) {
      throw config_error("config: warmup must cover at least one batch (warmup " +
                         std::to_string(warmup) + " < batch_size " +
                         std::to_string(batch_size) + ")");
    }
    if (k_update < 2) throw config_error("config: k_update must be at least 2");
    if (updates_per_step < 0) throw config_error("config: updates_per_step must be >= 0");
    if (replay_size < batch_size) throw config_error("config: replay_size below batch_size");
    if (n_critics != 2) throw config_error("config: n_critics must be 2");
    if (!(min_time > 0 && min_time < max_time)) {
      throw config_error("config: need 0 < min_time < max_time");
    }
    if (variant == "sac_fixed" && !(fixed_dt >= min_time && fixed_dt <= max_time)) {
      throw config_error("config: fixed_dt outside [min_time, max_time]");
    }
    if (adapt_signal != "composed" && adapt_signal != "task") {
      throw config_error("config: adapt_signal must be 'composed' or 'task'");
    }
    if (ckpt_every <= 0) throw config_error("config: ckpt_every must be positive");
    if (psi <= 0) throw config_error("config: psi must be positive");
    if (alpha_m < 0) throw config_error("config: alpha_m must be >= 0");
    sac_config().validate();  // covers gamma/tau/lr/alpha/net_shape/batch ranges
    env_config().validate();
  }

  EnvConfig env_config() const {
    EnvConfig e;
    e.world_size = {world_w, world_h};
    e.agent_mass = agent_mass;
    e.gravity = gravity;
    e.friction_mu = friction_mu;
    e.obstacle_radius = obstacle_radius;
    e.speed_limit = speed_limit;
    e.force_limit = force_limit;
    e.duration_min = min_time;
    e.duration_max = max_time;
    e.goal_radius = goal_radius;
    e.max_episode_steps = max_steps;
    e.substep = substep;
    e.min_separation = min_separation;
    e.normalize_obs = normalize_obs;
    return e;
  }

  SacConfig sac_config() const {
    SacConfig s;
    s.state_dim = kObsDim;
    s.action_dim = action_dim();
    s.hidden = net_shape;
    s.gamma = gamma;
    s.tau = tau;
    s.actor_lr = a_lr;
    s.critic_lr = c_lr;
    s.init_temperature = alpha;
    s.target_entropy = std::isnan(eta) ? -static_cast<double>(action_dim()) : eta;
    s.duration_min = min_time;
    s.duration_max = max_time;
    s.force_limit = force_limit;
    s.fixed_duration = variant == "sac_fixed" ? fixed_dt : 0.0;
    s.batch_size = batch_size;
    return s;
  }

  RewardParams reward_params() const {
    return RewardParams(alpha_m, psi, min_time, max_time, alpha_m_ceiling);
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<int> parse_net_shape(std::string value, const std::string& ctx) {
  for (char c : "()[] ") std::erase(value, c);
  std::vector<int> shape;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    long v = parse_long(item, ctx);
    if (v <= 0) throw config_error("net_shape entries must be positive (" + ctx + ")");
    shape.push_back(static_cast<int>(v));
  }
  if (shape.empty()) throw config_error("net_shape must name at least one layer (" + ctx + ")");
  return shape;
}

inline bool parse_bool(const std::string& v, const std::string& ctx) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw config_error("expected true/false: '" + v + "' (" + ctx + ")");
}

}  // namespace detail

// Parses the line-oriented key=value format; '#' starts a comment. Absent
// keys fall back to defaults, unknown or repeated keys are rejected with the
// offending line number.
inline Config parse_config_text(const std::string& text, const std::string& origin) {
  Config cfg;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw config_error(origin + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    const std::string ctx = origin + ":" + std::to_string(line_no);
    if (key.empty() || value.empty()) {
      throw config_error(ctx + ": expected key = value");
    }
    if (auto [it, inserted] = seen.emplace(key, line_no); !inserted) {
      throw config_error(ctx + ": key '" + key + "' already set on line " +
                         std::to_string(it->second));
    }
    try {
      if (key == "variant") cfg.variant = value;
      else if (key == "total_steps") cfg.total_steps = parse_long(value, ctx);
      else if (key == "warmup") cfg.warmup = parse_long(value, ctx);
      else if (key == "k_update") cfg.k_update = static_cast<int>(parse_long(value, ctx));
      else if (key == "updates_per_step") cfg.updates_per_step = static_cast<int>(parse_long(value, ctx));
      else if (key == "replay_size") cfg.replay_size = parse_long(value, ctx);
      else if (key == "batch_size") cfg.batch_size = static_cast<int>(parse_long(value, ctx));
      else if (key == "gamma") cfg.gamma = parse_double(value, ctx);
      else if (key == "tau") cfg.tau = parse_double(value, ctx);
      else if (key == "a_lr") cfg.a_lr = parse_double(value, ctx);
      else if (key == "c_lr") cfg.c_lr = parse_double(value, ctx);
      else if (key == "alpha") cfg.alpha = parse_double(value, ctx);
      else if (key == "eta") cfg.eta = parse_double(value, ctx);
      else if (key == "net_shape") cfg.net_shape = detail::parse_net_shape(value, ctx);
      else if (key == "n_critics") cfg.n_critics = static_cast<int>(parse_long(value, ctx));
      else if (key == "alpha_m") cfg.alpha_m = parse_double(value, ctx);
      else if (key == "psi") cfg.psi = parse_double(value, ctx);
      else if (key == "alpha_m_ceiling") cfg.alpha_m_ceiling = parse_double(value, ctx);
      else if (key == "adapt_signal") cfg.adapt_signal = value;
      else if (key == "fixed_dt") cfg.fixed_dt = parse_double(value, ctx);
      else if (key == "ckpt_every") cfg.ckpt_every = parse_long(value, ctx);
      else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_long(value, ctx));
      else if (key == "world_w") cfg.world_w = parse_double(value, ctx);
      else if (key == "world_h") cfg.world_h = parse_double(value, ctx);
      else if (key == "agent_mass") cfg.agent_mass = parse_double(value, ctx);
      else if (key == "gravity") cfg.gravity = parse_double(value, ctx);
      else if (key == "friction_mu") cfg.friction_mu = parse_double(value, ctx);
      else if (key == "obstacle_radius") cfg.obstacle_radius = parse_double(value, ctx);
      else if (key == "speed_limit") cfg.speed_limit = parse_double(value, ctx);
      else if (key == "force_limit") cfg.force_limit = parse_double(value, ctx);
      else if (key == "min_time") cfg.min_time = parse_double(value, ctx);
      else if (key == "max_time") cfg.max_time = parse_double(value, ctx);
      else if (key == "goal_radius") cfg.goal_radius = parse_double(value, ctx);
      else if (key == "substep") cfg.substep = parse_double(value, ctx);
      else if (key == "min_separation") cfg.min_separation = parse_double(value, ctx);
      else if (key == "max_steps") cfg.max_steps = static_cast<int>(parse_long(value, ctx));
      else if (key == "normalize_obs") cfg.normalize_obs = detail::parse_bool(value, ctx);
      else throw config_error(ctx + ": unknown key '" + key + "'");
    } catch (const parse_error& e) {
      throw config_error(ctx + ": bad value for '" + key + "': " + e.what());
    }
  }
  cfg.finalize();
  return cfg;
}

inline Config parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot read config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

// Canonical serialization; parse(serialize(cfg)) == cfg.
inline std::string serialize_config(const Config& cfg) {
  std::string out;
  auto put = [&out](const std::string& key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  };
  put("variant", cfg.variant);
  put("total_steps", std::to_string(cfg.total_steps));
  put("warmup", std::to_string(cfg.warmup));
  put("k_update", std::to_string(cfg.k_update));
  put("updates_per_step", std::to_string(cfg.updates_per_step));
  put("replay_size", std::to_string(cfg.replay_size));
  put("batch_size", std::to_string(cfg.batch_size));
  put("gamma", fmt_double(cfg.gamma));
  put("tau", fmt_double(cfg.tau));
  put("a_lr", fmt_double(cfg.a_lr));
  put("c_lr", fmt_double(cfg.c_lr));
  put("alpha", fmt_double(cfg.alpha));
  put("eta", fmt_double(cfg.eta));
  std::string shape;
  for (std::size_t i = 0; i < cfg.net_shape.size(); ++i) {
    if (i) shape += ',';
    shape += std::to_string(cfg.net_shape[i]);
  }
  put("net_shape", shape);
  put("n_critics", std::to_string(cfg.n_critics));
  put("alpha_m", fmt_double(cfg.alpha_m));
  put("psi", fmt_double(cfg.psi));
  put("alpha_m_ceiling", fmt_double(cfg.alpha_m_ceiling));
  put("adapt_signal", cfg.adapt_signal);
  put("fixed_dt", fmt_double(cfg.fixed_dt));
  put("ckpt_every", std::to_string(cfg.ckpt_every));
  put("seed", std::to_string(cfg.seed));
  put("world_w", fmt_double(cfg.world_w));
  put("world_h", fmt_double(cfg.world_h));
  put("agent_mass", fmt_double(cfg.agent_mass));
  put("gravity", fmt_double(cfg.gravity));
  put("friction_mu", fmt_double(cfg.friction_mu));
  put("obstacle_radius", fmt_double(cfg.obstacle_radius));
  put("speed_limit", fmt_double(cfg.speed_limit));
  put("force_limit", fmt_double(cfg.force_limit));
  put("min_time", fmt_double(cfg.min_time));
  put("max_time", fmt_double(cfg.max_time));
  put("goal_radius", fmt_double(cfg.goal_radius));
  put("substep", fmt_double(cfg.substep));
  put("min_separation", fmt_double(cfg.min_separation));
  put("max_steps", std::to_string(cfg.max_steps));
  put("normalize_obs", cfg.normalize_obs ? "true" : "false");
  return out;
}

}  // namespace moseac
