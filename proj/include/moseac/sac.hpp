#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "moseac/env.hpp"
#include "moseac/errors.hpp"
#include "moseac/mlp.hpp"
#include "moseac/rng.hpp"

namespace moseac {

// SAC over a squashed-Gaussian policy whose action is (duration, Fx, Fy).
// The fixed-rate baseline drops the duration dimension (action_dim 2) and
// pins every duration to fixed_duration, which reduces the engine to plain
// SAC at a constant control frequency.
struct SacConfig {
  int state_dim = kObsDim;
  int action_dim = 3;  // 3 = (duration, Fx, Fy); 2 = forces only + fixed duration
  std::vector<int> hidden{256, 256};
  double gamma = 0.99;
  double tau = 0.005;
  double actor_lr = 3e-5;
  double critic_lr = 3e-5;
  double init_temperature = 0.12;
  double target_entropy = -3.0;
  double duration_min = 0.01;
  double duration_max = 1.0;
  double force_limit = 100.0;
  double fixed_duration = 0.0;  // used only when action_dim == 2
  int batch_size = 256;

  void validate() const {
    if (state_dim <= 0) throw config_error("SacConfig: state_dim must be positive");
    if (action_dim != 2 && action_dim != 3) {
      throw config_error("SacConfig: action_dim must be 2 or 3");
    }
    if (hidden.empty()) throw config_error("SacConfig: need at least one hidden layer");
    for (int h : hidden) {
      if (h <= 0) throw config_error("SacConfig: hidden sizes must be positive");
    }
    if (!(gamma >= 0.0 && gamma < 1.0)) throw config_error("SacConfig: gamma must be in [0,1)");
    if (!(tau > 0.0 && tau <= 1.0)) throw config_error("SacConfig: tau must be in (0,1]");
    if (actor_lr <= 0 || critic_lr <= 0) throw config_error("SacConfig: learning rates must be positive");
    if (init_temperature <= 0) throw config_error("SacConfig: temperature must be positive");
    if (!(duration_min > 0 && duration_min < duration_max)) {
      throw config_error("SacConfig: need 0 < duration_min < duration_max");
    }
    if (action_dim == 2 &&
        !(fixed_duration >= duration_min && fixed_duration <= duration_max)) {
      throw config_error("SacConfig: fixed_duration outside the duration bounds");
    }
    if (batch_size <= 0) throw config_error("SacConfig: batch_size must be positive");
  }
};

constexpr double kLogStdMin = -20.0;
constexpr double kLogStdMax = 2.0;

// Scalar Adam for the log-temperature.
struct ScalarAdam {
  double m = 0.0, v = 0.0;
  long t = 0;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

  double delta(double grad, double lr) {
    t += 1;
    m = beta1 * m + (1.0 - beta1) * grad;
    v = beta2 * v + (1.0 - beta2) * grad * grad;
    const double mh = m / (1.0 - std::pow(beta1, static_cast<double>(t)));
    const double vh = v / (1.0 - std::pow(beta2, static_cast<double>(t)));
    return lr * mh / (std::sqrt(vh) + eps);
  }
};

// Actor, twin critics, their Polyak targets, and the entropy temperature.
struct SacNets {
  Mlp actor;       // state -> (mean[dim], log_std[dim])
  Mlp q1, q2;      // (state, squashed action) -> scalar
  Mlp q1_target, q2_target;
  double log_temperature = 0.0;
  AdamState actor_opt, q1_opt, q2_opt;
  ScalarAdam temp_opt;

  double temperature() const { return std::exp(log_temperature); }
};

inline SacNets make_sac_nets(const SacConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  SacNets nets;
  std::vector<int> actor_sizes{cfg.state_dim};
  actor_sizes.insert(actor_sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
  actor_sizes.push_back(2 * cfg.action_dim);
  std::vector<int> critic_sizes{cfg.state_dim + cfg.action_dim};
  critic_sizes.insert(critic_sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
  critic_sizes.push_back(1);
  nets.actor = mlp_init(actor_sizes, derive_seed(seed, 101));
  nets.q1 = mlp_init(critic_sizes, derive_seed(seed, 102));
  nets.q2 = mlp_init(critic_sizes, derive_seed(seed, 103));
  nets.q1_target = nets.q1;
  nets.q2_target = nets.q2;
  nets.log_temperature = std::log(cfg.init_temperature);
  nets.actor_opt = AdamState::zeros_like(nets.actor);
  nets.q1_opt = AdamState::zeros_like(nets.q1);
  nets.q2_opt = AdamState::zeros_like(nets.q2);
  return nets;
}

// Affine map from the tanh cube to the environment boxes:
// duration = mid + half * u0 (so [0.01, 1] by default), forces = limit * u.
inline EnvAction scale_action(std::span<const double> u, const SacConfig& cfg) {
  if (static_cast<int>(u.size()) != cfg.action_dim) {
    throw shape_error("scale_action: expected " + std::to_string(cfg.action_dim) +
                      " components");
  }
  for (double c : u) {
    if (!(c >= -1.0 && c <= 1.0)) {
      throw contract_error("scale_action: component " + fmt_double(c) + " outside [-1, 1]");
    }
  }
  EnvAction a;
  if (cfg.action_dim == 3) {
    const double mid = 0.5 * (cfg.duration_min + cfg.duration_max);
    const double half = 0.5 * (cfg.duration_max - cfg.duration_min);
    a.duration = mid + half * u[0];
    a.force = {cfg.force_limit * u[1], cfg.force_limit * u[2]};
  } else {
    a.duration = cfg.fixed_duration;
    a.force = {cfg.force_limit * u[0], cfg.force_limit * u[1]};
  }
  return a;
}

// Inverse of scale_action onto [-1, 1]^action_dim (clamped at the edges).
inline void unscale_action(const EnvAction& a, const SacConfig& cfg, std::span<double> u) {
  auto clamp1 = [](double v) { return v > 1.0 ? 1.0 : (v < -1.0 ? -1.0 : v); };
  if (cfg.action_dim == 3) {
    const double mid = 0.5 * (cfg.duration_min + cfg.duration_max);
    const double half = 0.5 * (cfg.duration_max - cfg.duration_min);
    u[0] = clamp1((a.duration - mid) / half);
    u[1] = clamp1(a.force[0] / cfg.force_limit);
    u[2] = clamp1(a.force[1] / cfg.force_limit);
  } else {
    u[0] = clamp1(a.force[0] / cfg.force_limit);
    u[1] = clamp1(a.force[1] / cfg.force_limit);
  }
}

namespace detail {

inline double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * log(2*pi)
constexpr double kLog2 = 0.69314718055994530942;

// Squashed-Gaussian evaluation at one state: given raw actor outputs
// (mean, log_std) and standard-normal noise xi, produces pre = mu + sigma*xi,
// u = tanh(pre) and the log-density with the tanh correction
// log(1 - tanh^2 x) = 2*(log 2 - x - softplus(-2x)).
struct PolicyEval {
  std::array<double, 3> mean{}, sigma{}, pre{}, u{};
  std::array<bool, 3> log_std_clamped{};
  double log_prob = 0.0;
};

inline void eval_policy(std::span<const double> actor_out, std::span<const double> xi, int dim,
                        PolicyEval& pe) {
  pe.log_prob = 0.0;
  for (int j = 0; j < dim; ++j) {
    const double mu = actor_out[j];
    double log_std = actor_out[dim + j];
    pe.log_std_clamped[j] = (log_std < kLogStdMin) || (log_std > kLogStdMax);
    log_std = std::clamp(log_std, kLogStdMin, kLogStdMax);
    const double sigma = std::exp(log_std);
    const double pre = mu + sigma * xi[j];
    pe.mean[j] = mu;
    pe.sigma[j] = sigma;
    pe.pre[j] = pre;
    pe.u[j] = std::tanh(pre);
    pe.log_prob += -0.5 * xi[j] * xi[j] - log_std - kHalfLog2Pi;
    pe.log_prob -= 2.0 * (kLog2 - pre - softplus(-2.0 * pre));
  }
}

}  // namespace detail

struct PolicyOutput {
  EnvAction env_action;
  std::array<double, 3> pre_squash{};
  double log_prob = 0.0;
};

namespace detail {

inline PolicyOutput policy_output_from(const SacNets& nets, const SacConfig& cfg,
                                       std::span<const double> state,
                                       std::span<const double> xi) {
  thread_local ForwardCache cache;
  mlp_forward(nets.actor, state, cache);
  const std::vector<double>& out = cache.act.back();
  if (!all_finite(out.data(), out.size())) {
    throw numeric_error("policy_sample: non-finite actor output");
  }
  PolicyEval pe;
  eval_policy(out, xi, cfg.action_dim, pe);
  PolicyOutput po;
  po.pre_squash = pe.pre;
  po.log_prob = pe.log_prob;
  po.env_action = scale_action(std::span<const double>(pe.u.data(), cfg.action_dim), cfg);
  return po;
}

}  // namespace detail

// Reparameterized draw u = tanh(mu + sigma*xi), xi ~ N(0, I).
inline PolicyOutput policy_sample(const SacNets& nets, const SacConfig& cfg,
                                  std::span<const double> state, Rng& rng) {
  std::array<double, 3> xi{};
  for (int j = 0; j < cfg.action_dim; ++j) xi[j] = rng.normal();
  return detail::policy_output_from(nets, cfg, state, xi);
}

// Deterministic (evaluation) variant: u = tanh(mu).
inline PolicyOutput policy_mean_action(const SacNets& nets, const SacConfig& cfg,
                                       std::span<const double> state) {
  const std::array<double, 3> xi{};
  return detail::policy_output_from(nets, cfg, state, xi);
}

// One replay minibatch. Environment actions are stored as (D, Fx, Fy)
// physical triples; rewards are the fully composed training rewards.
struct TrainBatch {
  int size = 0;
  std::vector<double> states;       // size * state_dim
  std::vector<double> actions_env;  // size * 3
  std::vector<double> rewards;      // size
  std::vector<double> next_states;  // size * state_dim
  std::vector<std::uint8_t> done;   // size
};

// Soft TD targets y_i = r_i + gamma * (1 - done_i) *
// (min(q1', q2')(s', a') - temperature * log pi(a'|s')), with a' freshly
// sampled from the current actor using the supplied noise (size * action_dim
// standard normals). Pure forward computation; nothing here tracks gradients.
inline std::vector<double> compute_td_target(const TrainBatch& batch, const SacNets& nets,
                                             const SacConfig& cfg,
                                             std::span<const double> next_noise) {
  if (static_cast<int>(next_noise.size()) < batch.size * cfg.action_dim) {
    throw shape_error("compute_td_target: noise span too small");
  }
  const double alpha = nets.temperature();
  std::vector<double> y(batch.size);
  ForwardCache actor_cache, q_cache;
  std::vector<double> critic_in(cfg.state_dim + cfg.action_dim);
  detail::PolicyEval pe;
  for (int i = 0; i < batch.size; ++i) {
    const double r = batch.rewards[i];
    if (batch.done[i] != 0 || cfg.gamma == 0.0) {
      y[i] = r;
      continue;
    }
    std::span<const double> s_next(batch.next_states.data() +
                                       static_cast<std::size_t>(i) * cfg.state_dim,
                                   cfg.state_dim);
    mlp_forward(nets.actor, s_next, actor_cache);
    detail::eval_policy(actor_cache.act.back(),
                        next_noise.subspan(static_cast<std::size_t>(i) * cfg.action_dim,
                                           cfg.action_dim),
                        cfg.action_dim, pe);
    std::copy(s_next.begin(), s_next.end(), critic_in.begin());
    for (int j = 0; j < cfg.action_dim; ++j) critic_in[cfg.state_dim + j] = pe.u[j];
    mlp_forward(nets.q1_target, critic_in, q_cache);
    const double v1 = q_cache.act.back()[0];
    mlp_forward(nets.q2_target, critic_in, q_cache);
    const double v2 = q_cache.act.back()[0];
    y[i] = r + cfg.gamma * (std::min(v1, v2) - alpha * pe.log_prob);
  }
  return y;
}

// Sum over both critics of the batch MSE against y. Gradients accumulate
// into g1/g2 (caller zeroes them).
inline double critic_loss_and_grads(const TrainBatch& batch, const SacNets& nets,
                                    const SacConfig& cfg, std::span<const double> y,
                                    ParamGrads& g1, ParamGrads& g2) {
  if (static_cast<int>(y.size()) != batch.size) {
    throw shape_error("critic_loss_and_grads: target size mismatch");
  }
  const double inv_b = 1.0 / batch.size;
  double loss = 0.0;
  ForwardCache c1, c2;
  std::vector<double> critic_in(cfg.state_dim + cfg.action_dim);
  std::array<double, 3> u{};
  EnvAction act;
  for (int i = 0; i < batch.size; ++i) {
    const double* s = batch.states.data() + static_cast<std::size_t>(i) * cfg.state_dim;
    const double* a = batch.actions_env.data() + static_cast<std::size_t>(i) * 3;
    act.duration = a[0];
    act.force = {a[1], a[2]};
    unscale_action(act, cfg, std::span<double>(u.data(), cfg.action_dim));
    std::copy(s, s + cfg.state_dim, critic_in.begin());
    for (int j = 0; j < cfg.action_dim; ++j) critic_in[cfg.state_dim + j] = u[j];
    mlp_forward(nets.q1, critic_in, c1);
    mlp_forward(nets.q2, critic_in, c2);
    const double e1 = c1.act.back()[0] - y[i];
    const double e2 = c2.act.back()[0] - y[i];
    loss += (e1 * e1 + e2 * e2) * inv_b;
    const std::array<double, 1> d1{2.0 * e1 * inv_b};
    const std::array<double, 1> d2{2.0 * e2 * inv_b};
    mlp_backward(nets.q1, c1, d1, g1);
    mlp_backward(nets.q2, c2, d2, g2);
  }
  if (!std::isfinite(loss)) throw numeric_error("critic_loss_and_grads: non-finite loss");
  return loss;
}

// Actor loss mean_i(temperature * log pi(a_i|s_i) - min(q1, q2)(s_i, a_i))
// with a_i reparameterized through the supplied noise. The gradient flows
// through the critics' action inputs only; critic parameters stay frozen.
// mean_log_prob feeds the temperature update.
inline double actor_loss_and_grads(const TrainBatch& batch, const SacNets& nets,
                                   const SacConfig& cfg, std::span<const double> noise,
                                   ParamGrads& g_actor, double& mean_log_prob) {
  if (static_cast<int>(noise.size()) < batch.size * cfg.action_dim) {
    throw shape_error("actor_loss_and_grads: noise span too small");
  }
  const double alpha = nets.temperature();
  const double inv_b = 1.0 / batch.size;
  const int dim = cfg.action_dim;
  double loss = 0.0;
  double logp_sum = 0.0;
  ForwardCache actor_cache, c1, c2;
  std::vector<double> critic_in(cfg.state_dim + dim);
  std::vector<double> critic_in_grad(cfg.state_dim + dim);
  std::vector<double> dact(2 * dim);
  detail::PolicyEval pe;
  const std::array<double, 1> unit{1.0};
  for (int i = 0; i < batch.size; ++i) {
    std::span<const double> s(batch.states.data() + static_cast<std::size_t>(i) * cfg.state_dim,
                              cfg.state_dim);
    mlp_forward(nets.actor, s, actor_cache);
    detail::eval_policy(actor_cache.act.back(),
                        noise.subspan(static_cast<std::size_t>(i) * dim, dim), dim, pe);
    std::copy(s.begin(), s.end(), critic_in.begin());
    for (int j = 0; j < dim; ++j) critic_in[cfg.state_dim + j] = pe.u[j];
    mlp_forward(nets.q1, critic_in, c1);
    mlp_forward(nets.q2, critic_in, c2);
    const double v1 = c1.act.back()[0];
    const double v2 = c2.act.back()[0];
    const bool pick1 = v1 <= v2;
    const double qmin = pick1 ? v1 : v2;
    mlp_input_grad(pick1 ? nets.q1 : nets.q2, pick1 ? c1 : c2, unit, critic_in_grad);

    loss += (alpha * pe.log_prob - qmin) * inv_b;
    logp_sum += pe.log_prob * inv_b;

    for (int j = 0; j < dim; ++j) {
      const double gq = critic_in_grad[cfg.state_dim + j];
      const double dtanh = 1.0 - pe.u[j] * pe.u[j];
      const double dlogp_dpre = 2.0 * pe.u[j];
      const double sig_xi = pe.sigma[j] * noise[static_cast<std::size_t>(i) * dim + j];
      dact[j] = (alpha * dlogp_dpre - gq * dtanh) * inv_b;
      double dl = alpha * (dlogp_dpre * sig_xi - 1.0) - gq * dtanh * sig_xi;
      dact[dim + j] = pe.log_std_clamped[j] ? 0.0 : dl * inv_b;
    }
    mlp_backward(nets.actor, actor_cache, dact, g_actor);
  }
  if (!std::isfinite(loss)) throw numeric_error("actor_loss_and_grads: non-finite loss");
  mean_log_prob = logp_sum;
  return loss;
}

// Gradient step on J(alpha) = -alpha * mean(log pi + target_entropy) w.r.t.
// log alpha, sharing the actor learning rate. Leaves the temperature alone at
// the fixed point mean(log pi) == -target_entropy.
inline void temperature_update(SacNets& nets, const SacConfig& cfg, double mean_log_prob) {
  const double alpha = nets.temperature();
  const double grad = -alpha * (mean_log_prob + cfg.target_entropy);
  nets.log_temperature -= nets.temp_opt.delta(grad, cfg.actor_lr);
}

// Polyak-blend both target critics toward the online critics.
inline void soft_update_targets(SacNets& nets, const SacConfig& cfg) {
  soft_update(nets.q1_target, nets.q1, cfg.tau);
  soft_update(nets.q2_target, nets.q2, cfg.tau);
}

}  // namespace moseac
