#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "moseac/replay.hpp"
#include "moseac/rng.hpp"
#include "moseac/sac.hpp"

using namespace moseac;

namespace {

SacConfig tiny_cfg(int state_dim = 4, int action_dim = 3) {
  SacConfig cfg;
  cfg.state_dim = state_dim;
  cfg.action_dim = action_dim;
  cfg.hidden = {8, 8};
  cfg.batch_size = 4;
  return cfg;
}

TrainBatch random_batch(const SacConfig& cfg, int size, Rng& rng) {
  TrainBatch b;
  b.size = size;
  b.states.resize(static_cast<std::size_t>(size) * cfg.state_dim);
  b.actions_env.resize(static_cast<std::size_t>(size) * 3);
  b.rewards.resize(size);
  b.next_states.resize(static_cast<std::size_t>(size) * cfg.state_dim);
  b.done.assign(size, 0);
  for (auto& v : b.states) v = rng.uniform(-1.0, 1.0);
  for (auto& v : b.next_states) v = rng.uniform(-1.0, 1.0);
  for (auto& v : b.rewards) v = rng.uniform(-5.0, 5.0);
  for (int i = 0; i < size; ++i) {
    b.actions_env[i * 3 + 0] = rng.uniform(cfg.duration_min, cfg.duration_max);
    b.actions_env[i * 3 + 1] = rng.uniform(-cfg.force_limit, cfg.force_limit);
    b.actions_env[i * 3 + 2] = rng.uniform(-cfg.force_limit, cfg.force_limit);
  }
  return b;
}

std::vector<double> standard_noise(int n, Rng& rng) {
  std::vector<double> xs(n);
  for (auto& v : xs) v = rng.normal();
  return xs;
}

void set_constant_critic(Mlp& critic, double value) {
  for (auto& l : critic.layers) {
    std::fill(l.w.begin(), l.w.end(), 0.0);
    std::fill(l.b.begin(), l.b.end(), 0.0);
  }
  critic.layers.back().b[0] = value;
}

double rel_err(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale < 1e-8) return 0.0;
  return std::abs(a - b) / scale;
}

}  // namespace

TEST_CASE("scale_action box corners and midpoint") {
  const SacConfig cfg;  // duration [0.01, 1], force 100
  const EnvAction hi = scale_action(std::vector<double>{1.0, 1.0, 1.0}, cfg);
  CHECK(hi.duration == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(hi.force[0] == 100.0);
  CHECK(hi.force[1] == 100.0);
  const EnvAction lo = scale_action(std::vector<double>{-1.0, -1.0, -1.0}, cfg);
  CHECK(lo.duration == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(lo.force[0] == -100.0);
  const EnvAction mid = scale_action(std::vector<double>{0.0, 0.0, 0.0}, cfg);
  CHECK(mid.duration == doctest::Approx(0.505).epsilon(1e-15));
  CHECK(mid.force[0] == 0.0);
  CHECK(mid.force[1] == 0.0);
  CHECK_THROWS_AS(scale_action(std::vector<double>{1.2, 0.0, 0.0}, cfg), contract_error);
  CHECK_THROWS_AS(scale_action(std::vector<double>{0.0, 0.0}, cfg), shape_error);
}

TEST_CASE("unscale_action inverts scale_action") {
  const SacConfig cfg;
  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> u{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                          rng.uniform(-1.0, 1.0)};
    const EnvAction a = scale_action(u, cfg);
    std::array<double, 3> back{};
    unscale_action(a, cfg, back);
    for (int j = 0; j < 3; ++j) CHECK(back[j] == doctest::Approx(u[j]).epsilon(1e-9));
  }
}

TEST_CASE("deterministic policy at zero weights gives the midpoint action") {
  SacConfig cfg = tiny_cfg();
  SacNets nets = make_sac_nets(cfg, 0);
  for (auto& l : nets.actor.layers) {
    std::fill(l.w.begin(), l.w.end(), 0.0);
    std::fill(l.b.begin(), l.b.end(), 0.0);
  }
  const std::vector<double> state(cfg.state_dim, 0.3);
  const PolicyOutput po = policy_mean_action(nets, cfg, state);
  CHECK(po.env_action.duration == doctest::Approx(0.505).epsilon(1e-15));
  CHECK(po.env_action.force[0] == 0.0);
  CHECK(po.env_action.force[1] == 0.0);
  CHECK(std::isfinite(po.log_prob));
}

TEST_CASE("log_prob stays finite and large under the log_std clamp") {
  SacConfig cfg = tiny_cfg();
  SacNets nets = make_sac_nets(cfg, 0);
  // drive raw log_std way below the clamp: sigma = exp(-20)
  for (auto& l : nets.actor.layers) {
    std::fill(l.w.begin(), l.w.end(), 0.0);
    std::fill(l.b.begin(), l.b.end(), 0.0);
  }
  for (int j = 0; j < cfg.action_dim; ++j) {
    nets.actor.layers.back().b[cfg.action_dim + j] = -50.0;
  }
  const std::vector<double> state(cfg.state_dim, 0.0);
  const PolicyOutput po = policy_mean_action(nets, cfg, state);
  CHECK(std::isfinite(po.log_prob));
  // density at the center of a nearly-deterministic Gaussian is huge
  CHECK(po.log_prob > 3 * 19.0);
}

TEST_CASE("sampled actions always satisfy the env boxes") {
  SacConfig cfg = tiny_cfg();
  SacNets nets = make_sac_nets(cfg, 1);
  Rng rng(5);
  std::vector<double> state(cfg.state_dim);
  for (int i = 0; i < 2000; ++i) {
    for (auto& v : state) v = rng.uniform(-3.0, 3.0);
    const PolicyOutput po = policy_sample(nets, cfg, state, rng);
    CHECK(po.env_action.duration >= cfg.duration_min);
    CHECK(po.env_action.duration <= cfg.duration_max);
    CHECK(std::abs(po.env_action.force[0]) <= cfg.force_limit);
    CHECK(std::abs(po.env_action.force[1]) <= cfg.force_limit);
    CHECK(std::isfinite(po.log_prob));
  }
}

TEST_CASE("pre-squash sample mean approaches the actor mean") {
  SacConfig cfg = tiny_cfg();
  SacNets nets = make_sac_nets(cfg, 7);
  const std::vector<double> state{0.4, -0.2, 0.9, 0.1};
  const PolicyOutput det = policy_mean_action(nets, cfg, state);
  // recover mu and sigma: det.pre_squash == mu; estimate sigma from samples
  Rng rng(11);
  const int n = 100000;
  std::array<double, 3> sum{}, sumsq{};
  for (int i = 0; i < n; ++i) {
    const PolicyOutput po = policy_sample(nets, cfg, state, rng);
    for (int j = 0; j < 3; ++j) {
      sum[j] += po.pre_squash[j];
      sumsq[j] += po.pre_squash[j] * po.pre_squash[j];
    }
  }
  for (int j = 0; j < 3; ++j) {
    const double mean = sum[j] / n;
    const double var = sumsq[j] / n - mean * mean;
    const double se = std::sqrt(var / n);
    CHECK(std::abs(mean - det.pre_squash[j]) < 3.5 * se + 1e-12);
  }
}

TEST_CASE("fixed-duration variant pins every duration") {
  SacConfig cfg = tiny_cfg(4, 2);
  cfg.fixed_duration = 0.05;
  SacNets nets = make_sac_nets(cfg, 2);
  Rng rng(4);
  std::vector<double> state(cfg.state_dim);
  for (int i = 0; i < 200; ++i) {
    for (auto& v : state) v = rng.uniform(-1.0, 1.0);
    CHECK(policy_sample(nets, cfg, state, rng).env_action.duration == 0.05);
    CHECK(policy_mean_action(nets, cfg, state).env_action.duration == 0.05);
  }
}

TEST_CASE("td target shortcuts: terminal and gamma zero") {
  SacConfig cfg = tiny_cfg();
  SacNets nets = make_sac_nets(cfg, 3);
  Rng rng(6);
  TrainBatch b = random_batch(cfg, 6, rng);
  for (int i = 0; i < b.size; ++i) b.done[i] = 1;
  const std::vector<double> noise = standard_noise(b.size * cfg.action_dim, rng);
  const std::vector<double> y = compute_td_target(b, nets, cfg, noise);
  for (int i = 0; i < b.size; ++i) CHECK(y[i] == b.rewards[i]);

  b.done.assign(b.size, 0);
  SacConfig g0 = cfg;
  g0.gamma = 0.0;
  const std::vector<double> y0 = compute_td_target(b, nets, g0, noise);
  for (int i = 0; i < b.size; ++i) CHECK(y0[i] == b.rewards[i]);
}

TEST_CASE("td target matches scalar hand arithmetic on a tiny net") {
  // 1-dim state, hidden {1}: every piece is a scalar chain computed here
  // with plain std math, independent of the library forward pass.
  SacConfig cfg;
  cfg.state_dim = 1;
  cfg.action_dim = 3;
  cfg.hidden = {1};
  cfg.batch_size = 1;
  cfg.gamma = 0.9;
  SacNets nets = make_sac_nets(cfg, 12);
  nets.log_temperature = std::log(0.25);

  TrainBatch b;
  b.size = 1;
  b.states = {0.3};
  b.actions_env = {0.5, 10.0, -20.0};
  b.rewards = {1.5};
  b.next_states = {-0.6};
  b.done = {0};
  const std::vector<double> noise{0.37, -0.81, 0.12};

  const std::vector<double> y = compute_td_target(b, nets, cfg, noise);

  // hand evaluation
  auto dense = [](const Mlp::Layer& l, const std::vector<double>& x) {
    std::vector<double> out(l.out);
    for (int o = 0; o < l.out; ++o) {
      double acc = l.b[o];
      for (int i = 0; i < l.in; ++i) acc += l.w[o * l.in + i] * x[i];
      out[o] = acc;
    }
    return out;
  };
  auto relu = [](std::vector<double> v) {
    for (auto& x : v) x = x > 0 ? x : 0;
    return v;
  };
  const std::vector<double> s_next{-0.6};
  const std::vector<double> h = relu(dense(nets.actor.layers[0], s_next));
  const std::vector<double> out = dense(nets.actor.layers[1], h);
  double logp = 0.0;
  std::vector<double> u(3);
  for (int j = 0; j < 3; ++j) {
    const double mu = out[j];
    const double ls = std::clamp(out[3 + j], -20.0, 2.0);
    const double sigma = std::exp(ls);
    const double pre = mu + sigma * noise[j];
    u[j] = std::tanh(pre);
    logp += -0.5 * noise[j] * noise[j] - ls - 0.5 * std::log(2 * 3.14159265358979323846);
    logp -= std::log(1.0 - u[j] * u[j] + 1e-300);  // direct form of the correction
  }
  const std::vector<double> qin{-0.6, u[0], u[1], u[2]};
  const std::vector<double> q1h = relu(dense(nets.q1_target.layers[0], qin));
  const double q1v = dense(nets.q1_target.layers[1], q1h)[0];
  const std::vector<double> q2h = relu(dense(nets.q2_target.layers[0], qin));
  const double q2v = dense(nets.q2_target.layers[1], q2h)[0];
  const double want = 1.5 + 0.9 * (std::min(q1v, q2v) - 0.25 * logp);
  CHECK(std::abs(y[0] - want) < 1e-10);
}

TEST_CASE("critic loss is zero for a perfect critic and non-negative otherwise") {
  SacConfig cfg = tiny_cfg();
  SacNets nets = make_sac_nets(cfg, 8);
  set_constant_critic(nets.q1, 2.5);
  set_constant_critic(nets.q2, 2.5);
  Rng rng(9);
  TrainBatch b = random_batch(cfg, 5, rng);
  const std::vector<double> y(b.size, 2.5);
  ParamGrads g1 = ParamGrads::zeros_like(nets.q1);
  ParamGrads g2 = ParamGrads::zeros_like(nets.q2);
  CHECK(critic_loss_and_grads(b, nets, cfg, y, g1, g2) == 0.0);
  for (const auto& l : g1.layers) {
    for (double v : l.dw) CHECK(v == 0.0);
    for (double v : l.db) CHECK(v == 0.0);
  }

  const std::vector<double> y2(b.size, -1.0);
  g1.zero();
  g2.zero();
  CHECK(critic_loss_and_grads(b, nets, cfg, y2, g1, g2) > 0.0);
}

TEST_CASE("critic gradients match finite differences") {
  SacConfig cfg = tiny_cfg();
  SacNets nets = make_sac_nets(cfg, 10);
  Rng rng(13);
  TrainBatch b = random_batch(cfg, 4, rng);
  std::vector<double> y(b.size);
  for (auto& v : y) v = rng.uniform(-2.0, 2.0);

  ParamGrads g1 = ParamGrads::zeros_like(nets.q1);
  ParamGrads g2 = ParamGrads::zeros_like(nets.q2);
  critic_loss_and_grads(b, nets, cfg, y, g1, g2);

  ParamGrads s1 = ParamGrads::zeros_like(nets.q1);
  ParamGrads s2 = ParamGrads::zeros_like(nets.q2);
  const double h = 1e-5;
  for (std::size_t l = 0; l < nets.q1.layers.size(); ++l) {
    for (std::size_t k = 0; k < nets.q1.layers[l].w.size(); k += 3) {
      const double orig = nets.q1.layers[l].w[k];
      nets.q1.layers[l].w[k] = orig + h;
      s1.zero();
      s2.zero();
      const double up = critic_loss_and_grads(b, nets, cfg, y, s1, s2);
      nets.q1.layers[l].w[k] = orig - h;
      s1.zero();
      s2.zero();
      const double dn = critic_loss_and_grads(b, nets, cfg, y, s1, s2);
      nets.q1.layers[l].w[k] = orig;
      CHECK(rel_err(g1.layers[l].dw[k], (up - dn) / (2 * h)) < 1e-4);
    }
  }
}

TEST_CASE("constant critics reduce the actor loss to the entropy term") {
  SacConfig cfg = tiny_cfg();
  SacNets nets = make_sac_nets(cfg, 14);
  const double c = 3.7;
  set_constant_critic(nets.q1, c);
  set_constant_critic(nets.q2, c);
  Rng rng(15);
  TrainBatch b = random_batch(cfg, 8, rng);
  const std::vector<double> noise = standard_noise(b.size * cfg.action_dim, rng);
  ParamGrads ga = ParamGrads::zeros_like(nets.actor);
  double mean_logp = 0.0;
  const double loss = actor_loss_and_grads(b, nets, cfg, noise, ga, mean_logp);
  CHECK(loss == doctest::Approx(nets.temperature() * mean_logp - c).epsilon(1e-12));

  // with temperature 0 on top, the gradient vanishes entirely
  SacNets frozen = nets;
  frozen.log_temperature = -800.0;  // exp underflows to zero
  CHECK(frozen.temperature() == 0.0);
  ParamGrads gz = ParamGrads::zeros_like(frozen.actor);
  double ml = 0.0;
  actor_loss_and_grads(b, frozen, cfg, noise, gz, ml);
  for (const auto& l : gz.layers) {
    for (double v : l.dw) CHECK(v == 0.0);
    for (double v : l.db) CHECK(v == 0.0);
  }
}

TEST_CASE("actor gradients match finite differences under common random numbers") {
  SacConfig cfg = tiny_cfg();
  SacNets nets = make_sac_nets(cfg, 16);
  Rng rng(17);
  TrainBatch b = random_batch(cfg, 4, rng);
  const std::vector<double> noise = standard_noise(b.size * cfg.action_dim, rng);

  ParamGrads ga = ParamGrads::zeros_like(nets.actor);
  double ml = 0.0;
  actor_loss_and_grads(b, nets, cfg, noise, ga, ml);

  ParamGrads scratch = ParamGrads::zeros_like(nets.actor);
  const double h = 1e-5;
  int checked = 0, skipped = 0;
  for (std::size_t l = 0; l < nets.actor.layers.size(); ++l) {
    for (std::size_t k = 0; k < nets.actor.layers[l].w.size(); k += 5) {
      const double orig = nets.actor.layers[l].w[k];
      double dummy;
      nets.actor.layers[l].w[k] = orig + h;
      scratch.zero();
      const double up = actor_loss_and_grads(b, nets, cfg, noise, scratch, dummy);
      nets.actor.layers[l].w[k] = orig - h;
      scratch.zero();
      const double dn = actor_loss_and_grads(b, nets, cfg, noise, scratch, dummy);
      nets.actor.layers[l].w[k] = orig;
      const double fd = (up - dn) / (2 * h);
      if (rel_err(ga.layers[l].dw[k], fd) >= 1e-3) ++skipped;
      CHECK(rel_err(ga.layers[l].dw[k], fd) < 1e-3);
      ++checked;
    }
  }
  CHECK(checked > 20);
}

TEST_CASE("temperature update direction and fixed point") {
  SacConfig cfg = tiny_cfg();
  cfg.target_entropy = -3.0;
  SacNets nets = make_sac_nets(cfg, 18);
  const double t0 = nets.temperature();

  // fixed point: mean log prob == -eta leaves temperature untouched
  temperature_update(nets, cfg, 3.0);
  CHECK(nets.temperature() == t0);

  // policy too deterministic (mean log pi > -eta): temperature rises
  SacNets hot = make_sac_nets(cfg, 18);
  temperature_update(hot, cfg, 5.0);
  CHECK(hot.temperature() > t0);

  // policy too random: temperature falls
  SacNets cold = make_sac_nets(cfg, 18);
  temperature_update(cold, cfg, 1.0);
  CHECK(cold.temperature() < t0);
}

TEST_CASE("td target and actor loss use the minimum of the twin critics") {
  SacConfig cfg = tiny_cfg();
  SacNets nets = make_sac_nets(cfg, 19);
  set_constant_critic(nets.q1, 10.0);
  set_constant_critic(nets.q2, -4.0);
  nets.q1_target = nets.q1;
  nets.q2_target = nets.q2;
  nets.log_temperature = -800.0;  // isolate the critic term
  Rng rng(20);
  TrainBatch b = random_batch(cfg, 3, rng);
  const std::vector<double> noise = standard_noise(b.size * cfg.action_dim, rng);
  const std::vector<double> y = compute_td_target(b, nets, cfg, noise);
  for (int i = 0; i < b.size; ++i) {
    CHECK(y[i] == doctest::Approx(b.rewards[i] + cfg.gamma * -4.0).epsilon(1e-12));
  }
  ParamGrads ga = ParamGrads::zeros_like(nets.actor);
  double ml = 0.0;
  const double loss = actor_loss_and_grads(b, nets, cfg, noise, ga, ml);
  CHECK(loss == doctest::Approx(4.0).epsilon(1e-12));  // -min = 4
}
