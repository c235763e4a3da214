#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "moseac/mlp.hpp"
#include "moseac/rng.hpp"

using namespace moseac;

namespace {

// Independent straight-line forward pass (oracle for mlp_forward).
std::vector<double> forward_oracle(const Mlp& net, const std::vector<double>& input) {
  std::vector<double> x = input;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    std::vector<double> y(layer.out, 0.0);
    for (int o = 0; o < layer.out; ++o) {
      double acc = layer.b[o];
      for (int i = 0; i < layer.in; ++i) acc += layer.w[o * layer.in + i] * x[i];
      y[o] = acc;
      if (l + 1 < net.layers.size() && y[o] < 0.0) y[o] = 0.0;
    }
    x = std::move(y);
  }
  return x;
}

double probe_loss(const Mlp& net, const std::vector<double>& input,
                  const std::vector<double>& probe) {
  const std::vector<double> out = mlp_forward(net, input);
  double loss = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) loss += out[i] * probe[i];
  return loss;
}

double rel_err(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale < 1e-10) return 0.0;
  return std::abs(a - b) / scale;
}

}  // namespace

TEST_CASE("mlp_init parameter count and shapes") {
  const std::vector<int> sizes{11, 256, 256, 6};
  const Mlp net = mlp_init(sizes, 0);
  REQUIRE(net.layers.size() == 3);
  // independent hand count: sum of out*in + out over layers
  std::size_t expect = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    expect += static_cast<std::size_t>(sizes[l + 1]) * sizes[l] + sizes[l + 1];
  }
  CHECK(expect == 70406);
  CHECK(net.param_count() == expect);
  CHECK(net.input_dim() == 11);
  CHECK(net.output_dim() == 6);
}

TEST_CASE("mlp_init minimal net, zero biases, bounded weights") {
  const std::vector<int> sizes{1, 1};
  const Mlp net = mlp_init(sizes, 42);
  REQUIRE(net.layers.size() == 1);
  CHECK(net.layers[0].b[0] == 0.0);
  const double bound = std::sqrt(6.0 / 2.0);
  CHECK(std::abs(net.layers[0].w[0]) <= bound);

  const std::vector<int> big{7, 33, 4};
  const Mlp net2 = mlp_init(big, 7);
  for (std::size_t l = 0; l < net2.layers.size(); ++l) {
    const double b = std::sqrt(6.0 / (net2.layers[l].in + net2.layers[l].out));
    for (double w : net2.layers[l].w) CHECK(std::abs(w) <= b);
    for (double bias : net2.layers[l].b) CHECK(bias == 0.0);
  }
}

TEST_CASE("mlp_init determinism and per-layer streams") {
  const std::vector<int> sizes{4, 8, 3};
  const Mlp a = mlp_init(sizes, 123);
  const Mlp b = mlp_init(sizes, 123);
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    CHECK(a.layers[l].w == b.layers[l].w);
  }
  // first layer draws do not depend on how deep the net is
  const std::vector<int> deeper{4, 8, 8, 3};
  const Mlp c = mlp_init(deeper, 123);
  CHECK(a.layers[0].w == c.layers[0].w);
  // different seed, different weights
  const Mlp d = mlp_init(sizes, 124);
  CHECK(a.layers[0].w != d.layers[0].w);
}

TEST_CASE("mlp_init rejects bad sizes") {
  CHECK_THROWS_AS(mlp_init(std::vector<int>{}, 0), config_error);
  CHECK_THROWS_AS(mlp_init(std::vector<int>{5}, 0), config_error);
  CHECK_THROWS_AS(mlp_init(std::vector<int>{5, 0, 3}, 0), config_error);
  CHECK_THROWS_AS(mlp_init(std::vector<int>{5, -2}, 0), config_error);
}

TEST_CASE("mlp_forward zero net and identity") {
  Mlp net = mlp_init(std::vector<int>{3, 4, 2}, 5);
  for (auto& l : net.layers) std::fill(l.w.begin(), l.w.end(), 0.0);
  const std::vector<double> out = mlp_forward(net, std::vector<double>{1.0, -2.0, 3.0});
  for (double v : out) CHECK(v == 0.0);

  Mlp ident = mlp_init(std::vector<int>{1, 1}, 0);
  ident.layers[0].w[0] = 1.0;
  const std::vector<double> y = mlp_forward(ident, std::vector<double>{3.5});
  CHECK(y[0] == 3.5);
}

TEST_CASE("mlp_forward matches the straight-line oracle") {
  Rng rng(99);
  for (int rep = 0; rep < 20; ++rep) {
    const Mlp net = mlp_init(std::vector<int>{6, 9, 5, 4}, 1000 + rep);
    std::vector<double> input(6);
    for (auto& v : input) v = rng.uniform(-2.0, 2.0);
    const std::vector<double> got = mlp_forward(net, input);
    const std::vector<double> want = forward_oracle(net, input);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(rel_err(got[i], want[i]) < 1e-12);
    }
  }
}

TEST_CASE("mlp_forward rejects dimension mismatch") {
  const Mlp net = mlp_init(std::vector<int>{3, 2}, 0);
  CHECK_THROWS_AS(mlp_forward(net, std::vector<double>{1.0, 2.0}), shape_error);
}

TEST_CASE("mlp_backward zero output gradient gives zero grads") {
  const Mlp net = mlp_init(std::vector<int>{4, 6, 2}, 3);
  ForwardCache cache;
  mlp_forward(net, std::vector<double>{0.5, -0.5, 1.0, 2.0}, cache);
  auto [grads, dinput] = mlp_backward(net, cache, std::vector<double>{0.0, 0.0});
  for (const auto& l : grads.layers) {
    for (double g : l.dw) CHECK(g == 0.0);
    for (double g : l.db) CHECK(g == 0.0);
  }
  for (double g : dinput) CHECK(g == 0.0);
}

TEST_CASE("mlp_backward scalar analytic case") {
  Mlp net = mlp_init(std::vector<int>{1, 1}, 0);
  net.layers[0].w[0] = 1.7;
  ForwardCache cache;
  mlp_forward(net, std::vector<double>{2.5}, cache);
  auto [grads, dinput] = mlp_backward(net, cache, std::vector<double>{1.0});
  CHECK(grads.layers[0].dw[0] == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(grads.layers[0].db[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(dinput[0] == doctest::Approx(1.7).epsilon(1e-14));
}

TEST_CASE("mlp_backward matches central finite differences") {
  Rng rng(2024);
  const std::vector<int> sizes{5, 8, 7, 3};
  for (int rep = 0; rep < 4; ++rep) {
    Mlp net = mlp_init(sizes, 50 + rep);
    std::vector<double> input(5), probe(3);
    for (auto& v : input) v = rng.uniform(-1.5, 1.5);
    for (auto& v : probe) v = rng.uniform(-1.0, 1.0);

    ForwardCache cache;
    mlp_forward(net, input, cache);
    auto [grads, dinput] = mlp_backward(net, cache, probe);

    const double h = 1e-5;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      for (std::size_t k = 0; k < net.layers[l].w.size(); ++k) {
        const double orig = net.layers[l].w[k];
        net.layers[l].w[k] = orig + h;
        const double up = probe_loss(net, input, probe);
        net.layers[l].w[k] = orig - h;
        const double dn = probe_loss(net, input, probe);
        net.layers[l].w[k] = orig;
        CHECK(rel_err(grads.layers[l].dw[k], (up - dn) / (2 * h)) < 1e-4);
      }
      for (std::size_t k = 0; k < net.layers[l].b.size(); ++k) {
        const double orig = net.layers[l].b[k];
        net.layers[l].b[k] = orig + h;
        const double up = probe_loss(net, input, probe);
        net.layers[l].b[k] = orig - h;
        const double dn = probe_loss(net, input, probe);
        net.layers[l].b[k] = orig;
        CHECK(rel_err(grads.layers[l].db[k], (up - dn) / (2 * h)) < 1e-4);
      }
    }
    // input gradient too
    for (std::size_t k = 0; k < input.size(); ++k) {
      const double orig = input[k];
      std::vector<double> in_up = input, in_dn = input;
      in_up[k] = orig + h;
      in_dn[k] = orig - h;
      CHECK(rel_err(dinput[k], (probe_loss(net, in_up, probe) - probe_loss(net, in_dn, probe)) /
                                   (2 * h)) < 1e-4);
    }
  }
}

TEST_CASE("mlp_backward rejects mismatched cache") {
  const Mlp net = mlp_init(std::vector<int>{3, 4, 2}, 0);
  const Mlp other = mlp_init(std::vector<int>{3, 5, 2}, 0);
  ForwardCache cache;
  mlp_forward(other, std::vector<double>{1, 2, 3}, cache);
  ParamGrads g = ParamGrads::zeros_like(net);
  CHECK_THROWS_AS(mlp_backward(net, cache, std::vector<double>{1, 1}, g), shape_error);
}

TEST_CASE("adam_step null update on zero gradients") {
  Mlp net = mlp_init(std::vector<int>{2, 3, 1}, 9);
  const Mlp before = net;
  AdamState st = AdamState::zeros_like(net);
  ParamGrads g = ParamGrads::zeros_like(net);
  adam_step(net, g, st, 0.1);
  CHECK(st.step == 1);
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    CHECK(net.layers[l].w == before.layers[l].w);
    CHECK(net.layers[l].b == before.layers[l].b);
  }
}

TEST_CASE("adam first step magnitude is about lr") {
  // bias corrections make m_hat / sqrt(v_hat) = sign(g) on step one
  Mlp net = mlp_init(std::vector<int>{1, 1}, 0);
  const double w0 = net.layers[0].w[0];
  AdamState st = AdamState::zeros_like(net);
  ParamGrads g = ParamGrads::zeros_like(net);
  g.layers[0].dw[0] = 0.37;
  adam_step(net, g, st, 0.01);
  CHECK(net.layers[0].w[0] == doctest::Approx(w0 - 0.01).epsilon(1e-6));
  g.layers[0].dw[0] = -4.2;
  Mlp net2 = mlp_init(std::vector<int>{1, 1}, 0);
  AdamState st2 = AdamState::zeros_like(net2);
  adam_step(net2, g, st2, 0.01);
  CHECK(net2.layers[0].w[0] == doctest::Approx(w0 + 0.01).epsilon(1e-6));
}

TEST_CASE("adam descends a quadratic") {
  // f(w) = w^2 from w = 1, lr = 0.1
  Mlp net = mlp_init(std::vector<int>{1, 1}, 0);
  net.layers[0].w[0] = 1.0;
  AdamState st = AdamState::zeros_like(net);
  ParamGrads g = ParamGrads::zeros_like(net);
  for (int i = 0; i < 100; ++i) {
    g.layers[0].dw[0] = 2.0 * net.layers[0].w[0];
    adam_step(net, g, st, 0.1);
  }
  CHECK(std::abs(net.layers[0].w[0]) < 1.0);
  CHECK(st.step == 100);
}

TEST_CASE("adam_step rejects non-finite gradients") {
  Mlp net = mlp_init(std::vector<int>{2, 1}, 0);
  const Mlp before = net;
  AdamState st = AdamState::zeros_like(net);
  ParamGrads g = ParamGrads::zeros_like(net);
  g.layers[0].dw[1] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(adam_step(net, g, st, 0.01), numeric_error);
  CHECK(net.layers[0].w == before.layers[0].w);  // aborted, nothing applied
  CHECK(st.step == 0);
}

TEST_CASE("soft_update full copy at tau = 1 and contract checks") {
  Mlp target = mlp_init(std::vector<int>{2, 3}, 1);
  const Mlp source = mlp_init(std::vector<int>{2, 3}, 2);
  soft_update(target, source, 1.0);
  CHECK(target.layers[0].w == source.layers[0].w);
  CHECK_THROWS_AS(soft_update(target, source, 0.0), config_error);
  CHECK_THROWS_AS(soft_update(target, source, 1.5), config_error);
}

TEST_CASE("soft_update arithmetic and geometric convergence") {
  Mlp target = mlp_init(std::vector<int>{1, 1}, 0);
  Mlp source = target;
  target.layers[0].w[0] = 0.0;
  source.layers[0].w[0] = 1.0;
  soft_update(target, source, 0.005);
  CHECK(target.layers[0].w[0] == doctest::Approx(0.005).epsilon(1e-14));

  // repeated updates converge geometrically: gap shrinks by (1 - tau) each call
  double prev_gap = std::abs(target.layers[0].w[0] - 1.0);
  for (int i = 0; i < 50; ++i) {
    soft_update(target, source, 0.1);
    const double gap = std::abs(target.layers[0].w[0] - 1.0);
    CHECK(gap == doctest::Approx(prev_gap * 0.9).epsilon(1e-9));
    prev_gap = gap;
  }
  CHECK(prev_gap == doctest::Approx(0.995 * std::pow(0.9, 50)).epsilon(1e-9));
}

TEST_CASE("forward/backward stay finite on finite inputs") {
  Rng rng(31);
  for (int rep = 0; rep < 50; ++rep) {
    const Mlp net = mlp_init(std::vector<int>{8, 16, 16, 4}, rep);
    std::vector<double> input(8);
    for (auto& v : input) v = rng.uniform(-100.0, 100.0);
    ForwardCache cache;
    mlp_forward(net, input, cache);
    for (double v : cache.act.back()) CHECK(std::isfinite(v));
    std::vector<double> probe(4);
    for (auto& v : probe) v = rng.uniform(-1.0, 1.0);
    auto [grads, dinput] = mlp_backward(net, cache, probe);
    for (const auto& l : grads.layers) {
      for (double gv : l.dw) CHECK(std::isfinite(gv));
    }
    for (double gv : dinput) CHECK(std::isfinite(gv));
  }
}
