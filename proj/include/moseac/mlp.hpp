#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "moseac/errors.hpp"
#include "moseac/num.hpp"
#include "moseac/rng.hpp"

namespace moseac {

// Dense multilayer perceptron with ReLU hidden units and a linear output
// layer. Parameters are doubles throughout; serialization narrows to float32
// (see checkpoint.hpp). Plain value type: copy/move freely, no hidden state.
struct Mlp {
  struct Layer {
    int out = 0;
    int in = 0;
    std::vector<double> w;  // row-major, w[o * in + i]
    std::vector<double> b;  // size out
  };

  std::vector<Layer> layers;

  int input_dim() const { return layers.empty() ? 0 : layers.front().in; }
  int output_dim() const { return layers.empty() ? 0 : layers.back().out; }

  std::size_t param_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.w.size() + l.b.size();
    return n;
  }
};

// Gradient carrier, shape-congruent with an Mlp.
struct ParamGrads {
  struct Layer {
    std::vector<double> dw, db;
  };
  std::vector<Layer> layers;

  static ParamGrads zeros_like(const Mlp& net) {
    ParamGrads g;
    g.layers.resize(net.layers.size());
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      g.layers[l].dw.assign(net.layers[l].w.size(), 0.0);
      g.layers[l].db.assign(net.layers[l].b.size(), 0.0);
    }
    return g;
  }

  void zero() {
    for (auto& l : layers) {
      std::fill(l.dw.begin(), l.dw.end(), 0.0);
      std::fill(l.db.begin(), l.db.end(), 0.0);
    }
  }
};

// Adam first/second moments, shape-congruent with an Mlp.
struct AdamState {
  struct Layer {
    std::vector<double> mw, vw, mb, vb;
  };
  std::vector<Layer> layers;
  long step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState zeros_like(const Mlp& net) {
    AdamState s;
    s.layers.resize(net.layers.size());
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      s.layers[l].mw.assign(net.layers[l].w.size(), 0.0);
      s.layers[l].vw.assign(net.layers[l].w.size(), 0.0);
      s.layers[l].mb.assign(net.layers[l].b.size(), 0.0);
      s.layers[l].vb.assign(net.layers[l].b.size(), 0.0);
    }
    return s;
  }
};

// Per-layer pre-activations and activations from a forward pass; act[0] holds
// the input, act[k+1] / pre[k] belong to layer k. Reusable across calls.
struct ForwardCache {
  std::vector<std::vector<double>> pre;
  std::vector<std::vector<double>> act;
};

// Glorot-uniform init: w ~ U(-b, b), b = sqrt(6 / (fan_in + fan_out));
// biases zero. Each layer draws from its own derived stream so adding or
// removing layers does not perturb the others.
inline Mlp mlp_init(std::span<const int> layer_sizes, std::uint64_t seed) {
  if (layer_sizes.size() < 2) throw config_error("mlp_init: need at least 2 layer sizes");
  for (int s : layer_sizes) {
    if (s <= 0) throw config_error("mlp_init: layer sizes must be positive");
  }
  Mlp net;
  net.layers.resize(layer_sizes.size() - 1);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    auto& layer = net.layers[l];
    layer.in = layer_sizes[l];
    layer.out = layer_sizes[l + 1];
    layer.w.resize(static_cast<std::size_t>(layer.out) * layer.in);
    layer.b.assign(layer.out, 0.0);
    const double bound = std::sqrt(6.0 / (layer.in + layer.out));
    Rng rng(derive_seed(seed, l));
    for (auto& w : layer.w) w = rng.uniform(-bound, bound);
  }
  return net;
}

inline void mlp_forward(const Mlp& net, std::span<const double> input, ForwardCache& cache) {
  if (net.layers.empty()) throw shape_error("mlp_forward: empty network");
  if (static_cast<int>(input.size()) != net.input_dim()) {
    throw shape_error("mlp_forward: input size " + std::to_string(input.size()) +
                      " != fan-in " + std::to_string(net.input_dim()));
  }
  const std::size_t n_layers = net.layers.size();
  cache.pre.resize(n_layers);
  cache.act.resize(n_layers + 1);
  cache.act[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l < n_layers; ++l) {
    const auto& layer = net.layers[l];
    const std::vector<double>& x = cache.act[l];
    std::vector<double>& pre = cache.pre[l];
    std::vector<double>& act = cache.act[l + 1];
    pre.resize(layer.out);
    act.resize(layer.out);
    const bool hidden = (l + 1 < n_layers);
    for (int o = 0; o < layer.out; ++o) {
      const double* wr = layer.w.data() + static_cast<std::size_t>(o) * layer.in;
      double acc = layer.b[o];
      for (int i = 0; i < layer.in; ++i) acc += wr[i] * x[i];
      pre[o] = acc;
      act[o] = hidden ? (acc > 0.0 ? acc : 0.0) : acc;
    }
  }
}

inline std::vector<double> mlp_forward(const Mlp& net, std::span<const double> input) {
  ForwardCache cache;
  mlp_forward(net, input, cache);
  return cache.act.back();
}

namespace detail {

inline void check_cache(const Mlp& net, const ForwardCache& cache,
                        std::span<const double> output_grad) {
  if (cache.pre.size() != net.layers.size() || cache.act.size() != net.layers.size() + 1) {
    throw shape_error("mlp_backward: cache does not match network depth");
  }
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    if (static_cast<int>(cache.pre[l].size()) != net.layers[l].out ||
        static_cast<int>(cache.act[l].size()) != net.layers[l].in) {
      throw shape_error("mlp_backward: cache layer " + std::to_string(l) + " shape mismatch");
    }
  }
  if (static_cast<int>(output_grad.size()) != net.output_dim()) {
    throw shape_error("mlp_backward: output gradient size mismatch");
  }
}

// Reverse pass shared by the accumulate and input-only variants.
template <bool WithParams>
inline void backprop(const Mlp& net, const ForwardCache& cache,
                     std::span<const double> output_grad, ParamGrads* grads,
                     std::span<double> input_grad) {
  check_cache(net, cache, output_grad);
  const std::size_t n_layers = net.layers.size();
  thread_local std::vector<double> delta, delta_prev;
  delta.assign(output_grad.begin(), output_grad.end());
  for (std::size_t li = n_layers; li-- > 0;) {
    const auto& layer = net.layers[li];
    const std::vector<double>& x = cache.act[li];
    // hidden layers: gate delta by ReLU derivative (pre > 0)
    if (li + 1 < n_layers) {
      const std::vector<double>& pre = cache.pre[li];
      for (int o = 0; o < layer.out; ++o) {
        if (pre[o] <= 0.0) delta[o] = 0.0;
      }
    }
    if constexpr (WithParams) {
      auto& g = grads->layers[li];
      for (int o = 0; o < layer.out; ++o) {
        const double d = delta[o];
        if (d == 0.0) continue;
        double* dwr = g.dw.data() + static_cast<std::size_t>(o) * layer.in;
        for (int i = 0; i < layer.in; ++i) dwr[i] += d * x[i];
        g.db[o] += d;
      }
    }
    const bool need_input = (li > 0) || !input_grad.empty();
    if (!need_input) break;
    delta_prev.assign(layer.in, 0.0);
    for (int o = 0; o < layer.out; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      const double* wr = layer.w.data() + static_cast<std::size_t>(o) * layer.in;
      for (int i = 0; i < layer.in; ++i) delta_prev[i] += d * wr[i];
    }
    std::swap(delta, delta_prev);
  }
  if (!input_grad.empty()) {
    if (input_grad.size() != static_cast<std::size_t>(net.input_dim())) {
      throw shape_error("mlp_backward: input gradient buffer size mismatch");
    }
    for (std::size_t i = 0; i < input_grad.size(); ++i) input_grad[i] = delta[i];
  }
}

}  // namespace detail

// Exact reverse-mode gradients of dot(output, output_grad). Parameter
// gradients accumulate into `grads` (zero it between batches); pass a
// non-empty `input_grad` span to also get d/d(input).
inline void mlp_backward(const Mlp& net, const ForwardCache& cache,
                         std::span<const double> output_grad, ParamGrads& grads,
                         std::span<double> input_grad = {}) {
  if (grads.layers.size() != net.layers.size()) {
    throw shape_error("mlp_backward: grads do not match network depth");
  }
  detail::backprop<true>(net, cache, output_grad, &grads, input_grad);
}

// Input gradient only; parameter gradients are not touched. Used where the
// gradient flows through a network's inputs but its parameters are frozen.
inline void mlp_input_grad(const Mlp& net, const ForwardCache& cache,
                           std::span<const double> output_grad, std::span<double> input_grad) {
  detail::backprop<false>(net, cache, output_grad, nullptr, input_grad);
}

// Convenience single-shot form returning fresh gradients.
inline std::pair<ParamGrads, std::vector<double>> mlp_backward(
    const Mlp& net, const ForwardCache& cache, std::span<const double> output_grad) {
  ParamGrads grads = ParamGrads::zeros_like(net);
  std::vector<double> input_grad(net.input_dim(), 0.0);
  mlp_backward(net, cache, output_grad, grads, input_grad);
  return {std::move(grads), std::move(input_grad)};
}

// Standard bias-corrected Adam. Throws numeric_error on non-finite gradients
// without touching parameters or moments.
inline void adam_step(Mlp& net, const ParamGrads& grads, AdamState& state, double lr) {
  if (lr <= 0.0) throw config_error("adam_step: lr must be positive");
  if (grads.layers.size() != net.layers.size() || state.layers.size() != net.layers.size()) {
    throw shape_error("adam_step: shape mismatch");
  }
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    if (grads.layers[l].dw.size() != net.layers[l].w.size() ||
        grads.layers[l].db.size() != net.layers[l].b.size()) {
      throw shape_error("adam_step: grads layer " + std::to_string(l) + " shape mismatch");
    }
    if (!all_finite(grads.layers[l].dw.data(), grads.layers[l].dw.size()) ||
        !all_finite(grads.layers[l].db.data(), grads.layers[l].db.size())) {
      throw numeric_error("adam_step: non-finite gradient at step " +
                          std::to_string(state.step + 1) + ", layer " + std::to_string(l));
    }
  }
  state.step += 1;
  const double b1 = state.beta1, b2 = state.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  auto update = [&](std::vector<double>& p, const std::vector<double>& g, std::vector<double>& m,
                    std::vector<double>& v) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      p[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + state.eps);
    }
  };
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    update(net.layers[l].w, grads.layers[l].dw, state.layers[l].mw, state.layers[l].vw);
    update(net.layers[l].b, grads.layers[l].db, state.layers[l].mb, state.layers[l].vb);
  }
}

// Polyak blend: target <- (1 - tau) * target + tau * source.
inline void soft_update(Mlp& target, const Mlp& source, double tau) {
  if (tau <= 0.0 || tau > 1.0) throw config_error("soft_update: tau must be in (0, 1]");
  if (target.layers.size() != source.layers.size()) {
    throw shape_error("soft_update: depth mismatch");
  }
  for (std::size_t l = 0; l < target.layers.size(); ++l) {
    auto& t = target.layers[l];
    const auto& s = source.layers[l];
    if (t.w.size() != s.w.size() || t.b.size() != s.b.size()) {
      throw shape_error("soft_update: layer " + std::to_string(l) + " shape mismatch");
    }
    for (std::size_t i = 0; i < t.w.size(); ++i) t.w[i] = (1.0 - tau) * t.w[i] + tau * s.w[i];
    for (std::size_t i = 0; i < t.b.size(); ++i) t.b[i] = (1.0 - tau) * t.b[i] + tau * s.b[i];
  }
}

}  // namespace moseac
