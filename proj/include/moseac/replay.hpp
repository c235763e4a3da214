#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "moseac/errors.hpp"
#include "moseac/num.hpp"
#include "moseac/rng.hpp"
#include "moseac/sac.hpp"

namespace moseac {

// One replay entry; the action duration is first-class, the reward is the
// fully composed training reward, and done reflects true termination only
// (timeout truncation keeps bootstrapping, so it is stored as not-done).
struct Transition {
  std::array<double, kObsDim> state{};
  std::array<double, 3> action_env{};  // (D, Fx, Fy)
  double reward = 0.0;
  std::array<double, kObsDim> next_state{};
  bool done = false;
};

// Fixed-capacity FIFO ring with uniform without-replacement batch sampling.
// Storage grows lazily up to the capacity.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw config_error("ReplayBuffer: capacity must be positive");
  }

  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }

  void push(const Transition& t) {
    if (!all_finite(t.state.data(), t.state.size()) ||
        !all_finite(t.next_state.data(), t.next_state.size()) ||
        !all_finite(t.action_env.data(), t.action_env.size()) || !std::isfinite(t.reward)) {
      throw contract_error("ReplayBuffer: non-finite transition");
    }
    if (data_.size() < capacity_) {
      data_.push_back(t);
    } else {
      data_[cursor_] = t;
    }
    cursor_ = (cursor_ + 1) % capacity_;
  }

  const Transition& at(std::size_t i) const { return data_[i]; }

  // batch_size distinct indices, uniform over occupied slots (Floyd's
  // sampling), then copied into a dense batch.
  TrainBatch sample(int batch_size, Rng& rng, int state_dim = kObsDim) const {
    if (batch_size <= 0) throw config_error("ReplayBuffer: batch_size must be positive");
    if (data_.size() < static_cast<std::size_t>(batch_size)) {
      throw insufficient_data_error("ReplayBuffer: have " + std::to_string(data_.size()) +
                                    " transitions, need " + std::to_string(batch_size));
    }
    const std::size_t n = data_.size();
    const std::size_t k = static_cast<std::size_t>(batch_size);
    std::vector<std::size_t> picked;
    picked.reserve(k);
    for (std::size_t j = n - k; j < n; ++j) {
      std::size_t t = rng.below(j + 1);
      bool seen = false;
      for (std::size_t p : picked) {
        if (p == t) {
          seen = true;
          break;
        }
      }
      picked.push_back(seen ? j : t);
    }
    TrainBatch batch;
    batch.size = batch_size;
    batch.states.resize(k * state_dim);
    batch.actions_env.resize(k * 3);
    batch.rewards.resize(k);
    batch.next_states.resize(k * state_dim);
    batch.done.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
      const Transition& t = data_[picked[i]];
      std::copy(t.state.begin(), t.state.end(), batch.states.begin() + i * state_dim);
      std::copy(t.action_env.begin(), t.action_env.end(), batch.actions_env.begin() + i * 3);
      std::copy(t.next_state.begin(), t.next_state.end(),
                batch.next_states.begin() + i * state_dim);
      batch.rewards[i] = t.reward;
      batch.done[i] = t.done ? 1 : 0;
    }
    return batch;
  }

 private:
  std::size_t capacity_;
  std::size_t cursor_ = 0;
  std::vector<Transition> data_;
};

}  // namespace moseac
