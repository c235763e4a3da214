#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "moseac/errors.hpp"
#include "moseac/log.hpp"
#include "moseac/num.hpp"

namespace moseac {

// Sigmoid coupling between the reward gain and the per-step penalty:
// eps = 0.2 * (1 - 1 / (1 + exp(-alpha_m + 1))). Strictly decreasing in
// alpha_m, range (0, 0.2), and exactly 0.1 at alpha_m = 1.
inline double epsilon_from_m(double alpha_m) {
  return 0.2 * (1.0 - 1.0 / (1.0 + std::exp(-alpha_m + 1.0)));
}

// The adaptive reward pair (alpha_m, alpha_eps) plus the sweep increment psi
// and the action-duration bounds. alpha_eps is never set directly: it is
// recomputed from alpha_m through the single code path above, so the coupling
// holds bit-for-bit after every mutation. alpha_m never decreases.
class RewardParams {
 public:
  RewardParams(double alpha_m_init, double psi, double duration_min, double duration_max,
               double alpha_m_ceiling = 10.0)
      : psi_(psi),
        duration_min_(duration_min),
        duration_max_(duration_max),
        ceiling_(alpha_m_ceiling) {
    if (alpha_m_init < 0.0) throw config_error("RewardParams: alpha_m must be >= 0");
    if (psi <= 0.0) throw config_error("RewardParams: psi must be positive");
    if (!(duration_min > 0.0 && duration_min < duration_max)) {
      throw config_error("RewardParams: need 0 < duration_min < duration_max");
    }
    if (alpha_m_ceiling < alpha_m_init) {
      throw config_error("RewardParams: alpha_m ceiling below initial value");
    }
    set_alpha_m(alpha_m_init);
  }

  double alpha_m() const { return alpha_m_; }
  double alpha_eps() const { return alpha_eps_; }
  double psi() const { return psi_; }
  double duration_min() const { return duration_min_; }
  double duration_max() const { return duration_max_; }
  double ceiling() const { return ceiling_; }

  // One adaptation increment: alpha_m += psi, clamped at the safety ceiling
  // (a runaway gain is the documented "reward explosion" failure mode).
  // Returns whether alpha_m actually changed.
  bool raise_alpha_m() {
    if (alpha_m_ >= ceiling_) {
      log_error("alpha_m ceiling " + fmt_double(ceiling_) +
                " reached; reward gain no longer grows (reduce psi?)");
      return false;
    }
    double next = alpha_m_ + psi_;
    if (next > ceiling_) {
      next = ceiling_;
      log_error("alpha_m clamped to ceiling " + fmt_double(ceiling_));
    }
    set_alpha_m(next);
    return true;
  }

  // For checkpoint restore only; still routed through the coupling.
  void restore_alpha_m(double alpha_m) {
    if (alpha_m < 0.0) throw config_error("RewardParams: alpha_m must be >= 0");
    set_alpha_m(alpha_m);
  }

 private:
  void set_alpha_m(double value) {
    alpha_m_ = value;
    alpha_eps_ = epsilon_from_m(value);
  }

  double alpha_m_ = 1.0;
  double alpha_eps_ = 0.1;
  double psi_;
  double duration_min_;
  double duration_max_;
  double ceiling_;
};

// Duration remap R_tau = duration_min / t, in [duration_min/duration_max, 1].
inline double time_factor(double t, const RewardParams& params) {
  if (!(t >= params.duration_min() && t <= params.duration_max())) {
    throw contract_error("time_factor: duration " + fmt_double(t) + " outside [" +
                         fmt_double(params.duration_min()) + ", " +
                         fmt_double(params.duration_max()) + "]");
  }
  return params.duration_min() / t;
}

// Composed reward R = alpha_m * R_t * R_tau - alpha_eps.
inline double compose_reward(double task_reward, double t, const RewardParams& params) {
  return params.alpha_m() * task_reward * time_factor(t, params) - params.alpha_eps();
}

// Least-squares slope of a series against indices 1..n, in the closed form
// (n*sum(i*R_i) - sum(i)*sum(R_i)) / (n*sum(i^2) - sum(i)^2).
inline double reward_slope(std::span<const double> averages) {
  const std::size_t n = averages.size();
  if (n < 2) throw insufficient_data_error("reward_slope: need at least 2 points");
  double sum_i = 0.0, sum_ii = 0.0, sum_r = 0.0, sum_ir = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double i = static_cast<double>(k + 1);
    sum_i += i;
    sum_ii += i * i;
    sum_r += averages[k];
    sum_ir += i * averages[k];
  }
  const double dn = static_cast<double>(n);
  return (dn * sum_ir - sum_i * sum_r) / (dn * sum_ii - sum_i * sum_i);
}

// Episode-average rewards collected since the last adaptation check.
struct RewardTrace {
  std::vector<double> episode_averages;

  void add(double episode_average) { episode_averages.push_back(episode_average); }
  void clear() { episode_averages.clear(); }
  std::size_t size() const { return episode_averages.size(); }
};

struct AdaptOutcome {
  bool adapted = false;
  double slope = std::numeric_limits<double>::quiet_NaN();
};

// Adaptation check, run every k_update episodes: if the reward trend is
// declining (slope strictly < 0), raise alpha_m by psi and recouple
// alpha_eps. The trace is cleared either way so the next window is recorded
// under the current hyperparameters. Fewer than 2 entries: no-adapt.
inline AdaptOutcome maybe_adapt(RewardParams& params, RewardTrace& trace) {
  AdaptOutcome outcome;
  if (trace.size() >= 2) {
    outcome.slope = reward_slope(trace.episode_averages);
    if (outcome.slope < 0.0) outcome.adapted = params.raise_alpha_m();
  }
  trace.clear();
  return outcome;
}

}  // namespace moseac
