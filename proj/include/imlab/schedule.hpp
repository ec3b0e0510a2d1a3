#ifndef IMLAB_SCHEDULE_HPP
#define IMLAB_SCHEDULE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <stdexcept>
#include <vector>

namespace imlab {

// Parameters of the modified-sigmoid decay: peak K, floor A, smoothness B,
// expected total frames F.
struct ParametricParams {
  double peak = 0.05;       // K
  double floor = 0.0005;    // A
  double smoothness = 0.5;  // B
  double frames = 2e7;      // F

  void validate() const {
    if (!(floor >= 0 && floor < peak)) throw std::invalid_argument("beta decay: need 0 <= A < K");
    if (!(smoothness > 0)) throw std::invalid_argument("beta decay: need B > 0");
    if (!(frames >= 1)) throw std::invalid_argument("beta decay: need F >= 1");
  }
};

// beta_t = A + (K - A) / (1 + exp(-16 B (1 - t/F)))^20, evaluated in log space
// so extreme exponents cannot overflow.
inline double beta_parametric(double t, const ParametricParams& p) {
  p.validate();
  const double x = -16.0 * p.smoothness * (1.0 - t / p.frames);
  const double log_denom = 20.0 * std::log1p(std::exp(std::min(x, 500.0)));
  if (log_denom > 700.0) return p.floor;
  return p.floor + (p.peak - p.floor) * std::exp(-log_denom);
}

// Fixed per-agent coefficients: agent j of n gets beta_parametric(j) with
// F = n, giving a family from explorative (j = 0, near K) down to
// near-exploitative (j = n-1, within a hair of A).
inline std::vector<double> beta_multi(int n_agents, ParametricParams p) {
  if (n_agents < 1) throw std::invalid_argument("beta_multi: need at least one agent");
  p.frames = static_cast<double>(n_agents);
  std::vector<double> betas(static_cast<std::size_t>(n_agents));
  for (int j = 0; j < n_agents; ++j)
    betas[static_cast<std::size_t>(j)] = beta_parametric(static_cast<double>(j), p);
  return betas;
}

// Adaptive decay: beta = beta_s * min(G / H, 1) where H is the mean intrinsic
// return over the (optionally windowed) history including the current rollout.
class AdaptiveBeta {
 public:
  AdaptiveBeta(double beta_s, std::size_t window = 0)  // window 0 = unbounded
      : beta_s_(beta_s), window_(window) {}

  double next(double g_current) {
    if (g_current < 0) throw std::invalid_argument("adaptive beta: negative intrinsic return");
    history_.push_back(g_current);
    sum_ += g_current;
    if (window_ > 0 && history_.size() > window_) {
      sum_ -= history_.front();
      history_.pop_front();
    }
    // refresh the running sum occasionally; drift is otherwise unbounded
    if (++since_rebuild_ >= 4096) {
      sum_ = 0;
      for (double v : history_) sum_ += v;
      since_rebuild_ = 0;
    }
    const double h = sum_ / static_cast<double>(history_.size());
    if (h <= 0) return beta_s_;
    return beta_s_ * std::min(g_current / h, 1.0);
  }

  double beta_s() const { return beta_s_; }
  std::size_t history_size() const { return history_.size(); }

 private:
  double beta_s_;
  std::size_t window_;
  std::deque<double> history_;
  double sum_ = 0;
  int since_rebuild_ = 0;
};

// Mean over environments of the per-environment sum of intrinsic rewards
// within one rollout.  `rewards` is indexed t * n_envs + i.
inline double rollout_intrinsic_return(const std::vector<float>& rewards, int n_envs,
                                       int rollout_len) {
  if (n_envs <= 0) throw std::invalid_argument("rollout_intrinsic_return: n_envs");
  double total = 0;
  for (int t = 0; t < rollout_len; ++t)
    for (int i = 0; i < n_envs; ++i)
      total += rewards[static_cast<std::size_t>(t) * n_envs + static_cast<std::size_t>(i)];
  return total / static_cast<double>(n_envs);
}

}  // namespace imlab

#endif  // IMLAB_SCHEDULE_HPP
