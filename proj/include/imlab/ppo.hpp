#ifndef IMLAB_PPO_HPP
#define IMLAB_PPO_HPP

#include "imlab/policy.hpp"
#include "imlab/rng.hpp"

#include <cmath>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace imlab {

struct PpoConfig {
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip = 0.2;
  int epochs = 4;
  int n_envs = 16;
  int rollout_len = 128;
  int minibatch = 256;
  double entropy_coef = 0.0005;
  double value_coef = 0.5;
  double lr = 2.5e-4;
  double max_grad_norm = 0.5;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-5;

  int horizon() const { return n_envs * rollout_len; }

  void validate() const {
    if (horizon() <= 0) throw std::invalid_argument("ppo: empty horizon");
    if (minibatch <= 0 || horizon() % minibatch != 0)
      throw std::invalid_argument("ppo: batch size must divide the horizon");
  }
};

// Per-(step, env) buffers of one collection phase; index t * n_envs + i.
struct Rollout {
  int n_envs = 0;
  int len = 0;
  std::vector<Observation> obs;
  std::vector<Observation> next_obs;
  std::vector<int> action;
  std::vector<float> logp;
  std::vector<float> value;
  std::vector<float> reward_ext;
  std::vector<float> reward_int;  // after episodic scaling
  std::vector<std::uint8_t> done;
  std::vector<std::uint8_t> truncated;
  std::vector<float> trunc_bootstrap;  // V(terminal obs) where truncated
  std::vector<float> bootstrap;        // per env, V beyond the rollout

  void resize(int envs, int steps) {
    n_envs = envs;
    len = steps;
    const std::size_t n = static_cast<std::size_t>(envs) * static_cast<std::size_t>(steps);
    obs.resize(n);
    next_obs.resize(n);
    action.resize(n);
    logp.resize(n);
    value.resize(n);
    reward_ext.resize(n);
    reward_int.resize(n);
    done.assign(n, 0);
    truncated.assign(n, 0);
    trunc_bootstrap.assign(n, 0.0f);
    bootstrap.assign(static_cast<std::size_t>(envs), 0.0f);
  }

  std::size_t idx(int t, int i) const {
    return static_cast<std::size_t>(t) * n_envs + static_cast<std::size_t>(i);
  }
  std::size_t size() const { return obs.size(); }
};

// r = r_e + beta * r_i
inline float combine_rewards(float r_ext, float r_int_scaled, float beta) {
  return r_ext + beta * r_int_scaled;
}

struct Gae {
  std::vector<double> adv;
  std::vector<double> ret;
};

// delta_t = r_t + gamma (1 - done_t) V_{t+1} - V_t
// A_t = delta_t + gamma lambda (1 - done_t) A_{t+1}
// Episodes cut by the step limit bootstrap with the value of their final
// observation instead of zero; the advantage chain still resets there.
inline Gae compute_gae(const Rollout& r, const std::vector<float>& combined, double gamma,
                       double lambda) {
  if (combined.size() != r.size()) throw std::invalid_argument("compute_gae: reward size");
  Gae g;
  g.adv.assign(r.size(), 0.0);
  g.ret.assign(r.size(), 0.0);
  for (int i = 0; i < r.n_envs; ++i) {
    double next_adv = 0.0;
    double next_value = r.bootstrap[static_cast<std::size_t>(i)];
    for (int t = r.len - 1; t >= 0; --t) {
      const std::size_t k = r.idx(t, i);
      double nv = next_value;
      double na = next_adv;
      if (r.done[k]) {
        nv = r.truncated[k] ? static_cast<double>(r.trunc_bootstrap[k]) : 0.0;
        na = 0.0;
      }
      const double delta = combined[k] + gamma * nv - static_cast<double>(r.value[k]);
      const double adv = delta + gamma * lambda * na;
      g.adv[k] = adv;
      g.ret[k] = adv + static_cast<double>(r.value[k]);
      next_adv = adv;
      next_value = static_cast<double>(r.value[k]);
    }
  }
  return g;
}

struct UpdateStats {
  double policy_loss = 0;
  double value_loss = 0;
  double entropy = 0;
  double clip_frac = 0;
  double grad_norm = 0;
  int minibatches = 0;
};

// Clipped-surrogate update: `epochs` passes of shuffled minibatches,
// advantages normalized per minibatch, one optimizer step per minibatch.
template <typename S>
UpdateStats ppo_update(const Rollout& roll, const Gae& gae, ParamStore<S>& ps,
                       ArchitectureKind arch, const PpoConfig& cfg, Rng& shuffle_rng) {
  cfg.validate();
  const int n = static_cast<int>(roll.size());
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  UpdateStats stats;
  std::vector<Observation> batch_obs(static_cast<std::size_t>(cfg.minibatch));
  std::vector<int> batch_act(static_cast<std::size_t>(cfg.minibatch));

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    for (int start = 0; start < n; start += cfg.minibatch) {
      const int b = std::min(cfg.minibatch, n - start);
      Tensor<S> old_logp({b, 1});
      Tensor<S> adv({b, 1});
      Tensor<S> ret({b, 1});
      double adv_mean = 0;
      for (int j = 0; j < b; ++j) {
        const std::size_t k = static_cast<std::size_t>(order[static_cast<std::size_t>(start + j)]);
        batch_obs[static_cast<std::size_t>(j)] = roll.obs[k];
        batch_act[static_cast<std::size_t>(j)] = roll.action[k];
        old_logp[j] = static_cast<S>(roll.logp[k]);
        adv[j] = static_cast<S>(gae.adv[k]);
        ret[j] = static_cast<S>(gae.ret[k]);
        adv_mean += gae.adv[k];
      }
      adv_mean /= b;
      double adv_var = 0;
      for (int j = 0; j < b; ++j) {
        const double d = static_cast<double>(adv[j]) - adv_mean;
        adv_var += d * d;
      }
      const double adv_std = std::sqrt(adv_var / b);
      for (int j = 0; j < b; ++j)
        adv[j] = static_cast<S>((static_cast<double>(adv[j]) - adv_mean) / (adv_std + 1e-8));

      Tape<S> t;
      const int input = t.constant(
          obs_to_input<S>(arch, std::span<const Observation>(batch_obs.data(),
                                                             static_cast<std::size_t>(b))));
      const PolicyNodes pn = policy_graph(t, ps, arch, input);
      const int logp_all = log_softmax(t, pn.logits);
      const int logp_a =
          pick(t, logp_all, std::vector<int>(batch_act.begin(), batch_act.begin() + b));
      const int ratio = imlab::exp(t, sub(t, logp_a, t.constant(old_logp)));
      const int adv_c = t.constant(adv);
      const int surr1 = mul(t, ratio, adv_c);
      const int surr2 = mul(t, clamp(t, ratio, static_cast<S>(1.0 - cfg.clip),
                                     static_cast<S>(1.0 + cfg.clip)),
                            adv_c);
      const int policy_loss = scale(t, mean(t, minimum(t, surr1, surr2)), S(-1));
      const int value_loss = mean(t, square(t, sub(t, pn.value, t.constant(ret))));
      const int probs = imlab::exp(t, logp_all);
      const int entropy = scale(t, mean(t, row_sum(t, mul(t, probs, logp_all))), S(-1));
      const int loss = add(t, add(t, policy_loss, scale(t, value_loss,
                                                        static_cast<S>(cfg.value_coef))),
                           scale(t, entropy, static_cast<S>(-cfg.entropy_coef)));

      const double pl = t.val(policy_loss)[0];
      const double vl = t.val(value_loss)[0];
      const double ent = t.val(entropy)[0];
      if (!std::isfinite(pl) || !std::isfinite(vl) || !std::isfinite(ent)) {
        std::ostringstream msg;
        msg << "ppo_update: non-finite loss (policy=" << pl << " value=" << vl
            << " entropy=" << ent << ") at epoch " << epoch << " offset " << start;
        throw std::runtime_error(msg.str());
      }

      int clipped = 0;
      for (int j = 0; j < b; ++j)
        if (std::abs(static_cast<double>(t.val(ratio)[j]) - 1.0) > cfg.clip) ++clipped;

      t.backward(loss);
      ps.check_finite_grads();
      ps.clip_grad_norm(cfg.max_grad_norm);
      stats.grad_norm += ps.grad_norm();
      ps.adam_step(cfg.lr, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
      ps.zero_grads();

      stats.policy_loss += pl;
      stats.value_loss += vl;
      stats.entropy += ent;
      stats.clip_frac += static_cast<double>(clipped) / b;
      ++stats.minibatches;
    }
  }
  if (stats.minibatches > 0) {
    stats.policy_loss /= stats.minibatches;
    stats.value_loss /= stats.minibatches;
    stats.entropy /= stats.minibatches;
    stats.clip_frac /= stats.minibatches;
    stats.grad_norm /= stats.minibatches;
  }
  return stats;
}

}  // namespace imlab

#endif  // IMLAB_PPO_HPP
