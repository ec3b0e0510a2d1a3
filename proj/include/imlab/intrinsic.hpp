#ifndef IMLAB_INTRINSIC_HPP
#define IMLAB_INTRINSIC_HPP

#include "imlab/policy.hpp"

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace imlab {

enum class IntrinsicKind { Counts, Rnd, Icm, Ride };
enum class EpisodicScaling { NoEp, Ep, First };

inline const char* intrinsic_name(IntrinsicKind k) {
  switch (k) {
    case IntrinsicKind::Counts: return "counts";
    case IntrinsicKind::Rnd: return "rnd";
    case IntrinsicKind::Icm: return "icm";
    case IntrinsicKind::Ride: return "ride";
  }
  return "?";
}

inline const char* scaling_name(EpisodicScaling s) {
  switch (s) {
    case EpisodicScaling::NoEp: return "noep";
    case EpisodicScaling::Ep: return "ep";
    case EpisodicScaling::First: return "first";
  }
  return "?";
}

// Experiment-level visitation counts; never reset.
class CountTable {
 public:
  // Post-increment bonus 1/sqrt(N(s)).
  double reward(const StateKey& key) {
    const std::uint64_t n = ++table_[key];
    return 1.0 / std::sqrt(static_cast<double>(n));
  }

  std::uint64_t count(const StateKey& key) const {
    auto it = table_.find(key);
    return it == table_.end() ? 0 : it->second;
  }

  std::size_t distinct_states() const { return table_.size(); }

 private:
  std::unordered_map<StateKey, std::uint64_t> table_;
};

// Within-episode visitation counts; cleared at every episode boundary.
class EpisodicCountTable {
 public:
  // Post-increment count of this visit.
  std::uint64_t visit(const StateKey& key) { return ++table_[key]; }

  std::uint64_t count(const StateKey& key) const {
    auto it = table_.find(key);
    return it == table_.end() ? 0 : it->second;
  }

  void clear() { table_.clear(); }
  std::size_t distinct_states() const { return table_.size(); }

 private:
  std::unordered_map<StateKey, std::uint64_t> table_;
};

// Episodic discounting of a raw bonus: identity, 1/sqrt(N_ep), or first-visit
// gating.  Counts the visit as a side effect; call exactly once per
// transition with the key of the next state.
inline double apply_scaling(double raw, const StateKey& key_next, EpisodicScaling mode,
                            EpisodicCountTable& ep_table) {
  const std::uint64_t k = ep_table.visit(key_next);
  switch (mode) {
    case EpisodicScaling::NoEp: return raw;
    case EpisodicScaling::Ep: return raw / std::sqrt(static_cast<double>(k));
    case EpisodicScaling::First: return k == 1 ? raw : 0.0;
  }
  return raw;
}

// Squared L2 and L2 distances between matching rows; the reward kernels of
// RND (Eq. with squared norm) and ICM/RIDE (plain norm).
template <typename S>
std::vector<S> squared_l2_rows(const Tensor<S>& a, const Tensor<S>& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("squared_l2_rows: shape mismatch");
  const int rows = a.dim(0);
  std::vector<S> out(static_cast<std::size_t>(rows));
  auto am = a.mat2(), bm = b.mat2();
  for (int i = 0; i < rows; ++i) out[static_cast<std::size_t>(i)] = (am.row(i) - bm.row(i)).squaredNorm();
  return out;
}

template <typename S>
std::vector<S> l2_rows(const Tensor<S>& a, const Tensor<S>& b) {
  auto out = squared_l2_rows(a, b);
  for (auto& v : out) v = std::sqrt(v);
  return out;
}

// Curiosity networks.  RND holds a trainable predictor and a frozen random
// target of identical architecture; ICM and RIDE share one embedding plus
// forward and inverse dynamics models (identical nets, different reward).
//
// Embeddings mirror the policy body: lightweight 147 -> 64 -> 64 (13,632
// parameters), default the 3-conv stack flattened to 32 (19,392 parameters).
// The forward model takes concat(embedding, one-hot action); the inverse
// model takes concat(embedding_t, embedding_t+1).
template <typename S>
struct CuriosityNets {
  IntrinsicKind kind = IntrinsicKind::Counts;
  ArchitectureKind arch = ArchitectureKind::Default;
  ParamStore<S> params;  // trainable
  ParamStore<S> target;  // rnd frozen target

  int embed_dim() const { return arch == ArchitectureKind::Lightweight ? 64 : 32; }
};

template <typename S>
void add_embedding(ParamStore<S>& ps, ArchitectureKind arch, Rng& rng) {
  const double g = std::sqrt(2.0);
  if (arch == ArchitectureKind::Lightweight) {
    add_dense(ps, "embed.fc1", kObsSize, 64, g, rng);
    add_dense(ps, "embed.fc2", 64, 64, 1.0, rng);
  } else {
    add_conv3x3(ps, "embed.conv1", kObsChannels, 32, g, rng);
    add_conv3x3(ps, "embed.conv2", 32, 32, g, rng);
    add_conv3x3(ps, "embed.conv3", 32, 32, 1.0, rng);
  }
}

template <typename S>
int embed_graph(Tape<S>& t, ParamStore<S>& ps, ArchitectureKind arch, int input) {
  if (arch == ArchitectureKind::Lightweight) {
    return dense(t, ps, "embed.fc2", relu(t, dense(t, ps, "embed.fc1", input)));
  }
  const int b = t.val(input).dim(0);
  int h = relu(t, conv(t, ps, "embed.conv1", input));
  h = relu(t, conv(t, ps, "embed.conv2", h));
  h = conv(t, ps, "embed.conv3", h);
  return reshape(t, h, {b, 32});
}

template <typename S>
CuriosityNets<S> build_curiosity(IntrinsicKind kind, ArchitectureKind arch, Rng rng) {
  CuriosityNets<S> nets;
  nets.kind = kind;
  nets.arch = arch;
  if (kind == IntrinsicKind::Counts) return nets;

  const double g = std::sqrt(2.0);
  if (kind == IntrinsicKind::Rnd) {
    // target drawn first, then the predictor, from independent streams
    Rng target_rng = rng.fork(1);
    Rng pred_rng = rng.fork(2);
    add_embedding(nets.target, arch, target_rng);
    add_embedding(nets.params, arch, pred_rng);
    return nets;
  }

  Rng embed_rng = rng.fork(3);
  add_embedding(nets.params, arch, embed_rng);
  const int e = nets.embed_dim();
  if (arch == ArchitectureKind::Lightweight) {
    add_dense(nets.params, "forward.fc1", e + kNumActions, 64, g, rng);
    add_dense(nets.params, "forward.fc2", 64, 64, g, rng);
    add_dense(nets.params, "forward.out", 64, e, 1.0, rng);
    add_dense(nets.params, "inverse.fc1", 2 * e, 64, g, rng);
    add_dense(nets.params, "inverse.fc2", 64, 64, g, rng);
    add_dense(nets.params, "inverse.head", 64, kNumActions, 1.0, rng);
  } else {
    add_dense(nets.params, "forward.fc1", e + kNumActions, 256, g, rng);
    add_dense(nets.params, "forward.out", 256, e, 1.0, rng);
    add_dense(nets.params, "inverse.fc1", 2 * e, 256, g, rng);
    add_dense(nets.params, "inverse.head", 256, kNumActions, 1.0, rng);
  }
  return nets;
}

template <typename S>
int forward_model_graph(Tape<S>& t, ParamStore<S>& ps, ArchitectureKind arch, int embed,
                        int action_onehot) {
  int h = concat_cols(t, embed, action_onehot);
  if (arch == ArchitectureKind::Lightweight) {
    h = relu(t, dense(t, ps, "forward.fc1", h));
    h = relu(t, dense(t, ps, "forward.fc2", h));
    return dense(t, ps, "forward.out", h);
  }
  h = relu(t, dense(t, ps, "forward.fc1", h));
  return dense(t, ps, "forward.out", h);
}

template <typename S>
int inverse_model_graph(Tape<S>& t, ParamStore<S>& ps, ArchitectureKind arch, int embed_a,
                        int embed_b) {
  int h = concat_cols(t, embed_a, embed_b);
  if (arch == ArchitectureKind::Lightweight) {
    h = relu(t, dense(t, ps, "inverse.fc1", h));
    h = relu(t, dense(t, ps, "inverse.fc2", h));
    return dense(t, ps, "inverse.head", h);
  }
  h = relu(t, dense(t, ps, "inverse.fc1", h));
  return dense(t, ps, "inverse.head", h);
}

template <typename S>
Tensor<S> one_hot_actions(std::span<const int> actions) {
  Tensor<S> t({static_cast<int>(actions.size()), kNumActions});
  for (std::size_t i = 0; i < actions.size(); ++i)
    t[static_cast<int>(i) * kNumActions + actions[i]] = S(1);
  return t;
}

// r = || predictor(s') - target(s') ||^2 per observation.
template <typename S>
std::vector<S> rnd_rewards(CuriosityNets<S>& nets, std::span<const Observation> next_obs) {
  Tape<S> t;
  const int x = t.constant(obs_to_input<S>(nets.arch, next_obs));
  const int pred = embed_graph(t, nets.params, nets.arch, x);
  const int targ = embed_graph(t, nets.target, nets.arch, x);
  return squared_l2_rows(t.val(pred), t.val(targ));
}

template <typename S>
S rnd_reward(CuriosityNets<S>& nets, const Observation& next_obs) {
  return rnd_rewards(nets, std::span<const Observation>(&next_obs, 1))[0];
}

// One gradient step on the predictor toward the frozen target; returns the
// mean squared embedding error over the batch.
template <typename S>
S rnd_update(CuriosityNets<S>& nets, std::span<const Observation> next_obs, double lr,
             double adam_eps = 1e-5) {
  Tape<S> t;
  const int x = t.constant(obs_to_input<S>(nets.arch, next_obs));
  const int pred = embed_graph(t, nets.params, nets.arch, x);
  Tape<S> frozen;
  const int xt = frozen.constant(obs_to_input<S>(nets.arch, next_obs));
  const int targ_value = embed_graph(frozen, nets.target, nets.arch, xt);
  const int targ = t.constant(frozen.val(targ_value));
  const int loss = mean(t, square(t, sub(t, pred, targ)));
  const S loss_v = t.val(loss)[0];
  if (!std::isfinite(static_cast<double>(loss_v)))
    throw std::runtime_error("rnd_update: non-finite loss");
  t.backward(loss);
  nets.params.check_finite_grads();
  nets.params.adam_step(lr, 0.9, 0.999, adam_eps);
  nets.params.zero_grads();
  return loss_v;
}

// ICM: forward-model error in latent space.  RIDE: distance between the
// embeddings of consecutive states.  Both read-only.
template <typename S>
std::vector<S> curiosity_rewards(CuriosityNets<S>& nets, std::span<const Observation> obs,
                                 std::span<const int> actions,
                                 std::span<const Observation> next_obs) {
  Tape<S> t;
  const int xn = t.constant(obs_to_input<S>(nets.arch, next_obs));
  const int en = embed_graph(t, nets.params, nets.arch, xn);
  if (nets.kind == IntrinsicKind::Ride) {
    const int x = t.constant(obs_to_input<S>(nets.arch, obs));
    const int e = embed_graph(t, nets.params, nets.arch, x);
    return l2_rows(t.val(en), t.val(e));
  }
  const int x = t.constant(obs_to_input<S>(nets.arch, obs));
  const int e = embed_graph(t, nets.params, nets.arch, x);
  const int onehot = t.constant(one_hot_actions<S>(actions));
  const int predicted = forward_model_graph(t, nets.params, nets.arch, e, onehot);
  return l2_rows(t.val(predicted), t.val(en));
}

template <typename S>
S curiosity_reward(CuriosityNets<S>& nets, const Observation& obs, int action,
                   const Observation& next_obs) {
  return curiosity_rewards(nets, std::span<const Observation>(&obs, 1),
                           std::span<const int>(&action, 1),
                           std::span<const Observation>(&next_obs, 1))[0];
}

struct CuriosityLosses {
  double forward_loss = 0;
  double inverse_loss = 0;
};

// Joint step on forward MSE + inverse cross-entropy; the embedding trains
// only through these two losses.
template <typename S>
CuriosityLosses curiosity_update(CuriosityNets<S>& nets, std::span<const Observation> obs,
                                 std::span<const int> actions,
                                 std::span<const Observation> next_obs, double lr,
                                 double lambda_forward = 1.0, double lambda_inverse = 1.0,
                                 double adam_eps = 1e-5) {
  Tape<S> t;
  const int x = t.constant(obs_to_input<S>(nets.arch, obs));
  const int xn = t.constant(obs_to_input<S>(nets.arch, next_obs));
  const int e = embed_graph(t, nets.params, nets.arch, x);
  const int en = embed_graph(t, nets.params, nets.arch, xn);
  const int onehot = t.constant(one_hot_actions<S>(actions));
  const int predicted = forward_model_graph(t, nets.params, nets.arch, e, onehot);
  const int fwd_loss = mean(t, square(t, sub(t, predicted, en)));
  const int inv_logits = inverse_model_graph(t, nets.params, nets.arch, e, en);
  const int logp = log_softmax(t, inv_logits);
  std::vector<int> idx(actions.begin(), actions.end());
  const int inv_loss = scale(t, mean(t, pick(t, logp, std::move(idx))), S(-1));
  const int loss = add(t, scale(t, fwd_loss, static_cast<S>(lambda_forward)),
                       scale(t, inv_loss, static_cast<S>(lambda_inverse)));
  CuriosityLosses out{static_cast<double>(t.val(fwd_loss)[0]),
                      static_cast<double>(t.val(inv_loss)[0])};
  if (!std::isfinite(out.forward_loss) || !std::isfinite(out.inverse_loss))
    throw std::runtime_error("curiosity_update: non-finite loss");
  t.backward(loss);
  nets.params.check_finite_grads();
  nets.params.adam_step(lr, 0.9, 0.999, adam_eps);
  nets.params.zero_grads();
  return out;
}

// Inverse-model action prediction (argmax), for diagnostics and tests.
template <typename S>
std::vector<int> inverse_predictions(CuriosityNets<S>& nets, std::span<const Observation> obs,
                                     std::span<const Observation> next_obs) {
  Tape<S> t;
  const int e = embed_graph(t, nets.params, nets.arch,
                            t.constant(obs_to_input<S>(nets.arch, obs)));
  const int en = embed_graph(t, nets.params, nets.arch,
                             t.constant(obs_to_input<S>(nets.arch, next_obs)));
  const int logits = inverse_model_graph(t, nets.params, nets.arch, e, en);
  const auto lm = t.val(logits).mat2();
  std::vector<int> out(static_cast<std::size_t>(lm.rows()));
  for (int i = 0; i < lm.rows(); ++i) {
    int best = 0;
    lm.row(i).maxCoeff(&best);
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

}  // namespace imlab

#endif  // IMLAB_INTRINSIC_HPP
