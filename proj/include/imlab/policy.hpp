#ifndef IMLAB_POLICY_HPP
#define IMLAB_POLICY_HPP

#include "imlab/gridworld.hpp"
#include "imlab/nn.hpp"

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

namespace imlab {

enum class ArchitectureKind { Lightweight, Default };

inline constexpr double kObsNormalizer = 10.0;  // raw channel ids are < 10

inline const char* arch_name(ArchitectureKind k) {
  return k == ArchitectureKind::Lightweight ? "lightweight" : "default";
}

// Observations to network input: lightweight nets eat the flattened 147-dim
// vector, the conv stack eats channels-first 3x7x7.  Ids are scaled to O(1).
template <typename S>
Tensor<S> obs_to_input(ArchitectureKind kind, std::span<const Observation> batch) {
  const int b = static_cast<int>(batch.size());
  if (kind == ArchitectureKind::Lightweight) {
    Tensor<S> x({b, kObsSize});
    S* out = x.data();
    for (int n = 0; n < b; ++n)
      for (int i = 0; i < kObsSize; ++i)
        out[n * kObsSize + i] =
            static_cast<S>(batch[static_cast<std::size_t>(n)].data[static_cast<std::size_t>(i)]) /
            static_cast<S>(kObsNormalizer);
    return x;
  }
  Tensor<S> x({b, kObsChannels, kViewSize, kViewSize});
  S* out = x.data();
  for (int n = 0; n < b; ++n)
    for (int c = 0; c < kObsChannels; ++c)
      for (int y = 0; y < kViewSize; ++y)
        for (int xx = 0; xx < kViewSize; ++xx)
          out[((n * kObsChannels + c) * kViewSize + y) * kViewSize + xx] =
              static_cast<S>(
                  batch[static_cast<std::size_t>(n)].data[static_cast<std::size_t>(
                      (y * kViewSize + xx) * kObsChannels + c)]) /
              static_cast<S>(kObsNormalizer);
  return x;
}

// Actor-critic parameters.
//
// lightweight: two independent MLPs on the flat observation,
//   actor  147 -> 64 -> 64 -> 7   (14,087 parameters)
//   critic 147 -> 64 -> 64 -> 1   (13,697 parameters)
// default: shared trunk conv3x3(3->32) -> conv(32->32) -> conv(32->32),
//   stride 2 / pad 1 shrinking 7->4->2->1, flatten 32 -> FC-256, then a 7-way
//   policy head and a scalar value head (29,896 parameters).
template <typename S>
void build_policy(ParamStore<S>& ps, ArchitectureKind kind, Rng& rng) {
  const double hidden_gain = std::sqrt(2.0);
  if (kind == ArchitectureKind::Lightweight) {
    add_dense(ps, "actor.fc1", kObsSize, 64, hidden_gain, rng);
    add_dense(ps, "actor.fc2", 64, 64, hidden_gain, rng);
    add_dense(ps, "actor.head", 64, kNumActions, 0.01, rng);
    add_dense(ps, "critic.fc1", kObsSize, 64, hidden_gain, rng);
    add_dense(ps, "critic.fc2", 64, 64, hidden_gain, rng);
    add_dense(ps, "critic.head", 64, 1, 1.0, rng);
  } else {
    add_conv3x3(ps, "trunk.conv1", kObsChannels, 32, hidden_gain, rng);
    add_conv3x3(ps, "trunk.conv2", 32, 32, hidden_gain, rng);
    add_conv3x3(ps, "trunk.conv3", 32, 32, hidden_gain, rng);
    add_dense(ps, "trunk.fc", 32, 256, hidden_gain, rng);
    add_dense(ps, "pi", 256, kNumActions, 0.01, rng);
    add_dense(ps, "v", 256, 1, 1.0, rng);
  }
}

struct PolicyNodes {
  int logits = -1;  // (B x 7)
  int value = -1;   // (B x 1)
};

template <typename S>
PolicyNodes policy_graph(Tape<S>& t, ParamStore<S>& ps, ArchitectureKind kind, int input) {
  PolicyNodes out;
  if (kind == ArchitectureKind::Lightweight) {
    int a = relu(t, dense(t, ps, "actor.fc1", input));
    a = relu(t, dense(t, ps, "actor.fc2", a));
    out.logits = dense(t, ps, "actor.head", a);
    int c = relu(t, dense(t, ps, "critic.fc1", input));
    c = relu(t, dense(t, ps, "critic.fc2", c));
    out.value = dense(t, ps, "critic.head", c);
  } else {
    const int b = t.val(input).dim(0);
    int h = relu(t, conv(t, ps, "trunk.conv1", input));
    h = relu(t, conv(t, ps, "trunk.conv2", h));
    h = relu(t, conv(t, ps, "trunk.conv3", h));
    h = reshape(t, h, {b, 32});
    h = relu(t, dense(t, ps, "trunk.fc", h));
    out.logits = dense(t, ps, "pi", h);
    out.value = dense(t, ps, "v", h);
  }
  return out;
}

// Forward pass without gradients.
template <typename S>
struct PolicyOutput {
  Tensor<S> logits;  // (B x 7)
  Tensor<S> value;   // (B x 1)
};

template <typename S>
PolicyOutput<S> policy_forward(ParamStore<S>& ps, ArchitectureKind kind,
                               std::span<const Observation> batch) {
  Tape<S> t;
  const int input = t.constant(obs_to_input<S>(kind, batch));
  const PolicyNodes n = policy_graph(t, ps, kind, input);
  return {t.val(n.logits), t.val(n.value)};
}

// Table-style component counts.
template <typename S>
long actor_param_count(const ParamStore<S>& ps) { return ps.param_count("actor."); }
template <typename S>
long critic_param_count(const ParamStore<S>& ps) { return ps.param_count("critic."); }

}  // namespace imlab

#endif  // IMLAB_POLICY_HPP
