#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "imlab/intrinsic.hpp"
#include "test_support.hpp"

#include <cmath>
#include <cstring>

using namespace imlab;

namespace {

Observation obs_with_leading(std::uint8_t a, std::uint8_t b = 0) {
  Observation o;
  o.data[0] = a;
  o.data[1] = b;
  return o;
}

StateKey key_of(std::uint8_t a) { return state_key(obs_with_leading(a)); }

}  // namespace

TEST_CASE("counts bonus follows 1/sqrt(N)") {
  CountTable t;
  const StateKey k = key_of(1);
  CHECK(t.reward(k) == doctest::Approx(1.0));        // first visit
  CHECK(t.reward(k) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(t.reward(k) == doctest::Approx(1.0 / std::sqrt(3.0)));
  CHECK(t.reward(k) == doctest::Approx(0.5));        // fourth
  for (int i = 5; i <= 8; ++i) t.reward(k);
  CHECK(t.reward(k) == doctest::Approx(1.0 / 3.0));  // ninth
  CHECK(t.count(k) == 9);
  CHECK(t.count(key_of(9)) == 0);
  // independent keys do not interact
  CHECK(t.reward(key_of(2)) == doctest::Approx(1.0));
}

TEST_CASE("episodic scaling modes") {
  EpisodicCountTable ep;
  const StateKey k = key_of(3);
  // mode ep: k-th within-episode visit scales by 1/sqrt(k)
  CHECK(apply_scaling(0.8, k, EpisodicScaling::Ep, ep) == doctest::Approx(0.8));
  CHECK(apply_scaling(0.8, k, EpisodicScaling::Ep, ep) == doctest::Approx(0.8 / std::sqrt(2.0)));
  CHECK(apply_scaling(0.8, k, EpisodicScaling::Ep, ep) == doctest::Approx(0.8 / std::sqrt(3.0)));
  CHECK(apply_scaling(0.8, k, EpisodicScaling::Ep, ep) == doctest::Approx(0.4));  // fourth

  ep.clear();
  CHECK(apply_scaling(0.8, k, EpisodicScaling::First, ep) == doctest::Approx(0.8));
  CHECK(apply_scaling(0.8, k, EpisodicScaling::First, ep) == 0.0);  // second visit
  CHECK(apply_scaling(123.0, k, EpisodicScaling::First, ep) == 0.0);

  ep.clear();
  for (double raw : {0.1, 0.9, 7.5})
    CHECK(apply_scaling(raw, k, EpisodicScaling::NoEp, ep) == raw);
}

TEST_CASE("scaling properties over random visit patterns") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    EpisodicCountTable ep;
    std::vector<std::uint64_t> seen(4, 0);
    double first_sum[4] = {0, 0, 0, 0};
    for (int i = 0; i < 50; ++i) {
      const int which = rng.index(4);
      const StateKey k = key_of(static_cast<std::uint8_t>(which));
      const double raw = rng.uniform();
      const double ep_scaled = apply_scaling(raw, k, EpisodicScaling::Ep, ep);
      ++seen[static_cast<std::size_t>(which)];
      const double expected = raw / std::sqrt(static_cast<double>(seen[static_cast<std::size_t>(which)]));
      CHECK(ep_scaled == expected);  // exact
    }
    ep.clear();
    std::fill(seen.begin(), seen.end(), 0);
    for (int i = 0; i < 50; ++i) {
      const int which = rng.index(4);
      const StateKey k = key_of(static_cast<std::uint8_t>(which));
      first_sum[which] += apply_scaling(1.0, k, EpisodicScaling::First, ep) > 0 ? 1 : 0;
    }
    for (int w = 0; w < 4; ++w) CHECK(first_sum[w] <= 1.0);  // at most one nonzero per episode
  }
}

TEST_CASE("experiment table survives episode boundaries, episodic does not") {
  CountTable global;
  EpisodicCountTable ep;
  const StateKey k = key_of(7);
  global.reward(k);
  ep.visit(k);
  ep.clear();  // episode boundary
  CHECK(global.count(k) == 1);
  CHECK(ep.count(k) == 0);
}

TEST_CASE("curiosity nets match the reference parameter counts") {
  Rng rng(2);
  {
    auto rnd = build_curiosity<float>(IntrinsicKind::Rnd, ArchitectureKind::Lightweight, rng);
    CHECK(rnd.params.param_count() == 13632);
    CHECK(rnd.target.param_count() == 13632);
  }
  {
    auto rnd = build_curiosity<float>(IntrinsicKind::Rnd, ArchitectureKind::Default, rng);
    CHECK(rnd.params.param_count() == 19392);
    CHECK(rnd.target.param_count() == 19392);
  }
  {
    auto ride = build_curiosity<float>(IntrinsicKind::Ride, ArchitectureKind::Lightweight, rng);
    CHECK(ride.params.param_count("embed.") == 13632);
    CHECK(ride.params.param_count("inverse.") == 12871);
    CHECK(ride.params.param_count("forward.") == 12928);
    CHECK(ride.params.param_count() == 39431);
  }
  {
    auto ride = build_curiosity<float>(IntrinsicKind::Ride, ArchitectureKind::Default, rng);
    CHECK(ride.params.param_count("embed.") == 19392);
    CHECK(ride.params.param_count("inverse.") == 18439);
    CHECK(ride.params.param_count("forward.") == 18464);
    CHECK(ride.params.param_count() == 56295);
  }
}

TEST_CASE("distance kernels: the two-dimensional reference values") {
  TensorF a({1, 2});
  TensorF b({1, 2});
  a[0] = 1;  // (1, 0) vs (0, 1)
  b[1] = 1;
  CHECK(squared_l2_rows(a, b)[0] == doctest::Approx(2.0));

  TensorF c({1, 2});  // (0,0) vs (3,4)
  TensorF d({1, 2});
  d[0] = 3;
  d[1] = 4;
  CHECK(l2_rows(c, d)[0] == doctest::Approx(5.0));
}

TEST_CASE("rnd: exact-copy predictor and hand-set constant nets") {
  Rng rng(3);
  auto nets = build_curiosity<float>(IntrinsicKind::Rnd, ArchitectureKind::Lightweight, rng);
  // exact copy of the target: reward 0
  for (auto& e : nets.params)
    std::memcpy(e.value.data(), nets.target.value(e.name).data(),
                sizeof(float) * static_cast<std::size_t>(e.value.size()));
  const Observation o = obs_with_leading(4);
  CHECK(rnd_reward(nets, o) == doctest::Approx(0.0));

  // constant nets: predictor emits (1, 0, 0...), target (0, 1, 0...): reward 2
  for (auto& e : nets.params) e.value.set_zero();
  for (auto& e : nets.target) e.value.set_zero();
  nets.params.value("embed.fc2.b")[0] = 1.0f;
  nets.target.value("embed.fc2.b")[1] = 1.0f;
  CHECK(rnd_reward(nets, o) == doctest::Approx(2.0));
}

TEST_CASE("rnd rewards are nonnegative everywhere") {
  Rng rng(4);
  for (auto arch : {ArchitectureKind::Lightweight, ArchitectureKind::Default}) {
    auto nets = build_curiosity<float>(IntrinsicKind::Rnd, arch, rng);
    for (int i = 0; i < 20; ++i) {
      Observation o;
      for (auto& v : o.data) v = static_cast<std::uint8_t>(rng.index(9));
      CHECK(rnd_reward(nets, o) >= 0.0f);
    }
  }
}

TEST_CASE("rnd update: loss decreases, target frozen, zero lr is a no-op") {
  Rng rng(5);
  auto nets = build_curiosity<float>(IntrinsicKind::Rnd, ArchitectureKind::Lightweight, rng);
  std::vector<Observation> batch(8, obs_with_leading(2, 5));

  std::vector<float> target_before;
  for (const auto& e : nets.target)
    for (int i = 0; i < e.value.size(); ++i) target_before.push_back(e.value[i]);

  // zero learning rate leaves the loss unchanged
  const float l0 = rnd_update(nets, batch, 0.0);
  const float l1 = rnd_update(nets, batch, 0.0);
  CHECK(l0 == l1);

  float prev = l1;
  int violations = 0;
  for (int i = 0; i < 100; ++i) {
    const float l = rnd_update(nets, batch, 1e-3);
    if (l > prev) ++violations;
    prev = l;
  }
  CHECK(violations <= 5);
  CHECK(prev < l1);

  std::size_t k = 0;
  for (const auto& e : nets.target)
    for (int i = 0; i < e.value.size(); ++i) CHECK(e.value[i] == target_before[k++]);
}

TEST_CASE("ride reward: zero for identical states, reference distance") {
  Rng rng(6);
  auto nets = build_curiosity<float>(IntrinsicKind::Ride, ArchitectureKind::Lightweight, rng);
  const Observation o = obs_with_leading(3, 1);
  CHECK(curiosity_reward(nets, o, 2, o) == doctest::Approx(0.0));

  // any transition: nonnegative
  const Observation o2 = obs_with_leading(5, 2);
  CHECK(curiosity_reward(nets, o, 1, o2) >= 0.0f);
}

TEST_CASE("icm reward: zero under an identity forward model on constant embeddings") {
  Rng rng(7);
  auto nets = build_curiosity<float>(IntrinsicKind::Icm, ArchitectureKind::Lightweight, rng);
  // constant nonnegative embedding: zero weights, bias 0.5
  for (auto& e : nets.params) e.value.set_zero();
  nets.params.value("embed.fc2.b").array() = 0.5f;
  // forward model: identity on the embedding block through both relu layers
  auto set_identity = [&](const std::string& name, int rows) {
    auto w = nets.params.value(name).mat2();
    for (int i = 0; i < rows && i < w.cols(); ++i) w(i, i) = 1.0f;
  };
  set_identity("forward.fc1.w", 64);  // 71 x 64: identity on the embedding block
  set_identity("forward.fc2.w", 64);
  set_identity("forward.out.w", 64);
  const Observation o = obs_with_leading(1);
  CHECK(curiosity_reward(nets, o, 3, o) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("icm and ride share identical networks given the same seed") {
  auto icm = build_curiosity<float>(IntrinsicKind::Icm, ArchitectureKind::Lightweight, Rng(77));
  auto ride = build_curiosity<float>(IntrinsicKind::Ride, ArchitectureKind::Lightweight, Rng(77));
  CHECK(icm.params.values_equal(ride.params));

  // ride's bonus ignores the forward model entirely
  Rng rng(8);
  Observation a = obs_with_leading(1, 2), b = obs_with_leading(6, 3);
  const float before = curiosity_reward(ride, a, 0, b);
  ride.params.value("forward.fc1.w").array() += 0.25f;
  const float after = curiosity_reward(ride, a, 0, b);
  CHECK(before == after);
  // while icm's bonus does depend on it
  const float icm_before = curiosity_reward(icm, a, 0, b);
  icm.params.value("forward.fc1.w").array() += 0.25f;
  const float icm_after = curiosity_reward(icm, a, 0, b);
  CHECK(icm_before != icm_after);
}

TEST_CASE("curiosity update: zero lr no-op; forward loss finite on s'=s") {
  Rng rng(9);
  auto nets = build_curiosity<float>(IntrinsicKind::Icm, ArchitectureKind::Lightweight, rng);
  std::vector<Observation> obs{obs_with_leading(1), obs_with_leading(2)};
  std::vector<int> act{0, 1};

  auto snapshot = [&] {
    std::vector<float> v;
    for (const auto& e : nets.params)
      for (int i = 0; i < e.value.size(); ++i) v.push_back(e.value[i]);
    return v;
  };
  const auto before = snapshot();
  const CuriosityLosses l = curiosity_update(nets, obs, act, obs, 0.0);
  CHECK(l.forward_loss >= 0.0);
  CHECK(std::isfinite(l.forward_loss));
  CHECK(std::isfinite(l.inverse_loss));
  CHECK(before == snapshot());
}

TEST_CASE("inverse model learns a 4-state deterministic toy world") {
  // states are distinct observations; action a maps state i to (i + a) mod 4,
  // using only actions 0..3 so transitions identify actions uniquely
  Rng rng(10);
  auto nets = build_curiosity<float>(IntrinsicKind::Icm, ArchitectureKind::Lightweight, rng);
  std::vector<Observation> states;
  for (int i = 0; i < 4; ++i) {
    Observation o;
    for (int j = 0; j < 12; ++j)
      o.data[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>((i >> (j % 2)) & 1 ? 8 : 1);
    o.data[20] = static_cast<std::uint8_t>(i * 2);
    states.push_back(o);
  }
  std::vector<Observation> obs, next;
  std::vector<int> act;
  Rng order(11);
  for (int n = 0; n < 64; ++n) {
    const int s = order.index(4);
    const int a = order.index(4);
    obs.push_back(states[static_cast<std::size_t>(s)]);
    act.push_back(a);
    next.push_back(states[static_cast<std::size_t>((s + a) % 4)]);
  }
  for (int it = 0; it < 2000; ++it) curiosity_update(nets, obs, act, next, 1e-3);

  const auto pred = inverse_predictions(nets, obs, next);
  int correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == act[i];
  INFO("inverse accuracy ", correct, "/", pred.size());
  CHECK(correct * 10 >= static_cast<int>(pred.size()) * 9);  // > 90%
}

TEST_CASE("intrinsic rewards are nonnegative for all kinds") {
  Rng rng(12);
  CountTable counts;
  auto ride = build_curiosity<float>(IntrinsicKind::Ride, ArchitectureKind::Default, rng);
  auto icm = build_curiosity<float>(IntrinsicKind::Icm, ArchitectureKind::Default, rng);
  for (int i = 0; i < 10; ++i) {
    Observation a, b;
    for (auto& v : a.data) v = static_cast<std::uint8_t>(rng.index(9));
    for (auto& v : b.data) v = static_cast<std::uint8_t>(rng.index(9));
    CHECK(counts.reward(state_key(a)) > 0.0);
    CHECK(curiosity_reward(ride, a, rng.index(7), b) >= 0.0f);
    CHECK(curiosity_reward(icm, a, rng.index(7), b) >= 0.0f);
  }
}
