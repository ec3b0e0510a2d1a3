#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "imlab/schedule.hpp"

#include <cmath>

using namespace imlab;

namespace {
const ParametricParams kFig{0.05, 0.0005, 0.5, 2e7};
}

TEST_CASE("parametric decay: reference evaluations") {
  CHECK(beta_parametric(0, kFig) == doctest::Approx(0.049669).epsilon(1e-4));
  // at t = F the denominator is exactly 2^20
  const double at_f = 0.0005 + (0.05 - 0.0005) / std::pow(2.0, 20.0);
  CHECK(beta_parametric(2e7, kFig) == doctest::Approx(at_f).epsilon(1e-10));
  CHECK(at_f == doctest::Approx(0.00050005).epsilon(1e-6));
  // the limit is the floor
  CHECK(beta_parametric(1e12, kFig) == doctest::Approx(0.0005).epsilon(1e-9));
}

TEST_CASE("parametric decay: overflow-safe on extreme inputs") {
  ParametricParams sharp{1.0, 0.0, 50.0, 10.0};
  CHECK(beta_parametric(0, sharp) == doctest::Approx(1.0));
  CHECK(beta_parametric(1e18, sharp) == doctest::Approx(0.0));
  CHECK(std::isfinite(beta_parametric(5e17, sharp)));
}

TEST_CASE("parametric decay: monotone non-increasing, bounded in [A, K]") {
  for (double b : {0.25, 0.5, 1.0}) {
    ParametricParams p = kFig;
    p.smoothness = b;
    double prev = 1e9;
    for (int i = 0; i <= 2000; ++i) {
      const double t = 2.0 * kFig.frames * i / 2000.0;
      const double v = beta_parametric(t, p);
      CHECK(v <= prev + 1e-15);
      CHECK(v >= p.floor);
      CHECK(v <= p.peak);
      prev = v;
    }
  }
}

TEST_CASE("parametric decay: successive smoothness curves cross exactly once") {
  // larger B stays higher before t = F and drops below after it; the single
  // crossing sits at t = F where all curves coincide
  const double bs[] = {0.25, 0.5, 1.0};
  for (int pair = 0; pair < 2; ++pair) {
    ParametricParams lo = kFig, hi = kFig;
    lo.smoothness = bs[pair];
    hi.smoothness = bs[pair + 1];
    int sign_changes = 0;
    double prev_diff = 0;
    for (int i = 1; i < 1000; ++i) {
      const double t = 2.0 * kFig.frames * i / 1000.0;
      const double diff = beta_parametric(t, hi) - beta_parametric(t, lo);
      if (prev_diff != 0 && diff != 0 && std::signbit(diff) != std::signbit(prev_diff))
        ++sign_changes;
      if (diff != 0) prev_diff = diff;
    }
    CHECK(sign_changes == 1);
  }
}

TEST_CASE("parametric decay: parameter validation") {
  CHECK_THROWS(beta_parametric(0, ParametricParams{0.05, 0.1, 0.5, 1e6}));   // A >= K
  CHECK_THROWS(beta_parametric(0, ParametricParams{0.05, 0.0, -1.0, 1e6}));  // B <= 0
  CHECK_THROWS(beta_parametric(0, ParametricParams{0.05, 0.0, 0.5, 0.0}));   // F < 1
}

TEST_CASE("multi-static betas: family shape") {
  ParametricParams p{0.05, 0.0005, 0.5, 1};
  const auto betas = beta_multi(16, p);
  REQUIRE(betas.size() == 16);
  // agent 0 explores near K
  CHECK(betas[0] == doctest::Approx(0.05).epsilon(0.01));
  // monotone non-increasing in the agent index
  for (std::size_t j = 1; j < betas.size(); ++j) CHECK(betas[j] <= betas[j - 1] + 1e-15);
  // at least one near-exploitative agent within 2% of A
  CHECK(betas.back() <= 1.02 * 0.0005);
  CHECK(betas.back() >= 0.0005);
}

TEST_CASE("adaptive decay: ratio, clamp and zero cases") {
  AdaptiveBeta ad(0.05);
  // first rollout: history mean equals the current return
  CHECK(ad.next(1.0) == doctest::Approx(0.05));
  // G = 2H would clamp at 1 (history now {1, 2}: H = 1.5, ratio 4/3 -> clamp)
  CHECK(ad.next(2.0) == doctest::Approx(0.05));
  // zero return with positive history: beta 0
  CHECK(ad.next(0.0) == doctest::Approx(0.0));
  // all-zero history returns beta_s
  AdaptiveBeta zero(0.03);
  CHECK(zero.next(0.0) == doctest::Approx(0.03));
  CHECK_THROWS(zero.next(-1.0));
}

TEST_CASE("adaptive decay: output always within [0, beta_s]") {
  AdaptiveBeta ad(0.05, 50);
  std::uint64_t s = 12345;
  for (int i = 0; i < 2000; ++i) {
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    const double g = static_cast<double>(s >> 40) / static_cast<double>(1 << 24);
    const double b = ad.next(g * 3.0);
    CHECK(b >= 0.0);
    CHECK(b <= 0.05 + 1e-12);
  }
}

TEST_CASE("adaptive decay: window semantics") {
  // window = 1 always returns beta_s
  AdaptiveBeta w1(0.07, 1);
  for (double g : {0.5, 3.0, 0.001, 42.0}) CHECK(w1.next(g) == doctest::Approx(0.07));

  // windowed and unbounded agree for the first w rollouts
  AdaptiveBeta bounded(0.05, 10), unbounded(0.05);
  for (int i = 0; i < 10; ++i) {
    const double g = 0.1 * (i + 1);
    CHECK(bounded.next(g) == doctest::Approx(unbounded.next(g)));
  }
  // beyond the window they may differ: old returns are evicted
  CHECK(bounded.history_size() == 10);
  bounded.next(5.0);
  CHECK(bounded.history_size() == 10);
}

TEST_CASE("rollout intrinsic return: sums per env, mean across envs") {
  // all zero
  std::vector<float> zeros(8, 0.0f);
  CHECK(rollout_intrinsic_return(zeros, 2, 4) == 0.0);
  // single env, rewards 0.1 + 0.2
  std::vector<float> one{0.1f, 0.2f};
  CHECK(rollout_intrinsic_return(one, 1, 2) == doctest::Approx(0.3));
  // two envs with sums 0.2 and 0.4 -> 0.3 (layout t * n_envs + i)
  std::vector<float> two{0.2f, 0.1f, 0.0f, 0.3f};
  CHECK(rollout_intrinsic_return(two, 2, 2) == doctest::Approx(0.3));
}
