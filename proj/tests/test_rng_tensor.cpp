#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "imlab/params.hpp"
#include "imlab/rng.hpp"
#include "imlab/tensor.hpp"

#include <cstdio>
#include <filesystem>

using namespace imlab;

TEST_CASE("rng determinism and forking") {
  Rng a(1234), b(1234);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  // fork is independent of the draw position
  Rng c(1234);
  Rng f1 = c.fork(7);
  c.next_u64();
  Rng f2 = c.fork(7);
  CHECK(f1.next_u64() == f2.next_u64());

  Rng d(1234);
  CHECK(d.fork(1).next_u64() != d.fork(2).next_u64());
  CHECK(Rng(1).next_u64() != Rng(2).next_u64());
}

TEST_CASE("rng distributions") {
  Rng rng(99);
  double sum = 0, sq = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    sq += u * u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.02));
  CHECK(sq / n == doctest::Approx(1.0 / 3).epsilon(0.03));

  double nsum = 0, nsq = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    nsum += z;
    nsq += z * z;
  }
  CHECK(nsum / n == doctest::Approx(0.0).epsilon(0.02));
  CHECK(nsq / n == doctest::Approx(1.0).epsilon(0.03));

  int counts[5] = {0, 0, 0, 0, 0};
  for (int i = 0; i < n; ++i) ++counts[rng.range(0, 5)];
  for (int k = 0; k < 5; ++k) CHECK(counts[k] > n / 5 - 1500);
}

TEST_CASE("tensor shapes and views") {
  TensorF t({2, 3});
  CHECK(t.size() == 6);
  CHECK(t.ndim() == 2);
  t.mat2()(1, 2) = 5.0f;
  CHECK(t[5] == 5.0f);
  CHECK(t.all_finite());
  t[0] = std::numeric_limits<float>::quiet_NaN();
  CHECK(!t.all_finite());

  CHECK_THROWS(TensorF({2, 3}, TensorF::Storage::Zero(5)));
}

TEST_CASE("param store bookkeeping") {
  ParamStore<float> ps;
  ps.add("a.w", TensorF({3, 4}));
  ps.add("a.b", TensorF({4}));
  ps.add("b.w", TensorF({4, 2}));
  CHECK(ps.param_count() == 12 + 4 + 8);
  CHECK(ps.param_count("a.") == 16);
  CHECK(ps.param_count("b.") == 8);
  CHECK(ps.param_count("missing") == 0);
  CHECK_THROWS(ps.add("a.w", TensorF({1})));

  ParamStore<float> empty;
  CHECK(empty.param_count() == 0);
}

TEST_CASE("gradient norm clip and finite check") {
  ParamStore<float> ps;
  ps.add("w", TensorF({4}));
  ps.grad("w").array() = 3.0f;  // norm 6
  ps.clip_grad_norm(3.0);
  CHECK(ps.grad_norm() == doctest::Approx(3.0));
  ps.grad("w")[0] = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_WITH_AS(ps.check_finite_grads(), "non-finite gradient in parameter: w",
                       std::runtime_error);
}

TEST_CASE("checkpoint round trip") {
  ParamStore<float> ps;
  Rng rng(5);
  TensorF w({3, 5});
  for (int i = 0; i < w.size(); ++i) w[i] = static_cast<float>(rng.normal());
  ps.add("layer.w", std::move(w));
  ps.add("layer.b", TensorF::full({5}, 0.25f));

  const std::string path = (std::filesystem::temp_directory_path() / "imlab_ckpt.bin").string();
  ps.save(path);
  auto loaded = ParamStore<float>::load(path);
  CHECK(loaded.values_equal(ps));
  CHECK(loaded.param_count() == ps.param_count());
  std::filesystem::remove(path);
}
