#ifndef IMLAB_RNG_HPP
#define IMLAB_RNG_HPP

#include <cmath>
#include <cstdint>
#include <vector>

namespace imlab {

// Counter-based PRNG (splitmix64 finalizer over key + counter).  The k-th
// output depends only on (key, k), so independent streams can be forked from
// a parent without consuming draws from it.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(mix(seed + kGolden) ^ mix(stream ^ 0x94d049bb133111ebULL))) {}

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGolden); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal (Box-Muller, cached pair).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * kPi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Uniform integer in [lo, hi), hi > lo.
  int range(int lo, int hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo);
    const auto wide = static_cast<unsigned __int128>(next_u64()) * span;
    return lo + static_cast<int>(wide >> 64);
  }

  int index(int n) { return range(0, n); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
      std::swap(v[i], v[range(0, i + 1)]);
    }
  }

  // Independent stream with the same ancestry; unaffected by prior draws.
  Rng fork(std::uint64_t stream) const { return Rng(key_, stream); }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  static constexpr double kPi = 3.14159265358979323846;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace imlab

#endif  // IMLAB_RNG_HPP
