#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ppsc {

// Splittable seeded generator used by every randomized component.
//
// Stream splitting: a SplitRng is identified by a 64-bit stream key. Drawing
// values advances an internal splitmix64 state; split(i) derives the key of
// child stream i from the *key* (never from the draw position), so
//
//   SplitRng(master).split(run).split(step)
//
// names the same stream no matter how many values were drawn before the
// split and no matter which thread performs it. Per-run / per-step
// substreams therefore make results independent of scheduling.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : key_(mix(seed ^ kKeySalt)), state_(key_) {}

  // Child stream derived from (key, index); does not disturb this stream.
  SplitRng split(std::uint64_t index) const {
    return SplitRng(FromKey{}, mix(key_ + kGolden * (index + 1)));
  }

  std::uint64_t next_u64() {
    state_ += kGolden;
    return mix(state_);
  }

  // Uniform in [0,1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Unbiased-enough integer in [0,n) via 128-bit multiply.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("SplitRng::below: n must be positive");
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Box-Muller; always consumes exactly two uniforms (no cached spare).
  double gaussian(double mean, double stddev) {
    double u1 = uniform01();
    double u2 = uniform01();
    if (u1 < 1e-300) u1 = 1e-300;
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(2.0 * kPi * u2);
  }

  // Inverse-CDF sample, scale b (variance 2b^2).
  double laplace(double mean, double scale) {
    const double u = uniform01() - 0.5;
    const double s = u < 0.0 ? -1.0 : 1.0;
    double a = 1.0 - 2.0 * std::abs(u);
    if (a < 1e-300) a = 1e-300;
    return mean - scale * s * std::log(a);
  }

  // Index into a nonnegative weight vector proportional to the weights.
  std::size_t pick_weighted(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (total <= 0.0) throw std::invalid_argument("SplitRng::pick_weighted: weights sum to zero");
    double u = uniform01() * total;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      u -= weights[i];
      if (u < 0.0) return i;
    }
    return weights.size() - 1;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

  std::uint64_t stream_key() const { return key_; }

 private:
  struct FromKey {};
  SplitRng(FromKey, std::uint64_t key) : key_(key), state_(key) {}

  // splitmix64 finalizer.
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kKeySalt = 0x50505343ULL;  // stream domain tag
  static constexpr double kPi = 3.141592653589793238462643383279502884;

  std::uint64_t key_;
  std::uint64_t state_;
};

}  // namespace ppsc
