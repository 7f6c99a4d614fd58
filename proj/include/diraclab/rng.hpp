#pragma once

#include <cmath>
#include <cstdint>

namespace diraclab {

/// splitmix64 mixing step; the basis of all seeding in the project.
inline std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Counter-based derivation: one master seed expands to independent per-trial
/// seeds, independent of execution order.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::uint64_t counter) noexcept {
  std::uint64_t s = master ^ (0x6a09e667f3bcc909ull + counter * 0x9e3779b97f4a7c15ull);
  splitmix64(s);
  return splitmix64(s);
}

/// Small deterministic generator; bit-identical across platforms, unlike the
/// std distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // Decorrelate trivially related seeds.
    splitmix64(state_);
  }

  std::uint64_t next() noexcept { return splitmix64(state_); }

  /// Uniform in [0, 1).
  double u01() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) noexcept { return a + (b - a) * u01(); }

  /// Standard normal via Box-Muller.
  double normal() noexcept {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u = 0.0;
    do {
      u = u01();
    } while (u <= 0.0);
    const double v = u01();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double theta = 6.283185307179586476925286766559 * v;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) noexcept {
    return next() % bound;
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace diraclab
