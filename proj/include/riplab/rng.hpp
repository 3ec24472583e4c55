#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>

namespace riplab {

/// Deterministic splittable random generator (splitmix64 core).
///
/// Experiments derive one independent stream per work item from a master
/// seed via stream(), which makes results invariant under the number of
/// worker threads and reproducible across platforms (no dependence on
/// standard-library distribution internals).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed), seed_(seed) {}

  std::uint64_t nextU64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(nextU64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound); bound must be positive.
  std::uint64_t uniformIndex(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(nextU64()) * bound) >> 64);
  }

  /// Standard normal via Box-Muller (second value cached).
  double gaussian() {
    if (hasSpare_) {
      hasSpare_ = false;
      return spare_;
    }
    double u1 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    constexpr double twoPi = 6.283185307179586476925286766559;
    spare_ = r * std::sin(twoPi * u2);
    hasSpare_ = true;
    return r * std::cos(twoPi * u2);
  }

  /// Complex normal with E|z|^2 = 1.
  std::complex<double> complexGaussian() {
    const double scale = 0.7071067811865475244;  // 1/sqrt(2)
    return {gaussian() * scale, gaussian() * scale};
  }

  double sign() { return (nextU64() & 1u) ? 1.0 : -1.0; }

  /// Independent child stream; depends only on the construction seed and
  /// the id, not on how much this generator has been consumed.
  Rng split(std::uint64_t id) const { return Rng(mix(seed_, id)); }

  /// Stream addressed by a path of ids under a master seed.
  static Rng stream(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = master;
    for (std::uint64_t id : path) s = mix(s, id);
    return Rng(s);
  }

  std::uint64_t seed() const { return seed_; }

 private:
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    z = (z ^ a) * 0xd6e8feb86659fd93ULL;
    return z ^ (z >> 32);
  }

  std::uint64_t state_;
  std::uint64_t seed_;
  bool hasSpare_ = false;
  double spare_ = 0.0;
};

}  // namespace riplab
