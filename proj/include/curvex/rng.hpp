#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "curvex/types.hpp"

namespace curvex {

/// splitmix64 step; used to derive independent stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic combine of a global seed with a per-task index, so
/// parallel and serial sweeps draw identical streams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL + (index << 1));
  std::uint64_t a = splitmix64(s);
  return a ^ splitmix64(s);
}

/// Seeded random stream with explicitly specified transforms.
///
/// mt19937_64 output is fixed by the standard; the uniform and normal
/// transforms are spelled out here instead of using std distributions,
/// whose sequences differ between standard libraries. This keeps seeded
/// runs reproducible byte for byte.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller (one spare cached).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  Vec normal_vec(int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  /// Uniform direction on the unit sphere in R^n.
  Vec unit_vec(int n) {
    Vec v = normal_vec(n);
    double nv = v.norm();
    while (nv < 1e-300) {  // astronomically unlikely; redraw
      v = normal_vec(n);
      nv = v.norm();
    }
    return v / nv;
  }

  /// Uniform point in the closed ball of the given radius in R^n.
  Vec ball_vec(int n, double radius) {
    const Vec dir = unit_vec(n);
    const double r = radius * std::pow(uniform01(), 1.0 / n);
    return r * dir;
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace curvex
