#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>
#include <vector>

namespace sketchuq::rng {

// Generator contract v1: all randomness flows through mt19937_64 seeded via
// the SplitMix64 finalizer below, with the uniform/normal/index transforms
// implemented here rather than taken from <random> distributions (whose
// output is implementation-defined). Given a seed, every stream is therefore
// identical across standard libraries.

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based seed split: hash-chains a path of indices onto a master seed
// so that (replicate, scheme, ...) streams are independent and reproducible.
inline std::uint64_t derive(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(master + kGamma);
  for (std::uint64_t q : path) h = mix64(h + kGamma + q);
  return h;
}

class Stream {
 public:
  explicit Stream(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_raw() { return eng_(); }

  // 53-bit uniform on [0, 1)
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Standard normal via the Marsaglia polar transform.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  // Uniform on {0, ..., n-1}, rejection-free bias removal.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t rem = (max % n + 1) % n;  // 2^64 mod n
    std::uint64_t x = eng_();
    while (rem != 0 && x >= max - rem + 1) x = eng_();
    return x % n;
  }

  // Index draw from a nondecreasing cumulative weight vector; entries with
  // zero increment are never selected.
  std::size_t categorical(const std::vector<double>& cdf) {
    const double u = uniform01() * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    return static_cast<std::size_t>(it - cdf.begin());
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sketchuq::rng
