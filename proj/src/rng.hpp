#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace almd {

// Deterministic RNG used everywhere draws matter. Wraps mt19937_64 but
// avoids std::*_distribution, whose output is implementation-defined;
// the helpers below produce the same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) { return next() % n; }

  // Uniform double in [0, 1) with 53 bits of precision.
  double real01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace almd
