#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace cymono {

// splitmix64; used to derive per-component streams from one root seed.
std::uint64_t splitmix64(std::uint64_t& state);

std::uint64_t fnv1a64(std::string_view bytes);

// Deterministic fan-out: stream(name) = splitmix64(root ^ fnv1a64(name)).
// The scheme is fixed so reports can document every derived seed.
class SeedSequence {
 public:
  explicit SeedSequence(std::uint64_t root) : root_(root) {}
  std::uint64_t root() const { return root_; }
  std::uint64_t stream(std::string_view name) const;

 private:
  std::uint64_t root_;
};

// mt19937_64 plus distribution helpers that avoid the
// implementation-defined standard distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  // Uniform integer in [lo, hi] by rejection.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::int64_t i = static_cast<std::int64_t>(v.size()) - 1; i > 0; --i) {
      const std::int64_t j = uniform_int(0, i);
      std::swap(v[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(j)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cymono
