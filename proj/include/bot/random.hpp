#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace bot {

// Seedable generator with named sub-streams. `split("positions")` and
// `split("areas")` are independent of each other and of the parent, so adding
// draws to one purpose leaves the others bit-identical.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  Rng split(std::string_view purpose) const;
  std::uint64_t seed() const { return seed_; }

  std::uint64_t next() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform on (0, 1].
  double uniform_positive() { return 1.0 - uniform(); }
  double normal();
  std::size_t below(std::size_t n);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace bot
