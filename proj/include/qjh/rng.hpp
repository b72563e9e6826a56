// Seeded random number generation with derivable independent substreams.
// Every stochastic routine in the library takes an Rng explicitly so that
// runs are reproducible given (config, seed).
#pragma once

#include <cstdint>
#include <random>

namespace qjh {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::uint64_t next_u64() { return engine_(); }

  // Independent stream derived from this generator's seed; used to give
  // each chain / path / walk its own generator.
  Rng child(std::uint64_t stream) const {
    return Rng(splitmix64(seed_ + 0x9e3779b97f4a7c15ULL * (stream + 1)));
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace qjh
