#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace budgetreg {

/// Mixes a base seed with a stream tag so independent consumers (target
/// weights, examples, solver draws, ...) get unrelated streams.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0);

/// Seeded 64-bit Mersenne twister with a portable [0, 1) uniform (53-bit
/// mantissa) so draws are reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform() < p; }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace budgetreg
