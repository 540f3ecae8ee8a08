#pragma once

#include <array>
#include <cstdint>

namespace sroc {

/// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Counter-based random stream. A (seed, stream) pair fully determines the
/// sequence, so independent streams can be handed to replicates or readers
/// in any order on any number of threads.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0,1).
  double uniform();
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  /// Binomial(n, p) by sequential CDF inversion of a single uniform.
  std::uint64_t binomial(std::uint64_t n, double p);

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
};

/// Hash a (seed, index) pair into a fresh 64-bit seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace sroc
