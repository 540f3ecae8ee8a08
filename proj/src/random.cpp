#include "sroc/random.hpp"

#include <cmath>

#include "sroc/error.hpp"
#include "sroc/numeric.hpp"

namespace sroc {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, stream_(stream) {}

std::uint64_t CounterRng::next_u64() {
  if (used_ >= 4) {
    buffer_ = philox4x32({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                          static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                         key_);
    ++block_;
    used_ = 0;
  }
  const std::uint64_t v = (static_cast<std::uint64_t>(buffer_[used_]) << 32) | buffer_[used_ + 1];
  used_ += 2;
  return v;
}

double CounterRng::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() { return normal_quantile(uniform()); }

std::uint64_t CounterRng::below(std::uint64_t n) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "below(0)");
  // Rejection on the top of the range keeps the draw unbiased.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  for (;;) {
    const std::uint64_t v = next_u64();
    if (v < limit) return v % n;
  }
}

std::uint64_t CounterRng::binomial(std::uint64_t n, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::InvalidArgument, "binomial probability outside [0,1]");
  const double u = uniform();
  if (p == 0.0 || n == 0) return 0;
  if (p == 1.0) return n;

  const double log_ratio = std::log(p) - std::log1p(-p);
  const double nd = static_cast<double>(n);
  const double mode = std::floor((nd + 1.0) * p);
  double log_pmf = nd * std::log1p(-p);
  double cdf = 0.0;
  for (std::uint64_t k = 0; k < n; ++k) {
    const double pmf = std::exp(log_pmf);
    cdf += pmf;
    if (cdf >= u) return k;
    // Past the mode the remaining mass has underflowed; rounding left cdf short of u.
    if (static_cast<double>(k) > mode && pmf < 1e-300) return k;
    const double kd = static_cast<double>(k);
    log_pmf += std::log((nd - kd) / (kd + 1.0)) + log_ratio;
  }
  return n;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  const auto out = philox4x32({static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                               0x5eedu, 0xd3e1u},
                              {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace sroc
