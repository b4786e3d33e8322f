#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace gfd {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
  constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(m0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(m1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += w0;
    key[1] += w1;
  }
  return ctr;
}

/// Independent stream addressed by (seed, trial, individual). Draw k of a
/// stream is a pure function of those four numbers, so results do not depend
/// on thread scheduling or traversal order.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t trial, std::uint64_t individual)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        trial_(static_cast<std::uint32_t>(trial)),
        individual_(individual) {}

  std::uint64_t next_u64() {
    if (buffered_ == 0) {
      block_ = philox4x32({counter_++, static_cast<std::uint32_t>(individual_),
                           static_cast<std::uint32_t>(individual_ >> 32), trial_},
                          key_);
      buffered_ = 2;
    }
    const int k = 2 - buffered_--;
    return (static_cast<std::uint64_t>(block_[2 * k + 1]) << 32) | block_[2 * k];
  }

  /// Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  double exponential() { return -std::log(uniform()); }

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t trial_;
  std::uint64_t individual_;
  std::uint32_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int buffered_ = 0;
};

}  // namespace gfd
