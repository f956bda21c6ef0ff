#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace crwvar {

__extension__ using uint128_t = unsigned __int128;

/// SplitMix64 finaliser; used to derive well-separated generator states.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/**
 * Splittable random stream identified by (master_seed, stream_index).
 *
 * The generator state is a pure function of the two identifiers, so replicate
 * k of any Monte Carlo loop draws from stream k regardless of which thread runs
 * it or in which order. The engine is xoshiro256**; its 256-bit state is filled
 * by SplitMix64 over a hash of the identifiers.
 *
 * Satisfies UniformRandomBitGenerator, so it can drive <random> distributions,
 * but the helpers below are what the simulators use (their output is identical
 * across standard library implementations).
 */
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t master_seed, std::uint64_t stream_index) noexcept
      : master_seed_(master_seed), stream_index_(stream_index) {
    std::uint64_t x = splitmix64(master_seed ^ splitmix64(stream_index ^ 0xD1B54A32D192ED03ULL));
    for (auto& word : state_) {
      x = splitmix64(x);
      word = x;
    }
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t stream_index() const noexcept { return stream_index_; }

  /// Child family keyed by this stream's identity; child k is stream index k.
  RngStream fork(std::uint64_t index) const noexcept {
    return RngStream(splitmix64(master_seed_ * 0x9E3779B97F4A7C15ULL ^ splitmix64(stream_index_ + 1)),
                     index);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return next_u64(); }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_pos() noexcept { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Symmetric +1 / -1.
  int sign() noexcept { return (next_u64() >> 63) != 0 ? 1 : -1; }

  /// Uniform integer in [0, n); n must be positive. Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t n) noexcept {
    uint128_t m = static_cast<uint128_t>(next_u64()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<uint128_t>(next_u64()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  double exponential(double mean) noexcept { return -mean * std::log(uniform_pos()); }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t master_seed_;
  std::uint64_t stream_index_;
  std::array<std::uint64_t, 4> state_{};
};

}  // namespace crwvar
