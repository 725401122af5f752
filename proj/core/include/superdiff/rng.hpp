#pragma once

// Counter-based random numbers. Every draw is a pure function of
// (seed, stream, index), so shards can generate disjoint index ranges
// independently and a generator's full state is a single integer.

#include <array>
#include <cstdint>
#include <utility>

namespace superdiff {

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) noexcept;
};

/// Mixes a 64-bit word (splitmix64 finalizer); used to derive keys.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Maps 64 random bits to a double in the open interval (0, 1).
constexpr double to_open_unit(std::uint64_t bits) noexcept {
  // 52 bits so that the half-step offset stays exactly representable below 1
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Random access view of the 64-bit word sequence owned by (seed, stream).
/// Word i comes from Philox block i/2, so `word(i)` for any i is O(1).
class CounterRng {
 public:
  CounterRng() = default;
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

  std::uint64_t word(std::uint64_t index) const noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  Philox4x32::Key key_{};
  mutable std::uint64_t cached_block_ = ~std::uint64_t{0};
  mutable std::array<std::uint64_t, 2> cached_{};
};

/// Sequential generator over a CounterRng; its whole state is `position()`.
class RngStream {
 public:
  RngStream() = default;
  RngStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t position = 0) noexcept
      : rng_(seed, stream), position_(position) {}

  std::uint64_t next_u64() noexcept { return rng_.word(position_++); }
  double uniform() noexcept { return to_open_unit(next_u64()); }
  /// Standard normal via Box-Muller; consumes two words.
  double normal() noexcept;

  std::uint64_t position() const noexcept { return position_; }
  void seek(std::uint64_t position) noexcept { position_ = position; }
  const CounterRng& counter_rng() const noexcept { return rng_; }

  // UniformRandomBitGenerator surface, for std::shuffle and friends.
  using result_type = std::uint64_t;
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }
  result_type operator()() noexcept { return next_u64(); }

 private:
  CounterRng rng_;
  std::uint64_t position_ = 0;
};

/// Box-Muller pair from two open-unit uniforms.
std::pair<double, double> box_muller(double u1, double u2) noexcept;

}  // namespace superdiff
