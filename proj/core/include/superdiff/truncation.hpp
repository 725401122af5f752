#pragma once

// Truncations v 1{|v| <= R} and bands v 1{A <= |v| <= B}, the dyadic index
// map, and the interval/gap layout of a dyadic level [2^n, 2^{n+1}).

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "superdiff/vec2.hpp"

namespace superdiff::truncation {

inline constexpr double kNoTruncation = std::numeric_limits<double>::infinity();

inline double truncate(double v, double R) noexcept { return std::abs(v) <= R ? v : 0.0; }
inline Vec2 truncate(Vec2 v, double R) noexcept { return norm(v) <= R ? v : Vec2{}; }
inline double band(double v, double lo, double hi) noexcept {
  const double a = std::abs(v);
  return lo <= a && a <= hi ? v : 0.0;
}
inline Vec2 band(Vec2 v, double lo, double hi) noexcept {
  const double a = norm(v);
  return lo <= a && a <= hi ? v : Vec2{};
}

/// Largest power of two <= j. Throws InvalidArgument for j = 0.
std::uint64_t underline(std::uint64_t j);

struct Block {
  char kind = 'I';  ///< 'I' interval or 'J' gap
  std::uint64_t j = 0;
  std::uint64_t start = 0;
  std::uint64_t length = 0;
};

struct BlockLayout {
  int n = 0;
  double beta = 0.0;
  double eps1 = 0.0;
  int floor_beta_n = 0;
  int floor_eps1_n = 0;
  std::uint64_t F = 0;
  /// Nominal real-valued interval length before rounding.
  double nominal_interval = 0.0;
  /// J_0, I_0, J_1, I_1, ..., J_{F-1}, I_{F-1}
  std::vector<Block> blocks;
  std::uint64_t gap_total = 0;
  std::uint64_t interval_total = 0;
};

/// floor(x * n), robust to x*n landing a rounding error below an integer.
int floor_times(double x, int n);

/// Throws InvalidArgument for beta or eps1 out of range and LevelTooSmall
/// when the nominal interval length is below 1. Intervals are floored and
/// the last one absorbs the remainder.
BlockLayout block_decomposition(int n, double beta = 0.5, double eps1 = 0.25);

/// CSV with header n,kind,j,start,len.
std::string to_csv(const BlockLayout& layout);

}  // namespace superdiff::truncation
