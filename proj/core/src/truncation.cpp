#include "superdiff/truncation.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "superdiff/error.hpp"

namespace superdiff::truncation {

std::uint64_t underline(std::uint64_t j) {
  if (j == 0) throw Error(ErrorCode::InvalidArgument, "underline(j) needs j >= 1");
  return std::bit_floor(j);
}

int floor_times(double x, int n) { return static_cast<int>(std::floor(x * n + 1e-9)); }

BlockLayout block_decomposition(int n, double beta, double eps1) {
  if (!(beta > 0 && beta < 1)) throw Error(ErrorCode::InvalidArgument, "beta must lie in (0, 1)");
  if (!(eps1 > 0 && eps1 < 1 - beta)) throw Error(ErrorCode::InvalidArgument, "eps1 must lie in (0, 1 - beta)");
  if (n < 1 || n > 62) throw Error(ErrorCode::InvalidArgument, "level n must lie in [1, 62]");

  BlockLayout layout;
  layout.n = n;
  layout.beta = beta;
  layout.eps1 = eps1;
  layout.floor_beta_n = floor_times(beta, n);
  layout.floor_eps1_n = floor_times(eps1, n);
  const int b = layout.floor_beta_n;
  const int e = layout.floor_eps1_n;
  layout.F = std::uint64_t{1} << b;
  layout.nominal_interval = std::ldexp(1.0, n - b) - (b + 2) * std::ldexp(1.0, e - 1);
  if (layout.nominal_interval < 1.0) {
    throw Error(ErrorCode::LevelTooSmall, "nominal interval length " + std::to_string(layout.nominal_interval) +
                                              " < 1 at n = " + std::to_string(n));
  }
  const auto interval = static_cast<std::uint64_t>(std::floor(layout.nominal_interval));
  const std::uint64_t origin = std::uint64_t{1} << n;
  const std::uint64_t end = origin << 1;

  std::uint64_t cursor = origin;
  for (std::uint64_t j = 0; j < layout.F; ++j) {
    const int r = j == 0 ? b : std::countr_zero(j);
    const std::uint64_t gap = std::uint64_t{1} << (e + r);
    layout.blocks.push_back({'J', j, cursor, gap});
    cursor += gap;
    layout.gap_total += gap;
    const std::uint64_t len = j + 1 == layout.F ? end - cursor : interval;
    layout.blocks.push_back({'I', j, cursor, len});
    cursor += len;
    layout.interval_total += len;
  }
  return layout;
}

std::string to_csv(const BlockLayout& layout) {
  std::ostringstream out;
  out << "n,kind,j,start,len\n";
  for (const auto& blk : layout.blocks)
    out << layout.n << ',' << blk.kind << ',' << blk.j << ',' << blk.start << ',' << blk.length << '\n';
  return out.str();
}

}  // namespace superdiff::truncation
