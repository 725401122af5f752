#pragma once

// Empirical truncated-moment probes: fourth moments of truncated block sums,
// truncated covariances, second moments of banded sums and first-passage
// frequencies. Every probe splits its work into shards with their own
// streams and reduces them in shard order.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "superdiff/normalizers.hpp"
#include "superdiff/sources.hpp"
#include "superdiff/vec2.hpp"

namespace superdiff::moments {

struct ProbeConfig {
  std::size_t shards = 8;
  /// Blocks (or paths) each shard draws per grid cell.
  std::size_t blocks_per_shard = 250;
  std::size_t workers = 1;
  /// Namespaces the stream ids of this probe.
  std::uint64_t tag = 1;
};

/// R = m^exponent.
struct PowerRule {
  double exponent = 0.6;
  double operator()(double m) const { return std::pow(m, exponent); }
};

/// m <= R^(2 - r1) and R <= m^r2.
struct RegimeBounds {
  double r1 = 0.3;
  double r2 = 1.0;
};

/// Throws RegimeViolation when (m, R) leaves the admissible regime.
void check_regime(double m, double R, const RegimeBounds& bounds);

enum class Projection { Full, X, Y };
const char* to_string(Projection p) noexcept;

struct MomentRow {
  std::uint64_t m = 0;
  double R = 0.0;
  std::size_t blocks = 0;
  double est4 = 0.0;
  double se4 = 0.0;
  double ratio4 = 0.0;
  /// Covariance of the truncated block sum (components outside the projection are 0).
  Mat2 cov;
  /// Mean diagonal covariance over m ln R.
  double ratio2 = 0.0;
  std::vector<double> shard_est4;
  /// Largest |shard - pooled| / combined standard error.
  double max_shard_z = 0.0;
  bool shards_agree = true;
};

struct MomentReport {
  Projection projection = Projection::Full;
  std::vector<MomentRow> rows;
  /// Least-squares slope of ln ratio4 against ln m.
  double log_slope = 0.0;
  double log_slope_se = 0.0;
  /// Slope more than 3 standard errors above 0.
  bool upward_trend = false;
};

/// One report per projection: Full, then X, then Y when the source is two-dimensional.
std::vector<MomentReport> fourth_moment_ratio(const sources::SourceSpec& source, std::span<const std::uint64_t> m_grid,
                                              const PowerRule& rule, const RegimeBounds& bounds,
                                              const ProbeConfig& probe);

/// CSV with header m,R,est4,se4,ratio4,cov11,cov12,cov22,ratio2.
std::string to_csv(const MomentReport& report);

struct CovRow {
  double R = 0.0;
  Mat2 cov;
  /// cov / (m ln R) entrywise
  Mat2 ratio;
  /// Mean diagonal ratio and its shard standard error.
  double ratio2 = 0.0;
  double ratio2_se = 0.0;
};

struct CovReport {
  std::uint64_t m = 0;
  std::size_t blocks = 0;
  int dimension = 1;
  std::vector<CovRow> rows;
};

/// Covariance of block sums of W^R for every R of the grid, all from the same blocks.
CovReport truncated_cov(const sources::SourceSpec& source, std::uint64_t m, std::span<const double> R_grid,
                        const ProbeConfig& probe);

struct BandRow {
  std::uint64_t N = 0;
  double second = 0.0;
  double se = 0.0;
  /// second / (N L(hi / lo))
  double ratio = 0.0;
};

struct BandReport {
  int n = 0;
  double lo = 0.0;
  double hi = 0.0;
  bool empty_band = false;
  std::vector<BandRow> rows;
  double log_slope = 0.0;
  double log_slope_se = 0.0;
  bool growing = false;
};

struct Band {
  double lo = 0.0;
  double hi = 0.0;
};

/// E|sum_{l=0}^{N} v_l 1{lo <= |v_l| <= hi}|^2 per N. The band defaults to
/// [d_{2^n}, c_{2^n}] from `config`.
BandReport band_second_moment(const sources::SourceSpec& source, int n, std::span<const std::uint64_t> N_grid,
                              const normalizers::NormalizerConfig& config, const ProbeConfig& probe,
                              std::optional<Band> band = std::nullopt);

struct PassageRow {
  std::uint64_t K = 0;
  std::size_t paths = 0;
  std::size_t hits = 0;
  double frequency = 0.0;
  double se = 0.0;
  /// frequency / (K / c^2)
  double ratio = 0.0;
};

struct PassageReport {
  int n = 0;
  double eps = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<PassageRow> rows;
};

/// Frequency of paths whose partial sums of the banded values (band
/// [dbar_{2^n}, c_{2^n}]) first reach eps c at some k in [1, K] while
/// |S_K| < eps c / 2. Requires K < dbar^2.
PassageReport first_passage_profile(const sources::SourceSpec& source, int n, std::span<const std::uint64_t> K_grid,
                                    double eps, const normalizers::NormalizerConfig& config,
                                    const ProbeConfig& probe);

}  // namespace superdiff::moments
