#pragma once

// Limit-theorem experiments: the superdiffusive CLT, running records against
// the generalized LIL normalizer, exceedance profiles and a correlation-decay
// probe for truncated observables.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "superdiff/moments.hpp"
#include "superdiff/normalizers.hpp"
#include "superdiff/sources.hpp"
#include "superdiff/vec2.hpp"

namespace superdiff::limit_stats {

// ---- CLT ------------------------------------------------------------------

struct CltComponent {
  /// Tail constant used in a_n for this component.
  double C = 1.0;
  /// Robust (IQR) scale of S_n / a_n; the fitted Gaussian is N(0, scale^2).
  double fitted_scale = 0.0;
  double ks_fitted = 0.0;
  /// KS of S_n / a_n against N(0, 1).
  double ks_standard = 0.0;
  /// KS of S_n / sqrt(n) against the Gaussian fitted under a_n.
  double ks_sqrt_n = 0.0;
};

struct CltReport {
  std::uint64_t n = 0;
  std::size_t samples = 0;
  int dimension = 1;
  std::vector<CltComponent> components;
  /// Sample covariance of S_n / a_n, and the same on each half of the samples.
  Mat2 sigma_hat;
  Mat2 sigma_half[2];
  Mat2 sigma_half_se[2];
  /// Largest |half_0 - half_1| / combined standard error over the entries.
  double split_half_z = 0.0;
  bool split_half_agree = true;
};

/// `C_hat` holds one tail constant per component (a single entry is reused).
CltReport clt_experiment(const sources::SourceSpec& source, std::uint64_t n, std::size_t samples,
                         std::span<const double> C_hat, const moments::ProbeConfig& probe);

std::string to_json(const CltReport& report);

// ---- LIL records -------------------------------------------------------------

struct LilNormalizer {
  enum class Kind { CStar, Classical };
  Kind kind = Kind::CStar;
  double C = 1.0;
  /// Multiplies the normalizer.
  double lambda = 1.0;

  double operator()(double n) const;
  std::string describe() const;
};

struct LilStreamState {
  sources::StreamState source;
  Vec2 sum;
  std::uint64_t m = 0;
  double record = 0.0;
  /// Records at the checkpoints reached so far.
  std::vector<double> records;
};

/// Checkpoints are n = 2^k for k_first <= k <= k_last; records only count
/// m >= burn_in.
struct LilSchedule {
  int k_first = 10;
  int k_last = 20;
  std::uint64_t burn_in = 1024;
};

/// Advances one stream up to (and including) step `until`, recording at
/// every checkpoint passed. Resumable from any state.
void advance(LilStreamState& state, sources::Source& source, const LilNormalizer& normalizer,
             const LilSchedule& schedule, std::uint64_t until);

struct LilStream {
  std::uint64_t stream = 0;
  std::vector<double> records;
  std::string error;
};

struct LilReport {
  std::string source;
  std::string normalizer;
  LilSchedule schedule;
  std::vector<LilStream> streams;
  /// Cross-stream summaries per checkpoint over streams without errors.
  std::vector<double> median;
  std::vector<double> lower;  ///< 10% quantile
  std::vector<double> upper;  ///< 90% quantile
};

LilReport lil_record(const sources::SourceSpec& source, std::size_t streams, const LilNormalizer& normalizer,
                     const LilSchedule& schedule, const moments::ProbeConfig& probe);
LilReport summarize(LilReport report);

/// CSV with header stream,k,n,record.
std::string to_csv(const LilReport& report);
std::string to_json(const LilReport& report);

bool records_nondecreasing(const LilReport& report);
/// True when the median does not decrease over the last `checkpoints` checkpoints.
bool median_nondecreasing(const LilReport& report, std::size_t checkpoints);

struct ExceedancePoint {
  double alpha = 0.0;
  double fraction = 0.0;
};

/// Fraction of streams whose final record exceeds each alpha.
std::vector<ExceedancePoint> exceedance_profile(const LilReport& report, std::span<const double> alphas);

// ---- correlation decay -------------------------------------------------------

struct MixingPoint {
  std::uint64_t q = 0;
  /// E[W_0 . W_q]
  double autocov = 0.0;
  double autocov_se = 0.0;
  /// E[W_q,x sign(S_k,x)] with S_k the sum of the k values up to time 0
  double sign_corr = 0.0;
  double sign_corr_se = 0.0;
};

struct MixingProbe {
  double R = 0.0;
  std::uint64_t past = 16;
  std::vector<MixingPoint> points;
  /// Envelope R gamma^(q - C3 ln R) fitted to the autocovariances above noise.
  double gamma = 0.0;
  double C3 = 0.0;
  /// First q at which |autocov| is within 3 standard errors of 0.
  std::optional<std::uint64_t> noise_floor_q;
  bool non_decay = false;
};

MixingProbe mixing_decay(const sources::SourceSpec& source, double R, std::span<const std::uint64_t> q_grid,
                         std::uint64_t past, std::uint64_t length_per_shard, const moments::ProbeConfig& probe);

std::string to_json(const MixingProbe& probe);

// ---- A(t) ---------------------------------------------------------------------

/// A(t) = coef * L(t) * |Sigma|^2 (operator norm).
struct AFunction {
  double coef = 1.0;
  Mat2 Sigma = Mat2::identity();

  double operator()(double t) const;
  /// A for the configured l*(t) = C0 C L(t).
  static AFunction from_config(const normalizers::NormalizerConfig& config);
};

/// E(|Y|^2 1{|Y| <= t}) for the scale-s symmetric Pareto law.
double iid_truncated_second_moment(double t, double s);

}  // namespace superdiff::limit_stats
