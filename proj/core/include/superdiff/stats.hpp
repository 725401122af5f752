#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace superdiff::stats {

double normal_cdf(double x) noexcept;

/// Kolmogorov-Smirnov statistic of `samples` against a continuous CDF.
/// Sorts a copy; the input is left untouched.
double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);

/// Two-sample KS statistic sup|F_a - F_b|; handles ties exactly.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Asymptotic 1 - alpha critical value of the one-sample KS statistic.
double ks_critical_value(std::size_t n, double alpha = 0.05);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  std::size_t points = 0;
};

/// Ordinary (optionally weighted) least squares y = intercept + slope * x.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y,
                     std::span<const double> weights = {});

/// Linear interpolation quantile (type 7) of unsorted data.
double quantile(std::span<const double> data, double p);
double median(std::span<const double> data);

/// Gaussian-consistent scale from the interquartile range.
double iqr_scale(std::span<const double> data);

double mean(std::span<const double> data);
/// Unbiased sample variance.
double variance(std::span<const double> data);

/// Welford accumulator for mean and variance.
class RunningMoments {
 public:
  void add(double x) noexcept;
  void merge(const RunningMoments& other) noexcept;

  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept;
  /// Standard error of the mean.
  double standard_error() const noexcept;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Mean and standard error from independent shard estimates.
struct ShardSummary {
  double mean = 0.0;
  double standard_error = 0.0;
};
ShardSummary summarize_shards(std::span<const double> shard_means);

}  // namespace superdiff::stats
