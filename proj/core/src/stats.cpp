#include "superdiff/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include "superdiff/error.hpp"

namespace superdiff::stats {

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw Error(ErrorCode::InvalidArgument, "ks_statistic: empty sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::InvalidArgument, "ks_two_sample: empty sample");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double x = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] == x) ++i;
    while (j < sb.size() && sb[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_critical_value(std::size_t n, double alpha) {
  // Kolmogorov limit c(alpha) = sqrt(-ln(alpha/2)/2).
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y, std::span<const double> weights) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::InvalidArgument, "linear_fit: need >= 2 paired points");
  if (!weights.empty() && weights.size() != x.size()) throw Error(ErrorCode::InvalidArgument, "linear_fit: weight size mismatch");
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    sw += w;
    sx += w * x[i];
    sy += w * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    sxx += w * (x[i] - mx) * (x[i] - mx);
    sxy += w * (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0) throw Error(ErrorCode::InvalidArgument, "linear_fit: degenerate abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.points = x.size();
  if (x.size() > 2) {
    double rss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double w = weights.empty() ? 1.0 : weights[i];
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      rss += w * r * r;
    }
    fit.slope_se = std::sqrt(rss / static_cast<double>(x.size() - 2) / sxx);
  }
  return fit;
}

double quantile(std::span<const double> data, double p) {
  if (data.empty()) throw Error(ErrorCode::InvalidArgument, "quantile: empty data");
  std::vector<double> v(data.begin(), data.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * std::clamp(p, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(lo), v.end());
  const double a = v[lo];
  if (lo + 1 >= v.size()) return a;
  const double b = *std::min_element(v.begin() + static_cast<std::ptrdiff_t>(lo) + 1, v.end());
  return a + (h - static_cast<double>(lo)) * (b - a);
}

double median(std::span<const double> data) { return quantile(data, 0.5); }

double iqr_scale(std::span<const double> data) {
  constexpr double kGaussianIqr = 1.3489795003921634;
  return (quantile(data, 0.75) - quantile(data, 0.25)) / kGaussianIqr;
}

double mean(std::span<const double> data) {
  if (data.empty()) throw Error(ErrorCode::InvalidArgument, "mean: empty data");
  double s = 0;
  for (double v : data) s += v;
  return s / static_cast<double>(data.size());
}

double variance(std::span<const double> data) {
  RunningMoments m;
  for (double v : data) m.add(v);
  return m.variance();
}

void RunningMoments::add(double x) noexcept {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void RunningMoments::merge(const RunningMoments& other) noexcept {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double total = static_cast<double>(n_ + other.n_);
  const double delta = other.mean_ - mean_;
  mean_ += delta * static_cast<double>(other.n_) / total;
  m2_ += other.m2_ + delta * delta * static_cast<double>(n_) * static_cast<double>(other.n_) / total;
  n_ += other.n_;
}

double RunningMoments::variance() const noexcept {
  return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

double RunningMoments::standard_error() const noexcept {
  return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

ShardSummary summarize_shards(std::span<const double> shard_means) {
  RunningMoments m;
  for (double v : shard_means) m.add(v);
  return {m.mean(), m.standard_error()};
}

}  // namespace superdiff::stats
