#include "superdiff/tails.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "json.hpp"
#include "superdiff/error.hpp"
#include "superdiff/stats.hpp"

namespace superdiff::tails {

namespace {

using json = nlohmann::ordered_json;

bool is_integral(double x) noexcept { return std::isfinite(x) && x == std::round(x); }

// sum_{N=lo}^{hi} N^-3
double cube_mass(long long lo, long long hi) {
  double s = 0.0;
  for (long long n = hi; n >= lo; --n) s += 1.0 / (double(n) * double(n) * double(n));
  return s;
}

CorridorConstant fit_corridor(std::span<const Vec2> samples, Vec2i xi, const TailFitConfig& config) {
  CorridorConstant out;
  out.xi = xi;
  out.slope = std::numeric_limits<double>::quiet_NaN();
  out.slope_se = std::numeric_limits<double>::quiet_NaN();
  const Vec2 dir = to_real(xi);
  const double len2 = dot(dir, dir);

  // Long flights along a corridor land N xi plus a bounded lattice offset
  // away, so v counts for xi when its distance from the line R xi is small.
  const double max_cross = config.corridor_max_offset * std::sqrt(len2);
  std::vector<std::size_t> counts;
  for (const Vec2& v : samples) {
    if (!is_integral(v.x) || !is_integral(v.y)) continue;
    if (std::abs(cross(v, dir)) > max_cross) continue;
    const double n = std::abs(std::round(dot(v, dir) / len2));
    if (n < double(config.corridor_n_min)) continue;
    const auto level = static_cast<std::size_t>(std::floor(std::log2(n / double(config.corridor_n_min))));
    if (counts.size() <= level) counts.resize(level + 1, 0);
    ++counts[level];
  }

  const double total = double(samples.size());
  std::vector<double> x, y, w;
  std::size_t fit_count = 0;
  double fit_mass = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] < config.corridor_bin_min_count) break;
    const long long lo = config.corridor_n_min << k;
    const long long hi = 2 * lo - 1;
    const double mass = cube_mass(lo, hi);
    const double width = double(hi - lo + 1);
    // The bin's effective N is where N^-3 equals its mean over the bin, so
    // an exact N^-3 law lands on a straight line of slope -3.
    x.push_back(std::log(std::cbrt(width / mass)));
    y.push_back(std::log(double(counts[k]) / (total * width * 2.0)));
    w.push_back(double(counts[k]));
    fit_count += counts[k];
    fit_mass += mass;
  }
  out.count = fit_count;
  out.bins = static_cast<int>(x.size());
  if (fit_mass > 0) out.c = double(fit_count) / (total * 2.0 * fit_mass);
  if (x.size() >= 2) {
    const auto fit = stats::linear_fit(x, y, w);
    out.slope = fit.slope;
    out.slope_se = fit.slope_se;
  }
  return out;
}

}  // namespace

TailEstimate tail_fit(std::span<const Vec2> samples, const TailFitConfig& config) {
  if (!(config.t_min > 0) || config.angular_bins < 1 || !(config.hill_exponent > 0 && config.hill_exponent < 1))
    throw Error(ErrorCode::InvalidArgument, "bad tail fit configuration");
  if (samples.empty()) throw Error(ErrorCode::InsufficientTail, "no samples");
  if (std::all_of(samples.begin(), samples.end(), [&](const Vec2& v) { return v == samples.front(); }))
    throw Error(ErrorCode::DegenerateData, "all samples are equal");

  TailEstimate est;
  est.samples = samples.size();
  est.t_min = config.t_min;
  const double n = double(samples.size());

  std::vector<double> mags(samples.size());
  std::transform(samples.begin(), samples.end(), mags.begin(), [](const Vec2& v) { return norm(v); });
  std::sort(mags.begin(), mags.end());
  auto exceed = [&](double t) {
    return static_cast<std::size_t>(mags.end() - std::upper_bound(mags.begin(), mags.end(), t));
  };

  const std::size_t tail = exceed(config.t_min);
  if (tail < config.min_tail) {
    throw Error(ErrorCode::InsufficientTail, std::to_string(tail) + " samples beyond t_min, need " +
                                                 std::to_string(config.min_tail));
  }

  std::vector<double> lx, ly;
  double weighted_plateau = 0.0;
  double weight_total = 0.0;
  for (double t = config.t_min;; t *= 2.0) {
    const std::size_t e = exceed(t);
    if (e < config.window_exceedances) break;
    const double s = double(e) / n;
    est.survival.push_back({t, e, s});
    lx.push_back(std::log(t));
    ly.push_back(std::log(s));
    weighted_plateau += double(e) * t * t * s;
    weight_total += double(e);
    est.t_max = t;
  }
  if (lx.size() < 2) {
    throw Error(ErrorCode::InsufficientTail, "fit window holds fewer than two dyadic points with " +
                                                 std::to_string(config.window_exceedances) + " exceedances");
  }
  const auto fit = stats::linear_fit(lx, ly);
  est.alpha_hat = -fit.slope;
  est.alpha_se = fit.slope_se;
  est.C_hat = weighted_plateau / weight_total;

  // Hill estimator on the top k order statistics.
  est.hill_k = static_cast<std::size_t>(std::floor(std::pow(n, config.hill_exponent)));
  est.hill_k = std::min(est.hill_k, mags.size() - 1);
  const double threshold = mags[mags.size() - 1 - est.hill_k];
  if (est.hill_k > 0 && threshold > 0) {
    double acc = 0.0;
    for (std::size_t i = 0; i < est.hill_k; ++i) acc += std::log(mags[mags.size() - 1 - i] / threshold);
    est.alpha_hill = acc > 0 ? double(est.hill_k) / acc : std::numeric_limits<double>::infinity();
  } else {
    est.alpha_hill = std::numeric_limits<double>::quiet_NaN();
  }

  std::size_t positive = 0, signed_total = 0;
  est.angular.assign(static_cast<std::size_t>(config.angular_bins), 0.0);
  std::size_t angular_total = 0;
  const double bin_width = 2.0 * std::numbers::pi / config.angular_bins;
  for (const Vec2& v : samples) {
    if (norm(v) <= config.t_min) continue;
    if (v.x != 0.0) {
      ++signed_total;
      if (v.x > 0) ++positive;
    }
    double theta = std::atan2(v.y, v.x);
    if (theta < 0) theta += 2.0 * std::numbers::pi;
    auto bin = static_cast<std::size_t>(theta / bin_width);
    if (bin >= est.angular.size()) bin = est.angular.size() - 1;
    est.angular[bin] += 1.0;
    ++angular_total;
  }
  for (double& a : est.angular) a /= double(angular_total);
  if (signed_total > 0) {
    est.p_hat = double(positive) / double(signed_total);
    est.q_hat = 1.0 - est.p_hat;
  }

  for (const Vec2i& xi : config.corridor_directions) est.per_corridor.push_back(fit_corridor(samples, xi, config));
  return est;
}

TailEstimate tail_fit(std::span<const double> samples, const TailFitConfig& config) {
  std::vector<Vec2> lifted(samples.size());
  std::transform(samples.begin(), samples.end(), lifted.begin(), [](double x) { return Vec2{x, 0.0}; });
  return tail_fit(std::span<const Vec2>(lifted), config);
}

std::string to_json(const TailEstimate& est) {
  json doc;
  doc["alpha_hat"] = est.alpha_hat;
  doc["C_hat"] = est.C_hat;
  doc["p_hat"] = est.p_hat;
  doc["q_hat"] = est.q_hat;
  json corridors = json::array();
  for (const auto& c : est.per_corridor) {
    corridors.push_back(json{{"xi", {c.xi.x, c.xi.y}},
                             {"C", c.c},
                             {"slope", c.slope},
                             {"slope_se", c.slope_se},
                             {"count", c.count},
                             {"bins", c.bins}});
  }
  doc["per_corridor"] = corridors;
  doc["angular"] = est.angular;
  doc["alpha_se"] = est.alpha_se;
  doc["alpha_hill"] = est.alpha_hill;
  doc["hill_k"] = est.hill_k;
  doc["t_min"] = est.t_min;
  doc["t_max"] = est.t_max;
  doc["samples"] = est.samples;
  json survival = json::array();
  for (const auto& s : est.survival)
    survival.push_back(json{{"t", s.t}, {"exceedances", s.exceedances}, {"survival", s.survival}});
  doc["survival"] = survival;
  return doc.dump(2);
}

JointTailProbe joint_tail_estimate(std::span<const Vec2> trajectory, long long m, long long m_prime,
                                   std::uint64_t j) {
  if (j < 1) throw Error(ErrorCode::InvalidArgument, "time gap must be >= 1");
  if (m < 1 || m_prime < 1) throw Error(ErrorCode::InvalidArgument, "magnitude levels must be >= 1");
  if (trajectory.size() <= j) throw Error(ErrorCode::InsufficientData, "trajectory shorter than the gap");

  std::vector<long long> level(trajectory.size());
  std::transform(trajectory.begin(), trajectory.end(), level.begin(),
                 [](const Vec2& v) { return static_cast<long long>(std::floor(norm(v))); });

  JointTailProbe p;
  p.m = m;
  p.m_prime = m_prime;
  p.j = j;
  p.pairs = trajectory.size() - j;
  std::size_t count_m = 0, count_mp = 0;
  for (std::size_t i = 0; i < p.pairs; ++i) {
    const bool a = level[i] == m;
    const bool b = level[i + j] == m_prime;
    count_m += a;
    count_mp += b;
    p.hits += a && b;
  }
  if (count_m == 0 || count_mp == 0) {
    throw Error(ErrorCode::InsufficientData, "level set " + std::to_string(count_m == 0 ? m : m_prime) +
                                                 " never visited");
  }
  const double pairs = double(p.pairs);
  p.estimate = double(p.hits) / pairs;
  p.standard_error = std::sqrt(p.estimate * (1.0 - p.estimate) / pairs);
  p.marginal_m = double(count_m) / pairs;
  p.marginal_m_prime = double(count_mp) / pairs;
  p.scaled = p.estimate / (std::pow(double(m), -2.25) * std::pow(double(m_prime), -2.0));
  return p;
}

}  // namespace superdiff::tails
