#include "superdiff/moments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "superdiff/error.hpp"
#include "superdiff/parallel.hpp"
#include "superdiff/stats.hpp"
#include "superdiff/truncation.hpp"

namespace superdiff::moments {

namespace {

using sources::Source;
using sources::stream_id;

// Running sums for a 2-vector: count, first moments, second moments.
struct CovAccumulator {
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;

  void add(Vec2 v) noexcept {
    n += 1;
    sx += v.x;
    sy += v.y;
    sxx += v.x * v.x;
    sxy += v.x * v.y;
    syy += v.y * v.y;
  }
  void merge(const CovAccumulator& o) noexcept {
    n += o.n;
    sx += o.sx;
    sy += o.sy;
    sxx += o.sxx;
    sxy += o.sxy;
    syy += o.syy;
  }
  Mat2 cov() const noexcept {
    if (n < 2) return {};
    const double mx = sx / n, my = sy / n;
    const double c = n / (n - 1);
    const double xy = c * (sxy / n - mx * my);
    return {c * (sxx / n - mx * mx), xy, xy, c * (syy / n - my * my)};
  }
};

double mean_diagonal(const Mat2& m, int dimension) { return dimension == 1 ? m.xx : 0.5 * (m.xx + m.yy); }

stats::LinearFit log_log_fit(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0 && y[i] > 0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  if (lx.size() < 2) return {};
  return stats::linear_fit(lx, ly);
}

void check_probe(const ProbeConfig& probe) {
  if (probe.shards < 1 || probe.blocks_per_shard < 1)
    throw Error(ErrorCode::InvalidArgument, "probe needs at least one shard and one block per shard");
}

}  // namespace

void check_regime(double m, double R, const RegimeBounds& bounds) {
  if (!(R >= 1)) throw Error(ErrorCode::RegimeViolation, "truncation level R must be >= 1");
  if (m > std::pow(R, 2.0 - bounds.r1) * (1 + 1e-12)) {
    throw Error(ErrorCode::RegimeViolation, "m = " + std::to_string(m) + " exceeds R^(2 - r1) = " +
                                                std::to_string(std::pow(R, 2.0 - bounds.r1)));
  }
  if (R > std::pow(m, bounds.r2) * (1 + 1e-12)) {
    throw Error(ErrorCode::RegimeViolation, "R = " + std::to_string(R) + " exceeds m^r2 = " +
                                                std::to_string(std::pow(m, bounds.r2)));
  }
}

const char* to_string(Projection p) noexcept {
  switch (p) {
    case Projection::Full: return "full";
    case Projection::X: return "x";
    case Projection::Y: return "y";
  }
  return "?";
}

std::vector<MomentReport> fourth_moment_ratio(const sources::SourceSpec& source, std::span<const std::uint64_t> m_grid,
                                              const PowerRule& rule, const RegimeBounds& bounds,
                                              const ProbeConfig& probe) {
  check_probe(probe);
  if (m_grid.empty()) throw Error(ErrorCode::InvalidArgument, "empty m grid");
  std::vector<double> R_of(m_grid.size());
  for (std::size_t i = 0; i < m_grid.size(); ++i) {
    if (m_grid[i] < 1) throw Error(ErrorCode::InvalidArgument, "m must be >= 1");
    R_of[i] = rule(double(m_grid[i]));
    check_regime(double(m_grid[i]), R_of[i], bounds);
  }
  const int dimension = Source(source, 0).dimension();
  const std::size_t projections = dimension == 2 ? 3 : 1;

  struct ShardResult {
    stats::RunningMoments fourth[3];
    CovAccumulator cov[3];
  };
  std::vector<ShardResult> results(m_grid.size() * probe.shards);
  parallel::for_each_shard(results.size(), probe.workers, [&](std::size_t task) {
    const std::size_t mi = task / probe.shards;
    const std::uint64_t m = m_grid[mi];
    const double R = R_of[mi];
    Source src(source, stream_id(probe.tag, task));
    ShardResult& out = results[task];
    for (std::size_t b = 0; b < probe.blocks_per_shard; ++b) {
      Vec2 full;
      double sx = 0, sy = 0;
      for (std::uint64_t j = 0; j < m; ++j) {
        const Vec2 v = src.next();
        full += truncation::truncate(v, R);
        sx += truncation::truncate(v.x, R);
        sy += truncation::truncate(v.y, R);
      }
      const double f2 = dot(full, full);
      out.fourth[0].add(f2 * f2);
      out.cov[0].add(full);
      out.fourth[1].add(sx * sx * sx * sx);
      out.cov[1].add({sx, 0.0});
      out.fourth[2].add(sy * sy * sy * sy);
      out.cov[2].add({0.0, sy});
    }
  });

  std::vector<MomentReport> reports;
  for (std::size_t p = 0; p < projections; ++p) {
    MomentReport report;
    report.projection = static_cast<Projection>(p);
    std::vector<double> ms, ratios;
    for (std::size_t mi = 0; mi < m_grid.size(); ++mi) {
      MomentRow row;
      row.m = m_grid[mi];
      row.R = R_of[mi];
      stats::RunningMoments pooled;
      CovAccumulator cov;
      for (std::size_t s = 0; s < probe.shards; ++s) {
        const ShardResult& r = results[mi * probe.shards + s];
        pooled.merge(r.fourth[p]);
        cov.merge(r.cov[p]);
        row.shard_est4.push_back(r.fourth[p].mean());
      }
      row.blocks = pooled.count();
      row.est4 = pooled.mean();
      row.se4 = pooled.standard_error();
      const double m = double(row.m);
      row.ratio4 = row.est4 / (m * row.R * row.R);
      row.cov = cov.cov();
      const int d = report.projection == Projection::Full ? dimension : 1;
      const Mat2& c = row.cov;
      const double diag = report.projection == Projection::Y ? c.yy : mean_diagonal(c, d);
      row.ratio2 = diag / (m * std::log(row.R));
      for (std::size_t s = 0; s < probe.shards; ++s) {
        const auto& shard = results[mi * probe.shards + s].fourth[p];
        const double se = std::hypot(shard.standard_error(), row.se4);
        if (se > 0) row.max_shard_z = std::max(row.max_shard_z, std::abs(shard.mean() - row.est4) / se);
      }
      row.shards_agree = row.max_shard_z <= 3.0;
      ms.push_back(m);
      ratios.push_back(row.ratio4);
      report.rows.push_back(std::move(row));
    }
    const auto fit = log_log_fit(ms, ratios);
    report.log_slope = fit.slope;
    report.log_slope_se = fit.slope_se;
    bool monotone = report.rows.size() >= 3;
    for (std::size_t i = 1; i < report.rows.size(); ++i)
      monotone = monotone && report.rows[i].ratio4 > report.rows[i - 1].ratio4;
    report.upward_trend = monotone || (fit.slope_se > 0 && fit.slope > 3.0 * fit.slope_se && fit.slope > 0.05);
    reports.push_back(std::move(report));
  }
  return reports;
}

std::string to_csv(const MomentReport& report) {
  std::ostringstream out;
  out << "m,R,est4,se4,ratio4,cov11,cov12,cov22,ratio2\n";
  char buf[512];
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%llu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  static_cast<unsigned long long>(r.m), r.R, r.est4, r.se4, r.ratio4, r.cov.xx, r.cov.xy, r.cov.yy,
                  r.ratio2);
    out << buf;
  }
  return out.str();
}

CovReport truncated_cov(const sources::SourceSpec& source, std::uint64_t m, std::span<const double> R_grid,
                        const ProbeConfig& probe) {
  check_probe(probe);
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "m must be >= 1");
  if (R_grid.empty()) throw Error(ErrorCode::InvalidArgument, "empty R grid");
  for (double R : R_grid) {
    if (!(R > 1)) throw Error(ErrorCode::InvalidArgument, "R must exceed 1");
  }
  std::vector<std::size_t> order(R_grid.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return R_grid[a] < R_grid[b]; });
  std::vector<double> sorted;
  for (std::size_t i : order) sorted.push_back(R_grid[i]);

  CovReport report;
  report.m = m;
  report.dimension = Source(source, 0).dimension();
  const std::size_t levels = sorted.size();

  std::vector<std::vector<CovAccumulator>> results(probe.shards, std::vector<CovAccumulator>(levels));
  parallel::for_each_shard(probe.shards, probe.workers, [&](std::size_t s) {
    Source src(source, stream_id(probe.tag, s));
    std::vector<Vec2> bucket(levels);
    for (std::size_t b = 0; b < probe.blocks_per_shard; ++b) {
      std::fill(bucket.begin(), bucket.end(), Vec2{});
      for (std::uint64_t j = 0; j < m; ++j) {
        const Vec2 v = src.next();
        const double a = norm(v);
        // v counts towards every level R >= |v|; bucket it at the smallest.
        const auto it = std::lower_bound(sorted.begin(), sorted.end(), a);
        if (it != sorted.end()) bucket[static_cast<std::size_t>(it - sorted.begin())] += v;
      }
      Vec2 running;
      for (std::size_t k = 0; k < levels; ++k) {
        running += bucket[k];
        results[s][k].add(running);
      }
    }
  });

  report.rows.resize(levels);
  for (std::size_t k = 0; k < levels; ++k) {
    CovAccumulator pooled;
    std::vector<double> shard_ratio;
    const double scale = double(m) * std::log(sorted[k]);
    for (std::size_t s = 0; s < probe.shards; ++s) {
      pooled.merge(results[s][k]);
      shard_ratio.push_back(mean_diagonal(results[s][k].cov(), report.dimension) / scale);
    }
    CovRow row;
    row.R = sorted[k];
    row.cov = pooled.cov();
    row.ratio = (1.0 / scale) * row.cov;
    row.ratio2 = mean_diagonal(row.cov, report.dimension) / scale;
    row.ratio2_se = probe.shards > 1 ? stats::summarize_shards(shard_ratio).standard_error : 0.0;
    report.rows[order[k]] = row;
  }
  report.blocks = probe.shards * probe.blocks_per_shard;
  return report;
}

BandReport band_second_moment(const sources::SourceSpec& source, int n, std::span<const std::uint64_t> N_grid,
                              const normalizers::NormalizerConfig& config, const ProbeConfig& probe,
                              std::optional<Band> band) {
  check_probe(probe);
  normalizers::validate(config);
  if (n < 1 || n > 62) throw Error(ErrorCode::InvalidArgument, "level n must lie in [1, 62]");
  BandReport report;
  report.n = n;
  const double level = std::ldexp(1.0, n);
  if (band) {
    report.lo = band->lo;
    report.hi = band->hi;
  } else {
    report.lo = std::exp(normalizers::log_d_n(config, std::log(level)));
    report.hi = normalizers::c_n(config, level);
  }
  report.empty_band = !(report.lo < report.hi);
  for (std::uint64_t N : N_grid) {
    if (N < 1) throw Error(ErrorCode::InvalidArgument, "N must be >= 1");
    if (!band && double(N) > report.hi * report.hi)
      throw Error(ErrorCode::InvalidArgument, "N must not exceed c_{2^n}^2");
  }
  const double log_width = report.empty_band ? 1.0 : normalizers::L(report.hi / report.lo);

  std::vector<stats::RunningMoments> results(N_grid.size() * probe.shards);
  if (!report.empty_band) {
    parallel::for_each_shard(results.size(), probe.workers, [&](std::size_t task) {
      const std::uint64_t N = N_grid[task / probe.shards];
      Source src(source, stream_id(probe.tag, task));
      for (std::size_t b = 0; b < probe.blocks_per_shard; ++b) {
        Vec2 s;
        for (std::uint64_t l = 0; l <= N; ++l) s += truncation::band(src.next(), report.lo, report.hi);
        results[task].add(dot(s, s));
      }
    });
  }
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < N_grid.size(); ++i) {
    BandRow row;
    row.N = N_grid[i];
    if (!report.empty_band) {
      stats::RunningMoments pooled;
      for (std::size_t s = 0; s < probe.shards; ++s) pooled.merge(results[i * probe.shards + s]);
      row.second = pooled.mean();
      row.se = pooled.standard_error();
      row.ratio = row.second / (double(row.N) * log_width);
    }
    xs.push_back(double(row.N));
    ys.push_back(row.ratio);
    report.rows.push_back(row);
  }
  const auto fit = log_log_fit(xs, ys);
  report.log_slope = fit.slope;
  report.log_slope_se = fit.slope_se;
  report.growing = fit.slope_se > 0 && fit.slope > 3.0 * fit.slope_se && fit.slope > 0.05;
  return report;
}

PassageReport first_passage_profile(const sources::SourceSpec& source, int n, std::span<const std::uint64_t> K_grid,
                                    double eps, const normalizers::NormalizerConfig& config,
                                    const ProbeConfig& probe) {
  check_probe(probe);
  normalizers::validate(config);
  if (!(eps > 0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
  if (n < 1 || n > 62) throw Error(ErrorCode::InvalidArgument, "level n must lie in [1, 62]");
  PassageReport report;
  report.n = n;
  report.eps = eps;
  const double level = std::ldexp(1.0, n);
  report.lo = std::exp(normalizers::log_dbar_n(config, std::log(level)));
  report.hi = normalizers::c_n(config, level);
  for (std::uint64_t K : K_grid) {
    if (double(K) >= report.lo * report.lo)
      throw Error(ErrorCode::InvalidArgument, "K must be below dbar_{2^n}^2");
  }
  const double threshold = eps * report.hi;

  std::vector<std::size_t> hits(K_grid.size() * probe.shards, 0);
  parallel::for_each_shard(hits.size(), probe.workers, [&](std::size_t task) {
    const std::uint64_t K = K_grid[task / probe.shards];
    if (K == 0) return;
    Source src(source, stream_id(probe.tag, task));
    for (std::size_t path = 0; path < probe.blocks_per_shard; ++path) {
      Vec2 s;
      bool crossed = false;
      bool counted = false;
      for (std::uint64_t k = 0; k <= K; ++k) {
        s += truncation::band(src.next(), report.lo, report.hi);
        if (!crossed && norm(s) >= threshold) {
          crossed = true;
          counted = k >= 1;
        }
      }
      if (counted && norm(s) < 0.5 * threshold) ++hits[task];
    }
  });
  for (std::size_t i = 0; i < K_grid.size(); ++i) {
    PassageRow row;
    row.K = K_grid[i];
    if (row.K > 0) {
      row.paths = probe.shards * probe.blocks_per_shard;
      for (std::size_t s = 0; s < probe.shards; ++s) row.hits += hits[i * probe.shards + s];
      row.frequency = double(row.hits) / double(row.paths);
      row.se = std::sqrt(row.frequency * (1 - row.frequency) / double(row.paths));
      row.ratio = row.frequency / (double(row.K) / (report.hi * report.hi));
    }
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace superdiff::moments
