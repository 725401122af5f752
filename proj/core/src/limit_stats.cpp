#include "superdiff/limit_stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "superdiff/error.hpp"
#include "superdiff/parallel.hpp"
#include "superdiff/truncation.hpp"
#include "superdiff/stats.hpp"

namespace superdiff::limit_stats {

using nlohmann::ordered_json;
using sources::Source;
using sources::stream_id;

namespace {

double component(const Vec2& v, int c) { return c == 0 ? v.x : v.y; }

ordered_json mat_json(const Mat2& m, int d) {
  if (d == 1) return ordered_json::array({ordered_json::array({m.xx})});
  return ordered_json::array({ordered_json::array({m.xx, m.xy}), ordered_json::array({m.yx, m.yy})});
}

struct SecondMoments {
  Mat2 mean;
  Mat2 se;
};

// Raw second moments of (approximately centred) normalized sums; the
// standard errors come from the spread of the products.
SecondMoments second_moments(std::span<const Vec2> z) {
  stats::RunningMoments xx, xy, yy;
  for (const Vec2& v : z) {
    xx.add(v.x * v.x);
    xy.add(v.x * v.y);
    yy.add(v.y * v.y);
  }
  SecondMoments out;
  out.mean = {xx.mean(), xy.mean(), xy.mean(), yy.mean()};
  out.se = {xx.standard_error(), xy.standard_error(), xy.standard_error(), yy.standard_error()};
  return out;
}

}  // namespace

// ---- CLT ------------------------------------------------------------------

CltReport clt_experiment(const sources::SourceSpec& source, std::uint64_t n, std::size_t samples,
                         std::span<const double> C_hat, const moments::ProbeConfig& probe) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "clt needs n >= 2");
  if (samples < 2) throw Error(ErrorCode::InvalidArgument, "clt needs at least 2 samples");
  if (C_hat.empty()) throw Error(ErrorCode::InvalidArgument, "clt needs a tail constant");
  for (double c : C_hat)
    if (!(c > 0)) throw Error(ErrorCode::InvalidArgument, "tail constant must be positive");
  if (probe.shards == 0) throw Error(ErrorCode::InvalidArgument, "shards must be positive");

  std::vector<Vec2> sums(samples);
  parallel::for_each_shard(probe.shards, probe.workers, [&](std::size_t shard) {
    for (std::size_t i = shard; i < samples; i += probe.shards) {
      Source src(source, stream_id(probe.tag, i));
      Vec2 s;
      for (std::uint64_t k = 0; k < n; ++k) s += src.next();
      sums[i] = s;
    }
  });

  CltReport report;
  report.n = n;
  report.samples = samples;
  report.dimension = Source(source, 0).dimension();
  const double dn = static_cast<double>(n);
  const double root_n = std::sqrt(dn);

  std::vector<Vec2> z(samples);
  for (int c = 0; c < report.dimension; ++c) {
    CltComponent comp;
    comp.C = C_hat[std::min<std::size_t>(c, C_hat.size() - 1)];
    const double an = normalizers::a_n(dn, comp.C);
    std::vector<double> x(samples), raw(samples);
    for (std::size_t i = 0; i < samples; ++i) {
      x[i] = component(sums[i], c) / an;
      raw[i] = component(sums[i], c) / root_n;
      (c == 0 ? z[i].x : z[i].y) = x[i];
    }
    comp.fitted_scale = stats::iqr_scale(x);
    const double scale = comp.fitted_scale;
    comp.ks_fitted = stats::ks_statistic(x, [scale](double t) { return stats::normal_cdf(t / scale); });
    comp.ks_standard = stats::ks_statistic(x, stats::normal_cdf);
    comp.ks_sqrt_n = stats::ks_statistic(raw, [scale](double t) { return stats::normal_cdf(t / scale); });
    report.components.push_back(comp);
  }

  report.sigma_hat = second_moments(z).mean;
  const std::size_t half = samples / 2;
  const SecondMoments h0 = second_moments(std::span<const Vec2>(z).first(half));
  const SecondMoments h1 = second_moments(std::span<const Vec2>(z).subspan(half));
  report.sigma_half[0] = h0.mean;
  report.sigma_half[1] = h1.mean;
  report.sigma_half_se[0] = h0.se;
  report.sigma_half_se[1] = h1.se;
  const double d0[] = {h0.mean.xx, h0.mean.xy, h0.mean.yy};
  const double d1[] = {h1.mean.xx, h1.mean.xy, h1.mean.yy};
  const double s0[] = {h0.se.xx, h0.se.xy, h0.se.yy};
  const double s1[] = {h1.se.xx, h1.se.xy, h1.se.yy};
  const int entries = report.dimension == 1 ? 1 : 3;
  for (int e = 0; e < entries; ++e) {
    const double se = std::hypot(s0[e], s1[e]);
    const double diff = std::abs(d0[e] - d1[e]);
    const double zval = se > 0 ? diff / se : (diff > 0 ? std::numeric_limits<double>::infinity() : 0.0);
    report.split_half_z = std::max(report.split_half_z, zval);
  }
  report.split_half_agree = report.split_half_z <= 3.0;
  return report;
}

std::string to_json(const CltReport& r) {
  ordered_json j;
  j["n"] = r.n;
  j["samples"] = r.samples;
  j["dimension"] = r.dimension;
  ordered_json comps = ordered_json::array();
  for (const auto& c : r.components) {
    comps.push_back({{"C", c.C},
                     {"fitted_scale", c.fitted_scale},
                     {"ks_fitted", c.ks_fitted},
                     {"ks_standard", c.ks_standard},
                     {"ks_sqrt_n", c.ks_sqrt_n}});
  }
  j["components"] = comps;
  j["sigma_hat"] = mat_json(r.sigma_hat, r.dimension);
  j["sigma_half"] = {mat_json(r.sigma_half[0], r.dimension), mat_json(r.sigma_half[1], r.dimension)};
  j["split_half_z"] = r.split_half_z;
  j["split_half_agree"] = r.split_half_agree;
  return j.dump(2) + "\n";
}

// ---- LIL records -------------------------------------------------------------

double LilNormalizer::operator()(double n) const {
  if (kind == Kind::Classical) return lambda * std::sqrt(2.0 * n * normalizers::LL(n));
  return lambda * normalizers::c_star(n, C);
}

std::string LilNormalizer::describe() const {
  std::ostringstream out;
  out.precision(17);
  if (kind == Kind::Classical)
    out << "classical";
  else
    out << "cstar(C=" << C << ")";
  if (lambda != 1.0) out << "*" << lambda;
  return out.str();
}

void advance(LilStreamState& state, Source& source, const LilNormalizer& normalizer, const LilSchedule& schedule,
             std::uint64_t until) {
  if (schedule.k_first < 0 || schedule.k_last < schedule.k_first || schedule.k_last > 62)
    throw Error(ErrorCode::InvalidArgument, "bad checkpoint range");
  if (schedule.burn_in == 0) throw Error(ErrorCode::InvalidArgument, "burn-in must be >= 1");
  const std::uint64_t last = std::uint64_t{1} << schedule.k_last;
  until = std::min(until, last);
  source.restore(state.source);

  // Within a dyadic block the normalizer is at least its value at the block
  // start, so a step can only set a record when |S_m| beats record * c_lo.
  std::uint64_t block = 0;
  double c_lo = 0.0;
  while (state.m < until) {
    state.sum += source.next();
    const std::uint64_t m = ++state.m;
    if (m >= schedule.burn_in) {
      const std::uint64_t b = std::bit_floor(m);
      if (b != block) {
        block = b;
        c_lo = normalizer(static_cast<double>(std::max(b, schedule.burn_in)));
      }
      const double s = norm(state.sum);
      if (s > state.record * c_lo) state.record = std::max(state.record, s / normalizer(static_cast<double>(m)));
    }
    if (std::has_single_bit(m)) {
      const int k = std::countr_zero(m);
      if (k >= schedule.k_first) state.records.push_back(state.record);
    }
  }
  state.source = source.state();
}

LilReport lil_record(const sources::SourceSpec& source, std::size_t streams, const LilNormalizer& normalizer,
                     const LilSchedule& schedule, const moments::ProbeConfig& probe) {
  if (streams == 0) throw Error(ErrorCode::InvalidArgument, "lil needs at least one stream");
  if (probe.shards == 0) throw Error(ErrorCode::InvalidArgument, "shards must be positive");
  LilReport report;
  report.source = sources::to_string(source.kind);
  report.normalizer = normalizer.describe();
  report.schedule = schedule;
  report.streams.resize(streams);
  const std::uint64_t until = std::uint64_t{1} << schedule.k_last;
  parallel::for_each_shard(probe.shards, probe.workers, [&](std::size_t shard) {
    for (std::size_t i = shard; i < streams; i += probe.shards) {
      LilStream& out = report.streams[i];
      out.stream = i;
      try {
        Source src(source, stream_id(probe.tag, i));
        LilStreamState state;
        advance(state, src, normalizer, schedule, until);
        out.records = std::move(state.records);
      } catch (const Error& e) {
        out.error = e.what();
      }
    }
  });
  return summarize(std::move(report));
}

LilReport summarize(LilReport report) {
  const std::size_t checkpoints = static_cast<std::size_t>(report.schedule.k_last - report.schedule.k_first + 1);
  report.median.assign(checkpoints, std::numeric_limits<double>::quiet_NaN());
  report.lower = report.median;
  report.upper = report.median;
  for (std::size_t c = 0; c < checkpoints; ++c) {
    std::vector<double> v;
    for (const auto& s : report.streams)
      if (s.error.empty() && c < s.records.size()) v.push_back(s.records[c]);
    if (v.empty()) continue;
    report.median[c] = stats::median(v);
    report.lower[c] = stats::quantile(v, 0.1);
    report.upper[c] = stats::quantile(v, 0.9);
  }
  return report;
}

std::string to_csv(const LilReport& report) {
  std::string out = "stream,k,n,record\n";
  char buf[96];
  for (const auto& s : report.streams) {
    for (std::size_t c = 0; c < s.records.size(); ++c) {
      const int k = report.schedule.k_first + static_cast<int>(c);
      std::snprintf(buf, sizeof buf, "%llu,%d,%llu,%.17g\n", static_cast<unsigned long long>(s.stream), k,
                    1ull << k, s.records[c]);
      out += buf;
    }
  }
  return out;
}

std::string to_json(const LilReport& report) {
  ordered_json j;
  j["source"] = report.source;
  j["normalizer"] = report.normalizer;
  j["k_first"] = report.schedule.k_first;
  j["k_last"] = report.schedule.k_last;
  j["burn_in"] = report.schedule.burn_in;
  j["streams"] = report.streams.size();
  auto nan_safe = [](const std::vector<double>& v) {
    ordered_json a = ordered_json::array();
    for (double x : v) a.push_back(std::isnan(x) ? ordered_json(nullptr) : ordered_json(x));
    return a;
  };
  j["median"] = nan_safe(report.median);
  j["lower"] = nan_safe(report.lower);
  j["upper"] = nan_safe(report.upper);
  ordered_json errors = ordered_json::array();
  for (const auto& s : report.streams)
    if (!s.error.empty()) errors.push_back({{"stream", s.stream}, {"error", s.error}});
  j["errors"] = errors;
  return j.dump(2) + "\n";
}

bool records_nondecreasing(const LilReport& report) {
  for (const auto& s : report.streams)
    if (!std::is_sorted(s.records.begin(), s.records.end())) return false;
  return true;
}

bool median_nondecreasing(const LilReport& report, std::size_t checkpoints) {
  const auto& m = report.median;
  if (m.empty()) return false;
  const std::size_t from = m.size() > checkpoints ? m.size() - checkpoints : 0;
  for (std::size_t i = from; i < m.size(); ++i)
    if (std::isnan(m[i])) return false;
  return std::is_sorted(m.begin() + static_cast<std::ptrdiff_t>(from), m.end());
}

std::vector<ExceedancePoint> exceedance_profile(const LilReport& report, std::span<const double> alphas) {
  std::vector<double> finals;
  for (const auto& s : report.streams)
    if (s.error.empty() && !s.records.empty()) finals.push_back(s.records.back());
  std::vector<ExceedancePoint> out;
  for (double a : alphas) {
    std::size_t hits = 0;
    for (double r : finals) hits += r > a;
    out.push_back({a, finals.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(finals.size())});
  }
  return out;
}

// ---- correlation decay -------------------------------------------------------

MixingProbe mixing_decay(const sources::SourceSpec& source, double R, std::span<const std::uint64_t> q_grid,
                         std::uint64_t past, std::uint64_t length_per_shard, const moments::ProbeConfig& probe) {
  if (!(R > 0)) throw Error(ErrorCode::InvalidArgument, "R must be positive");
  if (q_grid.empty()) throw Error(ErrorCode::InvalidArgument, "empty q grid");
  if (past == 0 || length_per_shard == 0 || probe.shards < 2)
    throw Error(ErrorCode::InvalidArgument, "mixing needs past >= 1, length >= 1 and at least 2 shards");
  const std::uint64_t q_max = *std::max_element(q_grid.begin(), q_grid.end());
  const std::size_t Q = q_grid.size();

  std::vector<std::vector<double>> auto_means(Q, std::vector<double>(probe.shards));
  std::vector<std::vector<double>> sign_means(Q, std::vector<double>(probe.shards));
  parallel::for_each_shard(probe.shards, probe.workers, [&](std::size_t shard) {
    Source src(source, stream_id(probe.tag, shard));
    const std::uint64_t total = past + length_per_shard + q_max;
    std::vector<Vec2> raw(total);
    src.fill(raw);
    std::vector<Vec2> w(total);
    for (std::uint64_t t = 0; t < total; ++t) w[t] = truncation::truncate(raw[t], R);
    // sign of the x component of the sum of the `past` values ending at t
    std::vector<double> sgn(length_per_shard);
    double s = 0.0;
    for (std::uint64_t t = 0; t < past; ++t) s += raw[t].x;
    for (std::uint64_t i = 0; i < length_per_shard; ++i) {
      const std::uint64_t t = past - 1 + i;
      if (i > 0) s += raw[t].x - raw[t - past].x;
      sgn[i] = (s > 0) - (s < 0);
    }
    for (std::size_t qi = 0; qi < Q; ++qi) {
      const std::uint64_t q = q_grid[qi];
      double a = 0.0, b = 0.0;
      for (std::uint64_t i = 0; i < length_per_shard; ++i) {
        const std::uint64_t t = past - 1 + i;
        a += dot(w[t], w[t + q]);
        b += w[t + q].x * sgn[i];
      }
      auto_means[qi][shard] = a / static_cast<double>(length_per_shard);
      sign_means[qi][shard] = b / static_cast<double>(length_per_shard);
    }
  });

  MixingProbe out;
  out.R = R;
  out.past = past;
  for (std::size_t qi = 0; qi < Q; ++qi) {
    const auto a = stats::summarize_shards(auto_means[qi]);
    const auto b = stats::summarize_shards(sign_means[qi]);
    out.points.push_back({q_grid[qi], a.mean, a.standard_error, b.mean, b.standard_error});
  }
  std::sort(out.points.begin(), out.points.end(), [](const auto& x, const auto& y) { return x.q < y.q; });

  std::vector<double> qs, logs;
  for (const auto& p : out.points) {
    if (p.q == 0) continue;
    const bool noise = std::abs(p.autocov) <= 3.0 * p.autocov_se;
    if (noise && !out.noise_floor_q) out.noise_floor_q = p.q;
    if (!out.noise_floor_q) {
      qs.push_back(static_cast<double>(p.q));
      logs.push_back(std::log(std::abs(p.autocov)));
    }
  }
  const double logR = std::log(R);
  if (qs.size() >= 2) {
    const auto fit = stats::linear_fit(qs, logs);
    out.gamma = std::exp(fit.slope);
    if (fit.slope < 0 && logR > 0) out.C3 = (logR - fit.intercept) / (logR * fit.slope);
    out.non_decay = fit.slope >= 0;
  }
  const bool any_positive_q = std::any_of(out.points.begin(), out.points.end(), [](const auto& p) { return p.q > 0; });
  if (any_positive_q && !out.noise_floor_q) out.non_decay = true;
  return out;
}

std::string to_json(const MixingProbe& p) {
  ordered_json j;
  j["R"] = p.R;
  j["past"] = p.past;
  ordered_json pts = ordered_json::array();
  for (const auto& x : p.points)
    pts.push_back({{"q", x.q},
                   {"autocov", x.autocov},
                   {"autocov_se", x.autocov_se},
                   {"sign_corr", x.sign_corr},
                   {"sign_corr_se", x.sign_corr_se}});
  j["points"] = pts;
  j["gamma"] = p.gamma;
  j["C3"] = p.C3;
  j["noise_floor_q"] = p.noise_floor_q ? ordered_json(*p.noise_floor_q) : ordered_json(nullptr);
  j["non_decay"] = p.non_decay;
  return j.dump(2) + "\n";
}

// ---- A(t) ---------------------------------------------------------------------

double AFunction::operator()(double t) const {
  const double s = operator_norm(Sigma);
  return coef * normalizers::L(t) * s * s;
}

AFunction AFunction::from_config(const normalizers::NormalizerConfig& config) {
  AFunction a;
  a.coef = config.C0 * config.C;
  a.Sigma = config.dimension == 1 ? Mat2{config.Sigma.xx, 0.0, 0.0, 0.0} : config.Sigma;
  return a;
}

double iid_truncated_second_moment(double t, double s) {
  if (!(s > 0)) throw Error(ErrorCode::InvalidArgument, "scale must be positive");
  return t <= s ? 0.0 : 2.0 * s * s * std::log(t / s);
}

}  // namespace superdiff::limit_stats
