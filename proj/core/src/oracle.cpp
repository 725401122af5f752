#include "superdiff/oracle.hpp"

#include <cmath>

#include "json.hpp"
#include "superdiff/error.hpp"
#include "superdiff/limit_stats.hpp"
#include "superdiff/stats.hpp"

namespace superdiff::oracle {

void validate(const ParetoSymConfig& config) {
  if (!(config.scale > 0)) throw Error(ErrorCode::InvalidArgument, "oracle scale must be positive");
  if (config.dimension != 1 && config.dimension != 2)
    throw Error(ErrorCode::InvalidArgument, "oracle dimension must be 1 or 2");
}

sources::SourceSpec to_source(const ParetoSymConfig& config) {
  validate(config);
  sources::SourceSpec spec;
  spec.kind = sources::SourceKind::Pareto;
  spec.seed = config.seed;
  spec.scale = config.scale;
  spec.dimension = config.dimension;
  return spec;
}

std::vector<Vec2> sample_pareto_sym(const ParetoSymConfig& config, std::size_t n, std::uint64_t stream) {
  sources::Source src(to_source(config), stream);
  std::vector<Vec2> out(n);
  src.fill(out);
  return out;
}

TruncatedMoments oracle_truncated_moments(const ParetoSymConfig& config, double R) {
  validate(config);
  const double s = config.scale;
  if (!(R >= s)) throw Error(ErrorCode::InvalidArgument, "truncation level below the scale");
  const double r = R / s;
  return {0.0, 2.0 * s * s * std::log(r), s * s * s * s * (r * r - 1.0)};
}

double block_fourth_moment(const ParetoSymConfig& config, std::uint64_t m, double R) {
  const auto t = oracle_truncated_moments(config, R);
  const double dm = static_cast<double>(m);
  return dm * t.fourth + 3.0 * dm * (dm - 1.0) * t.second * t.second;
}

namespace {

Check z_check(std::string name, double empirical, double expected, double se) {
  Check c{std::move(name), empirical, expected, se};
  c.z = se > 0 ? std::abs(empirical - expected) / se : (empirical == expected ? 0.0 : INFINITY);
  c.pass = c.z <= c.threshold;
  return c;
}

Check below(std::string name, double statistic, double threshold) {
  Check c{std::move(name), statistic, 0.0, 0.0, statistic, threshold};
  c.pass = statistic < threshold;
  return c;
}

Check above(std::string name, double statistic, double threshold) {
  Check c{std::move(name), statistic, 0.0, 0.0, statistic, threshold};
  c.pass = statistic > threshold;
  return c;
}

}  // namespace

SuiteReport oracle_suite(const SuiteConfig& config) {
  ParetoSymConfig one = config.oracle;
  one.dimension = 1;
  const auto spec = to_source(one);
  const double s = one.scale;
  SuiteReport report;
  moments::ProbeConfig probe = config.probe;

  // odd truncated moments and the truncated second moment from raw draws
  {
    const double R = config.cov_R.empty() ? 64.0 * s : config.cov_R.back() * s;
    std::vector<double> first(probe.shards), third(probe.shards), second(probe.shards);
    const std::uint64_t per = std::max<std::uint64_t>(1, config.draws / probe.shards);
    for (std::size_t k = 0; k < probe.shards; ++k) {
      const auto v = sample_pareto_sym(one, per, sources::stream_id(probe.tag, k));
      double a = 0, b = 0, c = 0;
      for (const Vec2& y : v) {
        const double w = std::abs(y.x) <= R ? y.x : 0.0;
        a += w;
        b += w * w;
        c += w * w * w;
      }
      first[k] = a / per;
      second[k] = b / per;
      third[k] = c / per;
    }
    const auto t = oracle_truncated_moments(one, R);
    const auto f = stats::summarize_shards(first);
    const auto g = stats::summarize_shards(second);
    const auto h = stats::summarize_shards(third);
    report.checks.push_back(z_check("first_truncated_moment", f.mean, t.first, f.standard_error));
    report.checks.push_back(z_check("second_truncated_moment", g.mean, t.second, g.standard_error));
    report.checks.push_back(z_check("third_truncated_moment", h.mean, 0.0, h.standard_error));
  }

  // block covariance against m * 2 s^2 ln(R/s)
  {
    std::vector<double> Rs;
    for (double r : config.cov_R) Rs.push_back(r * s);
    probe.tag = config.probe.tag + 1;
    const auto cov = moments::truncated_cov(spec, config.cov_m, Rs, probe);
    for (const auto& row : cov.rows) {
      const double expected = oracle_truncated_moments(one, row.R).second / std::log(row.R);
      report.checks.push_back(
          z_check("cov_ratio_R=" + std::to_string(row.R), row.ratio2, expected, row.ratio2_se));
    }
  }

  // fourth moments of truncated block sums
  {
    probe.tag = config.probe.tag + 2;
    const moments::PowerRule rule{config.r_exponent};
    const moments::RegimeBounds bounds;
    const auto reports = moments::fourth_moment_ratio(spec, config.moment_m, rule, bounds, probe);
    for (const auto& row : reports.front().rows) {
      const double expected = block_fourth_moment(one, row.m, row.R);
      report.checks.push_back(z_check("fourth_moment_m=" + std::to_string(row.m), row.est4, expected, row.se4));
    }
  }

  // CLT with sqrt(C n ln n), C = s^2
  {
    probe.tag = config.probe.tag + 3;
    const double C[] = {s * s};
    const auto clt = limit_stats::clt_experiment(spec, config.clt_n, config.clt_samples, C, probe);
    report.checks.push_back(below("clt_ks", clt.components.front().ks_fitted, 0.05));
    report.checks.push_back(above("clt_sqrt_n_control", clt.components.front().ks_sqrt_n, 0.1));
  }

  for (const auto& c : report.checks) report.pass = report.pass && c.pass;
  return report;
}

std::string to_json(const SuiteReport& report) {
  nlohmann::ordered_json j;
  j["pass"] = report.pass;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& c : report.checks) {
    arr.push_back({{"name", c.name},
                   {"empirical", c.empirical},
                   {"expected", c.expected},
                   {"se", c.se},
                   {"z", c.z},
                   {"threshold", c.threshold},
                   {"pass", c.pass}});
  }
  j["checks"] = arr;
  return j.dump(2) + "\n";
}

}  // namespace superdiff::oracle
