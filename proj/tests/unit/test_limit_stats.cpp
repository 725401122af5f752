#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "superdiff/error.hpp"
#include "superdiff/limit_stats.hpp"
#include "superdiff/normalizers.hpp"
#include "superdiff/sources.hpp"

using namespace superdiff;
using namespace superdiff::limit_stats;

namespace {

sources::SourceSpec pareto(std::uint64_t seed, double scale = 1.0) {
  sources::SourceSpec s;
  s.seed = seed;
  s.scale = scale;
  return s;
}

sources::SourceSpec gaussian(std::uint64_t seed) {
  sources::SourceSpec s;
  s.kind = sources::SourceKind::Gaussian;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("nonstandard CLT for the oracle") {
  moments::ProbeConfig probe;
  probe.tag = 12;
  const std::vector<double> C = {1.0};
  const auto r = clt_experiment(pareto(1), 10000, 10000, C, probe);
  REQUIRE(r.components.size() == 1);
  CHECK(r.components[0].ks_fitted < 0.05);
  // sqrt(n) misses the log growth of the variance
  CHECK(r.components[0].ks_sqrt_n > 0.1);
  CHECK(r.split_half_agree);
  CHECK(r.sigma_hat.xx > 0);
  CHECK(r.components[0].ks_fitted >= 0.0);
  CHECK(r.components[0].ks_fitted <= 1.0);

  const auto doc = nlohmann::json::parse(to_json(r));
  CHECK(doc["n"] == 10000);
}

TEST_CASE("gaussian control CLT") {
  moments::ProbeConfig probe;
  const double n = 64;
  // C chosen so that a_n = sqrt(n)
  const std::vector<double> C = {1.0 / normalizers::L(n)};
  const auto r = clt_experiment(gaussian(2), 64, 10000, C, probe);
  CHECK(r.components[0].ks_standard < 0.02);
  CHECK(r.components[0].ks_fitted < 0.02);
  CHECK(r.sigma_hat.xx == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("two-dimensional CLT covariance is symmetric") {
  auto s = pareto(3);
  s.dimension = 2;
  moments::ProbeConfig probe;
  const std::vector<double> C = {1.0};
  const auto r = clt_experiment(s, 1000, 2000, C, probe);
  CHECK(r.components.size() == 2);
  CHECK(r.sigma_hat.xy == r.sigma_hat.yx);
  CHECK(r.sigma_hat.xx * r.sigma_hat.yy - r.sigma_hat.xy * r.sigma_hat.yx >= 0);
  CHECK(std::abs(r.sigma_hat.xy) < 0.1 * r.sigma_hat.xx);
}

TEST_CASE("lil normalizers") {
  const LilNormalizer cs{LilNormalizer::Kind::CStar, 2.0, 1.0};
  CHECK(cs(1000) == normalizers::c_star(1000, 2.0));
  const LilNormalizer cl{LilNormalizer::Kind::Classical, 1.0, 3.0};
  CHECK(cl(1e6) == doctest::Approx(3.0 * std::sqrt(2e6 * std::log(std::log(1e6)))));
  CHECK(cs.describe().find("cstar") == 0);
  CHECK(cl.describe().find("classical") == 0);
}

TEST_CASE("records agree with a brute-force running maximum") {
  const LilNormalizer norm_c{LilNormalizer::Kind::CStar, 1.0, 1.0};
  const LilSchedule sched{6, 14, 32};
  sources::Source src(pareto(4), 0);
  LilStreamState st;
  advance(st, src, norm_c, sched, std::uint64_t{1} << 14);
  REQUIRE(st.records.size() == 9);

  sources::Source ref(pareto(4), 0);
  double s = 0, best = 0;
  std::vector<double> expected;
  for (std::uint64_t m = 1; m <= (1u << 14); ++m) {
    s += ref.next().x;
    if (m >= 32) best = std::max(best, std::abs(s) / normalizers::c_star(double(m), 1.0));
    if (std::has_single_bit(m) && m >= 64) expected.push_back(best);
  }
  REQUIRE(expected.size() == st.records.size());
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(st.records[i] == expected[i]);
}

TEST_CASE("advance resumes where it stopped") {
  const LilNormalizer norm_c{LilNormalizer::Kind::CStar, 1.0, 1.0};
  const LilSchedule sched{8, 14, 64};
  sources::Source a(pareto(5), 0);
  LilStreamState one;
  advance(one, a, norm_c, sched, 1u << 14);

  LilStreamState two;
  for (std::uint64_t until : {1000u, 5000u, 5001u, 1u << 14}) {
    sources::Source b(pareto(5), 0);
    advance(two, b, norm_c, sched, until);
  }
  CHECK(two.records == one.records);
  CHECK(two.sum == one.sum);
  CHECK(two.m == one.m);
}

TEST_CASE("records scale exactly with the normalizer") {
  moments::ProbeConfig probe;
  probe.tag = 13;
  const LilSchedule sched{10, 16, 1024};
  for (const auto& spec : {pareto(6), gaussian(6)}) {
    const LilNormalizer base{LilNormalizer::Kind::CStar, 1.0, 1.0};
    LilNormalizer scaled = base;
    scaled.lambda = 2.5;
    const auto r1 = lil_record(spec, 16, base, sched, probe);
    const auto r2 = lil_record(spec, 16, scaled, sched, probe);
    CHECK(records_nondecreasing(r1));
    for (std::size_t i = 0; i < r1.streams.size(); ++i) {
      REQUIRE(r1.streams[i].records.size() == 7);
      for (std::size_t c = 0; c < 7; ++c) {
        CHECK(std::abs(r2.streams[i].records[c] * 2.5 / r1.streams[i].records[c] - 1) < 1e-12);
      }
    }
  }
}

TEST_CASE("summaries, csv and exceedance") {
  moments::ProbeConfig probe;
  probe.workers = 3;
  const LilNormalizer n{LilNormalizer::Kind::CStar, 1.0, 1.0};
  const LilSchedule sched{10, 14, 1024};
  const auto r = lil_record(pareto(7), 20, n, sched, probe);
  REQUIRE(r.median.size() == 5);
  for (std::size_t c = 0; c < 5; ++c) {
    CHECK(r.lower[c] <= r.median[c]);
    CHECK(r.median[c] <= r.upper[c]);
  }
  std::istringstream in(to_csv(r));
  std::string line;
  std::getline(in, line);
  CHECK(line == "stream,k,n,record");
  std::getline(in, line);
  CHECK(line.rfind("0,10,1024,", 0) == 0);

  std::vector<double> alphas;
  for (int i = 0; i <= 40; ++i) alphas.push_back(0.1 * i);
  alphas.push_back(1e9);
  const auto prof = exceedance_profile(r, alphas);
  CHECK(prof.front().fraction == 1.0);
  CHECK(prof.back().fraction == 0.0);
  for (std::size_t i = 1; i < prof.size(); ++i) CHECK(prof[i].fraction <= prof[i - 1].fraction);

  // the worker count does not change anything
  moments::ProbeConfig single = probe;
  single.workers = 1;
  CHECK(to_csv(lil_record(pareto(7), 20, n, sched, single)) == to_csv(r));

  const auto doc = nlohmann::json::parse(to_json(r));
  CHECK(doc["errors"].empty());
  CHECK(doc["median"].size() == 5);
}

TEST_CASE("stream errors are contained") {
  sources::SourceSpec bad;
  bad.kind = sources::SourceKind::Lorentz;  // no table
  moments::ProbeConfig probe;
  const auto r = lil_record(bad, 3, LilNormalizer{}, LilSchedule{10, 11, 1024}, probe);
  for (const auto& s : r.streams) CHECK_FALSE(s.error.empty());
  CHECK(std::isnan(r.median[0]));
  CHECK_FALSE(median_nondecreasing(r, 2));
}

TEST_CASE("mixing probe on the oracle") {
  moments::ProbeConfig probe;
  probe.tag = 15;
  const double R = 64;
  const std::vector<std::uint64_t> q = {0, 1, 2, 4, 8};
  const auto m = mixing_decay(pareto(8), R, q, 16, 100000, probe);
  REQUIRE(m.points.size() == 5);
  CHECK(std::abs(m.points[0].autocov - iid_truncated_second_moment(R, 1.0)) < 3 * m.points[0].autocov_se);
  for (std::size_t i = 1; i < m.points.size(); ++i) {
    CHECK(std::abs(m.points[i].autocov) < 3 * m.points[i].autocov_se);
    CHECK(std::abs(m.points[i].sign_corr) < 3.5 * m.points[i].sign_corr_se);
  }
  REQUIRE(m.noise_floor_q);
  CHECK(*m.noise_floor_q == 1);
  CHECK_THROWS_AS(mixing_decay(pareto(8), R, q, 16, 100, moments::ProbeConfig{1}), Error);
}

TEST_CASE("A(c_n) equals the squared norm of Gamma_n") {
  normalizers::NormalizerConfig cfg;
  for (double C : {0.5, 1.0, 2.0}) {
    cfg.C = C;
    cfg.Sigma = {1.3, 0.4, 0.4, 0.7};
    const auto A = AFunction::from_config(cfg);
    for (double n : {8.0, 1024.0, 1e9}) {
      const auto row = normalizers::evaluate(cfg, n);
      const double g = operator_norm(row.Gamma);
      CHECK(std::abs(A(row.c_star) / (g * g) - 1) < 1e-12);
    }
  }
  const AFunction a{2.0, Mat2::identity()};
  double prev = 0;
  for (double t = 1; t < 1e6; t *= 1.7) {
    CHECK(a(t) >= prev);
    prev = a(t);
  }
}

TEST_CASE("iid truncated second moment") {
  CHECK(iid_truncated_second_moment(std::exp(1.0), 1.0) == doctest::Approx(2.0));
  CHECK(iid_truncated_second_moment(0.5, 1.0) == 0.0);
  CHECK(iid_truncated_second_moment(6.0, 2.0) == doctest::Approx(8 * std::log(3.0)));
  CHECK_THROWS_AS(iid_truncated_second_moment(1.0, 0.0), Error);
}
