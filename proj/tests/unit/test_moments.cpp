#include "doctest.h"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "superdiff/error.hpp"
#include "superdiff/moments.hpp"
#include "superdiff/normalizers.hpp"
#include "superdiff/sources.hpp"

using namespace superdiff;
using namespace superdiff::moments;

namespace {

sources::SourceSpec pareto(std::uint64_t seed) {
  sources::SourceSpec s;
  s.seed = seed;
  return s;
}

// E(sum of m iid symmetric W)^4 = m E4 + 3 m (m - 1) E2^2, unit-scale Pareto.
double block_fourth(double m, double R) {
  const double e2 = 2 * std::log(R), e4 = R * R - 1;
  return m * e4 + 3 * m * (m - 1) * e2 * e2;
}

}  // namespace

TEST_CASE("regime bounds") {
  CHECK_NOTHROW(check_regime(1024, std::pow(1024.0, 0.6), {}));
  try {
    check_regime(1024, 2, {});
    FAIL("expected RegimeViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RegimeViolation);
  }
  CHECK_THROWS_AS(check_regime(16, 32, {}), Error);
  CHECK_THROWS_AS(check_regime(16, 0.5, {}), Error);
}

TEST_CASE("fourth moments of the oracle match the closed form") {
  ProbeConfig probe;
  probe.blocks_per_shard = 4000;
  const std::vector<std::uint64_t> m = {4, 16, 64};
  const auto reports = fourth_moment_ratio(pareto(3), m, PowerRule{1.0}, RegimeBounds{}, probe);
  REQUIRE(reports.size() == 1);
  const auto& rep = reports[0];
  CHECK(rep.projection == Projection::Full);
  REQUIRE(rep.rows.size() == 3);
  for (const auto& row : rep.rows) {
    CAPTURE(row.m);
    const double expected = block_fourth(double(row.m), row.R);
    CHECK(row.R == double(row.m));
    CHECK(std::abs(row.est4 - expected) < 4 * row.se4);
    CHECK(row.ratio4 == doctest::Approx(row.est4 / (row.m * row.R * row.R)));
    CHECK(row.shard_est4.size() == probe.shards);
    CHECK(row.cov.xx == doctest::Approx(row.m * 2 * std::log(row.R)).epsilon(0.1));
    CHECK(row.cov.yy == 0.0);
  }
}

TEST_CASE("two-dimensional sources report every projection") {
  auto s = pareto(4);
  s.dimension = 2;
  ProbeConfig probe;
  probe.blocks_per_shard = 50;
  const std::vector<std::uint64_t> m = {256};
  const auto reports = fourth_moment_ratio(s, m, PowerRule{}, RegimeBounds{}, probe);
  REQUIRE(reports.size() == 3);
  CHECK(reports[1].projection == Projection::X);
  CHECK(reports[2].projection == Projection::Y);
  CHECK(reports[1].rows[0].cov.yy == 0.0);

  std::istringstream in(to_csv(reports[0]));
  std::string header;
  std::getline(in, header);
  CHECK(header == "m,R,est4,se4,ratio4,cov11,cov12,cov22,ratio2");
}

TEST_CASE("truncated covariance of the oracle is 2 m ln R") {
  ProbeConfig probe;
  probe.blocks_per_shard = 500;
  const std::vector<double> R = {16, 64, 256};
  const auto rep = truncated_cov(pareto(5), 1000, R, probe);
  REQUIRE(rep.rows.size() == 3);
  for (const auto& row : rep.rows) {
    CHECK(row.ratio2 == doctest::Approx(2.0).epsilon(0.05));
    CHECK(std::abs(row.ratio2 - 2.0) < 4 * row.ratio2_se);
    CHECK(row.ratio.xx == doctest::Approx(row.cov.xx / (1000 * std::log(row.R))));
  }
}

TEST_CASE("gaussian control has no logarithmic growth") {
  sources::SourceSpec g;
  g.kind = sources::SourceKind::Gaussian;
  ProbeConfig probe;
  probe.blocks_per_shard = 500;
  const std::vector<double> R = {1e300};
  const auto rep = truncated_cov(g, 1000, R, probe);
  CHECK(rep.rows[0].cov.xx == doctest::Approx(1000.0).epsilon(0.06));
}

TEST_CASE("band second moment") {
  ProbeConfig probe;
  probe.blocks_per_shard = 500;
  const std::vector<std::uint64_t> N = {64, 256};
  const auto rep = band_second_moment(pareto(6), 20, N, normalizers::NormalizerConfig{}, probe, Band{4.0, 64.0});
  REQUIRE(rep.rows.size() == 2);
  for (const auto& row : rep.rows) {
    // N + 1 terms, each with second moment 2 ln(64/4)
    const double expected = 2.0 * (row.N + 1) / row.N;
    CHECK(row.ratio == doctest::Approx(expected).epsilon(0.05));
  }
  CHECK_FALSE(rep.growing);

  const auto empty = band_second_moment(pareto(6), 20, N, normalizers::NormalizerConfig{}, probe, Band{8.0, 4.0});
  CHECK(empty.empty_band);
  for (const auto& row : empty.rows) CHECK(row.ratio == 0.0);
}

TEST_CASE("first passage trivial cases") {
  ProbeConfig probe;
  probe.blocks_per_shard = 20;
  const normalizers::NormalizerConfig cfg;
  const std::vector<std::uint64_t> K = {0, 256};
  const auto zero = first_passage_profile(pareto(7), 20, K, 0.25, cfg, probe);
  CHECK(zero.rows[0].frequency == 0.0);
  CHECK(zero.rows[0].paths == 0);
  const auto huge = first_passage_profile(pareto(7), 20, K, 1e3, cfg, probe);
  for (const auto& row : huge.rows) CHECK(row.hits == 0);
  const std::vector<std::uint64_t> too_long = {1u << 20};
  CHECK_THROWS_AS(first_passage_profile(pareto(7), 20, too_long, 0.25, cfg, probe), Error);
}

TEST_CASE("probes do not depend on the worker count") {
  ProbeConfig one;
  one.blocks_per_shard = 30;
  ProbeConfig many = one;
  many.workers = 4;
  const std::vector<double> R = {16, 64};
  const auto a = truncated_cov(pareto(8), 2000, R, one);
  const auto b = truncated_cov(pareto(8), 2000, R, many);
  for (std::size_t i = 0; i < R.size(); ++i) CHECK(a.rows[i].cov == b.rows[i].cov);
}
