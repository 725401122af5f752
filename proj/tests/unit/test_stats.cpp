#include "doctest.h"

#include <cmath>
#include <vector>

#include "superdiff/error.hpp"
#include "superdiff/rng.hpp"
#include "superdiff/stats.hpp"

using namespace superdiff;

TEST_CASE("normal cdf") {
  CHECK(stats::normal_cdf(0.0) == doctest::Approx(0.5));
  CHECK(stats::normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
  CHECK(stats::normal_cdf(-1.0) == doctest::Approx(0.15865525393145707).epsilon(1e-12));
}

TEST_CASE("ks statistic by hand") {
  // uniform cdf, samples 0.1 0.5 0.9: sup is max(i/n - x, x - (i-1)/n)
  const std::vector<double> x = {0.9, 0.1, 0.5};
  const double d = stats::ks_statistic(x, [](double t) { return std::clamp(t, 0.0, 1.0); });
  CHECK(d == doctest::Approx(0.2333333333333333));
  const std::vector<double> a = {1, 2, 3, 4}, b = {3, 4, 5, 6};
  CHECK(stats::ks_two_sample(a, b) == doctest::Approx(0.5));
  CHECK(stats::ks_two_sample(a, a) == 0.0);
}

TEST_CASE("ks of gaussian draws is small") {
  RngStream s(5, 0);
  std::vector<double> z(20000);
  for (double& v : z) v = s.normal();
  const double d = stats::ks_statistic(z, stats::normal_cdf);
  CHECK(d < stats::ks_critical_value(z.size(), 0.001));
  CHECK(stats::iqr_scale(z) == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("quantiles and linear fit") {
  const std::vector<double> v = {4, 1, 3, 2};
  CHECK(stats::median(v) == doctest::Approx(2.5));
  CHECK(stats::quantile(v, 0.0) == 1.0);
  CHECK(stats::quantile(v, 1.0) == 4.0);
  CHECK(stats::mean(v) == 2.5);
  CHECK(stats::variance(v) == doctest::Approx(5.0 / 3));

  const std::vector<double> x = {0, 1, 2, 3}, y = {1, 3, 5, 7};
  const auto fit = stats::linear_fit(x, y);
  CHECK(fit.slope == doctest::Approx(2.0));
  CHECK(fit.intercept == doctest::Approx(1.0));
  CHECK(fit.slope_se == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(stats::linear_fit(std::vector<double>{1}, std::vector<double>{1}), Error);
}

TEST_CASE("running moments merge equals one pass") {
  stats::RunningMoments a, b, all;
  for (int i = 0; i < 100; ++i) {
    const double x = std::sin(i * 0.7) * i;
    (i < 37 ? a : b).add(x);
    all.add(x);
  }
  a.merge(b);
  CHECK(a.count() == all.count());
  CHECK(a.mean() == doctest::Approx(all.mean()).epsilon(1e-12));
  CHECK(a.variance() == doctest::Approx(all.variance()).epsilon(1e-12));
  const std::vector<double> shards = {1, 2, 3, 4};
  const auto s = stats::summarize_shards(shards);
  CHECK(s.mean == 2.5);
  CHECK(s.standard_error == doctest::Approx(std::sqrt(5.0 / 3 / 4)));
}
