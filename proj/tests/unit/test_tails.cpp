#include "doctest.h"

#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "json.hpp"
#include "superdiff/billiard.hpp"
#include "superdiff/error.hpp"
#include "superdiff/rng.hpp"
#include "superdiff/sources.hpp"
#include "superdiff/tails.hpp"

using namespace superdiff;
using namespace superdiff::tails;

namespace {

// Symmetric values with P(|Y| > t) = c t^-alpha above c^{1/alpha}.
std::vector<double> synthetic(double alpha, double c, std::size_t n, std::uint64_t seed) {
  RngStream rng(seed, 0);
  std::vector<double> out(n);
  for (double& y : out) {
    const double mag = std::pow(c / rng.uniform(), 1.0 / alpha);
    y = (rng.next_u64() & 1) ? -mag : mag;
  }
  return out;
}

// c from the survival grid at the true index; the fitted index would carry
// its error through exp(d_alpha * ln t).
double grid_constant(const TailEstimate& e, double alpha) {
  double acc = 0;
  for (const auto& p : e.survival) acc += std::log(p.survival) + alpha * std::log(p.t);
  return std::exp(acc / double(e.survival.size()));
}

std::vector<Vec2> lorentz_kappa(std::size_t n, std::uint64_t seed) {
  sources::SourceSpec s;
  s.kind = sources::SourceKind::Lorentz;
  s.seed = seed;
  s.table = std::make_shared<const billiard::BilliardTable>(billiard::build_table({{{0.5, 0.5}, 0.25}}, 2));
  sources::Source src(s, 0);
  std::vector<Vec2> out(n);
  src.fill(out);
  return out;
}

}  // namespace

TEST_CASE("synthetic power laws are recovered") {
  for (double alpha : {1.5, 2.0, 2.5}) {
    CAPTURE(alpha);
    const auto y = synthetic(alpha, 2.0, 1'000'000, 31);
    const auto e = tail_fit(y);
    CHECK(e.alpha_hat == doctest::Approx(alpha).epsilon(0.05 / alpha));
    CHECK(grid_constant(e, alpha) == doctest::Approx(2.0).epsilon(0.05));
    CHECK(e.alpha_hill == doctest::Approx(alpha).epsilon(0.1));
  }
}

TEST_CASE("oracle tail constants") {
  sources::SourceSpec s;
  s.seed = 32;
  sources::Source src(s, 0);
  std::vector<double> y(1'000'000);
  src.fill_component(y, 0);
  const auto e = tail_fit(y);
  CHECK(std::abs(e.alpha_hat - 2.0) < 0.05);
  CHECK(std::abs(e.C_hat - 1.0) < 0.05);
  CHECK(std::abs(e.p_hat - 0.5) < 0.02);
  CHECK(std::abs(e.q_hat - 0.5) < 0.02);
  CHECK(e.p_hat + e.q_hat == doctest::Approx(1.0));
  double mass = 0;
  for (double a : e.angular) mass += a;
  CHECK(mass == doctest::Approx(1.0));

  const auto doc = nlohmann::json::parse(to_json(e));
  for (const char* key : {"alpha_hat", "C_hat", "p_hat", "q_hat", "per_corridor", "angular"}) CHECK(doc.contains(key));
  CHECK(doc["angular"].size() == 64);
}

TEST_CASE("degenerate and short samples") {
  const std::vector<double> flat(1000, 3.0);
  try {
    tail_fit(flat);
    FAIL("expected DegenerateData");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateData);
  }
  const auto few = synthetic(2.0, 1.0, 2000, 33);
  try {
    tail_fit(few);
    FAIL("expected InsufficientTail");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientTail);
  }
  CHECK_THROWS_AS(tail_fit(std::vector<double>{}), Error);
}

TEST_CASE("lorentz tail constant is stable under resampling") {
  const auto k = lorentz_kappa(2'000'000, 34);
  const std::span<const Vec2> all(k);
  const auto whole = tail_fit(all);
  const auto first = tail_fit(all.first(1'000'000));
  const auto second = tail_fit(all.subspan(1'000'000));
  CHECK(first.C_hat == doctest::Approx(whole.C_hat).epsilon(0.02));
  CHECK(second.C_hat == doctest::Approx(whole.C_hat).epsilon(0.02));
  CHECK(whole.alpha_hat == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("large displacements concentrate on corridor directions") {
  const auto k = lorentz_kappa(1'000'000, 35);
  const double pi = std::numbers::pi;
  const auto outside = [&](double t, double arc) {
    std::size_t total = 0, off = 0;
    for (const Vec2& v : k) {
      if (norm(v) <= t) continue;
      ++total;
      const double a = std::atan2(v.y, v.x);
      const double r = std::remainder(a, pi / 4);  // corridors at multiples of pi/4
      off += std::abs(r) > arc;
    }
    return double(off) / double(total);
  };
  const double low = outside(4, 0.05), high = outside(64, 0.05);
  CHECK(high < low);
  CHECK(high < 0.02);
}

TEST_CASE("per-corridor pmf constants") {
  const auto k = lorentz_kappa(2'000'000, 36);
  TailFitConfig cfg;
  cfg.corridor_directions = {{1, 0}, {0, 1}};
  const auto e = tail_fit(k, cfg);
  REQUIRE(e.per_corridor.size() == 2);
  for (const auto& c : e.per_corridor) {
    CHECK(c.count > 0);
    CHECK(c.c > 0);
    CHECK(c.slope < -2.0);
  }
}

TEST_CASE("joint tail probe") {
  RngStream rng(37, 0);
  std::vector<Vec2> traj(2'000'000);
  for (auto& v : traj) v = {1.0 / std::sqrt(rng.uniform()), 0.0};
  for (std::uint64_t j : {1u, 4u}) {
    const auto p = joint_tail_estimate(traj, 2, 3, j);
    CHECK(std::abs(p.estimate - p.marginal_m * p.marginal_m_prime) < 3 * p.standard_error);
    CHECK(p.estimate >= 0.0);
    CHECK(p.estimate <= 1.0);
    CHECK(p.scaled == doctest::Approx(p.estimate * std::pow(2.0, 2.25) * 9.0));
  }
  try {
    joint_tail_estimate(traj, 1'000'000, 2, 1);
    FAIL("expected InsufficientData");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientData);
  }
  CHECK_THROWS_AS(joint_tail_estimate(traj, 2, 2, 0), Error);
}
