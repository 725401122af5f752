#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "superdiff/error.hpp"
#include "superdiff/normalizers.hpp"

using namespace superdiff;
using namespace superdiff::normalizers;

namespace {

constexpr double kE = std::numbers::e;

// Written out longhand, separately from the library.
long double Lref(long double t) { return t > kE ? std::log(t) : 1.0L; }

long double c_star_ref(long double n, long double C) {
  const long double l = Lref(n), ll = Lref(l), lll = Lref(ll);
  const long double s = std::sin(lll);
  return std::sqrt(2 * C * n * l * ll * (1 + ll * s * s));
}

}  // namespace

TEST_CASE("iterated logs are clamped") {
  CHECK(L(1.0) == 1.0);
  CHECK(L(0.0) == 1.0);
  CHECK(L(kE * kE) == doctest::Approx(2.0));
  CHECK(LL(std::exp(kE)) == doctest::Approx(1.0));
  CHECK(LLL(1e300) == doctest::Approx(std::log(std::log(std::log(1e300)))));
  CHECK_THROWS_AS(iterated_log(2.0, 4), Error);
  CHECK_THROWS_AS(iterated_log(-1.0, 1), Error);
}

TEST_CASE("tilde ell") {
  CHECK(tilde_ell(0.0, 3.0) == 1.0);
  CHECK(tilde_ell(kE - 1, 1.0) == doctest::Approx(2.0));
  CHECK(tilde_ell(kE * kE - 1, 2.0) == doctest::Approx(5.0));
  CHECK_THROWS_AS(tilde_ell(-0.5, 1.0), Error);
}

TEST_CASE("c star worked values") {
  // quoted to five or six figures; the closed form is 1.848282 and 7.538529
  CHECK(c_star(1, 1.0) == doctest::Approx(1.84833).epsilon(5e-5));
  CHECK(c_star(8, 1.0) == doctest::Approx(7.5388).epsilon(5e-5));
  CHECK(c_star(1, 1.0) == doctest::Approx(std::sqrt(2.0 * (1.0 + std::pow(std::sin(1.0), 2)))).epsilon(1e-15));
  CHECK(a_n(1, 4.0) == doctest::Approx(2.0));
  CHECK(a_n(1, 1.0) == 1.0);
}

TEST_CASE("closed forms match an independent evaluation") {
  for (double C : {0.5, 1.0, 2.0}) {
    for (double n : {1.0, 8.0, 1024.0, 1048576.0, 1e12, 1e100}) {
      CAPTURE(n);
      const double ref = static_cast<double>(c_star_ref(n, C));
      CHECK(std::abs(c_star(n, C) / ref - 1) < 1e-12);
      CHECK(std::abs(log_c_star_from_log_n(std::log(n), C) - std::log(ref)) < 1e-12);
      CHECK(std::abs(a_n(n, C) / std::sqrt(C * n * static_cast<double>(Lref(n))) - 1) < 1e-12);
    }
  }
  // default l1 reproduces c* through c_n = sqrt(n l* l1)
  NormalizerConfig cfg;
  cfg.C = 1.7;
  for (double n : {1.0, 8.0, 1024.0, 1048576.0}) {
    CHECK(std::abs(c_n(cfg, n) / c_star(n, cfg.C) - 1) < 1e-12);
  }
}

TEST_CASE("ell1 descriptors") {
  CHECK(Ell1::parse("cnlg").kind() == Ell1::Kind::Cnlg);
  CHECK(Ell1::parse("const:2.5")(1e9) == doctest::Approx(2.5));
  CHECK(Ell1::parse("ll^2")(1e9) == doctest::Approx(std::pow(LL(1e9), 2)));
  CHECK(Ell1::parse(Ell1::power_ll(1.5).describe()).parameter() == 1.5);
  CHECK_THROWS_AS(Ell1::parse("bogus"), Error);
  CHECK_THROWS_AS(Ell1::constant(0.0), Error);
  // log form agrees with the direct product where both are representable
  const auto e = Ell1::cnlg();
  for (double n : {10.0, 1e6, 1e50}) {
    const double ll = LL(n), s = std::sin(LLL(n));
    CHECK(e(n) == doctest::Approx(2 * ll * (1 + ll * s * s)).epsilon(1e-12));
  }
}

TEST_CASE("c star squared over n is slowly varying") {
  // ratio c*_{2n}^2 / c*_n^2 against 2, in log form at large n
  for (double log_n : {1e4, 1e6, 1e9}) {
    const double r = 2 * (log_c_star_from_log_n(log_n + std::log(2.0), 1.0) - log_c_star_from_log_n(log_n, 1.0));
    CHECK(std::abs(r - std::log(2.0)) < std::log(1.01));
  }
}

TEST_CASE("c star growth condition on a dyadic grid") {
  const double eps = 0.1;
  for (int j = 1; j <= 60; ++j) {
    for (int k = j + 1; k <= 60; ++k) {
      const double m = std::ldexp(1.0, j), n = std::ldexp(1.0, k);
      CHECK(c_star(n, 1.0) / c_star(m, 1.0) <= (1 + eps) * (n / m));
    }
  }
}

TEST_CASE("ordering of the normalizers") {
  NormalizerConfig cfg;
  // d_n < c*_n everywhere the closed form is representable
  for (int k = 0; k <= 40; ++k) {
    const double n = std::ldexp(1.0, k);
    const auto row = evaluate(cfg, n);
    CHECK(row.d_n < row.c_star);
    CHECK(row.dbar_n == doctest::Approx(std::pow(n, 0.4)));
  }
  const double cross = ordering_crossover_log_n(cfg);
  CHECK(cross > std::log(std::ldexp(1.0, 40)));
  CHECK(std::isfinite(cross));
  for (double f : {1.001, 1.5, 10.0, 1e3, 1e6}) {
    const double log_n = cross * f;
    CHECK(log_dbar_n(cfg, log_n) < log_d_n(cfg, log_n));
    CHECK(log_d_n(cfg, log_n) < log_c_star_from_log_n(log_n, cfg.C));
  }
}

TEST_CASE("Gamma is a pure function of the configuration") {
  NormalizerConfig cfg;
  cfg.C = 2.0;
  cfg.Sigma = {1.2, 0.3, 0.3, 0.8};
  validate(cfg);
  const auto a = evaluate(cfg, 12345.0), b = evaluate(cfg, 12345.0);
  CHECK(a.Gamma == b.Gamma);
  CHECK(a.gamma_scalar == std::sqrt(2.0 * L(a.c_star)));
  CHECK(a.Gamma.xy == a.gamma_scalar * 0.3);
  cfg.dimension = 1;
  const auto one = evaluate(cfg, 12345.0);
  CHECK(one.Gamma.yy == 0.0);
  CHECK(one.Gamma.xx == a.Gamma.xx);
}

TEST_CASE("config validation") {
  NormalizerConfig cfg;
  cfg.C = 0;
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg = {};
  cfg.varsigma = 0.5;
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg = {};
  cfg.Sigma = {1.0, 0.2, 0.1, 1.0};
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg.Sigma = {1.0, 2.0, 2.0, 1.0};
  CHECK_THROWS_AS(validate(cfg), Error);
  CHECK_THROWS_AS(evaluate(NormalizerConfig{}, 0.5), Error);
}

TEST_CASE("sequence csv") {
  const auto rows = normalizer_sequence(NormalizerConfig{}, 4);
  REQUIRE(rows.size() == 5);
  CHECK(rows.back().n == 16.0);
  std::istringstream in(to_csv(rows));
  std::string header;
  std::getline(in, header);
  CHECK(header == "n,a_n,c_star_n,d_n,dbar_n,gamma_scalar");
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  CHECK(lines == 5);
}
