#pragma once

// Symmetric Pareto reference model: |Y| has survival (s/t)^2 beyond s, so the
// tail constant is s^2 and every truncated moment is closed form.

#include <cstdint>
#include <string>
#include <vector>

#include "superdiff/moments.hpp"
#include "superdiff/vec2.hpp"

namespace superdiff::oracle {

struct ParetoSymConfig {
  double scale = 1.0;
  std::uint64_t seed = 0;
  int dimension = 1;
};

void validate(const ParetoSymConfig& config);
sources::SourceSpec to_source(const ParetoSymConfig& config);

/// n values of stream `stream`; the y components are 0 when d = 1.
std::vector<Vec2> sample_pareto_sym(const ParetoSymConfig& config, std::size_t n, std::uint64_t stream = 0);

struct TruncatedMoments {
  double first = 0.0;
  double second = 0.0;
  double fourth = 0.0;
};

/// E[Y^k 1{|Y| <= R}] for k = 1, 2, 4 (one component). Throws InvalidArgument for R < s.
TruncatedMoments oracle_truncated_moments(const ParetoSymConfig& config, double R);

/// E|sum of m truncated values|^4 for the d = 1 oracle.
double block_fourth_moment(const ParetoSymConfig& config, std::uint64_t m, double R);

struct Check {
  std::string name;
  double empirical = 0.0;
  double expected = 0.0;
  /// Standard error of `empirical`; 0 for threshold checks.
  double se = 0.0;
  /// |empirical - expected| / se, or the statistic itself for threshold checks.
  double z = 0.0;
  double threshold = 3.0;
  bool pass = false;
};

struct SuiteConfig {
  ParetoSymConfig oracle;
  std::uint64_t cov_m = 100000;
  std::vector<double> cov_R = {16, 32, 64, 128, 256};
  std::vector<std::uint64_t> moment_m = {256, 1024, 4096};
  double r_exponent = 0.6;
  std::uint64_t clt_n = 10000;
  std::size_t clt_samples = 10000;
  std::uint64_t draws = 1000000;
  moments::ProbeConfig probe;
};

struct SuiteReport {
  std::vector<Check> checks;
  bool pass = true;
};

SuiteReport oracle_suite(const SuiteConfig& config);
std::string to_json(const SuiteReport& report);

}  // namespace superdiff::oracle
