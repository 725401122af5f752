#pragma once

// Heavy-tail estimation for lattice displacements: survival index, the
// plateau constant of t^2 * P(|v| > t), sign weights, angular measure and
// per-corridor pmf constants.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "superdiff/vec2.hpp"

namespace superdiff::tails {

struct TailFitConfig {
  double t_min = 8.0;
  /// The fit window ends at the largest dyadic t (t_min * 2^k) with at least this many exceedances.
  std::size_t window_exceedances = 200;
  /// Fewer exceedances of t_min than this is InsufficientTail.
  std::size_t min_tail = 100;
  double hill_exponent = 0.6;
  int angular_bins = 64;
  /// Directions whose pmf along N*xi is fitted; empty skips the per-corridor step.
  std::vector<Vec2i> corridor_directions;
  /// Smallest |N| entering the per-corridor regression.
  long long corridor_n_min = 16;
  /// Largest distance (in lattice units) of v from the line through xi.
  double corridor_max_offset = 1.5;
  std::size_t corridor_bin_min_count = 20;
};

struct SurvivalPoint {
  double t = 0.0;
  std::size_t exceedances = 0;
  double survival = 0.0;
};

struct CorridorConstant {
  Vec2i xi;
  /// Constant of P(v = N xi) ~ C N^-3, averaged over the two signs of N.
  double c = 0.0;
  double slope = 0.0;
  double slope_se = 0.0;
  std::size_t count = 0;
  int bins = 0;
};

struct TailEstimate {
  std::size_t samples = 0;
  double alpha_hat = 0.0;
  double alpha_se = 0.0;
  double alpha_hill = 0.0;
  std::size_t hill_k = 0;
  double C_hat = 0.0;
  /// Sign weights of the first component beyond t_min.
  double p_hat = 0.0;
  double q_hat = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  std::vector<SurvivalPoint> survival;
  std::vector<double> angular;
  std::vector<CorridorConstant> per_corridor;
};

/// Vector samples. Throws InsufficientTail or DegenerateData.
TailEstimate tail_fit(std::span<const Vec2> samples, const TailFitConfig& config = {});
/// Scalar samples (d = 1).
TailEstimate tail_fit(std::span<const double> samples, const TailFitConfig& config = {});

/// JSON document with keys alpha_hat, C_hat, p_hat, q_hat, per_corridor, angular
/// followed by diagnostic extras.
std::string to_json(const TailEstimate& estimate);

struct JointTailProbe {
  long long m = 0;
  long long m_prime = 0;
  std::uint64_t j = 0;
  std::size_t pairs = 0;
  std::size_t hits = 0;
  double estimate = 0.0;
  double standard_error = 0.0;
  double marginal_m = 0.0;
  double marginal_m_prime = 0.0;
  /// estimate / (m^{-9/4} m'^{-2})
  double scaled = 0.0;
};

/// Frequency of {floor|v_i| = m, floor|v_{i+j}| = m'} along a sequence.
/// Throws InsufficientData when a level set is never visited.
JointTailProbe joint_tail_estimate(std::span<const Vec2> trajectory, long long m, long long m_prime, std::uint64_t j);

}  // namespace superdiff::tails
