#pragma once

// Convergence diagnostics for the slowly converging series behind the
// limsup constant and the summability conditions on l1.
//
// Terms up to a direct limit (default 2^20) are summed exactly. Beyond it the
// sum is replaced by an integral in an iterated-log coordinate x, in which the
// sin^2 factors become periodic wells at x = k pi. The integral is taken one
// window [(k - 1/2) pi, (k + 1/2) pi] at a time, on panels graded towards the
// well centre, entirely in log space. Verdicts read the window-by-window
// running total.

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "superdiff/normalizers.hpp"

namespace superdiff::series {

enum class Verdict { Divergent, Convergent, Inconclusive };
const char* to_string(Verdict verdict) noexcept;

struct CriterionConfig {
  /// Divergent: the running total grows by at least this fraction in each of the last `growth_windows` windows.
  double growth = 0.05;
  int growth_windows = 8;
  /// Convergent: the last window moves the total by less than this fraction,
  /// contributions decrease over the last `growth_windows` windows, and the
  /// geometric tail bound is finite.
  double settle = 1e-3;
  std::uint64_t direct_limit = std::uint64_t{1} << 20;
  int windows = 60;
};

struct DyadicPartial {
  int log2_n = 0;
  double log_sum = 0.0;
};

struct WindowSum {
  int k = 0;
  double x_lo = 0.0;
  double x_hi = 0.0;
  double log_contribution = 0.0;
  double log_total = 0.0;
};

struct SeriesRun {
  Verdict verdict = Verdict::Inconclusive;
  std::vector<DyadicPartial> direct;
  std::vector<WindowSum> windows;
  /// Empty sum.
  double log_total = -std::numeric_limits<double>::infinity();
  /// Log of the extrapolated remainder; +inf when no finite bound exists.
  double log_tail_bound = 0.0;
};

/// Applies the verdict rules to a filled-in run and sets verdict and tail bound.
void classify(SeriesRun& run, const CriterionConfig& config);

/// Integrates exp(log_density(k, s)) with x = k pi + s over the windows from
/// x0 on and appends them to `run`. The density receives the well index and
/// the offset separately so that sin^2 x = sin^2 s keeps full precision.
void integrate_windows(SeriesRun& run, double x0, const std::function<double(int, double)>& log_density,
                       const CriterionConfig& config);

/// psi = kappa * u * (1 + epsilon). Sequences supply the split so that the
/// near-cancellation at the critical alpha is evaluated without rounding.
struct PsiSplit {
  double log_kappa = 0.0;
  double epsilon = 0.0;
};

/// A normalizing sequence c_n seen through psi = c_n^2 / (n L(n)).
struct CSequence {
  std::string name;
  /// ln c_n^2 at integer n.
  std::function<double(double n)> log_c_squared;
  /// psi in terms of u = ln ln n (u >= 1) and sin^2 LLL(n).
  std::function<PsiSplit(double u, double sin2_lll)> psi;
};

CSequence c_star_sequence(double C);
/// c_n = n.
CSequence linear_sequence();
/// c_n = sqrt(n l*(n) l1(n)) for a normalizer configuration.
CSequence config_sequence(const normalizers::NormalizerConfig& config);

struct SeriesConfig {
  /// A(t) = a_coef * L(t) * sigma_norm2
  double a_coef = 2.0;
  double sigma_norm2 = 1.0;
  CriterionConfig criterion;
};

struct AlphaResult {
  double alpha = 0.0;
  SeriesRun run;
};

struct SeriesDiagnostic {
  std::string sequence;
  double a_coef = 0.0;
  double sigma_norm2 = 0.0;
  std::vector<AlphaResult> per_alpha;
  /// Largest Divergent and smallest Convergent alpha; NaN when absent.
  double a_lower = 0.0;
  double a_upper = 0.0;
  double a_estimate = 0.0;
  bool consistent = false;
};

/// sum_n (1/n) exp(-alpha^2 c_n^2 / (2 n A(c_n))) for one alpha.
SeriesRun einmahl_series(const SeriesConfig& config, const CSequence& c, double alpha);

/// Runs every alpha, brackets the critical value and optionally narrows the
/// bracket by bisection.
SeriesDiagnostic series_diagnostic(const SeriesConfig& config, const CSequence& c, std::span<const double> alphas,
                                   int bisect_steps = 0);

std::string to_json(const SeriesDiagnostic& diagnostic);

struct Hl0Report {
  std::string ell1;
  /// sum 1/(n L(n) l1(n))
  SeriesRun ii;
  /// sum LL(n)/(n l1(2^n))
  SeriesRun iii;
  /// sum 1/(n l1(2^n))
  SeriesRun iiiw;
};

/// `criterion.direct_limit` must be at least 2^10.
Hl0Report hl0_verify(const normalizers::Ell1& ell1, const CriterionConfig& criterion = {});
std::string to_json(const Hl0Report& report);

struct AppendixIntegral {
  double y_max = 0.0;
  double value = 0.0;
  double error = 0.0;
  /// sum over k pi > y_max of pi (2k pi)^7 e^{-k pi} + 4/(k pi)^2
  double tail_bound = 0.0;
};

/// Integral of y / (1 + e^y sin^2 y) over [pi/2, y_max]; y_max >= 20.
AppendixIntegral appendix_integral(double y_max, double quadrature_step = 0.25);

}  // namespace superdiff::series
