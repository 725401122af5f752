#pragma once

// Normalizing sequences for the superdiffusive limit theorems. Every log is
// natural and clamped through L(t) = max(1, ln t), so all sequences are
// defined from n = 1. Quantities that under- or overflow at large n are also
// available in log form.

#include <cmath>
#include <string>
#include <vector>

#include "superdiff/vec2.hpp"

namespace superdiff::normalizers {

/// L, LL or LLL at t (depth 1, 2, 3).
double iterated_log(double t, int depth);
inline double L(double t) { return iterated_log(t, 1); }
inline double LL(double t) { return iterated_log(t, 2); }
inline double LLL(double t) { return iterated_log(t, 3); }

/// ln LL(n) from ln n, valid when n itself would overflow.
double log_ll_from_log_n(double log_n);

/// 1 + C ln(1 + x).
double tilde_ell(double x, double C);

/// sqrt(C n L(n)).
double a_n(double n, double C);
/// sqrt(2 C n L(n) LL(n) (1 + LL(n) sin^2 LLL(n))).
double c_star(double n, double C);
double log_c_star_from_log_n(double log_n, double C);

/// Slowly varying factor l1 with c_n^2 = n l*(n) l1(n).
class Ell1 {
 public:
  enum class Kind { Cnlg, Constant, PowerLL };

  /// 2 LL (1 + LL sin^2 LLL), the choice that reproduces c*_n.
  static Ell1 cnlg() { return Ell1(Kind::Cnlg, 0.0); }
  static Ell1 constant(double value);
  /// LL^b
  static Ell1 power_ll(double b);
  /// Parses "cnlg", "const:<v>" or "ll^<b>".
  static Ell1 parse(const std::string& text);

  Kind kind() const noexcept { return kind_; }
  double parameter() const noexcept { return parameter_; }
  std::string describe() const;

  /// ln l1 as a function of ln LL; LLL = max(1, ln LL).
  double log_from_log_ll(double log_ll) const;
  /// Same, with sin^2 LLL supplied by a caller that knows it more precisely
  /// than sin(ln LL) evaluated at a large argument.
  double log_from_parts(double log_ll, double sin2_lll) const;
  double log_at(double n) const { return log_from_log_ll(std::log(LL(n))); }
  double operator()(double n) const { return std::exp(log_at(n)); }

 private:
  Ell1(Kind kind, double parameter) : kind_(kind), parameter_(parameter) {}
  Kind kind_;
  double parameter_;
};

struct NormalizerConfig {
  double C = 1.0;
  double C0 = 1.0;
  Ell1 ell1 = Ell1::cnlg();
  double varsigma = 0.1;
  int dimension = 2;
  Mat2 Sigma = Mat2::identity();
};

/// Throws InvalidArgument on C <= 0, varsigma outside (0, 1/2), or a Sigma
/// that is not symmetric positive definite.
void validate(const NormalizerConfig& config);

/// l*(t) = C0 C L(t).
double ell_star(const NormalizerConfig& config, double t);

struct NormalizerRow {
  double n = 0.0;
  double a_n = 0.0;
  double c_n = 0.0;
  double c_star = 0.0;
  double d_n = 0.0;
  double log_d_n = 0.0;
  double dbar_n = 0.0;
  /// sqrt(C L(c*_n)); Gamma = gamma_scalar * Sigma.
  double gamma_scalar = 0.0;
  Mat2 Gamma;
};

NormalizerRow evaluate(const NormalizerConfig& config, double n);
double c_n(const NormalizerConfig& config, double n);
/// d_n = sqrt(n L(n) l1(n)^-99) in log form.
double log_d_n(const NormalizerConfig& config, double log_n);
double log_dbar_n(const NormalizerConfig& config, double log_n);

/// Rows at n = 1, 2, 4, ..., 2^max_exponent.
std::vector<NormalizerRow> normalizer_sequence(const NormalizerConfig& config, int max_exponent);

/// CSV with header n,a_n,c_star_n,d_n,dbar_n,gamma_scalar.
std::string to_csv(const std::vector<NormalizerRow>& rows);

/// Largest ln n on a log-spaced scan of [0, log_n_max] where the ordering
/// dbar_n < d_n < c*_n fails; beyond it the ordering holds on the scan.
double ordering_crossover_log_n(const NormalizerConfig& config, double log_n_max = 1e12);

}  // namespace superdiff::normalizers
