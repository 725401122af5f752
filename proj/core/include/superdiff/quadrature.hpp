#pragma once

// Gauss-Kronrod quadrature, plain and in log space. The log-space variants
// integrate exp(g) for integrands whose magnitude leaves double range.

#include <functional>
#include <limits>
#include <vector>

namespace superdiff::quadrature {

struct Result {
  double value = 0.0;
  double error = 0.0;
};

/// 15-point Kronrod rule with the embedded 7-point Gauss error estimate.
Result gk15(const std::function<double(double)>& f, double a, double b);

/// Adaptive bisection until |error| <= max(abs_tol, rel_tol * |value|) per panel.
Result adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol = 1e-14,
                double rel_tol = 1e-12, int max_depth = 40);

/// Breakpoints 0, h, 2h, 4h, ... capped at `half_width`; resolves a feature
/// of width ~h sitting at the origin.
std::vector<double> graded_breakpoints(double h, double half_width);

/// log of the integral of exp(g) over [a, b]; `error` is a relative estimate.
Result log_gk15(const std::function<double(double)>& g, double a, double b);
/// Panels stop refining once their relative error meets `rel_tol`, or once
/// their absolute error is below rel_tol * exp(log_reference).
Result log_adaptive(const std::function<double(double)>& g, double a, double b, double rel_tol = 1e-10,
                    int max_depth = 30, double log_reference = -std::numeric_limits<double>::infinity());

/// log(exp(a) + exp(b)), tolerating -inf.
double log_add(double a, double b) noexcept;

}  // namespace superdiff::quadrature
