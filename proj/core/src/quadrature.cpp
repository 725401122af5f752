#include "superdiff/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace superdiff::quadrature {

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd Kronrod nodes 1, 3, 5 and the centre.
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Result adaptive_impl(const std::function<double(double)>& f, double a, double b, double abs_tol, double rel_tol,
                     int depth) {
  const Result r = gk15(f, a, b);
  if (depth <= 0 || r.error <= std::max(abs_tol, rel_tol * std::abs(r.value))) return r;
  const double m = 0.5 * (a + b);
  if (!(m > a && m < b)) return r;
  const Result left = adaptive_impl(f, a, m, 0.5 * abs_tol, rel_tol, depth - 1);
  const Result right = adaptive_impl(f, m, b, 0.5 * abs_tol, rel_tol, depth - 1);
  return {left.value + right.value, left.error + right.error};
}

Result log_adaptive_impl(const std::function<double(double)>& g, double a, double b, double rel_tol, int depth,
                         double log_reference) {
  const Result r = log_gk15(g, a, b);
  if (depth <= 0 || r.error <= rel_tol || r.value == kNegInf) return r;
  if (r.value + std::log(r.error) <= log_reference + std::log(rel_tol)) return r;
  const double m = 0.5 * (a + b);
  if (!(m > a && m < b)) return r;
  // halves are judged against the larger of the caller's scale and this panel's estimate
  const double ref = std::max(log_reference, r.value);
  const Result left = log_adaptive_impl(g, a, m, rel_tol, depth - 1, ref);
  const Result right = log_adaptive_impl(g, m, b, rel_tol, depth - 1, ref);
  const double value = log_add(left.value, right.value);
  // Combine relative errors weighted by each half's share.
  double error = 0.0;
  if (value != kNegInf) {
    error = (left.value == kNegInf ? 0.0 : left.error * std::exp(left.value - value)) +
            (right.value == kNegInf ? 0.0 : right.error * std::exp(right.value - value));
  }
  return {value, error};
}

}  // namespace

double log_add(double a, double b) noexcept {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

Result gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = kWgk[7] * fc;
  double gauss = kWg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double fx = f(c - h * kXgk[i]) + f(c + h * kXgk[i]);
    kronrod += kWgk[i] * fx;
    if (i % 2 == 1) gauss += kWg[i / 2] * fx;
  }
  return {kronrod * h, std::abs((kronrod - gauss) * h)};
}

Result adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol, double rel_tol,
                int max_depth) {
  if (a == b) return {};
  return adaptive_impl(f, a, b, abs_tol, rel_tol, max_depth);
}

std::vector<double> graded_breakpoints(double h, double half_width) {
  std::vector<double> points{0.0};
  if (!(half_width > 0)) return points;
  for (double x = h; x < half_width && x > 0; x *= 2.0) points.push_back(x);
  points.push_back(half_width);
  return points;
}

Result log_gk15(const std::function<double(double)>& g, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  std::array<double, 15> x{};
  std::array<double, 15> gx{};
  x[0] = c;
  for (int i = 0; i < 7; ++i) {
    x[1 + 2 * i] = c - h * kXgk[i];
    x[2 + 2 * i] = c + h * kXgk[i];
  }
  double top = kNegInf;
  for (int i = 0; i < 15; ++i) {
    gx[i] = g(x[i]);
    top = std::max(top, gx[i]);
  }
  if (top == kNegInf || std::isnan(top)) return {kNegInf, 0.0};
  auto e = [&](int i) { return std::exp(gx[i] - top); };
  double kronrod = kWgk[7] * e(0);
  double gauss = kWg[3] * e(0);
  for (int i = 0; i < 7; ++i) {
    const double fx = e(1 + 2 * i) + e(2 + 2 * i);
    kronrod += kWgk[i] * fx;
    if (i % 2 == 1) gauss += kWg[i / 2] * fx;
  }
  if (!(kronrod > 0)) return {kNegInf, 0.0};
  return {top + std::log(kronrod * h), std::abs(kronrod - gauss) / kronrod};
}

Result log_adaptive(const std::function<double(double)>& g, double a, double b, double rel_tol, int max_depth,
                    double log_reference) {
  if (a == b) return {kNegInf, 0.0};
  return log_adaptive_impl(g, a, b, rel_tol, max_depth, log_reference);
}

}  // namespace superdiff::quadrature
