#include "superdiff/normalizers.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "superdiff/error.hpp"

namespace superdiff::normalizers {

double iterated_log(double t, int depth) {
  if (depth < 1 || depth > 3) throw Error(ErrorCode::InvalidArgument, "iterated_log depth must be 1, 2 or 3");
  if (!(t >= 0)) throw Error(ErrorCode::InvalidArgument, "iterated_log needs t >= 0");
  double v = t;
  for (int i = 0; i < depth; ++i) v = std::max(1.0, std::log(v));
  return v;
}

double log_ll_from_log_n(double log_n) {
  const double l = std::max(1.0, log_n);
  return std::log(std::max(1.0, std::log(l)));
}

double tilde_ell(double x, double C) {
  if (!(x >= 0)) throw Error(ErrorCode::InvalidArgument, "tilde_ell needs x >= 0");
  return 1.0 + C * std::log1p(x);
}

double a_n(double n, double C) {
  if (!(n >= 1)) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
  return std::sqrt(C * n * L(n));
}

double c_star(double n, double C) {
  if (!(n >= 1)) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
  const double ll = LL(n);
  const double s = std::sin(LLL(n));
  return std::sqrt(2.0 * C * n * L(n) * ll * (1.0 + ll * s * s));
}

double log_c_star_from_log_n(double log_n, double C) {
  const double l = std::max(1.0, log_n);
  const double ll = std::max(1.0, std::log(l));
  const double s = std::sin(std::max(1.0, std::log(ll)));
  return 0.5 * (std::log(2.0 * C) + log_n + std::log(l) + std::log(ll) + std::log1p(ll * s * s));
}

Ell1 Ell1::constant(double value) {
  if (!(value > 0)) throw Error(ErrorCode::InvalidArgument, "constant l1 must be positive");
  return Ell1(Kind::Constant, value);
}

Ell1 Ell1::power_ll(double b) {
  if (!std::isfinite(b)) throw Error(ErrorCode::InvalidArgument, "l1 exponent must be finite");
  return Ell1(Kind::PowerLL, b);
}

Ell1 Ell1::parse(const std::string& text) {
  try {
    if (text == "cnlg") return cnlg();
    if (text.rfind("const:", 0) == 0) return constant(std::stod(text.substr(6)));
    if (text.rfind("ll^", 0) == 0) return power_ll(std::stod(text.substr(3)));
  } catch (const std::logic_error&) {
  }
  throw Error(ErrorCode::InvalidArgument, "unknown l1 descriptor '" + text + "' (cnlg, const:<v>, ll^<b>)");
}

std::string Ell1::describe() const {
  char buf[64];
  switch (kind_) {
    case Kind::Cnlg: return "cnlg";
    case Kind::Constant: std::snprintf(buf, sizeof buf, "const:%.17g", parameter_); return buf;
    case Kind::PowerLL: std::snprintf(buf, sizeof buf, "ll^%.17g", parameter_); return buf;
  }
  return "?";
}

double Ell1::log_from_log_ll(double log_ll) const {
  const double s = std::sin(std::max(1.0, log_ll));
  return log_from_parts(log_ll, s * s);
}

double Ell1::log_from_parts(double log_ll, double s2) const {
  switch (kind_) {
    case Kind::Cnlg: {
      // ln(1 + LL sin^2) without forming LL, which overflows deep in the tail.
      double tail = 0.0;
      if (s2 > 0) {
        const double x = log_ll + std::log(s2);
        tail = x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
      }
      return std::log(2.0) + log_ll + tail;
    }
    case Kind::Constant: return std::log(parameter_);
    case Kind::PowerLL: return parameter_ * log_ll;
  }
  return 0.0;
}

void validate(const NormalizerConfig& config) {
  if (!(config.C > 0) || !std::isfinite(config.C)) throw Error(ErrorCode::InvalidArgument, "C must be > 0");
  if (!(config.C0 > 0) || !std::isfinite(config.C0)) throw Error(ErrorCode::InvalidArgument, "C0 must be > 0");
  if (!(config.varsigma > 0 && config.varsigma < 0.5))
    throw Error(ErrorCode::InvalidArgument, "varsigma must lie in (0, 1/2)");
  if (config.dimension != 1 && config.dimension != 2)
    throw Error(ErrorCode::InvalidArgument, "dimension must be 1 or 2");
  const Mat2& s = config.Sigma;
  if (config.dimension == 1) {
    if (!(s.xx > 0)) throw Error(ErrorCode::InvalidArgument, "Sigma must be positive");
  } else if (s.xy != s.yx || !(s.xx > 0) || !(s.xx * s.yy - s.xy * s.yx > 0)) {
    throw Error(ErrorCode::InvalidArgument, "Sigma must be symmetric positive definite");
  }
}

double ell_star(const NormalizerConfig& config, double t) { return config.C0 * config.C * L(t); }

double c_n(const NormalizerConfig& config, double n) {
  return std::sqrt(n * ell_star(config, n) * config.ell1(n));
}

double log_d_n(const NormalizerConfig& config, double log_n) {
  const double l = std::max(1.0, log_n);
  return 0.5 * (log_n + std::log(l) - 99.0 * config.ell1.log_from_log_ll(log_ll_from_log_n(log_n)));
}

double log_dbar_n(const NormalizerConfig& config, double log_n) { return (0.5 - config.varsigma) * log_n; }

NormalizerRow evaluate(const NormalizerConfig& config, double n) {
  if (!(n >= 1)) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
  NormalizerRow row;
  row.n = n;
  row.a_n = a_n(n, config.C);
  row.c_n = c_n(config, n);
  row.c_star = c_star(n, config.C);
  row.log_d_n = log_d_n(config, std::log(n));
  row.d_n = std::exp(row.log_d_n);
  row.dbar_n = std::pow(n, 0.5 - config.varsigma);
  row.gamma_scalar = std::sqrt(config.C * L(row.c_star));
  row.Gamma = row.gamma_scalar * config.Sigma;
  if (config.dimension == 1) row.Gamma = {row.Gamma.xx, 0.0, 0.0, 0.0};
  return row;
}

std::vector<NormalizerRow> normalizer_sequence(const NormalizerConfig& config, int max_exponent) {
  validate(config);
  if (max_exponent < 0 || max_exponent > 1000) throw Error(ErrorCode::InvalidArgument, "exponent out of range");
  std::vector<NormalizerRow> rows;
  for (int k = 0; k <= max_exponent; ++k) rows.push_back(evaluate(config, std::ldexp(1.0, k)));
  return rows;
}

std::string to_csv(const std::vector<NormalizerRow>& rows) {
  std::ostringstream out;
  out << "n,a_n,c_star_n,d_n,dbar_n,gamma_scalar\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.n, r.a_n, r.c_star, r.d_n, r.dbar_n,
                  r.gamma_scalar);
    out << buf;
  }
  return out.str();
}

double ordering_crossover_log_n(const NormalizerConfig& config, double log_n_max) {
  double last_failure = 0.0;
  const double step = 1e-3;
  for (double u = 0.0; u <= std::log(log_n_max); u += step) {
    const double log_n = std::exp(u);
    const double ld = log_d_n(config, log_n);
    const double lc = std::log(config.C0 * config.C) * 0.5 +
                      0.5 * (log_n + std::log(std::max(1.0, log_n)) +
                             config.ell1.log_from_log_ll(log_ll_from_log_n(log_n)));
    const double lcs = log_c_star_from_log_n(log_n, config.C);
    const double ldbar = log_dbar_n(config, log_n);
    if (!(ldbar < ld && ld < std::min(lc, lcs))) last_failure = log_n;
  }
  return last_failure;
}

}  // namespace superdiff::normalizers
