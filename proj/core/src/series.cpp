#include "superdiff/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "json.hpp"
#include "superdiff/error.hpp"
#include "superdiff/quadrature.hpp"

namespace superdiff::series {

namespace {

using json = nlohmann::ordered_json;
using normalizers::Ell1;
using quadrature::log_add;

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double sin2(double x) {
  const double s = std::sin(x);
  return s * s;
}

// Breakpoints on [a, b] (0 <= a < b) graded geometrically away from 0.
std::vector<double> clipped_breakpoints(double a, double b, double h) {
  std::vector<double> out{a};
  for (double p : quadrature::graded_breakpoints(h, b)) {
    if (p > a && p < b) out.push_back(p);
  }
  out.push_back(b);
  return out;
}

double integrate_side(const std::function<double(double)>& g, double a, double b, double h) {
  const auto points = clipped_breakpoints(a, b, h);
  // A crude pass fixes the scale that later refinement is measured against.
  double reference = -kInf;
  for (std::size_t i = 0; i + 1 < points.size(); ++i)
    reference = std::max(reference, quadrature::log_gk15(g, points[i], points[i + 1]).value);
  double total = -kInf;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    total = log_add(total, quadrature::log_adaptive(g, points[i], points[i + 1], 1e-10, 24, reference).value);
  }
  return total;
}

json run_json(const SeriesRun& run) {
  json direct = json::array();
  for (const auto& d : run.direct) direct.push_back(json{{"log2_n", d.log2_n}, {"log_sum", d.log_sum}});
  json windows = json::array();
  for (const auto& w : run.windows) {
    windows.push_back(json{{"k", w.k},
                           {"x_lo", w.x_lo},
                           {"x_hi", w.x_hi},
                           {"log_contribution", w.log_contribution},
                           {"log_total", w.log_total}});
  }
  json out;
  out["verdict"] = to_string(run.verdict);
  out["log_total"] = run.log_total;
  out["log_tail_bound"] = std::isfinite(run.log_tail_bound) ? json(run.log_tail_bound) : json(nullptr);
  out["direct"] = direct;
  out["windows"] = windows;
  return out;
}

template <class Term>
void direct_sum(SeriesRun& run, std::uint64_t limit, Term term) {
  double log_total = -kInf;
  int next = 0;
  for (std::uint64_t n = 1; n <= limit; ++n) {
    log_total = log_add(log_total, term(double(n)));
    if (n == (std::uint64_t{1} << next)) {
      run.direct.push_back({next, log_total});
      ++next;
    }
  }
  run.log_total = log_total;
}

}  // namespace

const char* to_string(Verdict verdict) noexcept {
  switch (verdict) {
    case Verdict::Divergent: return "Divergent";
    case Verdict::Convergent: return "Convergent";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

void classify(SeriesRun& run, const CriterionConfig& config) {
  run.verdict = Verdict::Inconclusive;
  run.log_tail_bound = kInf;
  const auto& w = run.windows;
  const auto span = static_cast<std::size_t>(config.growth_windows);
  if (w.size() < span + 1) return;

  bool grows = true;
  bool decreasing = true;
  for (std::size_t i = w.size() - span; i < w.size(); ++i) {
    if (!(w[i].log_total - w[i - 1].log_total >= std::log1p(config.growth))) grows = false;
    if (w[i].log_contribution > w[i - 1].log_contribution) decreasing = false;
  }
  if (grows) {
    run.verdict = Verdict::Divergent;
    return;
  }
  const WindowSum& last = w.back();
  const WindowSum& prev = w[w.size() - 2];
  if (last.log_contribution == -kInf) {
    run.log_tail_bound = -kInf;
  } else {
    const double log_ratio = last.log_contribution - prev.log_contribution;
    if (log_ratio < 0) run.log_tail_bound = last.log_contribution + log_ratio - std::log(-std::expm1(log_ratio));
  }
  const bool settled = last.log_contribution - last.log_total < std::log(config.settle);
  if (decreasing && settled && run.log_tail_bound < kInf) run.verdict = Verdict::Convergent;
}

void integrate_windows(SeriesRun& run, double x0, const std::function<double(int, double)>& log_density,
                       const CriterionConfig& config) {
  const int k0 = std::max(0, static_cast<int>(std::floor(x0 / kPi + 0.5)));
  for (int k = k0; k <= config.windows; ++k) {
    const double center = k * kPi;
    const double lo = std::max(x0, center - 0.5 * kPi);
    const double hi = center + 0.5 * kPi;
    if (!(hi > lo)) continue;
    const double h = 1e-3 * std::exp(-center);
    double contribution = -kInf;
    const double s_lo = lo - center;
    const double s_hi = hi - center;
    if (s_lo < 0) {
      const auto g = [&](double m) { return log_density(k, -m); };
      contribution = log_add(contribution, integrate_side(g, std::max(0.0, -s_hi), -s_lo, h));
    }
    if (s_hi > 0) {
      const auto g = [&](double s) { return log_density(k, s); };
      contribution = log_add(contribution, integrate_side(g, std::max(0.0, s_lo), s_hi, h));
    }
    run.log_total = log_add(run.log_total, contribution);
    run.windows.push_back({k, lo, hi, contribution, run.log_total});
  }
}

CSequence c_star_sequence(double C) {
  CSequence c;
  c.name = "c_star(C=" + std::to_string(C) + ")";
  c.log_c_squared = [C](double n) { return 2.0 * std::log(normalizers::c_star(n, C)); };
  c.psi = [C](double u, double s2) { return PsiSplit{std::log(2.0 * C), u * s2}; };
  return c;
}

CSequence linear_sequence() {
  CSequence c;
  c.name = "linear";
  c.log_c_squared = [](double n) { return 2.0 * std::log(n); };
  c.psi = [](double u, double) { return PsiSplit{std::exp(u) - 2.0 * std::log(u), 0.0}; };
  return c;
}

CSequence config_sequence(const normalizers::NormalizerConfig& config) {
  CSequence c;
  c.name = "c_n(l1=" + config.ell1.describe() + ")";
  c.log_c_squared = [config](double n) { return 2.0 * std::log(normalizers::c_n(config, n)); };
  c.psi = [config](double u, double s2) {
    const double log_cc = std::log(config.C0 * config.C);
    if (config.ell1.kind() == normalizers::Ell1::Kind::Cnlg) return PsiSplit{log_cc + std::log(2.0), u * s2};
    return PsiSplit{log_cc + config.ell1.log_from_parts(std::log(u), s2) - std::log(u), 0.0};
  };
  return c;
}

SeriesRun einmahl_series(const SeriesConfig& config, const CSequence& c, double alpha) {
  if (!(alpha >= 0) || !std::isfinite(alpha)) throw Error(ErrorCode::InvalidArgument, "alpha must be >= 0");
  if (!(config.a_coef > 0) || !(config.sigma_norm2 > 0))
    throw Error(ErrorCode::InvalidArgument, "A(t) coefficient and |Sigma|^2 must be positive");
  const double scale = config.a_coef * config.sigma_norm2;
  const double a2 = alpha * alpha;

  SeriesRun run;
  direct_sum(run, config.criterion.direct_limit, [&](double n) {
    const double log_n = std::log(n);
    const double lc2 = c.log_c_squared(n);
    const double lc = std::max(1.0, 0.5 * lc2);
    return -log_n - a2 * std::exp(lc2 - log_n) / (2.0 * scale * lc);
  });

  // x = ln ln ln n, u = ln ln n. The sum over n becomes the integral of
  // exp(x + u - alpha^2 psi / (scale Q)) dx with Q = 2 L(c_n) / ln n. With
  // psi = kappa u (1 + eps) and beta = alpha^2 kappa / scale the exponent is
  // x + u ((1 - beta) + (Q - 1) - beta eps) / Q, free of cancellation.
  const double x0 = std::log(std::log(std::log(double(config.criterion.direct_limit))));
  const auto density = [&](int k, double s) {
    const double x = k * kPi + s;
    const double u = std::exp(x);
    const double lll_s2 = x < 1.0 ? sin2(1.0) : sin2(k == 0 ? x : s);
    const PsiSplit p = c.psi(u, lll_s2);
    const double beta = a2 * std::exp(p.log_kappa) / scale;
    if (beta == 0) return x + u;
    if (!std::isfinite(beta) || !std::isfinite(p.epsilon)) return -kInf;
    const double log_psi = p.log_kappa + std::log(u) + std::log1p(p.epsilon);
    const double e = std::exp(-u);
    const double shifted = (u + log_psi) * e;
    const double q1 = 2.0 * e > 1.0 + shifted ? 2.0 * e - 1.0 : shifted;
    return x + u * ((1.0 - beta) + q1 - beta * p.epsilon) / (1.0 + q1);
  };
  integrate_windows(run, x0, density, config.criterion);
  classify(run, config.criterion);
  return run;
}

SeriesDiagnostic series_diagnostic(const SeriesConfig& config, const CSequence& c, std::span<const double> alphas,
                                   int bisect_steps) {
  if (alphas.empty()) throw Error(ErrorCode::InvalidArgument, "alpha grid is empty");
  SeriesDiagnostic diag;
  diag.sequence = c.name;
  diag.a_coef = config.a_coef;
  diag.sigma_norm2 = config.sigma_norm2;
  std::vector<double> grid(alphas.begin(), alphas.end());
  std::sort(grid.begin(), grid.end());
  for (double alpha : grid) diag.per_alpha.push_back({alpha, einmahl_series(config, c, alpha)});

  auto bracket = [&] {
    diag.a_lower = kNaN;
    diag.a_upper = kNaN;
    for (const auto& r : diag.per_alpha) {
      if (r.run.verdict == Verdict::Divergent && !(r.alpha <= diag.a_lower)) diag.a_lower = r.alpha;
      if (r.run.verdict == Verdict::Convergent && !(r.alpha >= diag.a_upper)) diag.a_upper = r.alpha;
    }
  };
  bracket();
  for (int step = 0; step < bisect_steps && std::isfinite(diag.a_lower) && std::isfinite(diag.a_upper) &&
                     diag.a_lower < diag.a_upper;
       ++step) {
    const double mid = 0.5 * (diag.a_lower + diag.a_upper);
    AlphaResult r{mid, einmahl_series(config, c, mid)};
    const Verdict v = r.run.verdict;
    diag.per_alpha.push_back(std::move(r));
    if (v == Verdict::Inconclusive) break;
    bracket();
  }
  std::sort(diag.per_alpha.begin(), diag.per_alpha.end(),
            [](const AlphaResult& a, const AlphaResult& b) { return a.alpha < b.alpha; });
  bracket();
  diag.consistent = std::isfinite(diag.a_lower) && std::isfinite(diag.a_upper) && diag.a_lower < diag.a_upper;
  for (const auto& r : diag.per_alpha) {
    if (r.run.verdict == Verdict::Divergent && r.alpha > diag.a_upper) diag.consistent = false;
    if (r.run.verdict == Verdict::Convergent && r.alpha < diag.a_lower) diag.consistent = false;
  }
  diag.a_estimate = diag.consistent ? 0.5 * (diag.a_lower + diag.a_upper) : kNaN;
  return diag;
}

std::string to_json(const SeriesDiagnostic& diag) {
  json doc;
  doc["sequence"] = diag.sequence;
  doc["A"] = json{{"coef", diag.a_coef}, {"sigma_norm2", diag.sigma_norm2}};
  json alphas = json::array();
  for (const auto& r : diag.per_alpha) {
    json entry;
    entry["alpha"] = r.alpha;
    const json run = run_json(r.run);
    for (auto& [key, value] : run.items()) entry[key] = value;
    alphas.push_back(entry);
  }
  doc["alphas"] = alphas;
  auto num = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  doc["critical"] = json{{"lower", num(diag.a_lower)},
                         {"upper", num(diag.a_upper)},
                         {"estimate", num(diag.a_estimate)},
                         {"consistent", diag.consistent}};
  return doc.dump(2);
}

Hl0Report hl0_verify(const Ell1& ell1, const CriterionConfig& criterion) {
  if (criterion.direct_limit < (std::uint64_t{1} << 10))
    throw Error(ErrorCode::InvalidArgument, "N_max must be at least 2^10");
  const double log_log2 = std::log(std::log(2.0));
  Hl0Report report;
  report.ell1 = ell1.describe();

  direct_sum(report.ii, criterion.direct_limit, [&](double n) {
    const double log_n = std::log(n);
    return -log_n - std::log(std::max(1.0, log_n)) - ell1.log_from_log_ll(normalizers::log_ll_from_log_n(log_n));
  });
  direct_sum(report.iii, criterion.direct_limit, [&](double n) {
    return std::log(normalizers::LL(n)) - std::log(n) -
           ell1.log_from_log_ll(normalizers::log_ll_from_log_n(n * std::log(2.0)));
  });
  direct_sum(report.iiiw, criterion.direct_limit, [&](double n) {
    return -std::log(n) - ell1.log_from_log_ll(normalizers::log_ll_from_log_n(n * std::log(2.0)));
  });

  const double log_n_max = std::log(double(criterion.direct_limit));
  // (ii) in x = ln ln ln n, where ln LL(n) = x.
  integrate_windows(
      report.ii, std::log(std::log(log_n_max)),
      [&](int k, double s) {
        const double x = k * kPi + s;
        const double lll_s2 = x < 1.0 ? sin2(1.0) : sin2(k == 0 ? x : s);
        return x - ell1.log_from_parts(x, lll_s2);
      },
      criterion);
  // (iii) and its weighted twin in y = ln ln n, where ln LL(2^n) = y + log1p(ln ln 2 / e^y).
  const auto log_l1_of_2n = [&](int k, double s) {
    const double y = k * kPi + s;
    const double shift = std::log1p(log_log2 * std::exp(-y));
    const double log_ll = y + shift;
    const double lll_s2 = log_ll < 1.0 ? sin2(1.0) : sin2(k == 0 ? log_ll : s + shift);
    return ell1.log_from_parts(log_ll, lll_s2);
  };
  const double y0 = std::log(log_n_max);
  integrate_windows(
      report.iii, y0,
      [&](int k, double s) {
        const double y = k * kPi + s;
        return std::log(std::max(1.0, y)) + y - log_l1_of_2n(k, s);
      },
      criterion);
  integrate_windows(
      report.iiiw, y0, [&](int k, double s) { return k * kPi + s - log_l1_of_2n(k, s); }, criterion);

  classify(report.ii, criterion);
  classify(report.iii, criterion);
  classify(report.iiiw, criterion);
  return report;
}

std::string to_json(const Hl0Report& report) {
  json doc;
  doc["ell1"] = report.ell1;
  doc["ii"] = run_json(report.ii);
  doc["iii"] = run_json(report.iii);
  doc["iiiw"] = run_json(report.iiiw);
  return doc.dump(2);
}

AppendixIntegral appendix_integral(double y_max, double quadrature_step) {
  if (!(y_max >= 20)) throw Error(ErrorCode::InvalidArgument, "y_max must be >= 20");
  if (!(quadrature_step > 0)) throw Error(ErrorCode::InvalidArgument, "quadrature step must be positive");
  AppendixIntegral out;
  out.y_max = y_max;

  const int k_last = static_cast<int>(std::ceil(y_max / kPi + 0.5)) - 1;
  for (int k = 1; k <= k_last; ++k) {
    const double center = k * kPi;
    const auto f = [center](double s) { return (center + s) / (1.0 + std::exp(center + s) * sin2(s)); };
    const double h = std::exp(-0.5 * center) / 16.0;
    auto integrate = [&](const std::function<double(double)>& g, double a, double b) {
      std::vector<double> points{a};
      for (double p : quadrature::graded_breakpoints(h, b)) {
        if (p > a && p < b) points.push_back(p);
      }
      points.push_back(b);
      for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const int pieces = std::max(1, static_cast<int>(std::ceil((points[i + 1] - points[i]) / quadrature_step)));
        const double width = (points[i + 1] - points[i]) / pieces;
        for (int j = 0; j < pieces; ++j) {
          const double lo = points[i] + j * width;
          const double hi = j + 1 == pieces ? points[i + 1] : lo + width;
          const auto r = quadrature::adaptive(g, lo, hi, 1e-16, 1e-12, 40);
          out.value += r.value;
          out.error += r.error;
        }
      }
    };
    integrate([&](double m) { return f(-m); }, std::max(0.0, center - y_max), 0.5 * kPi);
    const double right = std::min(0.5 * kPi, y_max - center);
    if (right > 0) integrate(f, 0.0, right);
  }

  const int k_first = static_cast<int>(std::floor(y_max / kPi)) + 1;
  constexpr int kTerms = 1'000'000;
  for (int k = kTerms; k >= k_first; --k) {
    const double kp = k * kPi;
    out.tail_bound += kPi * std::pow(2.0 * kp, 7) * std::exp(-kp) + 4.0 / (kp * kp);
  }
  out.tail_bound += 4.0 / (kPi * kPi * kTerms);
  return out;
}

}  // namespace superdiff::series
