#include "superdiff/billiard.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "superdiff/corridors.hpp"
#include "superdiff/error.hpp"

namespace superdiff::billiard {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vec2i floor_cell(Vec2 p) noexcept {
  return {static_cast<long long>(std::floor(p.x)), static_cast<long long>(std::floor(p.y))};
}

Vec2 fractional(Vec2 p) noexcept { return p - to_real(floor_cell(p)); }

double wrap_angle(double theta) noexcept {
  theta = std::fmod(theta, kTwoPi);
  return theta < 0 ? theta + kTwoPi : theta;
}

// Distance from a point to the closed unit square.
double distance_to_unit_square(Vec2 p) noexcept {
  const double dx = std::max({0.0 - p.x, 0.0, p.x - 1.0});
  const double dy = std::max({0.0 - p.y, 0.0, p.y - 1.0});
  return std::hypot(dx, dy);
}

}  // namespace

double BilliardTable::perimeter(int scatterer) const {
  return kTwoPi * scatterers_.at(static_cast<std::size_t>(scatterer)).radius;
}

BilliardTable build_table(std::vector<Scatterer> scatterers, int dimension) {
  if (scatterers.empty()) throw Error(ErrorCode::EmptyConfig, "table has no scatterers");
  if (dimension != 1 && dimension != 2) throw Error(ErrorCode::InvalidArgument, "lattice dimension must be 1 or 2");
  for (auto& s : scatterers) {
    if (!(s.radius > 0.0) || !std::isfinite(s.radius))
      throw Error(ErrorCode::InvalidArgument, "scatterer radius must be positive");
    if (!std::isfinite(s.center.x) || !std::isfinite(s.center.y))
      throw Error(ErrorCode::InvalidArgument, "scatterer centre must be finite");
    s.center = fractional(s.center);
  }

  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < scatterers.size(); ++i) {
    for (std::size_t j = i; j < scatterers.size(); ++j) {
      for (int ox = -1; ox <= 1; ++ox) {
        for (int oy = -1; oy <= 1; ++oy) {
          if (i == j && ox == 0 && oy == 0) continue;
          const Vec2 d = scatterers[i].center - scatterers[j].center - Vec2{double(ox), double(oy)};
          min_gap = std::min(min_gap, norm(d) - scatterers[i].radius - scatterers[j].radius);
        }
      }
    }
  }
  if (!(min_gap > 0.0)) {
    throw Error(ErrorCode::OverlappingScatterers,
                "scatterer closures intersect (minimum clearance " + std::to_string(min_gap) + ")");
  }

  BilliardTable table;
  table.dimension_ = dimension;
  table.min_gap_ = min_gap;
  table.scatterers_ = std::move(scatterers);

  double running = 0.0;
  for (std::size_t i = 0; i < table.scatterers_.size(); ++i) {
    const auto& s = table.scatterers_[i];
    running += kTwoPi * s.radius;
    table.cumulative_perimeter_.push_back(running);
    for (int ox = -1; ox <= 1; ++ox) {
      for (int oy = -1; oy <= 1; ++oy) {
        const Vec2 c = s.center + Vec2{double(ox), double(oy)};
        if (distance_to_unit_square(c) <= s.radius + 1e-12)
          table.cell_images_.push_back({static_cast<int>(i), {ox, oy}});
      }
    }
  }
  table.total_perimeter_ = running;
  table.infinite_horizon_ = !corridors::enumerate_corridors(table.scatterers_, kHorizonScanNorm).empty();
  return table;
}

FlightState to_flight_state(const BilliardTable& table, const PhasePoint& point) {
  const auto& s = table.scatterers().at(static_cast<std::size_t>(point.scatterer));
  const double theta = point.r / s.radius;
  const Vec2 n{std::cos(theta), std::sin(theta)};
  return {point.scatterer, s.center + s.radius * n,
          std::cos(point.phi) * n + std::sin(point.phi) * perp(n)};
}

PhasePoint to_phase_point(const BilliardTable& table, const FlightState& state) {
  const auto& s = table.scatterers().at(static_cast<std::size_t>(state.scatterer));
  Vec2 n = state.position - s.center;
  n *= 1.0 / norm(n);
  const double theta = wrap_angle(std::atan2(n.y, n.x));
  double r = s.radius * theta;
  if (r >= table.perimeter(state.scatterer)) r = 0.0;
  return {state.scatterer, r, std::atan2(dot(state.velocity, perp(n)), dot(state.velocity, n))};
}

Vec2 reflect(Vec2 velocity, Vec2 normal) noexcept {
  return velocity - 2.0 * dot(velocity, normal) * normal;
}

FlightResult collide(const BilliardTable& table, const FlightState& state) {
  const auto& scatterers = table.scatterers();
  const Vec2 v = state.velocity;
  const Vec2i start_cell = floor_cell(state.position);
  const Vec2 p0 = state.position - to_real(start_cell);
  const Vec2i own_shift = -start_cell;

  const long long step_x = v.x > 0 ? 1 : -1;
  const long long step_y = v.y > 0 ? 1 : -1;
  constexpr double inf = std::numeric_limits<double>::infinity();
  const double delta_x = v.x != 0 ? 1.0 / std::abs(v.x) : inf;
  const double delta_y = v.y != 0 ? 1.0 / std::abs(v.y) : inf;
  double t_max_x = v.x > 0 ? (1.0 - p0.x) / v.x : v.x < 0 ? p0.x / -v.x : inf;
  double t_max_y = v.y > 0 ? (1.0 - p0.y) / v.y : v.y < 0 ? p0.y / -v.y : inf;

  Vec2i cell{0, 0};
  double best_t = inf;
  int best_scatterer = -1;
  Vec2i best_shift;
  std::uint64_t cells = 0;

  for (;;) {
    for (const auto& image : table.cell_images()) {
      const Vec2i shift = image.shift + cell;
      if (image.scatterer == state.scatterer && shift == own_shift) continue;
      const auto& s = scatterers[static_cast<std::size_t>(image.scatterer)];
      const Vec2 w = p0 - (s.center + to_real(shift));
      const double b = dot(w, v);
      if (b >= 0) continue;
      const double c = dot(w, w) - s.radius * s.radius;
      const double disc = b * b - c;
      if (disc < 0) continue;
      const double t = c / (-b + std::sqrt(disc));
      if (t > kRootTolerance && t < best_t) {
        best_t = t;
        best_scatterer = image.scatterer;
        best_shift = shift;
      }
    }
    if (best_t <= std::min(t_max_x, t_max_y)) break;
    if (t_max_x < t_max_y) {
      cell.x += step_x;
      t_max_x += delta_x;
    } else {
      cell.y += step_y;
      t_max_y += delta_y;
    }
    if (++cells > kMaxCellsPerFlight) {
      throw Error(ErrorCode::FlightCapExceeded, "free flight crossed more than 1e6 cells");
    }
  }

  const auto& hit = scatterers[static_cast<std::size_t>(best_scatterer)];
  Vec2 normal = p0 + best_t * v - (hit.center + to_real(best_shift));
  normal *= 1.0 / norm(normal);
  const double incidence = -dot(v, normal);
  if (incidence < kGrazingThreshold) {
    throw Error(ErrorCode::TangentialGrazing, "incidence cosine below grazing threshold");
  }
  Vec2 out = reflect(v, normal);
  out *= 1.0 / norm(out);

  FlightResult result;
  result.next = {best_scatterer, hit.center + hit.radius * normal, out};
  const Vec2i next_cell = floor_cell(result.next.position);
  result.kappa = best_shift + next_cell;
  // Planar displacement between the lifted collision points.
  result.phi = to_real(result.kappa) + (result.next.position - to_real(next_cell)) - p0;
  if (table.dimension() == 1) result.kappa.y = 0;
  result.flight_time = best_t;
  result.cells_traversed = cells;
  return result;
}

CollisionOutcome collide(const BilliardTable& table, const PhasePoint& point) {
  const FlightResult r = collide(table, to_flight_state(table, point));
  return {to_phase_point(table, r.next), r.kappa, r.phi, r.flight_time, r.cells_traversed};
}

PhasePoint InvariantSampler::operator()(RngStream& rng) const {
  const auto& cumulative = table_->cumulative_perimeter();
  const double u = rng.uniform() * table_->total_perimeter();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) --it;
  const int index = static_cast<int>(it - cumulative.begin());
  const double r = rng.uniform() * table_->perimeter(index);
  const double phi = std::asin(2.0 * rng.uniform() - 1.0);
  return {index, r, phi};
}

std::vector<PhasePoint> sample_invariant(const BilliardTable& table, std::uint64_t seed, std::size_t count) {
  if (count == 0) throw Error(ErrorCode::InvalidArgument, "sample count must be >= 1");
  RngStream rng(seed, 0);
  const InvariantSampler sampler(table);
  std::vector<PhasePoint> points;
  points.reserve(count);
  for (std::size_t i = 0; i < count; ++i) points.push_back(sampler(rng));
  return points;
}

TrajectorySummary birkhoff(const BilliardTable& table, const PhasePoint& start, std::uint64_t n,
                           std::span<const std::uint64_t> schedule) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "trajectory length must be >= 1");
  std::vector<std::uint64_t> steps(schedule.begin(), schedule.end());
  std::sort(steps.begin(), steps.end());
  steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
  if (!steps.empty() && (steps.front() < 1 || steps.back() > n))
    throw Error(ErrorCode::InvalidArgument, "checkpoint schedule must lie in [1, n]");

  TrajectorySummary summary;
  FlightState state = to_flight_state(table, start);
  Vec2i kappa_sum;
  Vec2 phi_sum;
  double running_max = 0.0;
  auto next_checkpoint = steps.begin();
  for (std::uint64_t k = 1; k <= n; ++k) {
    FlightResult r;
    try {
      r = collide(table, state);
    } catch (const Error& e) {
      throw StepError(e, k);
    }
    state = r.next;
    kappa_sum += r.kappa;
    phi_sum += r.phi;
    running_max = std::max(running_max, norm(to_real(kappa_sum)));
    summary.coboundary_gap = std::max(summary.coboundary_gap, norm(phi_sum - to_real(kappa_sum)));
    if (next_checkpoint != steps.end() && *next_checkpoint == k) {
      summary.checkpoints.push_back({k, kappa_sum, phi_sum, running_max});
      ++next_checkpoint;
    }
  }
  summary.final_state = state;
  return summary;
}

}  // namespace superdiff::billiard
