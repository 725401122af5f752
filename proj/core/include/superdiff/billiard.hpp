#pragma once

// Collision map of the Z^d-periodic Lorentz gas with disc scatterers.
//
// Scatterer centres live in the unit torus [0,1)^2. A collision point is
// represented canonically as centre + radius * normal of the *canonical*
// copy of the disc; its lattice cell is the componentwise floor of that
// planar point. The cell-change function kappa is the difference of cells
// of consecutive collision points in the lift, and the flight vector phi is
// their planar difference, so S_n(phi) - S_n(kappa) telescopes and stays
// bounded by the cell diameter.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "superdiff/rng.hpp"
#include "superdiff/vec2.hpp"

namespace superdiff::billiard {

inline constexpr double kRootTolerance = 1e-12;
inline constexpr double kGrazingThreshold = 1e-9;
inline constexpr std::uint64_t kMaxCellsPerFlight = 1'000'000;
/// Corridor search radius used to set the horizon flag.
inline constexpr int kHorizonScanNorm = 20;

struct Scatterer {
  Vec2 center;
  double radius = 0.0;
};

/// A disc image that overlaps the unit cell: scatterer index plus integer shift.
struct CellImage {
  int scatterer = 0;
  Vec2i shift;
};

class BilliardTable {
 public:
  int dimension() const noexcept { return dimension_; }
  const std::vector<Scatterer>& scatterers() const noexcept { return scatterers_; }
  bool infinite_horizon() const noexcept { return infinite_horizon_; }
  /// Smallest clearance between distinct disc images (the disjointness certificate).
  double min_gap() const noexcept { return min_gap_; }
  double total_perimeter() const noexcept { return total_perimeter_; }
  const std::vector<CellImage>& cell_images() const noexcept { return cell_images_; }
  double perimeter(int scatterer) const;
  /// Running sums of perimeters; entry i covers scatterers 0..i.
  const std::vector<double>& cumulative_perimeter() const noexcept { return cumulative_perimeter_; }

 private:
  friend BilliardTable build_table(std::vector<Scatterer> scatterers, int dimension);

  int dimension_ = 2;
  std::vector<Scatterer> scatterers_;
  std::vector<CellImage> cell_images_;
  std::vector<double> cumulative_perimeter_;
  double total_perimeter_ = 0.0;
  double min_gap_ = 0.0;
  bool infinite_horizon_ = false;
};

/// Validates the geometry. Throws EmptyConfig, InvalidArgument or
/// OverlappingScatterers.
BilliardTable build_table(std::vector<Scatterer> scatterers, int dimension);

/// Point of the collision phase space M.
struct PhasePoint {
  int scatterer = 0;
  /// Arc length along the boundary, counterclockwise from the +x direction.
  double r = 0.0;
  /// Outgoing angle from the outward normal, in (-pi/2, pi/2).
  double phi = 0.0;
};

/// Position/velocity form of a phase point; what the hot loop iterates.
struct FlightState {
  int scatterer = 0;
  Vec2 position;  ///< canonical collision point (centre + radius * normal)
  Vec2 velocity;  ///< unit outgoing velocity
};

FlightState to_flight_state(const BilliardTable& table, const PhasePoint& point);
PhasePoint to_phase_point(const BilliardTable& table, const FlightState& state);

struct CollisionOutcome {
  PhasePoint next;
  Vec2i kappa;  ///< second component is always 0 when d = 1
  Vec2 phi;
  double flight_time = 0.0;
  std::uint64_t cells_traversed = 0;
};

struct FlightResult {
  FlightState next;
  Vec2i kappa;
  Vec2 phi;
  double flight_time = 0.0;
  std::uint64_t cells_traversed = 0;
};

/// Applies the collision map once. Throws FlightCapExceeded or TangentialGrazing.
CollisionOutcome collide(const BilliardTable& table, const PhasePoint& point);
FlightResult collide(const BilliardTable& table, const FlightState& state);

/// Reflects `velocity` through the line with unit normal `normal`.
Vec2 reflect(Vec2 velocity, Vec2 normal) noexcept;

/// Draws from the invariant measure, density proportional to cos(phi) dr dphi.
struct InvariantSampler {
  explicit InvariantSampler(const BilliardTable& table) : table_(&table) {}
  PhasePoint operator()(RngStream& rng) const;

 private:
  const BilliardTable* table_;
};

std::vector<PhasePoint> sample_invariant(const BilliardTable& table, std::uint64_t seed, std::size_t count);

struct Checkpoint {
  std::uint64_t step = 0;
  Vec2i kappa_sum;
  Vec2 phi_sum;
  double running_max = 0.0;  ///< max_{k <= step} |S_k kappa|
};

struct TrajectorySummary {
  std::vector<Checkpoint> checkpoints;
  double coboundary_gap = 0.0;  ///< max_k |S_k phi - S_k kappa|
  FlightState final_state;
};

/// Streams n collisions from `start`, recording sums at the (sorted, unique)
/// steps of `schedule`. Collision errors are rethrown as StepError.
TrajectorySummary birkhoff(const BilliardTable& table, const PhasePoint& start, std::uint64_t n,
                           std::span<const std::uint64_t> schedule);

}  // namespace superdiff::billiard
