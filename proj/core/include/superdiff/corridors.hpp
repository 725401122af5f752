#pragma once

#include <string>
#include <vector>

#include "superdiff/billiard.hpp"

namespace superdiff::corridors {

/// A collision-free strip of the periodic table running along the lattice
/// direction xi. `offset` is the strip's centre line, measured along the unit
/// normal perp(xi)/|xi| modulo the line spacing 1/|xi|.
struct Corridor {
  Vec2i xi;
  double width = 0.0;
  double offset = 0.0;
  double c_xi_hat = 0.0;
};

/// Free strips along a single primitive direction (empty when blocked).
std::vector<Corridor> free_strips(const std::vector<billiard::Scatterer>& scatterers, Vec2i xi);

/// All strips along primitive xi with |xi|_inf <= max_norm, one entry per strip.
/// Directions are canonical: xi.x > 0, or xi = (0, 1).
std::vector<Corridor> enumerate_corridors(const std::vector<billiard::Scatterer>& scatterers, int max_norm);
std::vector<Corridor> enumerate_corridors(const billiard::BilliardTable& table, int max_norm);

struct Nondegeneracy {
  bool holds = false;
  std::string reason;
};

/// d = 2: two nonparallel corridors. d = 1: a corridor not orthogonal to the
/// cover direction (1, 0).
Nondegeneracy nondegeneracy_check(const std::vector<Corridor>& corridors, int dimension);

}  // namespace superdiff::corridors
