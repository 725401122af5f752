#include "superdiff/corridors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace superdiff::corridors {

namespace {

// Strips narrower than this are treated as tangencies, not corridors.
constexpr double kMinWidth = 1e-12;

struct Interval {
  double lo;
  double hi;
};

}  // namespace

std::vector<Corridor> free_strips(const std::vector<billiard::Scatterer>& scatterers, Vec2i xi) {
  std::vector<Corridor> out;
  const double length = norm(to_real(xi));
  if (length == 0.0 || scatterers.empty()) return out;
  const double period = 1.0 / length;
  const Vec2 normal = perp(to_real(xi)) * period;

  // Shadows of the discs on the normal axis, taken modulo the spacing of
  // lattice lines along xi. Three copies let every gap starting in
  // [period, 2 period) be read off a plain merge on the line.
  std::vector<Interval> shadows;
  for (const auto& s : scatterers) {
    if (2.0 * s.radius >= period) return out;
    double c = std::fmod(dot(s.center, normal), period);
    if (c < 0) c += period;
    for (int copy = 0; copy < 3; ++copy) {
      const double mid = c + copy * period;
      shadows.push_back({mid - s.radius, mid + s.radius});
    }
  }
  std::sort(shadows.begin(), shadows.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });

  double reach = shadows.front().hi;
  for (std::size_t k = 1; k < shadows.size(); ++k) {
    if (shadows[k].lo > reach) {
      const double width = shadows[k].lo - reach;
      if (reach >= period && reach < 2.0 * period && width > kMinWidth) {
        const double mid = std::fmod(reach + 0.5 * width, period);
        out.push_back({xi, width, mid, 0.0});
      }
    }
    reach = std::max(reach, shadows[k].hi);
  }
  std::sort(out.begin(), out.end(), [](const Corridor& a, const Corridor& b) { return a.offset < b.offset; });
  return out;
}

std::vector<Corridor> enumerate_corridors(const std::vector<billiard::Scatterer>& scatterers, int max_norm) {
  std::vector<Corridor> out;
  for (int a = 0; a <= max_norm; ++a) {
    for (int b = -max_norm; b <= max_norm; ++b) {
      if (a == 0 && b != 1) continue;
      if (std::gcd(a, std::abs(b)) != 1) continue;
      auto strips = free_strips(scatterers, {a, b});
      out.insert(out.end(), strips.begin(), strips.end());
    }
  }
  return out;
}

std::vector<Corridor> enumerate_corridors(const billiard::BilliardTable& table, int max_norm) {
  return enumerate_corridors(table.scatterers(), max_norm);
}

Nondegeneracy nondegeneracy_check(const std::vector<Corridor>& corridors, int dimension) {
  if (dimension == 1) {
    for (const auto& c : corridors) {
      if (c.xi.x != 0) {
        return {true, "corridor along (" + std::to_string(c.xi.x) + "," + std::to_string(c.xi.y) +
                          ") is not orthogonal to the cover direction"};
      }
    }
    return {false, corridors.empty() ? "no corridors" : "every corridor is orthogonal to the cover direction"};
  }
  for (std::size_t i = 0; i < corridors.size(); ++i) {
    for (std::size_t j = i + 1; j < corridors.size(); ++j) {
      const Vec2i a = corridors[i].xi;
      const Vec2i b = corridors[j].xi;
      if (a.x * b.y - a.y * b.x != 0) {
        return {true, "nonparallel corridors (" + std::to_string(a.x) + "," + std::to_string(a.y) + ") and (" +
                          std::to_string(b.x) + "," + std::to_string(b.y) + ")"};
      }
    }
  }
  return {false, corridors.empty() ? "no corridors" : "all corridors share one direction"};
}

}  // namespace superdiff::corridors
