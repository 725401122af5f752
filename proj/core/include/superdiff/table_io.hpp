#pragma once

// Table configs as JSON, {"d":2,"scatterers":[{"center":[x,y],"radius":r}]},
// and trajectory checkpoints as CSV.

#include <string>

#include "superdiff/billiard.hpp"

namespace superdiff::table_io {

/// Parses and validates. Malformed documents throw InvalidArgument; an empty
/// scatterer list throws EmptyConfig.
billiard::BilliardTable parse_table(const std::string& json_text);
billiard::BilliardTable load_table(const std::string& path);
std::string table_to_json(const billiard::BilliardTable& table);

/// CSV with header step,kx,ky,phix,phiy,runmax.
std::string trajectory_csv(const billiard::TrajectorySummary& summary);

/// Single disc of the given radius at the cell centre.
billiard::BilliardTable single_disc(double radius, int dimension = 2);

}  // namespace superdiff::table_io
