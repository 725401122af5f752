#include "superdiff/table_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "superdiff/error.hpp"

namespace superdiff::table_io {

using nlohmann::json;

billiard::BilliardTable parse_table(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("table config: ") + e.what());
  }
  try {
    const int d = doc.value("d", 2);
    if (!doc.contains("scatterers") || !doc["scatterers"].is_array())
      throw Error(ErrorCode::EmptyConfig, "table config has no scatterer list");
    std::vector<billiard::Scatterer> scatterers;
    for (const auto& s : doc["scatterers"]) {
      const auto& c = s.at("center");
      if (!c.is_array() || c.size() != 2) throw Error(ErrorCode::InvalidArgument, "center must be [x, y]");
      scatterers.push_back({{c[0].get<double>(), c[1].get<double>()}, s.at("radius").get<double>()});
    }
    return billiard::build_table(std::move(scatterers), d);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("table config: ") + e.what());
  }
}

billiard::BilliardTable load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read table " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_table(buf.str());
}

std::string table_to_json(const billiard::BilliardTable& table) {
  nlohmann::ordered_json doc;
  doc["d"] = table.dimension();
  auto arr = nlohmann::ordered_json::array();
  for (const auto& s : table.scatterers())
    arr.push_back({{"center", {s.center.x, s.center.y}}, {"radius", s.radius}});
  doc["scatterers"] = arr;
  return doc.dump();
}

std::string trajectory_csv(const billiard::TrajectorySummary& summary) {
  std::string out = "step,kx,ky,phix,phiy,runmax\n";
  char buf[160];
  for (const auto& c : summary.checkpoints) {
    std::snprintf(buf, sizeof buf, "%llu,%lld,%lld,%.17g,%.17g,%.17g\n", static_cast<unsigned long long>(c.step),
                  static_cast<long long>(c.kappa_sum.x), static_cast<long long>(c.kappa_sum.y), c.phi_sum.x,
                  c.phi_sum.y, c.running_max);
    out += buf;
  }
  return out;
}

billiard::BilliardTable single_disc(double radius, int dimension) {
  return billiard::build_table({{{0.5, 0.5}, radius}}, dimension);
}

}  // namespace superdiff::table_io
