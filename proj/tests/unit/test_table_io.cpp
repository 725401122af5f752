#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "superdiff/error.hpp"
#include "superdiff/table_io.hpp"

using namespace superdiff;
using namespace superdiff::table_io;

namespace {

ErrorCode code_of(const std::string& text) {
  try {
    parse_table(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error for " << text);
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("parse and round trip") {
  const auto t = parse_table(R"({"d":2,"scatterers":[{"center":[0.25,0.25],"radius":0.4},{"center":[0.75,0.75],"radius":0.2}]})");
  CHECK(t.scatterers().size() == 2);
  CHECK_FALSE(t.infinite_horizon());
  const auto back = parse_table(table_to_json(t));
  CHECK(back.scatterers()[1].center == t.scatterers()[1].center);
  CHECK(back.scatterers()[0].radius == 0.4);
  CHECK(back.dimension() == 2);
  CHECK(parse_table(R"({"scatterers":[{"center":[0.5,0.5],"radius":0.25}]})").dimension() == 2);
  CHECK(parse_table(R"({"d":1,"scatterers":[{"center":[0.5,0.5],"radius":0.25}]})").dimension() == 1);
}

TEST_CASE("bad documents") {
  CHECK(code_of("{") == ErrorCode::InvalidArgument);
  CHECK(code_of("{}") == ErrorCode::EmptyConfig);
  CHECK(code_of(R"({"scatterers":[]})") == ErrorCode::EmptyConfig);
  CHECK(code_of(R"({"scatterers":[{"center":[0.5],"radius":0.2}]})") == ErrorCode::InvalidArgument);
  CHECK(code_of(R"({"scatterers":[{"center":[0.5,0.5]}]})") == ErrorCode::InvalidArgument);
  CHECK(code_of(R"({"scatterers":[{"center":[0.5,0.5],"radius":0.5}]})") == ErrorCode::OverlappingScatterers);
  CHECK_THROWS_AS(load_table("/nonexistent/table.json"), Error);
}

TEST_CASE("load from file") {
  const std::string path = "table_io_test.json";
  {
    std::ofstream out(path);
    out << table_to_json(single_disc(0.3));
  }
  CHECK(load_table(path).scatterers()[0].radius == 0.3);
  std::remove(path.c_str());
}

TEST_CASE("trajectory csv") {
  const auto t = single_disc(0.25);
  const std::vector<std::uint64_t> sched = {1, 2, 4};
  const auto s = billiard::birkhoff(t, billiard::sample_invariant(t, 1, 1).front(), 4, sched);
  std::istringstream in(trajectory_csv(s));
  std::string line;
  std::getline(in, line);
  CHECK(line == "step,kx,ky,phix,phiy,runmax");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 5);
  }
  CHECK(rows == 3);
}
