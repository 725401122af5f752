#include "doctest.h"

#include <bit>
#include <cmath>
#include <sstream>
#include <string>

#include "superdiff/error.hpp"
#include "superdiff/rng.hpp"
#include "superdiff/truncation.hpp"

using namespace superdiff;
using namespace superdiff::truncation;

TEST_CASE("underline") {
  CHECK(underline(1) == 1);
  CHECK(underline(5) == 4);
  CHECK(underline(1024) == 1024);
  CHECK(underline(1025) == 1024);
  CHECK(underline(~std::uint64_t{0}) == std::uint64_t{1} << 63);
  CHECK_THROWS_AS(underline(0), Error);
}

TEST_CASE("level 8 layout by hand") {
  const auto b = block_decomposition(8, 0.5, 0.25);
  CHECK(b.F == 16);
  CHECK(b.floor_beta_n == 4);
  CHECK(b.floor_eps1_n == 2);
  REQUIRE(b.blocks.size() == 32);
  CHECK(b.blocks[0].kind == 'J');
  CHECK(b.blocks[0].length == 64);
  CHECK(b.blocks[0].start == 256);
  // gaps j = 1..15 have length 4 * 2^{lowest set bit of j}
  for (std::uint64_t j = 1; j < 16; ++j) {
    CHECK(b.blocks[2 * j].kind == 'J');
    CHECK(b.blocks[2 * j].length == 4u << std::countr_zero(j));
  }
  for (std::uint64_t j = 0; j < 16; ++j) {
    CHECK(b.blocks[2 * j + 1].kind == 'I');
    CHECK(b.blocks[2 * j + 1].j == j);
    CHECK(b.blocks[2 * j + 1].length == 4);
  }
  CHECK(b.gap_total == 192);
  CHECK(b.interval_total == 64);
  CHECK(b.nominal_interval == doctest::Approx(4.0));
  // gap total formula 2^{eps1 n} 2^{beta n - 1} (beta n + 2)
  CHECK(b.gap_total == 4 * 8 * 6);
}

TEST_CASE("levels that are too small") {
  try {
    block_decomposition(2, 0.5, 0.25);
    FAIL("expected LevelTooSmall");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LevelTooSmall);
  }
  CHECK_THROWS_AS(block_decomposition(10, 1.0, 0.1), Error);
  CHECK_THROWS_AS(block_decomposition(10, 0.5, 0.5), Error);
  CHECK_THROWS_AS(block_decomposition(10, 0.5, 0.0), Error);
}

TEST_CASE("layouts partition the dyadic level") {
  int accepted = 0;
  for (int n = 1; n <= 30; ++n) {
    for (double beta : {0.1, 0.25, 0.5, 0.7}) {
      for (double eps1 : {0.05, 0.1, 0.25}) {
        if (eps1 >= 1 - beta) continue;
        BlockLayout b;
        try {
          b = block_decomposition(n, beta, eps1);
        } catch (const Error& e) {
          CHECK(e.code() == ErrorCode::LevelTooSmall);
          continue;
        }
        ++accepted;
        std::uint64_t cursor = std::uint64_t{1} << n;
        for (std::size_t k = 0; k < b.blocks.size(); ++k) {
          CHECK(b.blocks[k].start == cursor);
          CHECK(b.blocks[k].length >= 1);
          CHECK(b.blocks[k].kind == (k % 2 == 0 ? 'J' : 'I'));
          cursor += b.blocks[k].length;
        }
        CHECK(cursor == std::uint64_t{2} << n);
        CHECK(b.gap_total + b.interval_total == std::uint64_t{1} << n);
        CHECK(b.blocks.size() == 2 * b.F);
      }
    }
  }
  CHECK(accepted > 50);
  for (int n = 8; n <= 14; ++n) {
    const auto b = block_decomposition(n);
    CHECK(b.gap_total + b.interval_total == std::uint64_t{1} << n);
  }
}

TEST_CASE("floor_times survives representation error") {
  CHECK(floor_times(0.1, 30) == 3);
  CHECK(floor_times(0.7, 10) == 7);
  CHECK(floor_times(0.5, 9) == 4);
}

TEST_CASE("truncation properties") {
  RngStream rng(2, 0);
  for (int i = 0; i < 10000; ++i) {
    const double v = (rng.uniform() - 0.5) * 100;
    const double R = rng.uniform() * 60;
    CHECK(std::abs(truncate(v, R)) <= R);
    CHECK(truncate(truncate(v, R), R) == truncate(v, R));
    CHECK(truncate(v, kNoTruncation) == v);
    // low truncation plus band reassembles the higher truncation
    const double lo = R / 3;
    CHECK(truncate(v, R) == (std::abs(v) < lo ? v : 0.0) + band(v, lo, R));
    const Vec2 w{v, (rng.uniform() - 0.5) * 100};
    CHECK(norm(truncate(w, R)) <= R);
    CHECK(truncate(truncate(w, R), R) == truncate(w, R));
    CHECK(band(w, lo, R) == (norm(w) >= lo && norm(w) <= R ? w : Vec2{}));
  }
}

TEST_CASE("layout csv") {
  std::istringstream in(to_csv(block_decomposition(8)));
  std::string line;
  std::getline(in, line);
  CHECK(line == "n,kind,j,start,len");
  std::getline(in, line);
  CHECK(line == "8,J,0,256,64");
  std::getline(in, line);
  CHECK(line == "8,I,0,320,4");
}
