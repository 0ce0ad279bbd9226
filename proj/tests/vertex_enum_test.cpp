#include "doctest.h"

#include "lexmarket/fixtures.hpp"
#include "lexmarket/vertex_enum.hpp"

using namespace lexmarket;

TEST_SUITE("vertex_enum") {

TEST_CASE("unit square vertices arrive sorted and deduplicated") {
  Polytope P;
  P.add_le({Rat(1), Rat(0)}, Rat(1));
  P.add_le({Rat(0), Rat(1)}, Rat(1));
  P.add_le({Rat(1), Rat(0)}, Rat(1));  // redundant duplicate row
  P.add_nonnegativity();
  auto v = enumerate_vertices(P);
  REQUIRE(v.size() == 4);
  CHECK(v[0] == RatVec{Rat(0), Rat(0)});
  CHECK(v[1] == RatVec{Rat(0), Rat(1)});
  CHECK(v[2] == RatVec{Rat(1), Rat(0)});
  CHECK(v[3] == RatVec{Rat(1), Rat(1)});
}

TEST_CASE("equality constraints cut the simplex slice") {
  Polytope P;
  P.add_eq({Rat(1), Rat(1), Rat(1)}, Rat(1));
  P.add_nonnegativity();
  auto v = enumerate_vertices(P);
  REQUIRE(v.size() == 3);
  CHECK(v[0] == RatVec{Rat(0), Rat(0), Rat(1)});
  CHECK(v[1] == RatVec{Rat(0), Rat(1), Rat(0)});
  CHECK(v[2] == RatVec{Rat(1), Rat(0), Rat(0)});
}

TEST_CASE("fractional cuts give fractional vertices") {
  // Sub-simplex intersected with x + 2y <= 1 in two dimensions.
  Polytope P;
  P.add_le({Rat(1), Rat(1)}, Rat(1));
  P.add_le({Rat(1), Rat(2)}, Rat(1));
  P.add_nonnegativity();
  auto v = enumerate_vertices(P);
  REQUIRE(v.size() == 3);
  CHECK(v[0] == RatVec{Rat(0), Rat(0)});
  CHECK(v[1] == RatVec{Rat(0), Rat(1, 2)});
  CHECK(v[2] == RatVec{Rat(1), Rat(0)});
}

TEST_CASE("empty polytope yields no vertices") {
  Polytope P;
  P.add_le({Rat(1)}, Rat(-1));
  P.add_nonnegativity();
  CHECK(enumerate_vertices(P).empty());
}

TEST_CASE("dimension cap throws") {
  Polytope P;
  RatVec row(9, Rat(1));
  P.add_le(row, Rat(1));
  P.add_nonnegativity();
  CHECK_THROWS_AS(enumerate_vertices(P), InstanceTooLarge);
}

TEST_CASE("preferred-set vertices match the hand enumeration") {
  Economy e = fixtures::two_tier_chain().economy;
  // Agent 1 (utilities 2, 1, 0): bundles in the sub-simplex worth at least
  // 3/2. Corners: pure A, the A/B split at the utility boundary, the
  // boundary bundle padded with the worthless good, and full mass on A.
  auto v = preferred_vertices(e, 0, Rat(3, 2), {});
  std::vector<RatVec> expect = {
      {Rat(1, 2), Rat(1, 2), Rat(0)},
      {Rat(3, 4), Rat(0), Rat(0)},
      {Rat(3, 4), Rat(0), Rat(1, 4)},
      {Rat(1), Rat(0), Rat(0)},
  };
  CHECK(v == expect);
}

TEST_CASE("support mask zeroes excluded coordinates") {
  Economy e = fixtures::two_tier_chain().economy;
  std::vector<bool> support{true, false, true};
  auto v = preferred_vertices(e, 0, Rat(3, 2), support);
  REQUIRE(!v.empty());
  for (const auto& y : v) CHECK(y[1] == 0);
  // Only A carries utility 2 for agent 1 on this support: threshold 3/2
  // forces at least 3/4 of A.
  for (const auto& y : v) CHECK(y[0] >= Rat(3, 4));
}

}  // TEST_SUITE
