#include "doctest.h"

#include "lexmarket/economy.hpp"
#include "lexmarket/fixtures.hpp"

using namespace lexmarket;

TEST_SUITE("economy") {

TEST_CASE("pinned instances validate cleanly") {
  for (const auto& inst : fixtures::all_instances()) {
    CAPTURE(inst.name);
    CHECK(validate_economy(inst.economy).empty());
    CHECK(validate_allocation(inst.economy, inst.allocation).empty());
  }
}

TEST_CASE("column-sum and sign violations are reported") {
  Economy e = fixtures::satiation_surplus().economy;
  e.omega[0][0] += Rat(1, 7);
  CHECK(!validate_economy(e).empty());

  Economy neg = fixtures::satiation_surplus().economy;
  neg.u[1][2] = Rat(-1, 2);
  CHECK(!validate_economy(neg).empty());

  Economy shape = fixtures::satiation_surplus().economy;
  shape.u.pop_back();
  CHECK(!validate_economy(shape).empty());
}

TEST_CASE("allocation validation distinguishes exact and sub column sums") {
  Economy e = fixtures::satiation_surplus().economy;
  Allocation x;
  x.rows = {{Rat(1, 2), Rat(0), Rat(0)},
            {Rat(0), Rat(1, 2), Rat(0)},
            {Rat(0), Rat(0), Rat(1, 2)}};
  CHECK(!validate_allocation(e, x, true).empty());
  CHECK(validate_allocation(e, x, false).empty());

  Allocation bad = x;
  bad.rows[0][1] = Rat(-1, 4);
  CHECK(!validate_allocation(e, bad, false).empty());

  Allocation heavy = x;
  heavy.rows[0] = {Rat(1), Rat(1, 4), Rat(0)};
  CHECK(!validate_allocation(e, heavy, false).empty());
}

TEST_CASE("replication copies utilities and splits endowments") {
  Economy e = fixtures::satiation_surplus().economy;
  Economy r = replicate(e, 2);
  REQUIRE(r.n() == 6);
  CHECK(validate_economy(r).empty());
  // Agent copy (m, i) values good copy (l, j) exactly as i values j.
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t m = 0; m < 2; ++m)
      for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t l = 0; l < 2; ++l) {
          std::size_t ri = 3 * m + i, rj = 3 * l + j;
          CHECK(r.u[ri][rj] == e.u[i][j]);
          CHECK(r.omega[ri][rj] == e.omega[i][j] / 2);
        }
  // Names stay distinct.
  for (std::size_t i = 0; i < r.n(); ++i)
    for (std::size_t j = i + 1; j < r.n(); ++j) {
      CHECK(r.agent_names[i] != r.agent_names[j]);
      CHECK(r.goods[i] != r.goods[j]);
    }
}

TEST_CASE("perturbation mixes endowments toward uniform") {
  Economy e = fixtures::two_tier_chain().economy;
  Economy p = perturb(e, Rat(1, 8));
  CHECK(validate_economy(p).empty());
  CHECK(p.u == e.u);
  for (std::size_t i = 0; i < e.n(); ++i)
    for (std::size_t j = 0; j < e.n(); ++j)
      CHECK(p.omega[i][j] == Rat(1, 8) * Rat(1, 3) + Rat(7, 8) * e.omega[i][j]);
}

TEST_CASE("utility is the exact inner product") {
  Economy e = fixtures::two_tier_chain().economy;
  RatVec bundle{Rat(1, 2), Rat(0), Rat(1, 2)};
  CHECK(utility(e, 1, bundle) == Rat(31, 20));
  CHECK(utility(e, 2, bundle) == e.u[2][0] / 2 + e.u[2][2] / 2);
}

TEST_CASE("random economies are exactly doubly stochastic") {
  for (unsigned seed = 1; seed <= 10; ++seed) {
    Economy e = fixtures::random_economy(seed, 3);
    CHECK(validate_economy(e).empty());
    Allocation x = fixtures::random_allocation(seed, 3);
    CHECK(validate_allocation(e, x).empty());
  }
}

}  // TEST_SUITE
