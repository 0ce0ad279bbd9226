#include "doctest.h"

#include "lexmarket/fixtures.hpp"
#include "lexmarket/lde.hpp"

#include "support.hpp"

using namespace lexmarket;
using namespace lexmarket::testsupport;

TEST_SUITE("properties") {

TEST_CASE("agents never touch goods priced before their income cutoff") {
  for (const auto& inst : fixtures::all_instances()) {
    if (!inst.system) continue;
    if (!check_strong_cbp(inst.economy, inst.allocation, *inst.system).ok) continue;
    CAPTURE(inst.name);
    CHECK(zero_holdings_ok(inst.economy, inst.allocation, *inst.system));
  }
}

TEST_CASE("the strong cheapest-bundle property implies the weak one") {
  for (const auto& inst : fixtures::all_instances()) {
    if (!inst.system) continue;
    CAPTURE(inst.name);
    bool strong = check_strong_cbp(inst.economy, inst.allocation, *inst.system).ok;
    bool weak = check_weak_cbp(inst.economy, inst.allocation, *inst.system).ok;
    if (strong) CHECK(weak);
  }
}

TEST_CASE("membership chain holds on pinned and random instances") {
  for (const auto& inst : fixtures::all_instances()) {
    CAPTURE(inst.name);
    CHECK(hierarchy_chain_ok(inst.economy, inst.allocation));
  }
  for (unsigned seed = 1; seed <= 50; ++seed) {
    Economy e = fixtures::random_economy(seed, 3);
    Allocation x = fixtures::random_allocation(seed + 1000, 3);
    CAPTURE(seed);
    CHECK(hierarchy_chain_ok(e, x));
  }
}

TEST_CASE("birkhoff round trips stay within the term bound") {
  int done = 0;
  for (unsigned seed = 1; done < 100; ++seed) {
    for (unsigned n = 3; n <= 6; ++n) {
      if (done >= 100) break;
      Allocation x = fixtures::random_allocation(seed * 977 + n, n);
      CAPTURE(seed);
      CAPTURE(n);
      CHECK(bvn_roundtrip_ok(x.rows));
      ++done;
    }
  }
}

TEST_CASE("random linear programs always produce verified certificates") {
  for (unsigned seed = 100; seed < 200; ++seed) {
    CAPTURE(seed);
    CHECK(lp_certificate_ok(random_lp(seed)));
  }
}

}  // TEST_SUITE
