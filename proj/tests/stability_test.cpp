#include "doctest.h"

#include <algorithm>
#include <string>

#include "lexmarket/fixtures.hpp"
#include "lexmarket/stability.hpp"

#include "support.hpp"

using namespace lexmarket;
using namespace lexmarket::testsupport;

namespace {

Allocation swapped_chain() {
  Allocation x = fixtures::two_tier_chain().allocation;
  std::swap(x.rows[0], x.rows[2]);
  return x;
}

}  // namespace

TEST_SUITE("stability") {

TEST_CASE("fractional efficiency verdicts") {
  fixtures::Instance inst = fixtures::two_tier_chain();
  CHECK(is_fpo(inst.economy, inst.allocation).efficient);

  Allocation bad = swapped_chain();
  FpoResult r = is_fpo(inst.economy, bad);
  REQUIRE(!r.efficient);
  REQUIRE(r.dominating);
  CHECK(validate_allocation(inst.economy, *r.dominating).empty());
  Rat total = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    Rat gain = utility(inst.economy, i, r.dominating->rows[i]) -
               utility(inst.economy, i, bad.rows[i]);
    CHECK(gain >= 0);
    CHECK(gain == r.gains[i]);
    total += gain;
  }
  CHECK(total > 0);
}

TEST_CASE("individual rationality verdicts") {
  fixtures::Instance inst = fixtures::two_tier_chain();
  CHECK(is_ir(inst.economy, inst.allocation).individually_rational);

  Allocation x;
  x.rows = {{Rat(0), Rat(0), Rat(1)}, {Rat(1), Rat(0), Rat(0)}, {Rat(0), Rat(1), Rat(0)}};
  IrResult r = is_ir(inst.economy, x);
  REQUIRE(!r.individually_rational);
  REQUIRE(r.agent);
  CHECK(*r.agent == 0);
}

TEST_CASE("blocking search finds the self-improving singleton") {
  fixtures::Instance inst = fixtures::two_tier_chain();
  CHECK(!block_search(inst.economy, inst.allocation, BlockMode::strong_blocking));

  auto w = block_search(inst.economy, swapped_chain(), BlockMode::strong_blocking);
  REQUIRE(w);
  CHECK(w->coalition == std::vector<std::size_t>{0});
  CHECK(w->total_gain > 0);
  // The witness bundle really is feasible for the coalition's endowment and
  // really improves.
  REQUIRE(w->bundles.size() == 1);
  Rat gain = utility(inst.economy, 0, w->bundles[0]) -
             utility(inst.economy, 0, swapped_chain().rows[0]);
  CHECK(gain > 0);
  for (std::size_t j = 0; j < 3; ++j) CHECK(w->bundles[0][j] <= inst.economy.omega[0][j]);
}

TEST_CASE("stability of the pinned equilibria") {
  for (const auto& inst : fixtures::all_instances()) {
    if (!inst.system) continue;
    CAPTURE(inst.name);
    CHECK(is_stable(inst.economy, inst.allocation).stable);
  }
}

TEST_CASE("stable allocation rejected by a two-fold replica coalition") {
  fixtures::Instance inst = fixtures::stable_yet_rejectable();
  CHECK(is_stable(inst.economy, inst.allocation).stable);

  RejectVerdict at2 = reject_search(inst.economy, inst.allocation, 2u);
  REQUIRE(at2.rejected);
  REQUIRE(at2.witness);
  CHECK(at2.witness->replicas == 2u);
  bool endow_from_3 = false, alloc_from_1 = false;
  for (const auto& m : at2.witness->members) {
    const std::string& name = inst.economy.agent_names[m.agent];
    if (m.role == RejectRole::endowment && name[0] == '3') endow_from_3 = true;
    if (m.role == RejectRole::allocation && name[0] == '1') alloc_from_1 = true;
  }
  CHECK(endow_from_3);
  CHECK(alloc_from_1);
  CHECK(reverify_rejection(inst.economy, inst.allocation, *at2.witness).has_value());

  RejectVerdict frac = reject_search(inst.economy, inst.allocation, std::nullopt);
  REQUIRE(frac.rejected);
  REQUIRE(frac.witness);
  CHECK(!frac.witness->replicas);
  auto level = reverify_rejection(inst.economy, inst.allocation, *frac.witness);
  REQUIRE(level.has_value());
  // The scaled coalition is a genuine finite rejection, so the finite search
  // at that level must agree.
  CHECK(reject_search(inst.economy, inst.allocation, *level).rejected);
}

TEST_CASE("pinned equilibrium allocations sit in the rejective core") {
  fixtures::Instance inst = fixtures::two_tier_chain();
  CHECK(!reject_search(inst.economy, inst.allocation, std::nullopt).rejected);
  CHECK(!reject_search(inst.economy, inst.allocation, 2u).rejected);
}

TEST_CASE("fixed coalition patterns reproduce the rejection") {
  fixtures::Instance inst = fixtures::stable_yet_rejectable();
  const std::size_t n = inst.economy.n();
  std::vector<bool> endow(n, false), alloc(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (inst.economy.agent_names[i][0] == '3') endow[i] = true;
    if (inst.economy.agent_names[i][0] == '1') alloc[i] = true;
  }
  auto w = check_coalition_pattern(inst.economy, inst.allocation, endow, alloc, std::nullopt);
  REQUIRE(w);
  CHECK(w->slack > 0);
  CHECK(reverify_rejection(inst.economy, inst.allocation, *w).has_value());
}

TEST_CASE("grid oracle and polytope search agree on random markets") {
  for (unsigned seed = 1; seed <= 6; ++seed) {
    Economy e = fixtures::random_economy(seed, 3);
    Allocation x = fixtures::random_allocation(seed + 100, 3);
    CAPTURE(seed);
    for (BlockMode mode : {BlockMode::strong_blocking, BlockMode::weak_blocking}) {
      bool oracle = grid_blocks(e, x, mode);
      bool lp = block_search(e, x, mode).has_value();
      CHECK(oracle == lp);
    }
  }
}

}  // TEST_SUITE
