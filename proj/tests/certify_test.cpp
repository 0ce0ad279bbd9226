#include "doctest.h"

#include "lexmarket/certify.hpp"
#include "lexmarket/fixtures.hpp"
#include "lexmarket/lde.hpp"

#include "support.hpp"

using namespace lexmarket;
using namespace lexmarket::testsupport;

TEST_SUITE("certify") {

TEST_CASE("two-currency chain is certified with the pinned system shape") {
  fixtures::Instance inst = fixtures::two_tier_chain();
  CertifyResult r = certify(inst.economy, inst.allocation);
  REQUIRE(r.status == CertifyStatus::certified);
  REQUIRE(r.system);
  const LexPriceSystem& sys = *r.system;
  REQUIRE(sys.d() == 2);
  // Currency 1 prices exactly good A, currency 2 exactly good B; C is free.
  CHECK(sys.P[0][0] > 0);
  CHECK(sys.P[0][1] == 0);
  CHECK(sys.P[0][2] == 0);
  CHECK(sys.P[1][0] == 0);
  CHECK(sys.P[1][1] > 0);
  CHECK(sys.P[1][2] == 0);
  // Dividends: only agent 3 is paid, half of B's second-currency price.
  CHECK(sys.alpha[0] == RatVec{Rat(0), Rat(0), Rat(0)});
  CHECK(sys.alpha[1][0] == 0);
  CHECK(sys.alpha[1][1] == 0);
  CHECK(sys.alpha[1][2] == sys.P[1][1] / 2);

  CHECK(verify_lde(inst.economy, inst.allocation, sys).ok);
  CHECK(check_weak_cbp(inst.economy, inst.allocation, sys).ok);
  CHECK(check_aggregate_cbp(inst.economy, inst.allocation, sys).ok);
  CHECK(check_simple_prices(sys));
  CHECK(r.rounds.size() == 2);
}

TEST_CASE("dividend-funded market is certified with one currency") {
  fixtures::Instance inst = fixtures::satiation_surplus();
  CertifyResult r = certify(inst.economy, inst.allocation);
  REQUIRE(r.status == CertifyStatus::certified);
  REQUIRE(r.system);
  const LexPriceSystem& sys = *r.system;
  REQUIRE(sys.d() == 1);
  CHECK(sys.P[0][0] > 0);
  // The certifier is free to pick any supporting price row; the dividends
  // must still be exactly the positive parts of the induced net trades.
  CHECK(sys.alpha == dividends_from(inst.economy, inst.allocation, sys.P));
  CHECK(sys.alpha[0][2] == 0);
  CHECK(verify_lde(inst.economy, inst.allocation, sys).ok);
  CHECK(check_weak_cbp(inst.economy, inst.allocation, sys).ok);
}

TEST_CASE("three-currency chain allocation is certified simply") {
  fixtures::Instance inst = fixtures::three_tier_chain();
  CertifyResult r = certify(inst.economy, inst.allocation);
  REQUIRE(r.status == CertifyStatus::certified);
  REQUIRE(r.system);
  CHECK(verify_lde(inst.economy, inst.allocation, *r.system).ok);
  CHECK(check_weak_cbp(inst.economy, inst.allocation, *r.system).ok);
  CHECK(check_aggregate_cbp(inst.economy, inst.allocation, *r.system).ok);
  CHECK(check_simple_prices(*r.system));
}

TEST_CASE("rejectable allocation is refuted with a reusable witness") {
  fixtures::Instance inst = fixtures::stable_yet_rejectable();
  CertifyResult r = certify(inst.economy, inst.allocation);
  REQUIRE(r.status == CertifyStatus::refuted);
  REQUIRE(r.witness);
  CHECK(reverify_rejection(inst.economy, inst.allocation, *r.witness).has_value());
}

TEST_CASE("strengthening is vacuous when the strong property already holds") {
  fixtures::Instance inst = fixtures::two_tier_chain();
  StrengthenResult s = strengthen(inst.economy, inst.allocation, *inst.system);
  REQUIRE(s.ok);
  REQUIRE(s.strengthened);
  CHECK(s.strengthened->P == inst.system->P);
  CHECK(s.strengthened->alpha == inst.system->alpha);
  for (const auto& row : s.adjustments) CHECK(is_zero_vec(row));
}

TEST_CASE("strengthening repairs the merged-currency tuple") {
  fixtures::Instance inst = fixtures::two_tier_merged();
  REQUIRE(!check_strong_cbp(inst.economy, inst.allocation, *inst.system).ok);

  StrengthenResult s = strengthen(inst.economy, inst.allocation, *inst.system);
  REQUIRE(s.ok);
  REQUIRE(s.strengthened);
  const LexPriceSystem& up = *s.strengthened;

  CHECK(verify_lde(inst.economy, inst.allocation, up).ok);
  CHECK(check_strong_cbp(inst.economy, inst.allocation, up).ok);

  // The adjustment leaves currency 1 alone and, in currency 2, touches only
  // goods already priced in currency 1 (the two A copies and B).
  REQUIRE(s.adjustments.size() == 2);
  CHECK(is_zero_vec(s.adjustments[0]));
  CHECK(s.adjustments[1][3] == 0);
  CHECK(s.adjustments[1][4] == 0);
  CHECK(s.adjustments[1][5] == 0);
  CHECK(!is_zero_vec(s.adjustments[1]));
  for (std::size_t k = 0; k < 2; ++k)
    CHECK(up.P[k] == vec_add(inst.system->P[k], s.adjustments[k]));

  // Dividends follow the implied identity and budget geometry is untouched:
  // same income cutoffs, same budget polytope vertices for every agent.
  CHECK(up.alpha == dividends_from(inst.economy, inst.allocation, up.P));
  for (std::size_t i = 0; i < inst.economy.n(); ++i) {
    CAPTURE(i);
    CHECK(income_cutoff(inst.economy, up, i) == income_cutoff(inst.economy, *inst.system, i));
    CHECK(budget_vertices(inst.economy, up, i) == budget_vertices(inst.economy, *inst.system, i));
  }
}

TEST_CASE("strengthening refuses unverifiable tuples") {
  fixtures::Instance inst = fixtures::two_tier_chain();
  LexPriceSystem broken = *inst.system;
  broken.alpha[1][2] = 0;
  StrengthenResult s = strengthen(inst.economy, inst.allocation, broken);
  CHECK(!s.ok);
  CHECK(!s.notes.empty());
}

}  // TEST_SUITE
