#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lexmarket/economy.hpp"
#include "lexmarket/lde.hpp"

namespace lexmarket {
namespace fixtures {

// A pinned benchmark instance: an economy together with a reference
// allocation and, when one is known in closed form, a reference
// lexicographic price system for that allocation.
struct Instance {
  std::string name;
  Economy economy;
  Allocation allocation;
  std::optional<LexPriceSystem> system;
};

// Eight agents, eight unit goods: two replicas of a four-agent market whose
// goods were split into unit-supply copies. The reference allocation is
// stable (no endowment-only or allocation-only blocking coalition), yet a
// mixed coalition in the two-fold replica rejects it. No price system.
Instance stable_yet_rejectable();

// Three agents, one scarce good A and two copies B1, B2 of a plentiful
// good, identical endowments. No competitive equilibrium exists; the
// reference tuple is a single-currency system pricing only A, with
// dividends funding the two A-lovers' half shares.
Instance satiation_surplus();

// Three agents, three goods, good A unboundedly more valuable than B and
// C. The reference tuple prices A in currency 1 and B in currency 2 and
// pays the C-holder a dividend in currency 2. delta = 1/10 in utilities.
Instance two_tier_chain();

// Six agents, six goods (two A copies, B, C, two D copies), delta = 1/10.
// The reference tuple uses three currencies pricing A, B, C respectively,
// with second- and third-currency dividends flowing between agents who all
// hold first-currency wealth.
Instance three_tier_chain();

// Same economy as three_tier_chain() with a two-currency reference tuple
// that prices A and B together in the first currency. Demand optimality and
// the weak cheapest-bundle property hold, but the strong cheapest-bundle
// property fails (agent 3 can rebalance B against C at equal first-currency
// cost), which exercises honest negative verdicts.
Instance two_tier_merged();

// eps-perturbed variant of two_tier_chain()'s economy in which a single
// currency clears the market: prices (1, 4*eps, 0), no dividends. Demand
// optimality of the reference tuple holds only at eps = 1/8 (agent 1's
// bang-per-coin on A and B ties exactly there). Requires 0 < eps < 1/4.
Instance perturbed_competitive(const Rat& eps);

// The six instances above, with eps = 1/8 for the perturbed one.
std::vector<Instance> all_instances();

// Deterministic pseudo-random economy on a coarse rational grid: utilities
// are integers in [0, 4]; the endowment matrix is a mixture of three
// permutation matrices with small positive rational weights, hence exactly
// doubly stochastic.
Economy random_economy(unsigned seed, std::size_t n);

// Deterministic pseudo-random allocation for an n-agent economy, built the
// same way as the random endowments.
Allocation random_allocation(unsigned seed, std::size_t n);

}  // namespace fixtures
}  // namespace lexmarket
