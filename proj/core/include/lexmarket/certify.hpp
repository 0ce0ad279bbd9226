#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lexmarket/economy.hpp"
#include "lexmarket/lde.hpp"
#include "lexmarket/rational.hpp"
#include "lexmarket/stability.hpp"

namespace lexmarket {

enum class CertifyStatus {
  certified,     // a simple lexicographic price system supports x
  refuted,       // a replica coalition rejects x (witness attached)
  inconclusive,  // neither could be established (should not occur; see notes)
};

// One currency-construction round: the still-unpriced goods and the agents
// already funded at entry, and the price row that was selected.
struct CertifyRound {
  std::vector<std::size_t> free_goods;
  std::vector<std::size_t> funded_agents;
  RatVec price_row;
};

struct CertifyResult {
  CertifyStatus status = CertifyStatus::inconclusive;
  std::optional<LexPriceSystem> system;     // set when certified
  std::optional<CoalitionWitness> witness;  // set when refuted
  std::vector<CertifyRound> rounds;
  std::vector<std::string> notes;
};

// Decides rejective-core membership constructively. Builds price rows one
// currency at a time: each round solves for a row supported on the still-free
// goods under which no zero-income agent can cheapen or afford a weakly
// preferred bundle, with funded agents entering through capped re-trade
// duals. Success yields a simple price system whose implied dividends make
// (x, P, alpha) a full equilibrium passing the weak and aggregate
// cheapest-bundle properties; failure is converted into a rejecting replica
// coalition via the separation certificate. Capped at n <= 8.
CertifyResult certify(const Economy& e, const Allocation& x);

struct StrengthenResult {
  bool ok = false;
  std::optional<LexPriceSystem> strengthened;
  RatMat adjustments;  // per currency, the row added to the original prices
  std::vector<std::string> notes;
};

// Upgrades a verified system to one passing the strong cheapest-bundle
// property without changing budget sets: per currency, adds the L1-minimal
// (then lexicographically least) adjustment supported on goods priced in
// earlier currencies, under which every weakly preferred budget vertex of
// every earlier-funded agent costs at least its assigned bundle. Verifies
// that budget polytopes and income cutoffs are unchanged and the strong
// property holds; ok=false with notes otherwise.
StrengthenResult strengthen(const Economy& e, const Allocation& x, const LexPriceSystem& sys);

}  // namespace lexmarket
