#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lexmarket/economy.hpp"
#include "lexmarket/lp.hpp"
#include "lexmarket/rational.hpp"

namespace lexmarket {

// Lexicographic price system: d currency rows of prices and dividends.
// P[k][j] is the price of good j in currency k; alpha[k][i] is agent i's
// dividend in currency k.
struct LexPriceSystem {
  RatMat P;
  RatMat alpha;

  std::size_t d() const { return P.size(); }
};

// Lexicographic comparison of cost profiles: a <=_lex b.
bool lex_leq(const RatVec& a, const RatVec& b);

// Dividends implied by the price rows: alpha[k][i] = max(p^k.(x_i - w_i), 0).
RatMat dividends_from(const Economy& e, const Allocation& x, const RatMat& P);

// First currency in which agent i has positive income (endowment value plus
// dividend), or d if there is none. 1-based like the currency count.
std::size_t income_cutoff(const Economy& e, const LexPriceSystem& sys, std::size_t agent);

// Whether bundle y satisfies agent i's budget constraints for currencies
// 1..k_i (the income cutoff) and lies in the sub-simplex.
bool budget_contains(const Economy& e, const LexPriceSystem& sys, std::size_t agent,
                     const RatVec& y);

struct DemandResult {
  Rat value;    // max utility over the budget set
  RatVec best;  // an optimal bundle (LP vertex)
};

// Utility maximization over agent i's budget set.
DemandResult demand(const Economy& e, const LexPriceSystem& sys, std::size_t agent);

struct CheckFailure {
  std::string what;
  std::optional<std::size_t> agent;
  std::optional<std::size_t> currency;          // 1-based
  std::optional<RatVec> witness_bundle;
  std::optional<Rat> witness_value;
};

struct VerificationReport {
  bool ok = true;
  std::vector<CheckFailure> failures;
  std::vector<std::size_t> income_cutoffs;  // k_i per agent
  RatMat implied_dividends;

  void fail(CheckFailure f) {
    ok = false;
    failures.push_back(std::move(f));
  }
};

// Full equilibrium check: allocation in the assignment polytope, first
// nonzero entry of every price column positive, dividends equal to the
// implied ones, and every agent's bundle utility-maximal in their budget set.
VerificationReport verify_lde(const Economy& e, const Allocation& x, const LexPriceSystem& sys);

// Strong cheapest-bundle property: for every agent and every currency k,
// no bundle weakly preferred to x_i is lexicographically cheaper: the LP
// min p^k.y s.t. u_i.y >= u_i.x_i, p^l.y = p^l.x_i (l < k) has optimum
// >= p^k.x_i (or is infeasible).
VerificationReport check_strong_cbp(const Economy& e, const Allocation& x,
                                    const LexPriceSystem& sys);

// Same test but only for currencies up to each agent's income cutoff.
VerificationReport check_weak_cbp(const Economy& e, const Allocation& x,
                                  const LexPriceSystem& sys);

// Aggregate (coalition-weighted) cheapest-bundle property per currency:
// convex combinations of preferred vertices that keep earlier-currency costs
// equal in aggregate and do not increase total consumption of goods priced
// in earlier currencies cannot lower the aggregate currency-k cost.
VerificationReport check_aggregate_cbp(const Economy& e, const Allocation& x,
                                       const LexPriceSystem& sys);

// Every good is priced in at most one currency.
bool check_simple_prices(const LexPriceSystem& sys, std::size_t* offending_good = nullptr);

}  // namespace lexmarket
