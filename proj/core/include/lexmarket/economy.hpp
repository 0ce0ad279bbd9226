#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lexmarket/rational.hpp"

namespace lexmarket {

// One-sided matching market with endowments: n agents, n unit-supply goods,
// linear utilities, endowment matrix whose rows live in the full simplex and
// whose columns each sum to 1.
struct Economy {
  std::vector<std::string> goods;        // size n
  std::vector<std::string> agent_names;  // size n
  RatMat u;                              // n x n utilities, u[i][j] >= 0
  RatMat omega;                          // n x n endowments

  std::size_t n() const { return goods.size(); }
};

// Fractional allocation: row i is agent i's lottery over goods.
struct Allocation {
  RatMat rows;  // n x n

  std::size_t n() const { return rows.size(); }
};

struct ValidationIssue {
  std::string what;
};

// Checks shape, non-negative utilities, endowment rows summing to 1 within
// the sub-simplex, and columns summing to 1. Empty result = valid.
std::vector<ValidationIssue> validate_economy(const Economy& e);

// Checks y >= 0, row sums <= 1, column sums <= 1 (sub-allocation) or == 1
// when `exact` — the fractional assignment polytope membership tests.
std::vector<ValidationIssue> validate_allocation(const Economy& e, const Allocation& x,
                                                 bool exact_column_sums = true);

// N-fold replica economy: every agent and every good is copied N times.
// Agent copy (i,m) keeps utilities over good copies (u over copies of j equals
// u[i][j]) and owns omega[i][j]/N of every copy of good j, so column sums stay 1.
Economy replicate(const Economy& e, unsigned N);

// Mixes every endowment row toward the uniform lottery: each row becomes
// eps * (1/n, ..., 1/n) + (1 - eps) * omega_i. Keeps column sums at 1 and
// makes every agent own a sliver of every good.
Economy perturb(const Economy& e, const Rat& eps);

// u_i . y
Rat utility(const Economy& e, std::size_t agent, const RatVec& bundle);

// Row of the allocation as a bundle.
inline const RatVec& bundle_of(const Allocation& x, std::size_t i) { return x.rows[i]; }

}  // namespace lexmarket
