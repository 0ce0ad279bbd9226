#pragma once

#include <utility>
#include <vector>

#include "lexmarket/economy.hpp"
#include "lexmarket/lp.hpp"
#include "lexmarket/rational.hpp"

namespace lexmarket {

struct WelfareResult {
  Rat value;
  Allocation x;        // an optimal fractional assignment (vertex = permutation)
  RatVec agent_duals;  // one per agent row
  RatVec good_duals;   // one per good column
};

// max sum_i lambda_i * u_i . x_i over the fractional assignment polytope
// (row sums == 1, column sums == 1, x >= 0). Duals are returned and the
// (primal, dual) pair is verified exactly inside solve_lp.
WelfareResult max_welfare_assignment(const Economy& e, const RatVec& lambda);

// Same objective over the relaxed polytope: row sums <= 1, column j capacity
// col_cap[j] (the price probes use capacity 2 on one column, 1 elsewhere).
WelfareResult max_welfare_capped(const Economy& e, const RatVec& lambda,
                                 const std::vector<unsigned>& col_cap);

// Social-surplus price of each good: the welfare gain from one extra copy.
// p_l = [optimum with capacity 2 on column l] - [base optimum].
RatVec vcg_prices(const Economy& e, const RatVec& lambda);

struct BvnTerm {
  Rat weight;
  std::vector<std::size_t> perm;  // perm[i] = good given to agent i
};

// Exact Birkhoff decomposition of a doubly stochastic matrix: greedy peeling
// (max-weight support matching, lexicographically least among ties) followed
// by Caratheodory reduction, guaranteeing at most n^2 - 2n + 2 terms.
// Capped at n <= 8.
std::vector<BvnTerm> bvn_decompose(const RatMat& x);

}  // namespace lexmarket
