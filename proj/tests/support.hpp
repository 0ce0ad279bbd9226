#pragma once

// Shared helpers for the unit and integration test binaries: brute-force
// oracles, exact witness re-verification, and the property-suite drivers
// that both the doctest suites and the acceptance gate run.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "lexmarket/assignment.hpp"
#include "lexmarket/economy.hpp"
#include "lexmarket/lde.hpp"
#include "lexmarket/lp.hpp"
#include "lexmarket/rational.hpp"
#include "lexmarket/stability.hpp"
#include "lexmarket/vertex_enum.hpp"

namespace lexmarket {
namespace testsupport {

// ---------------------------------------------------------------------------
// Brute-force blocking oracle on the consumption grid {0, 1/12, ..., 1}
// ---------------------------------------------------------------------------

// All integer vectors of length n with non-negative entries summing to at
// most `steps` (grid bundles measured in twelfths).
inline std::vector<std::vector<int>> grid_bundles(std::size_t n, int steps) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(n, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t j, int left) {
    if (j + 1 == n) {
      for (int v = 0; v <= left; ++v) {
        cur[j] = v;
        out.push_back(cur);
      }
      cur[j] = 0;
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cur[j] = v;
      rec(j + 1, left - v);
    }
    cur[j] = 0;
  };
  rec(0, steps);
  return out;
}

// Decides whether any coalition can block `x` using bundles on the 1/12
// grid. All members but the last enumerate grid bundles; the last member's
// best bundle is greedy (grid steps all have equal mass, so taking goods in
// utility order is exactly optimal). Exact integer arithmetic throughout;
// meant for tiny economies with coarse rational data.
inline bool grid_blocks(const Economy& e, const Allocation& x, BlockMode mode) {
  const std::size_t n = e.n();
  constexpr int kSteps = 12;

  // Common denominators: L for endowments; the utility scale must absorb
  // both the utility and the allocation denominators because the comparison
  // target is the product u_i . x_i.
  mpz_class Lz = 1, Uz = 1, Xz = 1;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Lz = lcm(Lz, e.omega[i][j].get_den());
      Uz = lcm(Uz, e.u[i][j].get_den());
      Xz = lcm(Xz, x.rows[i][j].get_den());
    }
  const long L = Lz.get_si();
  const long scale = mpz_class(Uz * Xz).get_si();
  if (L > 100000 || scale > 100000) throw std::logic_error("grid oracle: data too fine");

  // Scaled utility coefficients and targets: compare sum_j uS[i][j] * B_j
  // (bundle B in twelfths) against 12 * scale * u_i . x_i.
  std::vector<std::vector<long>> uS(n, std::vector<long>(n));
  std::vector<long> target(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rat t = utility(e, i, x.rows[i]) * scale * 12;
    target[i] = mpz_class(t.get_num()).get_si();  // integral by choice of scale
    for (std::size_t j = 0; j < n; ++j) {
      Rat c = e.u[i][j] * scale;
      uS[i][j] = mpz_class(c.get_num()).get_si();
    }
  }

  auto bundles = grid_bundles(n, kSteps);

  // Greedy best utility for one agent given remaining supply (in L-scaled
  // twelfth units) and the grid constraint.
  auto greedy_best = [&](std::size_t agent, const std::vector<long>& rem) {
    std::vector<std::size_t> order(n);
    for (std::size_t j = 0; j < n; ++j) order[j] = j;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (uS[agent][a] != uS[agent][b]) return uS[agent][a] > uS[agent][b];
      return a < b;
    });
    long mass = kSteps, value = 0;
    for (std::size_t j : order) {
      if (mass == 0 || uS[agent][j] <= 0) break;
      long cap = rem[j] / L;  // floor to whole twelfths
      long take = std::min(cap, mass);
      value += uS[agent][j] * take;
      mass -= take;
    }
    return value;
  };

  std::vector<std::size_t> coalition;
  // Recursive check for one coalition with a given strictness pattern:
  // need[i] = 1 means member must strictly gain, 0 means weakly.
  std::function<bool(std::size_t, std::vector<long>&, const std::vector<int>&)> fill =
      [&](std::size_t idx, std::vector<long>& rem, const std::vector<int>& need) -> bool {
    std::size_t agent = coalition[idx];
    if (idx + 1 == coalition.size()) {
      long best = greedy_best(agent, rem);
      return need[idx] ? best > target[agent] : best >= target[agent];
    }
    for (const auto& B : bundles) {
      long val = 0;
      bool fits = true;
      for (std::size_t j = 0; j < n && fits; ++j) fits = B[j] * L <= rem[j];
      if (!fits) continue;
      for (std::size_t j = 0; j < n; ++j) val += uS[agent][j] * B[j];
      if (need[idx] ? val <= target[agent] : val < target[agent]) continue;
      for (std::size_t j = 0; j < n; ++j) rem[j] -= B[j] * L;
      bool ok = fill(idx + 1, rem, need);
      for (std::size_t j = 0; j < n; ++j) rem[j] += B[j] * L;
      if (ok) return true;
    }
    return false;
  };

  bool found = false;
  for (unsigned mask = 1; mask < (1u << n) && !found; ++mask) {
    coalition.clear();
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) coalition.push_back(i);
    std::vector<long> supply(n, 0);
    for (std::size_t i : coalition)
      for (std::size_t j = 0; j < n; ++j) {
        Rat s = e.omega[i][j] * 12 * L;
        supply[j] += mpz_class(s.get_num()).get_si();
      }
    if (mode == BlockMode::strong_blocking) {
      std::vector<int> need(coalition.size(), 1);
      std::vector<long> rem = supply;
      found = fill(0, rem, need);
    } else {
      for (std::size_t s = 0; s < coalition.size() && !found; ++s) {
        std::vector<int> need(coalition.size(), 0);
        need[s] = 1;
        std::vector<long> rem = supply;
        found = fill(0, rem, need);
      }
    }
  }
  return found;
}

// ---------------------------------------------------------------------------
// Rejecting-coalition re-verification in exact arithmetic
// ---------------------------------------------------------------------------

// Re-checks a rejecting coalition from first principles. Fractional
// witnesses are scaled by the lcm of their weight denominators to integer
// copy counts; the returned value is the replica level at which the integer
// coalition fits (max total copies of any one agent). Returns nullopt if any
// feasibility or preference condition fails.
inline std::optional<unsigned> reverify_rejection(const Economy& e, const Allocation& x,
                                                  const CoalitionWitness& w) {
  const std::size_t n = e.n();
  if (w.members.empty()) return std::nullopt;

  std::vector<unsigned long> copies(w.members.size(), 0);
  unsigned long level = 0;
  if (w.replicas) {
    level = *w.replicas;
    for (std::size_t m = 0; m < w.members.size(); ++m) {
      if (w.members[m].multiplicity == 0) return std::nullopt;
      copies[m] = w.members[m].multiplicity;
    }
  } else {
    mpz_class L = 1;
    for (const auto& m : w.members) {
      if (m.weight <= 0) return std::nullopt;
      L = lcm(L, m.weight.get_den());
    }
    for (std::size_t m = 0; m < w.members.size(); ++m) {
      Rat c = w.members[m].weight * Rat(L);
      copies[m] = mpz_class(c.get_num()).get_ui();
      if (copies[m] == 0) return std::nullopt;
    }
  }
  std::vector<unsigned long> per_agent(n, 0);
  for (std::size_t m = 0; m < w.members.size(); ++m) per_agent[w.members[m].agent] += copies[m];
  for (unsigned long c : per_agent) level = std::max(level, c);
  if (level == 0) return std::nullopt;

  // Resource balance: total consumption within total brought resources.
  for (std::size_t j = 0; j < n; ++j) {
    Rat used = 0, brought = 0;
    for (std::size_t m = 0; m < w.members.size(); ++m) {
      const RejectMember& mem = w.members[m];
      if (mem.bundle.size() != n) return std::nullopt;
      used += Rat(copies[m]) * mem.bundle[j];
      const RatVec& res = mem.role == RejectRole::endowment ? e.omega[mem.agent] : x.rows[mem.agent];
      brought += Rat(copies[m]) * res[j];
    }
    if (used > brought) return std::nullopt;
  }

  // Bundles live in the sub-simplex; preference conditions per role.
  bool has_endow = false, has_strict = false;
  for (const auto& mem : w.members) {
    Rat mass = 0;
    for (const Rat& v : mem.bundle) {
      if (v < 0) return std::nullopt;
      mass += v;
    }
    if (mass > 1) return std::nullopt;
    Rat gain = utility(e, mem.agent, mem.bundle) - utility(e, mem.agent, x.rows[mem.agent]);
    if (mem.role == RejectRole::endowment) {
      has_endow = true;
      if (gain <= 0) return std::nullopt;
      has_strict = true;
    } else {
      if (gain < 0) return std::nullopt;
      if (gain > 0) has_strict = true;
    }
  }
  if (!has_endow && !has_strict) return std::nullopt;
  return static_cast<unsigned>(level);
}

// ---------------------------------------------------------------------------
// Property-suite drivers
// ---------------------------------------------------------------------------

// Membership chain: rejective-core (every level) => stable => weak core.
inline bool hierarchy_chain_ok(const Economy& e, const Allocation& x) {
  bool weak_core = !block_search(e, x, BlockMode::strong_blocking).has_value();
  bool stable = is_stable(e, x).stable;
  bool rejective = !reject_search(e, x, std::nullopt).rejected;
  if (rejective && !stable) return false;
  if (stable && !weak_core) return false;
  return true;
}

// On a tuple passing the strong cheapest-bundle property, an agent holds and
// receives nothing of any good priced strictly before their income cutoff.
inline bool zero_holdings_ok(const Economy& e, const Allocation& x, const LexPriceSystem& sys) {
  const std::size_t n = e.n();
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t kj = 0;  // 1-based pricing currency of good j, 0 = unpriced
    for (std::size_t k = 0; k < sys.d() && kj == 0; ++k)
      if (sys.P[k][j] != 0) kj = k + 1;
    if (kj == 0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t ki = income_cutoff(e, sys, i);
      if (kj < ki && (x.rows[i][j] != 0 || e.omega[i][j] != 0)) return false;
    }
  }
  return true;
}

// Vertex set of agent i's truncated budget polytope under `sys`.
inline std::vector<RatVec> budget_vertices(const Economy& e, const LexPriceSystem& sys,
                                           std::size_t i) {
  const std::size_t n = e.n();
  std::size_t ki = income_cutoff(e, sys, i);
  Polytope poly;
  RatVec mass(n, Rat(1));
  poly.add_le(mass, Rat(1));
  for (std::size_t k = 0; k < ki; ++k)
    poly.add_le(sys.P[k], dot(sys.P[k], e.omega[i]) + sys.alpha[k][i]);
  poly.add_nonnegativity();
  return enumerate_vertices(poly);
}

// Exact Birkhoff round trip with the quadratic term bound.
inline bool bvn_roundtrip_ok(const RatMat& m) {
  const std::size_t n = m.size();
  auto terms = bvn_decompose(m);
  if (terms.size() > n * n - 2 * n + 2) return false;
  RatMat sum(n, RatVec(n, Rat(0)));
  Rat total = 0;
  for (const auto& term : terms) {
    if (term.weight <= 0) return false;
    total += term.weight;
    for (std::size_t i = 0; i < n; ++i) sum[i][term.perm[i]] += term.weight;
  }
  if (total != 1) return false;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (sum[i][j] != m[i][j]) return false;
  return true;
}

// Deterministic random linear program with mixed senses and sign constraints.
inline LinearProgram random_lp(unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> coef(-3, 3);
  std::uniform_int_distribution<int> nv_d(2, 5), rows_d(2, 5), sense_d(0, 2), bern(0, 3);
  LinearProgram lp;
  std::size_t nv = static_cast<std::size_t>(nv_d(rng));
  std::size_t rows = static_cast<std::size_t>(rows_d(rng));
  lp.maximize = bern(rng) != 0;
  lp.c.assign(nv, Rat(0));
  for (auto& v : lp.c) v = coef(rng);
  lp.free_var.assign(nv, false);
  for (std::size_t j = 0; j < nv; ++j) lp.free_var[j] = bern(rng) == 0;
  for (std::size_t r = 0; r < rows; ++r) {
    RatVec row(nv);
    for (auto& v : row) v = coef(rng);
    int which = sense_d(rng);
    RowSense s = which == 0 ? RowSense::eq : (which == 1 ? RowSense::ge : RowSense::le);
    lp.add_row(row, s, Rat(coef(rng)));
  }
  return lp;
}

// Solves a random program and verifies the certificate matching its status.
inline bool lp_certificate_ok(const LinearProgram& lp) {
  LpSolution sol = solve_lp(lp);
  switch (sol.status) {
    case LpStatus::optimal:
      return lp_primal_feasible(lp, sol.x) && lp_certifies_optimal(lp, sol);
    case LpStatus::infeasible:
      return lp_certifies_infeasible(lp, sol.farkas);
    case LpStatus::unbounded:
      return lp_certifies_unbounded(lp, sol.x, sol.ray);
  }
  return false;
}

}  // namespace testsupport
}  // namespace lexmarket
