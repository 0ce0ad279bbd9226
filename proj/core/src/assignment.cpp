#include "lexmarket/assignment.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "lexmarket/vertex_enum.hpp"

namespace lexmarket {

namespace {

LinearProgram welfare_lp(const Economy& e, const RatVec& lambda, bool equality,
                         const std::vector<unsigned>& col_cap) {
  std::size_t n = e.n();
  if (lambda.size() != n) throw std::invalid_argument("welfare: lambda size mismatch");
  LinearProgram lp;
  lp.maximize = true;
  lp.c.assign(n * n, Rat(0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) lp.c[i * n + j] = lambda[i] * e.u[i][j];
  // agent rows
  for (std::size_t i = 0; i < n; ++i) {
    RatVec row(n * n, Rat(0));
    for (std::size_t j = 0; j < n; ++j) row[i * n + j] = 1;
    lp.add_row(row, equality ? RowSense::eq : RowSense::le, Rat(1));
  }
  // good columns
  for (std::size_t j = 0; j < n; ++j) {
    RatVec row(n * n, Rat(0));
    for (std::size_t i = 0; i < n; ++i) row[i * n + j] = 1;
    Rat cap = col_cap.empty() ? Rat(1) : Rat(static_cast<unsigned long>(col_cap[j]));
    lp.add_row(row, equality ? RowSense::eq : RowSense::le, cap);
  }
  return lp;
}

WelfareResult run_welfare(const Economy& e, const RatVec& lambda, bool equality,
                          const std::vector<unsigned>& col_cap) {
  std::size_t n = e.n();
  LinearProgram lp = welfare_lp(e, lambda, equality, col_cap);
  LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::optimal)
    throw std::logic_error("welfare assignment LP must be solvable");
  WelfareResult r;
  r.value = sol.objective;
  r.x.rows.assign(n, RatVec(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r.x.rows[i][j] = sol.x[i * n + j];
  r.agent_duals.assign(sol.y.begin(), sol.y.begin() + n);
  r.good_duals.assign(sol.y.begin() + n, sol.y.begin() + 2 * n);
  return r;
}

}  // namespace

WelfareResult max_welfare_assignment(const Economy& e, const RatVec& lambda) {
  return run_welfare(e, lambda, true, {});
}

WelfareResult max_welfare_capped(const Economy& e, const RatVec& lambda,
                                 const std::vector<unsigned>& col_cap) {
  return run_welfare(e, lambda, false, col_cap);
}

RatVec vcg_prices(const Economy& e, const RatVec& lambda) {
  std::size_t n = e.n();
  std::vector<unsigned> caps(n, 1);
  Rat base = max_welfare_capped(e, lambda, caps).value;
  RatVec p(n);
  for (std::size_t l = 0; l < n; ++l) {
    caps[l] = 2;
    p[l] = max_welfare_capped(e, lambda, caps).value - base;
    caps[l] = 1;
  }
  return p;
}

namespace {

// Max-weight perfect matching restricted to the support of x, smallest
// permutation in lexicographic order among maximizers. Exact, n <= 8.
std::optional<std::vector<std::size_t>> support_matching(const RatMat& x) {
  std::size_t n = x.size();
  std::vector<std::size_t> perm(n), best;
  std::iota(perm.begin(), perm.end(), 0);
  Rat best_w = 0;
  bool have = false;
  do {
    bool ok = true;
    Rat w = 0;
    for (std::size_t i = 0; i < n && ok; ++i) {
      if (x[i][perm[i]] == 0)
        ok = false;
      else
        w += x[i][perm[i]];
    }
    if (!ok) continue;
    if (!have || w > best_w) {
      have = true;
      best_w = w;
      best = perm;
    }
    // std::next_permutation yields ascending lexicographic order, so the
    // first maximizer seen is already the lexicographically least one.
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (!have) return std::nullopt;
  return best;
}

}  // namespace

std::vector<BvnTerm> bvn_decompose(const RatMat& x) {
  std::size_t n = x.size();
  if (n == 0) return {};
  if (n > 8) throw InstanceTooLarge("bvn_decompose capped at n = 8, got " + std::to_string(n));
  for (const auto& row : x)
    if (row.size() != n) throw std::invalid_argument("bvn_decompose: matrix not square");
  for (std::size_t i = 0; i < n; ++i) {
    Rat rs = 0, cs = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (x[i][j] < 0) throw std::invalid_argument("bvn_decompose: negative entry");
      rs += x[i][j];
      cs += x[j][i];
    }
    if (rs != 1 || cs != 1)
      throw std::invalid_argument("bvn_decompose: matrix is not doubly stochastic");
  }

  std::vector<BvnTerm> terms;
  RatMat rem = x;
  Rat total = 1;
  while (total > 0) {
    auto m = support_matching(rem);
    if (!m) throw std::logic_error("bvn_decompose: support lost a perfect matching");
    Rat t = rem[0][(*m)[0]];
    for (std::size_t i = 1; i < n; ++i) t = std::min(t, rem[i][(*m)[i]]);
    terms.push_back({t, *m});
    for (std::size_t i = 0; i < n; ++i) rem[i][(*m)[i]] -= t;
    total -= t;
  }

  // Caratheodory reduction: while the permutation matrices used are affinely
  // dependent, cancel one term exactly. Guarantees <= n^2 - 2n + 2 terms.
  auto reduce_once = [&]() -> bool {
    std::size_t k = terms.size();
    if (k < 2) return false;
    // Solve sum mu_t P_t = 0, sum mu_t = 0 for a nonzero mu: nullspace of a
    // (n^2 + 1) x k system.
    RatMat M(n * n + 1, RatVec(k, Rat(0)));
    for (std::size_t t = 0; t < k; ++t) {
      for (std::size_t i = 0; i < n; ++i) M[i * n + terms[t].perm[i]][t] = 1;
      M[n * n][t] = 1;
    }
    // Gaussian elimination to find a nullspace vector.
    std::vector<int> pivot_col_of_row;
    std::vector<bool> is_pivot(k, false);
    std::size_t row = 0;
    for (std::size_t col = 0; col < k && row < M.size(); ++col) {
      std::size_t pr = M.size();
      for (std::size_t r = row; r < M.size(); ++r)
        if (M[r][col] != 0) {
          pr = r;
          break;
        }
      if (pr == M.size()) continue;
      std::swap(M[pr], M[row]);
      Rat d = M[row][col];
      for (auto& v : M[row]) v /= d;
      for (std::size_t r = 0; r < M.size(); ++r) {
        if (r == row || M[r][col] == 0) continue;
        Rat f = M[r][col];
        for (std::size_t j = 0; j < k; ++j) M[r][j] -= f * M[row][j];
      }
      pivot_col_of_row.push_back(static_cast<int>(col));
      is_pivot[col] = true;
      ++row;
    }
    // free column -> nullspace vector
    std::size_t free_col = k;
    for (std::size_t col = 0; col < k; ++col)
      if (!is_pivot[col]) {
        free_col = col;
        break;
      }
    if (free_col == k) return false;  // independent: done
    RatVec mu(k, Rat(0));
    mu[free_col] = 1;
    for (std::size_t r = 0; r < pivot_col_of_row.size(); ++r)
      mu[pivot_col_of_row[r]] = -M[r][free_col];
    // Step to the boundary: max theta with weight - theta*mu >= 0.
    bool any_pos = false;
    Rat theta;
    std::size_t kill = k;
    for (std::size_t t = 0; t < k; ++t) {
      if (mu[t] > 0) {
        Rat cand = terms[t].weight / mu[t];
        if (!any_pos || cand < theta) {
          theta = cand;
          kill = t;
          any_pos = true;
        }
      }
    }
    if (!any_pos) {
      for (auto& v : mu) v = -v;
      for (std::size_t t = 0; t < k; ++t) {
        if (mu[t] > 0) {
          Rat cand = terms[t].weight / mu[t];
          if (!any_pos || cand < theta) {
            theta = cand;
            kill = t;
            any_pos = true;
          }
        }
      }
    }
    if (!any_pos) return false;
    for (std::size_t t = 0; t < k; ++t) terms[t].weight -= theta * mu[t];
    terms.erase(terms.begin() + static_cast<long>(kill));
    std::erase_if(terms, [](const BvnTerm& b) { return b.weight == 0; });
    return true;
  };
  while (terms.size() > n * n - 2 * n + 2 && reduce_once()) {
  }
  return terms;
}

}  // namespace lexmarket
