#include "lexmarket/economy.hpp"

namespace lexmarket {

std::vector<ValidationIssue> validate_economy(const Economy& e) {
  std::vector<ValidationIssue> out;
  std::size_t n = e.n();
  if (n == 0) {
    out.push_back({"economy has no goods"});
    return out;
  }
  if (e.agent_names.size() != n)
    out.push_back({"agent count != good count (square market required)"});
  if (e.u.size() != e.agent_names.size()) out.push_back({"utility row count mismatch"});
  if (e.omega.size() != e.agent_names.size()) out.push_back({"endowment row count mismatch"});
  for (std::size_t i = 0; i < e.u.size(); ++i) {
    if (e.u[i].size() != n) out.push_back({"utility row " + std::to_string(i) + " has wrong width"});
    for (std::size_t j = 0; j < e.u[i].size(); ++j)
      if (e.u[i][j] < 0)
        out.push_back({"negative utility at agent " + std::to_string(i) + ", good " + std::to_string(j)});
  }
  for (std::size_t i = 0; i < e.omega.size(); ++i) {
    if (e.omega[i].size() != n) {
      out.push_back({"endowment row " + std::to_string(i) + " has wrong width"});
      continue;
    }
    Rat row_sum = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (e.omega[i][j] < 0)
        out.push_back({"negative endowment at agent " + std::to_string(i) + ", good " + std::to_string(j)});
      row_sum += e.omega[i][j];
    }
    if (row_sum > 1)
      out.push_back({"endowment row " + std::to_string(i) + " sums to more than 1"});
  }
  if (e.omega.size() == n) {
    for (std::size_t j = 0; j < n; ++j) {
      Rat col = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (e.omega[i].size() == n) col += e.omega[i][j];
      if (col != 1)
        out.push_back({"endowment column for good " + std::to_string(j) + " sums to " +
                       rat_to_string(col) + ", expected 1"});
    }
  }
  return out;
}

std::vector<ValidationIssue> validate_allocation(const Economy& e, const Allocation& x,
                                                 bool exact_column_sums) {
  std::vector<ValidationIssue> out;
  std::size_t n = e.n();
  if (x.rows.size() != n) {
    out.push_back({"allocation row count != n"});
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (x.rows[i].size() != n) {
      out.push_back({"allocation row " + std::to_string(i) + " has wrong width"});
      continue;
    }
    Rat row = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (x.rows[i][j] < 0)
        out.push_back({"negative entry at agent " + std::to_string(i) + ", good " + std::to_string(j)});
      row += x.rows[i][j];
    }
    if (row > 1)
      out.push_back({"allocation row " + std::to_string(i) + " sums to more than 1"});
  }
  for (std::size_t j = 0; j < n && x.rows.size() == n; ++j) {
    Rat col = 0;
    bool ok = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (x.rows[i].size() != n) {
        ok = false;
        break;
      }
      col += x.rows[i][j];
    }
    if (!ok) continue;
    if (exact_column_sums) {
      if (col != 1)
        out.push_back({"allocation column for good " + std::to_string(j) + " sums to " +
                       rat_to_string(col) + ", expected 1"});
    } else if (col > 1) {
      out.push_back({"allocation column for good " + std::to_string(j) + " sums to more than 1"});
    }
  }
  return out;
}

Economy replicate(const Economy& e, unsigned N) {
  if (N == 0) throw std::invalid_argument("replicate: N must be positive");
  std::size_t n = e.n();
  Economy r;
  r.goods.reserve(n * N);
  r.agent_names.reserve(n * N);
  for (unsigned m = 0; m < N; ++m)
    for (std::size_t j = 0; j < n; ++j)
      r.goods.push_back(e.goods[j] + "#" + std::to_string(m + 1));
  for (unsigned m = 0; m < N; ++m)
    for (std::size_t i = 0; i < n; ++i)
      r.agent_names.push_back(e.agent_names[i] + "#" + std::to_string(m + 1));
  Rat share = Rat(1, static_cast<unsigned long>(N));
  r.u.assign(n * N, RatVec(n * N));
  r.omega.assign(n * N, RatVec(n * N));
  for (unsigned mi = 0; mi < N; ++mi)
    for (std::size_t i = 0; i < n; ++i)
      for (unsigned mj = 0; mj < N; ++mj)
        for (std::size_t j = 0; j < n; ++j) {
          r.u[mi * n + i][mj * n + j] = e.u[i][j];
          r.omega[mi * n + i][mj * n + j] = e.omega[i][j] * share;
        }
  return r;
}

Economy perturb(const Economy& e, const Rat& eps) {
  if (eps < 0 || eps > 1) throw std::invalid_argument("perturb: eps outside [0,1]");
  Economy r = e;
  std::size_t n = e.n();
  Rat unif = eps / Rat(static_cast<unsigned long>(n));
  Rat keep = Rat(1) - eps;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r.omega[i][j] = unif + keep * e.omega[i][j];
  return r;
}

Rat utility(const Economy& e, std::size_t agent, const RatVec& bundle) {
  return dot(e.u[agent], bundle);
}

}  // namespace lexmarket
