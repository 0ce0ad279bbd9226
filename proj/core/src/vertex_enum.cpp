#include "lexmarket/vertex_enum.hpp"

#include <algorithm>
#include <optional>
#include <set>

namespace lexmarket {

void Polytope::add_le(const RatVec& row, const Rat& rhs) {
  A.push_back(row);
  b.push_back(rhs);
}

void Polytope::add_eq(const RatVec& row, const Rat& rhs) {
  E.push_back(row);
  f.push_back(rhs);
}

void Polytope::add_nonnegativity() {
  std::size_t d = dim();
  for (std::size_t j = 0; j < d; ++j) {
    RatVec row(d, Rat(0));
    row[j] = -1;
    add_le(row, Rat(0));
  }
}

namespace {

// Gaussian elimination; returns empty if the square system is singular.
std::optional<RatVec> solve_square(RatMat M, RatVec rhs) {
  std::size_t n = rhs.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = n;
    for (std::size_t r = col; r < n; ++r)
      if (M[r][col] != 0) {
        piv = r;
        break;
      }
    if (piv == n) return std::nullopt;
    std::swap(M[piv], M[col]);
    std::swap(rhs[piv], rhs[col]);
    Rat d = M[col][col];
    for (std::size_t j = col; j < n; ++j) M[col][j] /= d;
    rhs[col] /= d;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || M[r][col] == 0) continue;
      Rat f = M[r][col];
      for (std::size_t j = col; j < n; ++j) M[r][j] -= f * M[col][j];
      rhs[r] -= f * rhs[col];
    }
  }
  return rhs;
}

// Row-reduce the equality system to an independent subset; returns indices
// of independent rows, or nullopt if the system is inconsistent.
std::optional<std::vector<std::size_t>> independent_equalities(const RatMat& E, const RatVec& f) {
  std::vector<std::size_t> keep;
  RatMat R;   // reduced rows
  RatVec rf;  // reduced rhs
  std::size_t d = E.empty() ? 0 : E[0].size();
  for (std::size_t i = 0; i < E.size(); ++i) {
    RatVec row = E[i];
    Rat rhs = f[i];
    for (std::size_t k = 0; k < R.size(); ++k) {
      // eliminate using pivot of R[k]
      std::size_t p = 0;
      while (p < d && R[k][p] == 0) ++p;
      if (p == d) continue;
      if (row[p] != 0) {
        Rat fac = row[p] / R[k][p];
        for (std::size_t j = 0; j < d; ++j) row[j] -= fac * R[k][j];
        rhs -= fac * rf[k];
      }
    }
    bool zero = true;
    for (const auto& v : row)
      if (v != 0) {
        zero = false;
        break;
      }
    if (zero) {
      if (rhs != 0) return std::nullopt;  // inconsistent
      continue;
    }
    R.push_back(row);
    rf.push_back(rhs);
    keep.push_back(i);
  }
  return keep;
}

}  // namespace

std::vector<RatVec> enumerate_vertices(const Polytope& P) {
  std::size_t d = P.dim();
  if (d == 0) return {};
  if (d > 8) throw InstanceTooLarge("vertex enumeration capped at dimension 8, got " +
                                    std::to_string(d));
  auto indep = independent_equalities(P.E, P.f);
  if (!indep) return {};  // inconsistent equalities: empty polytope
  std::vector<std::size_t> eq_rows = *indep;
  if (eq_rows.size() > d) return {};
  std::size_t need = d - eq_rows.size();
  std::size_t m = P.A.size();
  if (need > m) return {};

  std::set<RatVec> found;
  // iterate over all `need`-subsets of the inequality rows
  std::vector<std::size_t> idx(need);
  for (std::size_t i = 0; i < need; ++i) idx[i] = i;
  auto advance = [&]() -> bool {
    if (need == 0) return false;
    std::size_t i = need;
    while (i-- > 0) {
      if (idx[i] + (need - i) <= m - 1 + 0) {
        ++idx[i];
        for (std::size_t j = i + 1; j < need; ++j) idx[j] = idx[j - 1] + 1;
        return true;
      }
    }
    return false;
  };
  bool more = true;
  if (need > 0 && idx[need - 1] >= m) more = false;
  while (more) {
    RatMat M;
    RatVec rhs;
    M.reserve(d);
    for (std::size_t r : eq_rows) {
      M.push_back(P.E[r]);
      rhs.push_back(P.f[r]);
    }
    for (std::size_t k = 0; k < need; ++k) {
      M.push_back(P.A[idx[k]]);
      rhs.push_back(P.b[idx[k]]);
    }
    auto pt = solve_square(std::move(M), std::move(rhs));
    if (pt) {
      bool feas = true;
      for (std::size_t r = 0; r < P.A.size() && feas; ++r)
        if (dot(P.A[r], *pt) > P.b[r]) feas = false;
      for (std::size_t r = 0; r < P.E.size() && feas; ++r)
        if (dot(P.E[r], *pt) != P.f[r]) feas = false;
      if (feas) found.insert(*pt);
    }
    more = advance();
  }
  std::vector<RatVec> out(found.begin(), found.end());
  std::sort(out.begin(), out.end(), lex_less);
  return out;
}

std::vector<RatVec> preferred_vertices(const Economy& e, std::size_t agent, const Rat& t,
                                       const std::vector<bool>& support) {
  std::size_t n = e.n();
  std::vector<std::size_t> live;
  for (std::size_t j = 0; j < n; ++j)
    if (support.empty() || support[j]) live.push_back(j);
  std::size_t d = live.size();
  Polytope P;
  P.A.reserve(2 * d + 2);
  // mass constraint
  P.add_le(RatVec(d, Rat(1)), Rat(1));
  // -u . y <= -t
  {
    RatVec row(d);
    for (std::size_t k = 0; k < d; ++k) row[k] = -e.u[agent][live[k]];
    P.add_le(row, Rat(-t));
  }
  P.add_nonnegativity();
  std::vector<RatVec> verts = enumerate_vertices(P);
  std::vector<RatVec> full;
  full.reserve(verts.size());
  for (const auto& v : verts) {
    RatVec y(n, Rat(0));
    for (std::size_t k = 0; k < d; ++k) y[live[k]] = v[k];
    full.push_back(std::move(y));
  }
  std::sort(full.begin(), full.end(), lex_less);
  return full;
}

}  // namespace lexmarket
