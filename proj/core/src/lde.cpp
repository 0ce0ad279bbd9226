#include "lexmarket/lde.hpp"

#include <stdexcept>

#include "lexmarket/vertex_enum.hpp"

namespace lexmarket {

bool lex_leq(const RatVec& a, const RatVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("lex_leq: size mismatch");
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] < b[k]) return true;
    if (a[k] > b[k]) return false;
  }
  return true;  // equal
}

RatMat dividends_from(const Economy& e, const Allocation& x, const RatMat& P) {
  std::size_t n = e.n(), d = P.size();
  RatMat alpha(d, RatVec(n, Rat(0)));
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      Rat v = dot(P[k], x.rows[i]) - dot(P[k], e.omega[i]);
      alpha[k][i] = v > 0 ? v : Rat(0);
    }
  return alpha;
}

std::size_t income_cutoff(const Economy& e, const LexPriceSystem& sys, std::size_t agent) {
  std::size_t d = sys.d();
  for (std::size_t k = 0; k < d; ++k) {
    Rat income = dot(sys.P[k], e.omega[agent]) + sys.alpha[k][agent];
    if (income > 0) return k + 1;
  }
  return d;
}

bool budget_contains(const Economy& e, const LexPriceSystem& sys, std::size_t agent,
                     const RatVec& y) {
  std::size_t n = e.n();
  if (y.size() != n) return false;
  Rat mass = 0;
  for (const auto& v : y) {
    if (v < 0) return false;
    mass += v;
  }
  if (mass > 1) return false;
  std::size_t ki = income_cutoff(e, sys, agent);
  for (std::size_t k = 0; k < ki; ++k) {
    Rat income = dot(sys.P[k], e.omega[agent]) + sys.alpha[k][agent];
    if (dot(sys.P[k], y) > income) return false;
  }
  return true;
}

DemandResult demand(const Economy& e, const LexPriceSystem& sys, std::size_t agent) {
  std::size_t n = e.n();
  LinearProgram lp;
  lp.maximize = true;
  lp.c = e.u[agent];
  lp.add_row(RatVec(n, Rat(1)), RowSense::le, Rat(1));
  std::size_t ki = income_cutoff(e, sys, agent);
  for (std::size_t k = 0; k < ki; ++k) {
    Rat income = dot(sys.P[k], e.omega[agent]) + sys.alpha[k][agent];
    lp.add_row(sys.P[k], RowSense::le, income);
  }
  LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::optimal)
    throw std::logic_error("demand: budget LP must have an optimum");
  return {sol.objective, sol.x};
}

namespace {

bool system_shape_ok(const Economy& e, const LexPriceSystem& sys, VerificationReport& rep) {
  std::size_t n = e.n(), d = sys.d();
  if (d == 0) {
    rep.fail({"price system has no currency rows", {}, {}, {}, {}});
    return false;
  }
  if (sys.alpha.size() != d) {
    rep.fail({"dividend row count != currency count", {}, {}, {}, {}});
    return false;
  }
  for (std::size_t k = 0; k < d; ++k) {
    if (sys.P[k].size() != n || sys.alpha[k].size() != n) {
      rep.fail({"price/dividend row " + std::to_string(k + 1) + " has wrong width",
                {}, k + 1, {}, {}});
      return false;
    }
  }
  return true;
}

}  // namespace

VerificationReport verify_lde(const Economy& e, const Allocation& x, const LexPriceSystem& sys) {
  VerificationReport rep;
  std::size_t n = e.n();
  if (!system_shape_ok(e, sys, rep)) return rep;
  for (const auto& issue : validate_allocation(e, x))
    rep.fail({"allocation invalid: " + issue.what, {}, {}, {}, {}});
  if (!rep.ok) return rep;
  std::size_t d = sys.d();

  // (a) first nonzero entry of each price column must be positive
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < d; ++k) {
      if (sys.P[k][j] == 0) continue;
      if (sys.P[k][j] < 0)
        rep.fail({"price column for good " + std::to_string(j) +
                      " has a negative leading entry",
                  {}, k + 1, {}, {}});
      break;
    }
  }

  // (b) dividends must equal the implied ones
  rep.implied_dividends = dividends_from(e, x, sys.P);
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (sys.alpha[k][i] != rep.implied_dividends[k][i]) {
        CheckFailure f;
        f.what = "dividend mismatch: expected " + rat_to_string(rep.implied_dividends[k][i]) +
                 ", got " + rat_to_string(sys.alpha[k][i]);
        f.agent = i;
        f.currency = k + 1;
        rep.fail(std::move(f));
      }
  if (!rep.ok) return rep;

  // (c) every agent demands their bundle
  rep.income_cutoffs.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    rep.income_cutoffs[i] = income_cutoff(e, sys, i);
    if (!budget_contains(e, sys, i, x.rows[i])) {
      CheckFailure f;
      f.what = "allocated bundle is outside the budget set";
      f.agent = i;
      rep.fail(std::move(f));
      continue;
    }
    DemandResult dm = demand(e, sys, i);
    Rat have = utility(e, i, x.rows[i]);
    if (dm.value > have) {
      CheckFailure f;
      f.what = "bundle is not demand-optimal: budget set attains " + rat_to_string(dm.value) +
               " > " + rat_to_string(have);
      f.agent = i;
      f.witness_bundle = dm.best;
      f.witness_value = dm.value;
      rep.fail(std::move(f));
    }
  }
  return rep;
}

namespace {

VerificationReport run_cbp(const Economy& e, const Allocation& x, const LexPriceSystem& sys,
                           bool weak_only) {
  VerificationReport rep;
  std::size_t n = e.n();
  if (!system_shape_ok(e, sys, rep)) return rep;
  std::size_t d = sys.d();
  rep.income_cutoffs.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    rep.income_cutoffs[i] = income_cutoff(e, sys, i);
    std::size_t kmax = weak_only ? rep.income_cutoffs[i] : d;
    Rat have = utility(e, i, x.rows[i]);
    for (std::size_t k = 0; k < kmax; ++k) {
      LinearProgram lp;
      lp.maximize = false;
      lp.c = sys.P[k];
      lp.add_row(RatVec(n, Rat(1)), RowSense::le, Rat(1));
      lp.add_row(e.u[i], RowSense::ge, have);
      for (std::size_t l = 0; l < k; ++l)
        lp.add_row(sys.P[l], RowSense::eq, dot(sys.P[l], x.rows[i]));
      LpSolution sol = solve_lp(lp);
      if (sol.status == LpStatus::infeasible) continue;  // vacuous
      if (sol.status == LpStatus::unbounded)
        throw std::logic_error("cheapest-bundle LP cannot be unbounded over the simplex");
      Rat spend = dot(sys.P[k], x.rows[i]);
      if (sol.objective < spend) {
        CheckFailure f;
        f.what = "weakly preferred bundle is lexicographically cheaper: costs " +
                 rat_to_string(sol.objective) + " < " + rat_to_string(spend) +
                 " in currency " + std::to_string(k + 1);
        f.agent = i;
        f.currency = k + 1;
        f.witness_bundle = sol.x;
        f.witness_value = sol.objective;
        rep.fail(std::move(f));
      }
    }
  }
  return rep;
}

}  // namespace

VerificationReport check_strong_cbp(const Economy& e, const Allocation& x,
                                    const LexPriceSystem& sys) {
  return run_cbp(e, x, sys, false);
}

VerificationReport check_weak_cbp(const Economy& e, const Allocation& x,
                                  const LexPriceSystem& sys) {
  return run_cbp(e, x, sys, true);
}

VerificationReport check_aggregate_cbp(const Economy& e, const Allocation& x,
                                       const LexPriceSystem& sys) {
  VerificationReport rep;
  std::size_t n = e.n();
  if (!system_shape_ok(e, sys, rep)) return rep;
  std::size_t d = sys.d();

  // Preferred vertices of every agent, full support.
  std::vector<std::vector<RatVec>> verts(n);
  for (std::size_t i = 0; i < n; ++i)
    verts[i] = preferred_vertices(e, i, utility(e, i, x.rows[i]), {});

  for (std::size_t k = 0; k < d; ++k) {
    // goods already priced in currencies before k
    std::vector<bool> priced(n, false);
    for (std::size_t l = 0; l < k; ++l)
      for (std::size_t j = 0; j < n; ++j)
        if (sys.P[l][j] != 0) priced[j] = true;

    // variables: beta_{i,v} >= 0 per preferred vertex
    std::vector<std::pair<std::size_t, std::size_t>> cols;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t v = 0; v < verts[i].size(); ++v) cols.push_back({i, v});
    std::size_t nc = cols.size();
    LinearProgram lp;
    lp.maximize = false;
    lp.c.assign(nc, Rat(0));
    for (std::size_t cidx = 0; cidx < nc; ++cidx) {
      auto [i, v] = cols[cidx];
      lp.c[cidx] = dot(sys.P[k], verts[i][v]) - dot(sys.P[k], x.rows[i]);
    }
    // aggregate earlier-currency cost equality
    for (std::size_t l = 0; l < k; ++l) {
      RatVec row(nc);
      for (std::size_t cidx = 0; cidx < nc; ++cidx) {
        auto [i, v] = cols[cidx];
        row[cidx] = dot(sys.P[l], verts[i][v]) - dot(sys.P[l], x.rows[i]);
      }
      lp.add_row(row, RowSense::eq, Rat(0));
    }
    // consumption caps on earlier-priced goods
    for (std::size_t j = 0; j < n; ++j) {
      if (!priced[j]) continue;
      RatVec row(nc);
      for (std::size_t cidx = 0; cidx < nc; ++cidx) {
        auto [i, v] = cols[cidx];
        row[cidx] = verts[i][v][j] - x.rows[i][j];
      }
      lp.add_row(row, RowSense::le, Rat(0));
    }
    // convex combination
    lp.add_row(RatVec(nc, Rat(1)), RowSense::eq, Rat(1));
    LpSolution sol = solve_lp(lp);
    if (sol.status == LpStatus::infeasible) continue;  // vacuous for this currency
    if (sol.status == LpStatus::unbounded)
      throw std::logic_error("aggregate cheapest-bundle LP cannot be unbounded");
    if (sol.objective < 0) {
      CheckFailure f;
      f.what = "aggregate deviation lowers currency-" + std::to_string(k + 1) +
               " cost by " + rat_to_string(-sol.objective);
      f.currency = k + 1;
      f.witness_value = sol.objective;
      // Report the aggregate trade vector as the witness bundle.
      RatVec agg(n, Rat(0));
      for (std::size_t cidx = 0; cidx < nc; ++cidx) {
        auto [i, v] = cols[cidx];
        if (sol.x[cidx] == 0) continue;
        for (std::size_t j = 0; j < n; ++j)
          agg[j] += sol.x[cidx] * (verts[i][v][j] - x.rows[i][j]);
      }
      f.witness_bundle = agg;
      rep.fail(std::move(f));
    }
  }
  return rep;
}

bool check_simple_prices(const LexPriceSystem& sys, std::size_t* offending_good) {
  std::size_t d = sys.d();
  if (d == 0) return true;
  std::size_t n = sys.P[0].size();
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t nz = 0;
    for (std::size_t k = 0; k < d; ++k)
      if (sys.P[k][j] != 0) ++nz;
    if (nz > 1) {
      if (offending_good) *offending_good = j;
      return false;
    }
  }
  return true;
}

}  // namespace lexmarket
