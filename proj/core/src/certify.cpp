#include "lexmarket/certify.hpp"

#include <algorithm>
#include <stdexcept>

#include "lexmarket/lp.hpp"
#include "lexmarket/vertex_enum.hpp"

namespace lexmarket {

namespace {

enum class GenKind { trade, afford, funded };

// One separation generator: the named agent improves (weakly) by moving
// along z, so the row being built must satisfy p.z >= 0 (funded generators
// get capped-good dual relief in addition).
struct Generator {
  std::size_t agent;
  GenKind kind;
  RatVec z;
};

struct MasterOutcome {
  bool feasible = false;
  RatVec row;  // full-length price row (zeros off the free set)
};

std::vector<Generator> build_generators(const Economy& e, const Allocation& x,
                                        const std::vector<bool>& free_goods,
                                        const std::vector<bool>& funded) {
  std::size_t n = e.n();
  std::vector<Generator> gens;
  for (std::size_t i = 0; i < n; ++i) {
    Rat t = utility(e, i, x.rows[i]);
    if (!funded[i]) {
      Rat best = 0;
      bool any = false;
      for (std::size_t j = 0; j < n; ++j)
        if (free_goods[j] && (!any || e.u[i][j] > best)) {
          best = e.u[i][j];
          any = true;
        }
      bool can_gain = any && best > t;
      for (const RatVec& v : preferred_vertices(e, i, t, free_goods)) {
        gens.push_back({i, GenKind::trade, vec_sub(v, x.rows[i])});
        if (can_gain) gens.push_back({i, GenKind::afford, vec_sub(v, e.omega[i])});
      }
    } else {
      for (const RatVec& v : preferred_vertices(e, i, t, {}))
        gens.push_back({i, GenKind::funded, vec_sub(v, x.rows[i])});
    }
  }
  return gens;
}

// Solve for the lexicographically least normalized price row on the free
// goods satisfying every generator, with funded generators relaxed by free
// multipliers on earlier rows and shared nonnegative duals on priced goods.
MasterOutcome solve_master(const Economy& e, const std::vector<Generator>& gens,
                           const std::vector<bool>& free_goods, const RatMat& earlier_rows) {
  std::size_t n = e.n();
  std::vector<std::size_t> S;
  for (std::size_t j = 0; j < n; ++j)
    if (free_goods[j]) S.push_back(j);
  std::vector<std::size_t> off;
  for (std::size_t j = 0; j < n; ++j)
    if (!free_goods[j]) off.push_back(j);
  std::size_t L = earlier_rows.size();
  // variables: p (|S|), nu (L, free), mu (|off|)
  std::size_t nv = S.size() + L + off.size();
  LinearProgram lp;
  lp.maximize = false;
  lp.c.assign(nv, Rat(0));
  lp.free_var.assign(nv, false);
  for (std::size_t l = 0; l < L; ++l) lp.free_var[S.size() + l] = true;

  for (const Generator& g : gens) {
    RatVec row(nv, Rat(0));
    for (std::size_t a = 0; a < S.size(); ++a) row[a] = g.z[S[a]];
    if (g.kind == GenKind::funded) {
      for (std::size_t l = 0; l < L; ++l) row[S.size() + l] = dot(earlier_rows[l], g.z);
      for (std::size_t b = 0; b < off.size(); ++b) row[S.size() + L + b] = g.z[off[b]];
    }
    if (is_zero_vec(row)) continue;
    lp.add_row(row, RowSense::ge, Rat(0));
  }
  {
    RatVec row(nv, Rat(0));
    for (std::size_t a = 0; a < S.size(); ++a) row[a] = 1;
    lp.add_row(row, RowSense::eq, Rat(1));
  }
  MasterOutcome out;
  RatVec fixed(S.size());
  for (std::size_t a = 0; a < S.size(); ++a) {
    for (std::size_t q = 0; q < nv; ++q) lp.c[q] = 0;
    lp.c[a] = 1;
    LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::optimal) {
      if (a == 0 && sol.status == LpStatus::infeasible) return out;
      throw std::logic_error("lex-min price selection lost feasibility");
    }
    fixed[a] = sol.objective;
    RatVec row(nv, Rat(0));
    row[a] = 1;
    lp.add_row(row, RowSense::eq, sol.objective);
  }
  out.feasible = true;
  out.row.assign(n, Rat(0));
  for (std::size_t a = 0; a < S.size(); ++a) out.row[S[a]] = fixed[a];
  return out;
}

// Farkas-style witness for an infeasible master round: a convex combination
// of generators whose aggregate strictly frees every unpriced good while not
// increasing priced-good consumption or earlier-currency cost in aggregate.
struct ViolationOutcome {
  bool violated = false;
  std::vector<Rat> gamma;
};

ViolationOutcome solve_violation(const Economy& e, const std::vector<Generator>& gens,
                                 const std::vector<bool>& free_goods,
                                 const RatMat& earlier_rows) {
  std::size_t n = e.n();
  std::size_t ng = gens.size();
  // variables: gamma (ng), tau (free)
  LinearProgram lp;
  lp.maximize = true;
  lp.c.assign(ng + 1, Rat(0));
  lp.c[ng] = 1;
  lp.free_var.assign(ng + 1, false);
  lp.free_var[ng] = true;
  for (std::size_t j = 0; j < n; ++j) {
    if (!free_goods[j]) continue;
    RatVec row(ng + 1, Rat(0));
    for (std::size_t g = 0; g < ng; ++g) row[g] = gens[g].z[j];
    row[ng] = 1;
    lp.add_row(row, RowSense::le, Rat(0));
  }
  for (std::size_t l = 0; l < earlier_rows.size(); ++l) {
    RatVec row(ng + 1, Rat(0));
    for (std::size_t g = 0; g < ng; ++g)
      if (gens[g].kind == GenKind::funded) row[g] = dot(earlier_rows[l], gens[g].z);
    lp.add_row(row, RowSense::eq, Rat(0));
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (free_goods[j]) continue;
    RatVec row(ng + 1, Rat(0));
    for (std::size_t g = 0; g < ng; ++g)
      if (gens[g].kind == GenKind::funded) row[g] = gens[g].z[j];
    lp.add_row(row, RowSense::le, Rat(0));
  }
  lp.add_row([&] {
    RatVec row(ng + 1, Rat(1));
    row[ng] = 0;
    return row;
  }(), RowSense::eq, Rat(1));
  LpSolution sol = solve_lp(lp);
  ViolationOutcome out;
  if (sol.status != LpStatus::optimal || sol.objective <= 0) return out;
  out.violated = true;
  out.gamma.assign(sol.x.begin(), sol.x.begin() + static_cast<long>(ng));
  return out;
}

std::optional<CoalitionWitness> coalition_from_gamma(const Economy& e, const Allocation& x,
                                                     const std::vector<Generator>& gens,
                                                     const std::vector<Rat>& gamma) {
  std::size_t n = e.n();
  std::vector<bool> endow(n, false), alloc(n, false);
  for (std::size_t g = 0; g < gens.size(); ++g) {
    if (gamma[g] == 0) continue;
    if (gens[g].kind == GenKind::afford)
      endow[gens[g].agent] = true;
    else
      alloc[gens[g].agent] = true;
  }
  bool has_endow = std::find(endow.begin(), endow.end(), true) != endow.end();
  bool has_alloc = std::find(alloc.begin(), alloc.end(), true) != alloc.end();
  if (!has_endow && !has_alloc) return std::nullopt;
  if (has_endow) {
    if (auto w = check_coalition_pattern(e, x, endow, alloc, std::nullopt)) return w;
    // The affordability generators may be slack; retry with everyone trading.
    std::vector<bool> ally(n, true);
    if (auto w = check_coalition_pattern(e, x, endow, ally, std::nullopt)) return w;
  }
  std::vector<bool> none(n, false), ally(n, true);
  for (std::size_t i = 0; i < n; ++i) {
    if (!alloc[i]) continue;
    Rat t = utility(e, i, x.rows[i]);
    bool capable = false;
    for (std::size_t j = 0; j < n && !capable; ++j)
      if (e.u[i][j] > t) capable = true;
    if (!capable) continue;
    if (auto w = check_coalition_pattern(e, x, none, alloc, i)) return w;
    if (auto w = check_coalition_pattern(e, x, none, ally, i)) return w;
  }
  return std::nullopt;
}

}  // namespace

CertifyResult certify(const Economy& e, const Allocation& x) {
  std::size_t n = e.n();
  if (n > 8) throw InstanceTooLarge("certify capped at n = 8, got " + std::to_string(n));
  CertifyResult res;

  // Quick refutations: an agent preferring their endowment rejects alone; a
  // Pareto improvement rejects through the grand re-trading coalition.
  IrResult ir = is_ir(e, x);
  if (!ir.individually_rational) {
    std::vector<bool> endow(n, false), none(n, false);
    endow[*ir.agent] = true;
    if (auto w = check_coalition_pattern(e, x, endow, none, std::nullopt)) {
      res.status = CertifyStatus::refuted;
      res.witness = std::move(w);
      return res;
    }
  }
  FpoResult fpo = is_fpo(e, x);
  if (!fpo.efficient) {
    std::vector<bool> none(n, false), all(n, true);
    for (std::size_t i = 0; i < n; ++i) {
      if (fpo.gains[i] <= 0) continue;
      if (auto w = check_coalition_pattern(e, x, none, all, i)) {
        res.status = CertifyStatus::refuted;
        res.witness = std::move(w);
        return res;
      }
    }
  }

  std::vector<bool> free_goods(n, true), funded(n, false);
  RatMat rows;
  bool separation_failed = false;
  std::optional<CoalitionWitness> refutation;

  for (std::size_t round = 0; round < n; ++round) {
    bool any_free = std::find(free_goods.begin(), free_goods.end(), true) != free_goods.end();
    if (!any_free) break;
    // If no zero-income agent can still gain from free goods, the remaining
    // goods may stay unpriced forever.
    bool someone_wants = false;
    for (std::size_t i = 0; i < n && !someone_wants; ++i) {
      if (funded[i]) continue;
      Rat t = utility(e, i, x.rows[i]);
      for (std::size_t j = 0; j < n; ++j)
        if (free_goods[j] && e.u[i][j] > t) {
          someone_wants = true;
          break;
        }
    }
    if (!someone_wants) break;

    CertifyRound tr;
    for (std::size_t j = 0; j < n; ++j)
      if (free_goods[j]) tr.free_goods.push_back(j);
    for (std::size_t i = 0; i < n; ++i)
      if (funded[i]) tr.funded_agents.push_back(i);

    auto gens = build_generators(e, x, free_goods, funded);
    MasterOutcome mo = solve_master(e, gens, free_goods, rows);
    if (!mo.feasible) {
      separation_failed = true;
      auto vo = solve_violation(e, gens, free_goods, rows);
      if (vo.violated) refutation = coalition_from_gamma(e, x, gens, vo.gamma);
      if (!refutation)
        res.notes.push_back("separation failed in round " + std::to_string(round + 1) +
                            " but no pattern coalition confirmed");
      break;
    }
    tr.price_row = mo.row;
    res.rounds.push_back(std::move(tr));
    for (std::size_t i = 0; i < n; ++i) {
      if (funded[i]) continue;
      if (dot(mo.row, e.omega[i]) > 0 || dot(mo.row, x.rows[i]) > 0) funded[i] = true;
    }
    for (std::size_t j = 0; j < n; ++j)
      if (mo.row[j] > 0) free_goods[j] = false;
    rows.push_back(std::move(mo.row));
  }

  if (!separation_failed) {
    if (rows.empty()) rows.emplace_back(n, Rat(0));
    LexPriceSystem sys;
    sys.P = rows;
    sys.alpha = dividends_from(e, x, rows);
    bool ok = check_simple_prices(sys);
    if (!ok) res.notes.push_back("constructed rows are not simple");
    for (auto* check : {&verify_lde, &check_weak_cbp, &check_aggregate_cbp}) {
      if (!ok) break;
      VerificationReport rep = (*check)(e, x, sys);
      if (!rep.ok) {
        ok = false;
        for (const auto& f : rep.failures) res.notes.push_back(f.what);
      }
    }
    if (ok) {
      res.status = CertifyStatus::certified;
      res.system = std::move(sys);
      return res;
    }
  }

  if (!refutation) {
    // Definitive fallback: the full rejection search.
    RejectVerdict rv = reject_search(e, x, std::nullopt);
    if (rv.rejected) refutation = rv.witness;
  }
  if (refutation) {
    res.status = CertifyStatus::refuted;
    res.witness = std::move(refutation);
    return res;
  }
  res.status = CertifyStatus::inconclusive;
  if (res.notes.empty()) res.notes.push_back("no supporting system and no rejecting coalition");
  return res;
}

StrengthenResult strengthen(const Economy& e, const Allocation& x, const LexPriceSystem& sys) {
  std::size_t n = e.n();
  StrengthenResult out;
  std::size_t d = sys.d();
  std::vector<std::size_t> cutoff(n);
  for (std::size_t i = 0; i < n; ++i) cutoff[i] = income_cutoff(e, sys, i);

  // Budget-polytope vertex sets of the original system, for the invariance
  // check and for the adjustment constraints.
  auto budget_pref_vertices = [&](const LexPriceSystem& s, std::size_t i, bool preferred) {
    Polytope P;
    P.A.assign(1, RatVec(n, Rat(1)));
    P.b.assign(1, Rat(1));
    if (preferred) {
      RatVec row(n);
      for (std::size_t j = 0; j < n; ++j) row[j] = -e.u[i][j];
      P.add_le(row, -utility(e, i, x.rows[i]));
    }
    std::size_t ki = income_cutoff(e, s, i);
    for (std::size_t k = 0; k < ki; ++k) {
      Rat income = dot(s.P[k], e.omega[i]) + s.alpha[k][i];
      P.add_le(s.P[k], income);
    }
    P.add_nonnegativity();
    return enumerate_vertices(P);
  };

  RatMat q_rows = sys.P;
  out.adjustments.assign(d, RatVec(n, Rat(0)));
  for (std::size_t k = 0; k < d; ++k) {
    // The adjustment row may touch only goods already priced in an earlier
    // currency; goods still unpriced before currency k+1 keep their row-k
    // prices, so the first nonzero entry of every price column is preserved.
    std::vector<std::size_t> sup;
    for (std::size_t j = 0; j < n; ++j) {
      bool priced_earlier = false;
      for (std::size_t l = 0; l < k && !priced_earlier; ++l) priced_earlier = sys.P[l][j] != 0;
      if (priced_earlier) sup.push_back(j);
    }
    if (sup.empty()) continue;
    // constraints: (p^k + r).(v - x_i) >= 0 over the weakly preferred budget
    // vertices of every agent already funded in an earlier currency. Such
    // bundles are confined to earlier-priced goods plus the agent's own
    // currency, which is what makes the adjustment support sufficient.
    struct Con {
      RatVec z;
      Rat rhs;
    };
    std::vector<Con> cons;
    for (std::size_t i = 0; i < n; ++i) {
      bool funded_earlier = false;
      for (std::size_t l = 0; l < k && !funded_earlier; ++l)
        funded_earlier = dot(sys.P[l], e.omega[i]) + sys.alpha[l][i] > 0;
      if (!funded_earlier) continue;
      for (const RatVec& v : budget_pref_vertices(sys, i, true)) {
        RatVec z = vec_sub(v, x.rows[i]);
        cons.push_back({z, -dot(sys.P[k], z)});
      }
    }
    if (cons.empty()) continue;
    // variables: r+ (|sup|), r- (|sup|); minimize the L1 norm, then pick the
    // lexicographically least signed adjustment on the support.
    std::size_t nv = 2 * sup.size();
    LinearProgram lp;
    lp.maximize = false;
    lp.c.assign(nv, Rat(1));
    for (const Con& c : cons) {
      RatVec row(nv, Rat(0));
      bool nonzero = false;
      for (std::size_t a = 0; a < sup.size(); ++a) {
        row[a] = c.z[sup[a]];
        row[sup.size() + a] = -c.z[sup[a]];
        if (row[a] != 0) nonzero = true;
      }
      if (!nonzero && c.rhs > 0) {
        out.notes.push_back("agent constraint unsatisfiable by any adjustment in currency " +
                            std::to_string(k + 1));
        return out;
      }
      if (nonzero) lp.add_row(row, RowSense::ge, c.rhs);
    }
    LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::optimal) {
      out.notes.push_back("no adjustment exists for currency " + std::to_string(k + 1));
      return out;
    }
    {
      RatVec row(nv, Rat(1));
      lp.add_row(row, RowSense::eq, sol.objective);
    }
    RatVec r(sup.size());
    for (std::size_t a = 0; a < sup.size(); ++a) {
      for (std::size_t q = 0; q < nv; ++q) lp.c[q] = 0;
      lp.c[a] = 1;
      lp.c[sup.size() + a] = -1;
      LpSolution s2 = solve_lp(lp);
      if (s2.status != LpStatus::optimal)
        throw std::logic_error("adjustment tie-break lost feasibility");
      r[a] = s2.objective;
      RatVec row(nv, Rat(0));
      row[a] = 1;
      row[sup.size() + a] = -1;
      lp.add_row(row, RowSense::eq, s2.objective);
    }
    for (std::size_t a = 0; a < sup.size(); ++a) {
      out.adjustments[k][sup[a]] = r[a];
      q_rows[k][sup[a]] += r[a];
    }
  }

  LexPriceSystem strengthened;
  strengthened.P = q_rows;
  strengthened.alpha = dividends_from(e, x, q_rows);

  bool ok = true;
  VerificationReport ver = verify_lde(e, x, strengthened);
  if (!ver.ok) {
    ok = false;
    for (const auto& f : ver.failures) out.notes.push_back("verify: " + f.what);
  }
  VerificationReport strong = check_strong_cbp(e, x, strengthened);
  if (!strong.ok) {
    ok = false;
    for (const auto& f : strong.failures) out.notes.push_back("strong: " + f.what);
  }
  for (std::size_t i = 0; i < n && ok; ++i) {
    if (income_cutoff(e, strengthened, i) != cutoff[i]) {
      ok = false;
      out.notes.push_back("income cutoff changed for agent " + std::to_string(i));
      break;
    }
    auto before = budget_pref_vertices(sys, i, false);
    auto after = budget_pref_vertices(strengthened, i, false);
    if (before != after) {
      ok = false;
      out.notes.push_back("budget polytope changed for agent " + std::to_string(i));
    }
  }
  out.ok = ok;
  if (ok) out.strengthened = std::move(strengthened);
  return out;
}

}  // namespace lexmarket
