#include "lexmarket/stability.hpp"

#include <algorithm>
#include <stdexcept>

#include "lexmarket/lp.hpp"
#include "lexmarket/vertex_enum.hpp"

namespace lexmarket {

FpoResult is_fpo(const Economy& e, const Allocation& x) {
  std::size_t n = e.n();
  // vars: y (n*n), t (n); max sum t s.t. u_i.y_i - t_i >= u_i.x_i, y in the
  // assignment polytope, t >= 0.
  LinearProgram lp;
  lp.maximize = true;
  lp.c.assign(n * n + n, Rat(0));
  for (std::size_t i = 0; i < n; ++i) lp.c[n * n + i] = 1;
  for (std::size_t i = 0; i < n; ++i) {
    RatVec row(n * n + n, Rat(0));
    for (std::size_t j = 0; j < n; ++j) row[i * n + j] = e.u[i][j];
    row[n * n + i] = -1;
    lp.add_row(row, RowSense::ge, utility(e, i, x.rows[i]));
  }
  for (std::size_t i = 0; i < n; ++i) {
    RatVec row(n * n + n, Rat(0));
    for (std::size_t j = 0; j < n; ++j) row[i * n + j] = 1;
    lp.add_row(row, RowSense::eq, Rat(1));
  }
  for (std::size_t j = 0; j < n; ++j) {
    RatVec row(n * n + n, Rat(0));
    for (std::size_t i = 0; i < n; ++i) row[i * n + j] = 1;
    lp.add_row(row, RowSense::eq, Rat(1));
  }
  LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::optimal) throw std::logic_error("is_fpo: LP must be solvable");
  FpoResult r;
  r.efficient = sol.objective == 0;
  if (!r.efficient) {
    Allocation dom;
    dom.rows.assign(n, RatVec(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) dom.rows[i][j] = sol.x[i * n + j];
    r.dominating = std::move(dom);
    r.gains.assign(sol.x.begin() + static_cast<long>(n * n), sol.x.end());
  }
  return r;
}

IrResult is_ir(const Economy& e, const Allocation& x) {
  for (std::size_t i = 0; i < e.n(); ++i)
    if (utility(e, i, x.rows[i]) < utility(e, i, e.omega[i])) return {false, i};
  return {true, {}};
}

namespace {

// All k-subsets of [n] in lexicographic order, for k = 1..n.
template <typename F>
void for_each_coalition(std::size_t n, F&& fn) {
  for (std::size_t k = 1; k <= n; ++k) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    for (;;) {
      if (fn(idx)) return;
      std::size_t i = k;
      bool moved = false;
      while (i-- > 0) {
        if (idx[i] + (k - i) <= n - 1) {
          ++idx[i];
          for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
  }
}

std::optional<BlockWitness> try_block(const Economy& e, const Allocation& x,
                                      const std::vector<std::size_t>& C, BlockMode mode) {
  std::size_t n = e.n(), m = C.size();
  // vars: y_c (m*n), then slack vars: 1 (strong: common s, free) or m (weak: t_c >= 0)
  std::size_t extra = mode == BlockMode::strong_blocking ? 1 : m;
  LinearProgram lp;
  lp.maximize = true;
  lp.c.assign(m * n + extra, Rat(0));
  for (std::size_t k = 0; k < extra; ++k) lp.c[m * n + k] = 1;
  if (mode == BlockMode::strong_blocking) {
    lp.free_var.assign(m * n + extra, false);
    lp.free_var[m * n] = true;
  }
  for (std::size_t c = 0; c < m; ++c) {
    RatVec row(m * n + extra, Rat(0));
    for (std::size_t j = 0; j < n; ++j) row[c * n + j] = e.u[C[c]][j];
    row[m * n + (mode == BlockMode::strong_blocking ? 0 : c)] = -1;
    lp.add_row(row, RowSense::ge, utility(e, C[c], x.rows[C[c]]));
  }
  for (std::size_t c = 0; c < m; ++c) {
    RatVec row(m * n + extra, Rat(0));
    for (std::size_t j = 0; j < n; ++j) row[c * n + j] = 1;
    lp.add_row(row, RowSense::le, Rat(1));
  }
  for (std::size_t j = 0; j < n; ++j) {
    RatVec row(m * n + extra, Rat(0));
    for (std::size_t c = 0; c < m; ++c) row[c * n + j] = 1;
    Rat avail = 0;
    for (std::size_t c = 0; c < m; ++c) avail += e.omega[C[c]][j];
    lp.add_row(row, RowSense::le, avail);
  }
  LpSolution sol = solve_lp(lp);
  // Weak mode has no free slack, so a coalition that cannot even hold every
  // member at their current utility makes the program infeasible: no block.
  if (sol.status == LpStatus::infeasible) return std::nullopt;
  if (sol.status != LpStatus::optimal) throw std::logic_error("block LP must be bounded");
  if (sol.objective <= 0) return std::nullopt;
  BlockWitness w;
  w.coalition = C;
  w.bundles.assign(m, RatVec(n));
  for (std::size_t c = 0; c < m; ++c)
    for (std::size_t j = 0; j < n; ++j) w.bundles[c][j] = sol.x[c * n + j];
  w.total_gain = 0;
  for (std::size_t c = 0; c < m; ++c)
    w.total_gain += dot(e.u[C[c]], w.bundles[c]) - utility(e, C[c], x.rows[C[c]]);
  return w;
}

}  // namespace

std::optional<BlockWitness> block_search(const Economy& e, const Allocation& x, BlockMode mode) {
  std::size_t n = e.n();
  if (n > 12) throw InstanceTooLarge("block_search capped at n = 12, got " + std::to_string(n));
  std::optional<BlockWitness> found;
  for_each_coalition(n, [&](const std::vector<std::size_t>& C) {
    found = try_block(e, x, C, mode);
    return found.has_value();
  });
  return found;
}

StabilityVerdict is_stable(const Economy& e, const Allocation& x) {
  StabilityVerdict v;
  v.endowment_block = block_search(e, x, BlockMode::strong_blocking);
  Economy re = e;
  re.omega = x.rows;
  v.allocation_block = block_search(re, x, BlockMode::weak_blocking);
  v.stable = !v.endowment_block && !v.allocation_block;
  return v;
}

namespace {

struct PatternLpResult {
  Rat slack = 0;
  std::vector<Rat> beta_endow, beta_alloc;  // per agent (0 if not in role)
  RatMat z_endow, z_alloc;                  // homogenized bundles
  Rat beta_strict = 0;
  RatVec z_strict;
};

// Fractional (replica-mass) max-slack LP for a fixed role pattern.
std::optional<PatternLpResult> pattern_lp(const Economy& e, const Allocation& x,
                                          const std::vector<bool>& endow,
                                          const std::vector<bool>& alloc,
                                          std::optional<std::size_t> designated_strict) {
  std::size_t n = e.n();
  std::vector<std::size_t> E, A;
  for (std::size_t i = 0; i < n; ++i) {
    if (endow[i]) E.push_back(i);
    if (alloc[i]) A.push_back(i);
  }
  bool strict_slot = designated_strict.has_value();
  // vars: per E member: z (n) + beta; per A member: z (n) + beta;
  // strict slot: z (n) + beta; final: s (free).
  std::size_t per = n + 1;
  std::size_t nv = (E.size() + A.size() + (strict_slot ? 1 : 0)) * per + 1;
  auto zE = [&](std::size_t k) { return k * per; };
  auto bE = [&](std::size_t k) { return k * per + n; };
  auto zA = [&](std::size_t k) { return (E.size() + k) * per; };
  auto bA = [&](std::size_t k) { return (E.size() + k) * per + n; };
  std::size_t zS = (E.size() + A.size()) * per;
  std::size_t bS = zS + n;
  std::size_t sv = nv - 1;

  LinearProgram lp;
  lp.maximize = true;
  lp.c.assign(nv, Rat(0));
  lp.c[sv] = 1;
  lp.free_var.assign(nv, false);
  lp.free_var[sv] = true;

  // utility constraints
  for (std::size_t k = 0; k < E.size(); ++k) {
    RatVec row(nv, Rat(0));
    for (std::size_t j = 0; j < n; ++j) row[zE(k) + j] = e.u[E[k]][j];
    row[bE(k)] = -utility(e, E[k], x.rows[E[k]]);
    row[sv] = -1;
    lp.add_row(row, RowSense::ge, Rat(0));
  }
  for (std::size_t k = 0; k < A.size(); ++k) {
    RatVec row(nv, Rat(0));
    for (std::size_t j = 0; j < n; ++j) row[zA(k) + j] = e.u[A[k]][j];
    row[bA(k)] = -utility(e, A[k], x.rows[A[k]]);
    lp.add_row(row, RowSense::ge, Rat(0));
  }
  if (strict_slot) {
    std::size_t i = *designated_strict;
    RatVec row(nv, Rat(0));
    for (std::size_t j = 0; j < n; ++j) row[zS + j] = e.u[i][j];
    row[bS] = -utility(e, i, x.rows[i]);
    row[sv] = -1;
    lp.add_row(row, RowSense::ge, Rat(0));
  }
  // per-copy mass
  auto add_mass = [&](std::size_t zbase, std::size_t bcol) {
    RatVec row(nv, Rat(0));
    for (std::size_t j = 0; j < n; ++j) row[zbase + j] = 1;
    row[bcol] = -1;
    lp.add_row(row, RowSense::le, Rat(0));
  };
  for (std::size_t k = 0; k < E.size(); ++k) add_mass(zE(k), bE(k));
  for (std::size_t k = 0; k < A.size(); ++k) add_mass(zA(k), bA(k));
  if (strict_slot) add_mass(zS, bS);
  // resource balance per good
  for (std::size_t j = 0; j < n; ++j) {
    RatVec row(nv, Rat(0));
    for (std::size_t k = 0; k < E.size(); ++k) {
      row[zE(k) + j] += 1;
      row[bE(k)] -= e.omega[E[k]][j];
    }
    for (std::size_t k = 0; k < A.size(); ++k) {
      row[zA(k) + j] += 1;
      row[bA(k)] -= x.rows[A[k]][j];
    }
    if (strict_slot) {
      row[zS + j] += 1;
      row[bS] -= x.rows[*designated_strict][j];
    }
    lp.add_row(row, RowSense::le, Rat(0));
  }
  // normalization
  {
    RatVec row(nv, Rat(0));
    for (std::size_t k = 0; k < E.size(); ++k) row[bE(k)] = 1;
    for (std::size_t k = 0; k < A.size(); ++k) row[bA(k)] = 1;
    if (strict_slot) row[bS] = 1;
    lp.add_row(row, RowSense::eq, Rat(1));
  }
  LpSolution sol = solve_lp(lp);
  if (sol.status == LpStatus::unbounded)
    throw std::logic_error("pattern LP cannot be unbounded under normalization");
  if (sol.status != LpStatus::optimal) return std::nullopt;
  if (sol.objective <= 0) return std::nullopt;
  PatternLpResult r;
  r.slack = sol.objective;
  r.beta_endow.assign(n, Rat(0));
  r.beta_alloc.assign(n, Rat(0));
  r.z_endow.assign(n, RatVec(n, Rat(0)));
  r.z_alloc.assign(n, RatVec(n, Rat(0)));
  for (std::size_t k = 0; k < E.size(); ++k) {
    r.beta_endow[E[k]] = sol.x[bE(k)];
    for (std::size_t j = 0; j < n; ++j) r.z_endow[E[k]][j] = sol.x[zE(k) + j];
  }
  for (std::size_t k = 0; k < A.size(); ++k) {
    r.beta_alloc[A[k]] = sol.x[bA(k)];
    for (std::size_t j = 0; j < n; ++j) r.z_alloc[A[k]][j] = sol.x[zA(k) + j];
  }
  if (strict_slot) {
    r.beta_strict = sol.x[bS];
    r.z_strict.assign(n, Rat(0));
    for (std::size_t j = 0; j < n; ++j) r.z_strict[j] = sol.x[zS + j];
  }
  return r;
}

CoalitionWitness witness_from_pattern(const Economy& e, const Allocation& x,
                                      const PatternLpResult& r,
                                      std::optional<std::size_t> designated_strict) {
  std::size_t n = e.n();
  CoalitionWitness w;
  w.slack = r.slack;
  w.replicas = std::nullopt;
  for (std::size_t i = 0; i < n; ++i) {
    if (r.beta_endow[i] > 0) {
      RejectMember m;
      m.agent = i;
      m.role = RejectRole::endowment;
      m.weight = r.beta_endow[i];
      m.bundle = vec_scale(Rat(1) / r.beta_endow[i], r.z_endow[i]);
      m.strict = true;
      w.members.push_back(std::move(m));
    }
    if (r.beta_alloc[i] > 0) {
      RatVec avg = vec_scale(Rat(1) / r.beta_alloc[i], r.z_alloc[i]);
      if (avg == x.rows[i]) continue;  // neutral member: contributes and consumes x_i
      RejectMember m;
      m.agent = i;
      m.role = RejectRole::allocation;
      m.weight = r.beta_alloc[i];
      m.bundle = std::move(avg);
      m.strict = false;
      w.members.push_back(std::move(m));
    }
  }
  if (designated_strict && r.beta_strict > 0) {
    RejectMember m;
    m.agent = *designated_strict;
    m.role = RejectRole::allocation;
    m.weight = r.beta_strict;
    m.bundle = vec_scale(Rat(1) / r.beta_strict, r.z_strict);
    m.strict = true;
    w.members.push_back(std::move(m));
  }
  return w;
}

bool strict_capable(const Economy& e, const Allocation& x, std::size_t i) {
  Rat have = utility(e, i, x.rows[i]);
  for (std::size_t j = 0; j < e.n(); ++j)
    if (e.u[i][j] > have) return true;
  return false;
}

// Finite-replica max-slack LP with fixed integer multiplicities.
// m_endow[i] copies of agent i bring omega_i and must strictly gain;
// m_alloc[i] copies bring x_i and must weakly gain (uniform bundle per role).
// For empty endow side, `designated_strict` marks one allocation copy that
// must strictly gain (it is additional to m_alloc[i]).
struct FixedLpResult {
  Rat slack;
  RatMat y_endow, y_alloc;
  RatVec y_strict;
};

std::optional<FixedLpResult> fixed_multiplicity_lp(const Economy& e, const Allocation& x,
                                                   const std::vector<unsigned>& m_endow,
                                                   const std::vector<unsigned>& m_alloc,
                                                   std::optional<std::size_t> designated_strict) {
  std::size_t n = e.n();
  std::vector<std::size_t> E, A;
  for (std::size_t i = 0; i < n; ++i) {
    if (m_endow[i] > 0) E.push_back(i);
    if (m_alloc[i] > 0) A.push_back(i);
  }
  bool strict_slot = designated_strict.has_value();
  std::size_t nv = (E.size() + A.size() + (strict_slot ? 1 : 0)) * n + 1;
  auto yE = [&](std::size_t k) { return k * n; };
  auto yA = [&](std::size_t k) { return (E.size() + k) * n; };
  std::size_t yS = (E.size() + A.size()) * n;
  std::size_t sv = nv - 1;
  LinearProgram lp;
  lp.maximize = true;
  lp.c.assign(nv, Rat(0));
  lp.c[sv] = 1;
  lp.free_var.assign(nv, false);
  lp.free_var[sv] = true;
  for (std::size_t k = 0; k < E.size(); ++k) {
    RatVec row(nv, Rat(0));
    for (std::size_t j = 0; j < n; ++j) row[yE(k) + j] = e.u[E[k]][j];
    row[sv] = -1;
    lp.add_row(row, RowSense::ge, utility(e, E[k], x.rows[E[k]]));
  }
  for (std::size_t k = 0; k < A.size(); ++k) {
    RatVec row(nv, Rat(0));
    for (std::size_t j = 0; j < n; ++j) row[yA(k) + j] = e.u[A[k]][j];
    lp.add_row(row, RowSense::ge, utility(e, A[k], x.rows[A[k]]));
  }
  if (strict_slot) {
    RatVec row(nv, Rat(0));
    for (std::size_t j = 0; j < n; ++j) row[yS + j] = e.u[*designated_strict][j];
    row[sv] = -1;
    lp.add_row(row, RowSense::ge, utility(e, *designated_strict, x.rows[*designated_strict]));
  }
  auto add_mass = [&](std::size_t base) {
    RatVec row(nv, Rat(0));
    for (std::size_t j = 0; j < n; ++j) row[base + j] = 1;
    lp.add_row(row, RowSense::le, Rat(1));
  };
  for (std::size_t k = 0; k < E.size(); ++k) add_mass(yE(k));
  for (std::size_t k = 0; k < A.size(); ++k) add_mass(yA(k));
  if (strict_slot) add_mass(yS);
  for (std::size_t j = 0; j < n; ++j) {
    RatVec row(nv, Rat(0));
    Rat rhs = 0;
    for (std::size_t k = 0; k < E.size(); ++k) {
      row[yE(k) + j] = Rat(static_cast<unsigned long>(m_endow[E[k]]));
      rhs += Rat(static_cast<unsigned long>(m_endow[E[k]])) * e.omega[E[k]][j];
    }
    for (std::size_t k = 0; k < A.size(); ++k) {
      row[yA(k) + j] = Rat(static_cast<unsigned long>(m_alloc[A[k]]));
      rhs += Rat(static_cast<unsigned long>(m_alloc[A[k]])) * x.rows[A[k]][j];
    }
    if (strict_slot) {
      row[yS + j] = 1;
      rhs += x.rows[*designated_strict][j];
    }
    lp.add_row(row, RowSense::le, rhs);
  }
  LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::optimal) return std::nullopt;
  if (sol.objective <= 0) return std::nullopt;
  FixedLpResult r;
  r.slack = sol.objective;
  r.y_endow.assign(n, RatVec());
  r.y_alloc.assign(n, RatVec());
  for (std::size_t k = 0; k < E.size(); ++k) {
    r.y_endow[E[k]].assign(n, Rat(0));
    for (std::size_t j = 0; j < n; ++j) r.y_endow[E[k]][j] = sol.x[yE(k) + j];
  }
  for (std::size_t k = 0; k < A.size(); ++k) {
    r.y_alloc[A[k]].assign(n, Rat(0));
    for (std::size_t j = 0; j < n; ++j) r.y_alloc[A[k]][j] = sol.x[yA(k) + j];
  }
  if (strict_slot) {
    r.y_strict.assign(n, Rat(0));
    for (std::size_t j = 0; j < n; ++j) r.y_strict[j] = sol.x[yS + j];
  }
  return r;
}

CoalitionWitness witness_from_fixed(const Economy& e, const Allocation& x,
                                    const std::vector<unsigned>& m_endow,
                                    const std::vector<unsigned>& m_alloc,
                                    std::optional<std::size_t> designated_strict,
                                    const FixedLpResult& r, unsigned N) {
  std::size_t n = e.n();
  CoalitionWitness w;
  w.slack = r.slack;
  w.replicas = N;
  unsigned total = 0;
  for (std::size_t i = 0; i < n; ++i) total += m_endow[i] + m_alloc[i];
  if (designated_strict) ++total;
  for (std::size_t i = 0; i < n; ++i) {
    if (m_endow[i] > 0) {
      RejectMember m;
      m.agent = i;
      m.role = RejectRole::endowment;
      m.multiplicity = m_endow[i];
      m.weight = Rat(m_endow[i], total);
      m.weight.canonicalize();
      m.bundle = r.y_endow[i];
      m.strict = true;
      w.members.push_back(std::move(m));
    }
    if (m_alloc[i] > 0 && !r.y_alloc[i].empty() && r.y_alloc[i] != x.rows[i]) {
      RejectMember m;
      m.agent = i;
      m.role = RejectRole::allocation;
      m.multiplicity = m_alloc[i];
      m.weight = Rat(m_alloc[i], total);
      m.weight.canonicalize();
      m.bundle = r.y_alloc[i];
      m.strict = false;
      w.members.push_back(std::move(m));
    }
  }
  if (designated_strict) {
    RejectMember m;
    m.agent = *designated_strict;
    m.role = RejectRole::allocation;
    m.multiplicity = 1;
    m.weight = Rat(1u, total);
    m.weight.canonicalize();
    m.bundle = r.y_strict;
    m.strict = true;
    w.members.push_back(std::move(m));
  }
  return w;
}

// Role patterns in {out, endow, alloc}^n ordered by coalition size then
// lexicographically (out < endow < alloc position by position).
std::vector<std::vector<int>> ordered_patterns(std::size_t n) {
  std::vector<std::vector<int>> pats;
  std::vector<int> cur(n, 0);
  std::size_t count = 1;
  for (std::size_t i = 0; i < n; ++i) count *= 3;
  for (std::size_t code = 1; code < count; ++code) {
    std::size_t c = code;
    for (std::size_t i = 0; i < n; ++i) {
      cur[n - 1 - i] = static_cast<int>(c % 3);
      c /= 3;
    }
    pats.push_back(cur);
  }
  std::stable_sort(pats.begin(), pats.end(),
                   [](const std::vector<int>& a, const std::vector<int>& b) {
                     std::size_t sa = 0, sb = 0;
                     for (int v : a) sa += v != 0;
                     for (int v : b) sb += v != 0;
                     if (sa != sb) return sa < sb;
                     return a < b;
                   });
  return pats;
}

}  // namespace

std::optional<CoalitionWitness> check_coalition_pattern(
    const Economy& e, const Allocation& x, const std::vector<bool>& endow,
    const std::vector<bool>& alloc, std::optional<std::size_t> designated_strict) {
  auto r = pattern_lp(e, x, endow, alloc, designated_strict);
  if (!r) return std::nullopt;
  return witness_from_pattern(e, x, *r, designated_strict);
}

RejectVerdict reject_search(const Economy& e, const Allocation& x,
                            std::optional<unsigned> replicas) {
  std::size_t n = e.n();
  if (n > 8) throw InstanceTooLarge("reject_search capped at n = 8, got " + std::to_string(n));
  std::vector<bool> all(n, true);

  // Phase A: decide via endowment-support sweep with the allocation side
  // maximal (adding allocation bringers at their own bundle is neutral, so
  // this loses no witnesses). Designated-strict sweeps cover empty supports.
  struct Hit {
    std::vector<bool> endow;
    std::optional<std::size_t> designated;
    PatternLpResult lp;
  };
  std::optional<Hit> hit;

  for (std::size_t i = 0; i < n && !hit; ++i) {
    if (!strict_capable(e, x, i)) continue;
    auto r = pattern_lp(e, x, std::vector<bool>(n, false), all, i);
    if (r) hit = Hit{std::vector<bool>(n, false), i, *r};
  }
  if (!hit) {
    // nonempty supports, ascending size then lex
    std::vector<std::size_t> capable;
    for (std::size_t i = 0; i < n; ++i)
      if (strict_capable(e, x, i)) capable.push_back(i);
    for (std::size_t k = 1; k <= capable.size() && !hit; ++k) {
      std::vector<std::size_t> idx(k);
      for (std::size_t i = 0; i < k; ++i) idx[i] = i;
      for (;;) {
        std::vector<bool> endow(n, false);
        for (std::size_t t = 0; t < k; ++t) endow[capable[idx[t]]] = true;
        auto r = pattern_lp(e, x, endow, all, std::nullopt);
        if (r) {
          hit = Hit{endow, std::nullopt, *r};
          break;
        }
        std::size_t i = k;
        bool moved = false;
        while (i-- > 0) {
          if (idx[i] + (k - i) <= capable.size() - 1) {
            ++idx[i];
            for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            moved = true;
            break;
          }
        }
        if (!moved) break;
      }
    }
  }
  if (!hit) return {false, std::nullopt};

  if (!replicas) {
    // Phase B: prefer a single-role witness in the canonical pattern order.
    for (const auto& pat : ordered_patterns(n)) {
      std::vector<bool> endow(n, false), alloc(n, false);
      bool skip = false;
      for (std::size_t i = 0; i < n; ++i) {
        if (pat[i] == 1) {
          if (!strict_capable(e, x, i)) {
            skip = true;
            break;
          }
          endow[i] = true;
        } else if (pat[i] == 2) {
          alloc[i] = true;
        }
      }
      if (skip) continue;
      bool has_endow = std::find(endow.begin(), endow.end(), true) != endow.end();
      if (has_endow) {
        auto r = pattern_lp(e, x, endow, alloc, std::nullopt);
        if (r) return {true, witness_from_pattern(e, x, *r, std::nullopt)};
      } else {
        for (std::size_t i = 0; i < n; ++i) {
          if (!alloc[i] || !strict_capable(e, x, i)) continue;
          std::vector<bool> weak = alloc;
          auto r = pattern_lp(e, x, endow, weak, i);
          if (r) return {true, witness_from_pattern(e, x, *r, i)};
        }
      }
    }
    // Fallback: the deciding mixed-role witness.
    return {true, witness_from_pattern(e, x, hit->lp, hit->designated)};
  }

  // Finite level: a fractional hit does not imply a level-N witness, so run
  // an exact integer-multiplicity search. Copies of one agent in one role may
  // share a bundle (averaging preserves every constraint), and topping the
  // allocation side up to its cap with copies consuming exactly x_i is
  // neutral, so capped-maximal allocation multiplicities decide the question.
  unsigned N = *replicas;

  auto lex_next = [N](std::vector<unsigned>& m) {
    std::size_t t = m.size();
    while (t-- > 0) {
      if (m[t] < N) {
        ++m[t];
        for (std::size_t q = t + 1; q < m.size(); ++q) m[q] = 1;
        return true;
      }
    }
    return false;
  };

  // Witness-presentation pass: single-role patterns in canonical order.
  for (const auto& pat : ordered_patterns(n)) {
    std::vector<bool> endow(n, false), alloc(n, false);
    bool skip = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (pat[i] == 1) {
        if (!strict_capable(e, x, i)) {
          skip = true;
          break;
        }
        endow[i] = true;
      } else if (pat[i] == 2) {
        alloc[i] = true;
      }
    }
    if (skip) continue;
    std::vector<std::size_t> E;
    for (std::size_t i = 0; i < n; ++i)
      if (endow[i]) E.push_back(i);
    if (!E.empty()) {
      if (!pattern_lp(e, x, endow, alloc, std::nullopt)) continue;  // relaxation
      std::vector<unsigned> m1(E.size(), 1);
      do {
        std::vector<unsigned> m_endow(n, 0), m_alloc(n, 0);
        for (std::size_t t = 0; t < E.size(); ++t) m_endow[E[t]] = m1[t];
        for (std::size_t i = 0; i < n; ++i)
          if (alloc[i]) m_alloc[i] = N;
        auto r = fixed_multiplicity_lp(e, x, m_endow, m_alloc, std::nullopt);
        if (r) return {true, witness_from_fixed(e, x, m_endow, m_alloc, std::nullopt, *r, N)};
      } while (lex_next(m1));
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        if (!alloc[i] || !strict_capable(e, x, i)) continue;
        if (!pattern_lp(e, x, endow, alloc, i)) continue;
        std::vector<unsigned> m_endow(n, 0), m_alloc(n, 0);
        for (std::size_t q = 0; q < n; ++q)
          if (alloc[q]) m_alloc[q] = N;
        m_alloc[i] = N - 1;  // one copy moves to the designated strict slot
        auto r = fixed_multiplicity_lp(e, x, m_endow, m_alloc, i);
        if (r) return {true, witness_from_fixed(e, x, m_endow, m_alloc, i, *r, N)};
      }
    }
  }

  // Decision pass: endowment supports with both-role agents allowed; the
  // allocation side is capped-maximal (N - m1 on support agents, N elsewhere).
  // The all-allocation case was already covered by the pass above.
  std::vector<std::size_t> capable;
  for (std::size_t i = 0; i < n; ++i)
    if (strict_capable(e, x, i)) capable.push_back(i);
  for (std::size_t k = 1; k <= capable.size(); ++k) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    for (;;) {
      std::vector<bool> endow(n, false);
      for (std::size_t t = 0; t < k; ++t) endow[capable[idx[t]]] = true;
      if (pattern_lp(e, x, endow, all, std::nullopt)) {  // relaxation
        std::vector<unsigned> m1(k, 1);
        do {
          std::vector<unsigned> m_endow(n, 0), m_alloc(n, 0);
          for (std::size_t t = 0; t < k; ++t) m_endow[capable[idx[t]]] = m1[t];
          for (std::size_t i = 0; i < n; ++i) m_alloc[i] = N - m_endow[i];
          auto r = fixed_multiplicity_lp(e, x, m_endow, m_alloc, std::nullopt);
          if (r) return {true, witness_from_fixed(e, x, m_endow, m_alloc, std::nullopt, *r, N)};
        } while (lex_next(m1));
      }
      std::size_t i = k;
      bool moved = false;
      while (i-- > 0) {
        if (idx[i] + (k - i) <= capable.size() - 1) {
          ++idx[i];
          for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
  }
  return {false, std::nullopt};
}

}  // namespace lexmarket
