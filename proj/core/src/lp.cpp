#include "lexmarket/lp.hpp"

#include <algorithm>
#include <stdexcept>

namespace lexmarket {

void LinearProgram::add_row(const RatVec& coeffs, RowSense s, const Rat& rhs) {
  if (coeffs.size() != c.size()) throw std::invalid_argument("add_row: width mismatch");
  A.push_back(coeffs);
  b.push_back(rhs);
  sense.push_back(s);
}

namespace {

// Internal canonical form: maximize over columns = [split originals][slacks]
// [artificials], all >= 0, equality rows with b >= 0.
struct Canon {
  std::size_t rows = 0, cols = 0;
  RatMat T;                    // rows x (cols + 1); last entry is rhs
  RatVec cost;                 // phase-2 cost per column
  std::vector<int> basis;      // column basic in each row
  std::size_t first_art = 0;   // columns >= first_art are artificial
  // mapping back: plus_col[j] / minus_col[j] (minus_col = -1 if not free)
  std::vector<int> plus_col, minus_col;
  std::vector<int> unit_col;   // per row: the +1 column (slack or artificial)
  std::vector<bool> row_flipped;
};

Canon build_canon(const LinearProgram& lp) {
  std::size_t nv = lp.num_vars(), nr = lp.num_rows();
  for (const auto& row : lp.A)
    if (row.size() != nv) throw std::invalid_argument("solve_lp: ragged constraint matrix");
  if (lp.b.size() != nr || lp.sense.size() != nr)
    throw std::invalid_argument("solve_lp: rows/b/sense size mismatch");
  if (!lp.free_var.empty() && lp.free_var.size() != nv)
    throw std::invalid_argument("solve_lp: free_var size mismatch");

  Canon cn;
  cn.rows = nr;
  cn.row_flipped.assign(nr, false);
  std::vector<RowSense> sense = lp.sense;
  RatMat A = lp.A;
  RatVec b = lp.b;
  for (std::size_t r = 0; r < nr; ++r) {
    if (b[r] < 0) {
      for (auto& v : A[r]) v = -v;
      b[r] = -b[r];
      if (sense[r] == RowSense::le)
        sense[r] = RowSense::ge;
      else if (sense[r] == RowSense::ge)
        sense[r] = RowSense::le;
      cn.row_flipped[r] = true;
    }
  }

  cn.plus_col.assign(nv, -1);
  cn.minus_col.assign(nv, -1);
  std::size_t col = 0;
  for (std::size_t j = 0; j < nv; ++j) {
    cn.plus_col[j] = static_cast<int>(col++);
    if (!lp.free_var.empty() && lp.free_var[j]) cn.minus_col[j] = static_cast<int>(col++);
  }
  std::size_t n_slack = 0, n_art = 0;
  std::vector<int> slack_col(nr, -1), art_col(nr, -1);
  for (std::size_t r = 0; r < nr; ++r) {
    if (sense[r] == RowSense::le)
      slack_col[r] = static_cast<int>(col + n_slack++), (void)0;
    else if (sense[r] == RowSense::ge)
      slack_col[r] = static_cast<int>(col + n_slack++);
  }
  std::size_t slack_base = col;
  col += n_slack;
  cn.first_art = col;
  for (std::size_t r = 0; r < nr; ++r)
    if (sense[r] != RowSense::le) art_col[r] = static_cast<int>(col + n_art++);
  col += n_art;
  cn.cols = col;

  Rat sign = lp.maximize ? Rat(1) : Rat(-1);
  cn.cost.assign(cn.cols, Rat(0));
  for (std::size_t j = 0; j < nv; ++j) {
    cn.cost[cn.plus_col[j]] = sign * lp.c[j];
    if (cn.minus_col[j] >= 0) cn.cost[cn.minus_col[j]] = -sign * lp.c[j];
  }

  cn.T.assign(nr, RatVec(cn.cols + 1, Rat(0)));
  cn.basis.assign(nr, -1);
  cn.unit_col.assign(nr, -1);
  for (std::size_t r = 0; r < nr; ++r) {
    for (std::size_t j = 0; j < nv; ++j) {
      cn.T[r][cn.plus_col[j]] = A[r][j];
      if (cn.minus_col[j] >= 0) cn.T[r][cn.minus_col[j]] = -A[r][j];
    }
    if (sense[r] == RowSense::le) {
      cn.T[r][slack_col[r]] = 1;
      cn.basis[r] = slack_col[r];
      cn.unit_col[r] = slack_col[r];
    } else if (sense[r] == RowSense::ge) {
      cn.T[r][slack_col[r]] = -1;
      cn.T[r][art_col[r]] = 1;
      cn.basis[r] = art_col[r];
      cn.unit_col[r] = art_col[r];
    } else {
      cn.T[r][art_col[r]] = 1;
      cn.basis[r] = art_col[r];
      cn.unit_col[r] = art_col[r];
    }
    cn.T[r][cn.cols] = b[r];
  }
  (void)slack_base;
  return cn;
}

void pivot(Canon& cn, std::size_t pr, std::size_t pc) {
  Rat piv = cn.T[pr][pc];
  for (auto& v : cn.T[pr]) v /= piv;
  for (std::size_t r = 0; r < cn.rows; ++r) {
    if (r == pr) continue;
    Rat f = cn.T[r][pc];
    if (f == 0) continue;
    for (std::size_t j = 0; j <= cn.cols; ++j) cn.T[r][j] -= f * cn.T[pr][j];
  }
  cn.basis[pr] = static_cast<int>(pc);
}

// Bland's rule simplex on the canonical tableau for the given costs.
// allow_art: whether artificial columns may enter. Returns false if the
// problem is unbounded for these costs (entering column found, no ratio).
struct RunResult {
  bool unbounded = false;
  std::size_t entering = 0;
};

RunResult run_simplex(Canon& cn, const RatVec& cost, bool allow_art) {
  std::size_t m = cn.rows;
  for (;;) {
    // reduced cost: cB . column - cost_j; entering needs negative value
    // (we maximize, so improving columns have cB.col - c_j < 0).
    std::size_t enter = cn.cols;
    for (std::size_t j = 0; j < cn.cols; ++j) {
      if (!allow_art && j >= cn.first_art) break;
      bool basic = false;
      for (std::size_t r = 0; r < m; ++r)
        if (cn.basis[r] == static_cast<int>(j)) {
          basic = true;
          break;
        }
      if (basic) continue;
      Rat red = -cost[j];
      for (std::size_t r = 0; r < m; ++r)
        if (cn.T[r][j] != 0 && cn.basis[r] >= 0) red += cost[cn.basis[r]] * cn.T[r][j];
      if (red < 0) {
        enter = j;
        break;  // Bland: first improving column
      }
    }
    if (enter == cn.cols) return {};  // optimal
    // ratio test; Bland tie-break: smallest basis column index
    std::size_t leave = m;
    Rat best_ratio = 0;
    for (std::size_t r = 0; r < m; ++r) {
      if (cn.T[r][enter] <= 0) continue;
      Rat ratio = cn.T[r][cn.cols] / cn.T[r][enter];
      if (leave == m || ratio < best_ratio ||
          (ratio == best_ratio && cn.basis[r] < cn.basis[leave])) {
        leave = r;
        best_ratio = ratio;
      }
    }
    if (leave == m) return {true, enter};
    pivot(cn, leave, enter);
  }
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  Canon cn = build_canon(lp);
  std::size_t nv = lp.num_vars();
  LpSolution sol;

  // Phase 1: maximize -(sum of artificials).
  bool need_phase1 = cn.first_art < cn.cols;
  if (need_phase1) {
    RatVec pc(cn.cols, Rat(0));
    for (std::size_t j = cn.first_art; j < cn.cols; ++j) pc[j] = -1;
    RunResult rr = run_simplex(cn, pc, true);
    if (rr.unbounded) throw std::logic_error("solve_lp: phase 1 cannot be unbounded");
    Rat art_sum = 0;
    for (std::size_t r = 0; r < cn.rows; ++r)
      if (cn.basis[r] >= static_cast<int>(cn.first_art)) art_sum += cn.T[r][cn.cols];
    if (art_sum != 0) {
      // Infeasible; phase-1 duals give the Farkas certificate.
      sol.status = LpStatus::infeasible;
      RatVec w(cn.rows, Rat(0));
      for (std::size_t r = 0; r < cn.rows; ++r) {
        Rat v = 0;
        std::size_t uc = static_cast<std::size_t>(cn.unit_col[r]);
        for (std::size_t rr2 = 0; rr2 < cn.rows; ++rr2)
          if (cn.basis[rr2] >= 0 && cn.T[rr2][uc] != 0) v += pc[cn.basis[rr2]] * cn.T[rr2][uc];
        w[r] = cn.row_flipped[r] ? Rat(-v) : v;
      }
      sol.farkas = w;
      if (!lp_certifies_infeasible(lp, sol.farkas))
        throw std::logic_error("solve_lp: Farkas certificate failed self-check");
      return sol;
    }
    // Drive out basic artificials where possible (Bland-deterministic).
    for (std::size_t r = 0; r < cn.rows; ++r) {
      if (cn.basis[r] < static_cast<int>(cn.first_art)) continue;
      for (std::size_t j = 0; j < cn.first_art; ++j) {
        if (cn.T[r][j] != 0) {
          pivot(cn, r, j);
          break;
        }
      }
      // If no pivot found the row is all-zero over real columns: inert.
    }
  }

  // Phase 2.
  RunResult rr = run_simplex(cn, cn.cost, false);
  auto primal_from_tableau = [&]() {
    RatVec x(nv, Rat(0));
    for (std::size_t r = 0; r < cn.rows; ++r) {
      int bc = cn.basis[r];
      if (bc < 0) continue;
      for (std::size_t j = 0; j < nv; ++j) {
        if (bc == cn.plus_col[j]) x[j] += cn.T[r][cn.cols];
        if (cn.minus_col[j] >= 0 && bc == cn.minus_col[j]) x[j] -= cn.T[r][cn.cols];
      }
    }
    return x;
  };
  if (rr.unbounded) {
    sol.status = LpStatus::unbounded;
    sol.x = primal_from_tableau();
    RatVec d(nv, Rat(0));
    std::size_t e = rr.entering;
    auto add_dir = [&](std::size_t col, const Rat& amount) {
      for (std::size_t j = 0; j < nv; ++j) {
        if (static_cast<int>(col) == cn.plus_col[j]) d[j] += amount;
        if (cn.minus_col[j] >= 0 && static_cast<int>(col) == cn.minus_col[j]) d[j] -= amount;
      }
    };
    add_dir(e, Rat(1));
    for (std::size_t r = 0; r < cn.rows; ++r)
      if (cn.basis[r] >= 0 && cn.T[r][e] != 0)
        add_dir(static_cast<std::size_t>(cn.basis[r]), -cn.T[r][e]);
    sol.ray = d;
    if (!lp_certifies_unbounded(lp, sol.x, sol.ray))
      throw std::logic_error("solve_lp: unbounded certificate failed self-check");
    return sol;
  }

  sol.status = LpStatus::optimal;
  sol.x = primal_from_tableau();
  Rat obj = 0;
  for (std::size_t j = 0; j < nv; ++j) obj += lp.c[j] * sol.x[j];
  sol.objective = obj;
  // Duals read off the +1 unit columns, mapped back to original row signs.
  sol.y.assign(cn.rows, Rat(0));
  for (std::size_t r = 0; r < cn.rows; ++r) {
    Rat v = 0;
    std::size_t uc = static_cast<std::size_t>(cn.unit_col[r]);
    for (std::size_t rr2 = 0; rr2 < cn.rows; ++rr2)
      if (cn.basis[rr2] >= 0) {
        const Rat& coeff = cn.T[rr2][uc];
        if (coeff != 0) v += cn.cost[cn.basis[rr2]] * coeff;
      }
    if (cn.row_flipped[r]) v = -v;
    sol.y[r] = lp.maximize ? v : Rat(-v);
  }
  if (!lp_certifies_optimal(lp, sol))
    throw std::logic_error("solve_lp: optimality certificate failed self-check");
  return sol;
}

bool lp_primal_feasible(const LinearProgram& lp, const RatVec& x) {
  if (x.size() != lp.num_vars()) return false;
  for (std::size_t j = 0; j < x.size(); ++j) {
    bool fr = !lp.free_var.empty() && lp.free_var[j];
    if (!fr && x[j] < 0) return false;
  }
  for (std::size_t r = 0; r < lp.num_rows(); ++r) {
    Rat lhs = dot(lp.A[r], x);
    if (lp.sense[r] == RowSense::le && lhs > lp.b[r]) return false;
    if (lp.sense[r] == RowSense::ge && lhs < lp.b[r]) return false;
    if (lp.sense[r] == RowSense::eq && lhs != lp.b[r]) return false;
  }
  return true;
}

bool lp_certifies_optimal(const LinearProgram& lp, const LpSolution& sol) {
  if (sol.status != LpStatus::optimal) return false;
  if (!lp_primal_feasible(lp, sol.x)) return false;
  if (sol.y.size() != lp.num_rows()) return false;
  // Orient as maximization: duals y with y_r >= 0 on <=, y_r <= 0 on >=,
  // free on ==; y^T A_j >= c_j for every column (== for free columns).
  Rat sign = lp.maximize ? Rat(1) : Rat(-1);
  for (std::size_t r = 0; r < lp.num_rows(); ++r) {
    Rat yr = sign * sol.y[r];
    if (lp.sense[r] == RowSense::le && yr < 0) return false;
    if (lp.sense[r] == RowSense::ge && yr > 0) return false;
  }
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    Rat lhs = 0;
    for (std::size_t r = 0; r < lp.num_rows(); ++r) lhs += sign * sol.y[r] * lp.A[r][j];
    Rat cj = sign * lp.c[j];
    bool fr = !lp.free_var.empty() && lp.free_var[j];
    if (fr ? (lhs != cj) : (lhs < cj)) return false;
  }
  Rat ydotb = 0;
  for (std::size_t r = 0; r < lp.num_rows(); ++r) ydotb += sign * sol.y[r] * lp.b[r];
  Rat cx = 0;
  for (std::size_t j = 0; j < lp.num_vars(); ++j) cx += sign * lp.c[j] * sol.x[j];
  if (ydotb != cx) return false;
  if (sol.objective != dot(lp.c, sol.x)) return false;
  return true;
}

bool lp_certifies_infeasible(const LinearProgram& lp, const RatVec& y) {
  if (y.size() != lp.num_rows()) return false;
  for (std::size_t r = 0; r < lp.num_rows(); ++r) {
    if (lp.sense[r] == RowSense::le && y[r] < 0) return false;
    if (lp.sense[r] == RowSense::ge && y[r] > 0) return false;
  }
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    Rat s = 0;
    for (std::size_t r = 0; r < lp.num_rows(); ++r) s += y[r] * lp.A[r][j];
    bool fr = !lp.free_var.empty() && lp.free_var[j];
    if (fr ? (s != 0) : (s < 0)) return false;
  }
  Rat yb = 0;
  for (std::size_t r = 0; r < lp.num_rows(); ++r) yb += y[r] * lp.b[r];
  return yb < 0;
}

bool lp_certifies_unbounded(const LinearProgram& lp, const RatVec& x0, const RatVec& d) {
  if (!lp_primal_feasible(lp, x0)) return false;
  if (d.size() != lp.num_vars()) return false;
  for (std::size_t j = 0; j < d.size(); ++j) {
    bool fr = !lp.free_var.empty() && lp.free_var[j];
    if (!fr && d[j] < 0) return false;
  }
  for (std::size_t r = 0; r < lp.num_rows(); ++r) {
    Rat ad = dot(lp.A[r], d);
    if (lp.sense[r] == RowSense::le && ad > 0) return false;
    if (lp.sense[r] == RowSense::ge && ad < 0) return false;
    if (lp.sense[r] == RowSense::eq && ad != 0) return false;
  }
  Rat cd = dot(lp.c, d);
  return lp.maximize ? cd > 0 : cd < 0;
}

}  // namespace lexmarket
