#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "lexmarket/rational.hpp"

namespace lexmarket {

enum class RowSense { le, eq, ge };

// max (or min) c.x  subject to  A[r].x (<=,=,>=) b[r],  x_j >= 0 unless free.
struct LinearProgram {
  bool maximize = true;
  RatVec c;
  RatMat A;
  RatVec b;
  std::vector<RowSense> sense;
  std::vector<bool> free_var;  // empty means all variables are non-negative

  std::size_t num_vars() const { return c.size(); }
  std::size_t num_rows() const { return A.size(); }
  void add_row(const RatVec& coeffs, RowSense s, const Rat& rhs);
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  RatVec x;          // primal point (optimal, or feasible base point when unbounded)
  Rat objective = 0; // in the problem's own orientation
  RatVec y;          // dual row multipliers at optimality (original row order/signs)
  RatVec farkas;     // infeasibility certificate: row multipliers
  RatVec ray;        // unboundedness certificate: improving feasible direction
};

// Two-phase primal simplex over exact rationals, Bland's pivoting rule
// (deterministic, cycle-free). Every returned certificate is re-checked
// exactly before returning; a failed self-check throws std::logic_error.
LpSolution solve_lp(const LinearProgram& lp);

// Exact certificate checks (also used directly by the test suites).
bool lp_primal_feasible(const LinearProgram& lp, const RatVec& x);
// Dual feasibility + zero duality gap against the given primal point.
bool lp_certifies_optimal(const LinearProgram& lp, const LpSolution& sol);
// y proves Ax{<=,=,>=}b, x>=0 empty: sign-correct multipliers, y^T A >= 0
// componentwise (== 0 on free columns), y.b < 0.
bool lp_certifies_infeasible(const LinearProgram& lp, const RatVec& y);
// d is a recession direction improving the objective from the given point.
bool lp_certifies_unbounded(const LinearProgram& lp, const RatVec& x0, const RatVec& d);

}  // namespace lexmarket
