#include "doctest.h"

#include "lexmarket/lp.hpp"

#include "support.hpp"

using namespace lexmarket;
using namespace lexmarket::testsupport;

TEST_SUITE("lp") {

TEST_CASE("bounded optimum with verified duals") {
  LinearProgram lp;
  lp.maximize = true;
  lp.c = {Rat(1), Rat(1)};
  lp.free_var = {false, false};
  lp.add_row({Rat(1), Rat(0)}, RowSense::le, Rat(1));
  lp.add_row({Rat(0), Rat(1)}, RowSense::le, Rat(2));
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::optimal);
  CHECK(sol.objective == 3);
  CHECK(sol.x == RatVec{Rat(1), Rat(2)});
  CHECK(lp_certifies_optimal(lp, sol));
}

TEST_CASE("minimization keeps the problem's own orientation") {
  LinearProgram lp;
  lp.maximize = false;
  lp.c = {Rat(2), Rat(3)};
  lp.free_var = {false, false};
  lp.add_row({Rat(1), Rat(1)}, RowSense::ge, Rat(4));
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::optimal);
  CHECK(sol.objective == 8);  // all mass on the cheaper coordinate
  CHECK(sol.x == RatVec{Rat(4), Rat(0)});
}

TEST_CASE("infeasible system yields a checkable multiplier certificate") {
  LinearProgram lp;
  lp.maximize = true;
  lp.c = {Rat(1)};
  lp.free_var = {false};
  lp.add_row({Rat(1)}, RowSense::le, Rat(-1));
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::infeasible);
  CHECK(lp_certifies_infeasible(lp, sol.farkas));
}

TEST_CASE("unbounded program yields a feasible point and improving ray") {
  // x1 = 1 - x2 with x1 free and x2 unbounded above: minimizing x1 escapes.
  LinearProgram lp;
  lp.maximize = false;
  lp.c = {Rat(1), Rat(0)};
  lp.free_var = {true, false};
  lp.add_row({Rat(1), Rat(1)}, RowSense::eq, Rat(1));
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::unbounded);
  CHECK(lp_primal_feasible(lp, sol.x));
  CHECK(lp_certifies_unbounded(lp, sol.x, sol.ray));
}

TEST_CASE("degenerate pivoting terminates at the exact optimum") {
  // Classic cycling-prone instance; the anti-cycling pivot rule must reach
  // the optimum value 1/20 instead of looping.
  LinearProgram lp;
  lp.maximize = true;
  lp.c = {Rat(3, 4), Rat(-150), Rat(1, 50), Rat(-6)};
  lp.free_var = {false, false, false, false};
  lp.add_row({Rat(1, 4), Rat(-60), Rat(-1, 25), Rat(9)}, RowSense::le, Rat(0));
  lp.add_row({Rat(1, 2), Rat(-90), Rat(-1, 50), Rat(3)}, RowSense::le, Rat(0));
  lp.add_row({Rat(0), Rat(0), Rat(1), Rat(0)}, RowSense::le, Rat(1));
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::optimal);
  CHECK(sol.objective == Rat(1, 20));
  CHECK(lp_certifies_optimal(lp, sol));
}

TEST_CASE("equality rows with free variables") {
  LinearProgram lp;
  lp.maximize = false;
  lp.c = {Rat(1), Rat(2), Rat(0)};
  lp.free_var = {false, false, true};
  lp.add_row({Rat(1), Rat(0), Rat(1)}, RowSense::eq, Rat(2));
  lp.add_row({Rat(0), Rat(1), Rat(-1)}, RowSense::eq, Rat(1));
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::optimal);
  // With x3 = t free: x1 = 2 - t, x2 = 1 + t, objective 4 + t, and x2 >= 0
  // pins the optimum at t = -1 (the free variable must go negative).
  CHECK(sol.objective == 3);
  CHECK(sol.x == RatVec{Rat(3), Rat(0), Rat(-1)});
  CHECK(lp_certifies_optimal(lp, sol));
}

TEST_CASE("random programs always carry verifiable certificates") {
  int optimal = 0, infeasible = 0, unbounded = 0;
  for (unsigned seed = 1; seed <= 60; ++seed) {
    LinearProgram lp = random_lp(seed);
    CAPTURE(seed);
    CHECK(lp_certificate_ok(lp));
    switch (solve_lp(lp).status) {
      case LpStatus::optimal: ++optimal; break;
      case LpStatus::infeasible: ++infeasible; break;
      case LpStatus::unbounded: ++unbounded; break;
    }
  }
  // The sweep must exercise every status, not just happy paths.
  CHECK(optimal > 0);
  CHECK(infeasible > 0);
  CHECK(unbounded > 0);
}

}  // TEST_SUITE
