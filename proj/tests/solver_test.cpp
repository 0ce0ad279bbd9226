#include "doctest.h"

#include <cmath>
#include <vector>

#include "lexmarket/fixtures.hpp"
#include "lexmarket/solver.hpp"

using namespace lexmarket;

namespace {

// Synthetic price curve over the standard grid; `price_at` maps eps to the
// price vector, `dividend_at` to the common dividend.
template <typename P, typename D>
PriceCurve synthetic_curve(P price_at, D dividend_at, int t_min = 4, int t_max = 16) {
  PriceCurve curve;
  for (int t = t_min; t <= t_max; ++t) {
    CurveSample s;
    s.t = t;
    s.eps = std::ldexp(1.0, -t);
    s.prices = price_at(s.eps);
    s.dividend = dividend_at(s.eps);
    s.converged = true;
    curve.push_back(s);
  }
  return curve;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("tier decomposition splits constant and vanishing prices") {
  PriceCurve curve = synthetic_curve(
      [](double eps) { return std::vector<double>{1.0, 4.0 * eps, 0.0}; },
      [](double eps) { return eps; });
  TierDecomposition td = tier_decompose(curve);
  REQUIRE(td.tier_count == 2);
  CHECK(td.representatives[0] == 0);
  CHECK(td.representatives[1] == 1);
  CHECK(td.rows[0] == RatVec{Rat(1), Rat(0), Rat(0)});
  CHECK(td.rows[1] == RatVec{Rat(0), Rat(1), Rat(0)});
  // The surplus (per-capita redistribution value plus the dividend) shrinks
  // like eps: it matches the second tier's scale, so both currencies stay.
  CHECK(td.surplus_index == 2);
  CHECK(td.d == 2);
  CHECK(!td.ambiguous);
}

TEST_CASE("constant dividend pins the surplus to the first tier") {
  PriceCurve curve = synthetic_curve(
      [](double) { return std::vector<double>{2.0, 1.0, 0.0}; },
      [](double) { return 0.5; });
  TierDecomposition td = tier_decompose(curve);
  REQUIRE(td.tier_count == 1);
  CHECK(td.rows[0] == RatVec{Rat(1), Rat(1, 2), Rat(0)});
  CHECK(td.surplus_index == 1);
  CHECK(td.d == 1);
}

TEST_CASE("fractional-power tiers are separated and can outrun the surplus") {
  PriceCurve curve = synthetic_curve(
      [](double eps) { return std::vector<double>{1.0, std::sqrt(eps), 0.0}; },
      [](double) { return 0.0; });
  TierDecomposition td = tier_decompose(curve);
  REQUIRE(td.tier_count == 2);
  CHECK(td.rows[0] == RatVec{Rat(1), Rat(0), Rat(0)});
  CHECK(td.rows[1] == RatVec{Rat(0), Rat(1), Rat(0)});
  // The redistribution surplus shrinks like eps, strictly faster than the
  // sqrt(eps) tier: it matches no tier, so every tier survives.
  CHECK(td.surplus_index == 2);
  CHECK(td.d == 2);
}

TEST_CASE("shared-rate goods merge into one tier with exact ratios") {
  PriceCurve curve = synthetic_curve(
      [](double eps) { return std::vector<double>{2.0, 3.0 * eps, eps, eps * eps}; },
      [](double) { return 0.0; });
  TierDecomposition td = tier_decompose(curve);
  REQUIRE(td.tier_count == 3);
  CHECK(td.rows[0] == RatVec{Rat(1), Rat(0), Rat(0), Rat(0)});
  CHECK(td.rows[1] == RatVec{Rat(0), Rat(1), Rat(1, 3), Rat(0)});
  CHECK(td.rows[2] == RatVec{Rat(0), Rat(0), Rat(0), Rat(1)});
  // Surplus ~ eps/2 matches the eps tier, so the eps^2 tier is dropped.
  CHECK(td.surplus_index == 2);
  CHECK(td.d == 2);
}

TEST_CASE("near-window rate separations are flagged ambiguous") {
  PriceCurve curve = synthetic_curve(
      [](double eps) { return std::vector<double>{1.0, std::pow(eps, 0.26), 0.0}; },
      [](double) { return 0.0; });
  TierDecomposition td = tier_decompose(curve);
  CHECK(td.tier_count == 2);
  CHECK(td.ambiguous);
}

TEST_CASE("noise-floor prices do not open tiers") {
  PriceCurve curve = synthetic_curve(
      [](double) { return std::vector<double>{1.0, 1e-12, 0.0}; },
      [](double) { return 0.0; });
  TierDecomposition td = tier_decompose(curve);
  REQUIRE(td.tier_count == 1);
  CHECK(td.rows[0] == RatVec{Rat(1), Rat(0), Rat(0)});
}

TEST_CASE("single-market fixed point converges and round-trips") {
  fixtures::Instance inst = fixtures::perturbed_competitive(Rat(1, 8));
  SolverParams params;
  DividendEquilibrium eq = solve_dividend_equilibrium(inst.economy, 1.0 / 8, 1.0 / 64, params);
  REQUIRE(eq.converged);
  CHECK(eq.verified);
  CHECK(eq.residual <= params.residual_tol);
  REQUIRE(eq.prices.size() == 3);
  CHECK(eq.prices[0] > 0);
  // Competitive prices for this market are (1, 4 eps, 0) up to scale; the
  // raw snapshot carries a bias of order delta = 1/64, and the exact
  // round-trip (eq.verified above) is what certifies the snapped system.
  CHECK(eq.prices[2] < 1e-9);
  CHECK(std::fabs(eq.prices[1] / eq.prices[0] - 0.5) < 2e-2);
}

TEST_CASE("full extraction on the dividend-funded market") {
  fixtures::Instance inst = fixtures::satiation_surplus();
  SolverParams params;
  params.grid_max = 12;
  ExtractResult r = extract_lde(inst.economy, params);
  REQUIRE(r.ok);
  CHECK(r.verification.ok);
  CHECK(r.strong.ok);
  CHECK(r.tiers.d == 1);
  REQUIRE(r.system.d() == 1);
  CHECK(r.system.P[0] == RatVec{Rat(1), Rat(0), Rat(0)});
  CHECK(r.system.alpha[0] == RatVec{Rat(1, 6), Rat(1, 6), Rat(0)});
  CHECK(r.x.rows[0] == RatVec{Rat(1, 2), Rat(1, 4), Rat(1, 4)});
  CHECK(r.x.rows[1] == RatVec{Rat(1, 2), Rat(1, 4), Rat(1, 4)});
  CHECK(r.x.rows[2] == RatVec{Rat(0), Rat(1, 2), Rat(1, 2)});
}

TEST_CASE("full extraction recovers the two-currency chain equilibrium") {
  fixtures::Instance inst = fixtures::two_tier_chain();
  SolverParams params;
  params.grid_max = 12;
  ExtractResult r = extract_lde(inst.economy, params);
  REQUIRE(r.ok);
  CHECK(r.tiers.tier_count == 2);
  CHECK(r.tiers.d == 2);
  CHECK(r.system.P == inst.system->P);
  CHECK(r.system.alpha == inst.system->alpha);
  CHECK(r.x.rows == inst.allocation.rows);
}

TEST_CASE("thread resolution prefers explicit parameters") {
  SolverParams p;
  p.threads = 3;
  CHECK(resolve_threads(p) == 3);
  p.threads = 0;
  CHECK(resolve_threads(p) >= 1);
}

}  // TEST_SUITE
