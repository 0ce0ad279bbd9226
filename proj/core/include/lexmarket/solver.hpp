#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lexmarket/economy.hpp"
#include "lexmarket/lde.hpp"
#include "lexmarket/rational.hpp"

namespace lexmarket {

struct SolverParams {
  double eta = 0.5;             // income normalization mix in the update map
  double damping = 0.5;         // iterate mixing factor
  unsigned max_iters = 5000;    // per restart
  double residual_tol = 1e-8;   // sup-norm fixed-point residual
  unsigned restarts = 8;        // seeded initial multiplier draws
  std::uint64_t rng_seed = 1;
  int grid_min = 4;             // perturbation grid: eps_t = 2^-t
  int grid_max = 16;
  long denominator_cap = 1000000;  // continued-fraction rounding cap
  unsigned threads = 0;            // 0 = respect LEXMARKET_THREADS, else hardware
};

// Fixed point of the dividend-price update map on one perturbed economy.
struct DividendEquilibrium {
  bool converged = false;
  double residual = 0;  // residual of the reported iterate
  unsigned iterations = 0;
  unsigned restart_index = 0;
  std::vector<double> lambda;
  std::vector<std::vector<double>> x;
  std::vector<double> prices;
  double dividend = 0;   // common dividend: largest budget overshoot
  bool verified = false; // snapshot round-trips as an exact one-currency equilibrium
  std::vector<std::string> notes;
};

// Runs the damped multiplier iteration with seeded restarts on economy `e`
// (pass the perturbed economy). `eps_floor` is the multiplier floor, `delta`
// the allocation regularization weight. The first restart (in seed order)
// reaching the residual tolerance wins; otherwise the best iterate is
// reported with converged=false. `warm` seeds restart 0.
DividendEquilibrium solve_dividend_equilibrium(const Economy& e, double eps_floor, double delta,
                                               const SolverParams& params,
                                               const std::vector<double>* warm = nullptr);

struct CurveSample {
  int t = 0;  // eps = 2^-t
  double eps = 0;
  std::vector<double> prices;
  double dividend = 0;
  std::vector<std::vector<double>> x;
  bool converged = false;
};

using PriceCurve = std::vector<CurveSample>;

// Rate-class decomposition of a vanishing price curve: goods whose prices
// shrink at the same power of eps form one currency tier.
struct TierDecomposition {
  std::size_t tier_count = 0;  // tiers above the noise floor (M)
  std::size_t surplus_index = 0;  // first tier whose scale the surplus matches (m, <= M)
  std::size_t d = 0;              // currencies kept: min(M, m)
  std::vector<std::size_t> representatives;  // per tier
  RatMat rows;                               // exact tier ratio rows (tier_count rows)
  std::vector<std::vector<double>> scales;   // per tier: C_k along the grid tail
  bool ambiguous = false;  // a slope fell inside the classification margin
  std::vector<std::string> notes;
};

TierDecomposition tier_decompose(const PriceCurve& curve);

// Full pipeline: solve along the perturbation grid, decompose the price
// curve into currency tiers, rationalize the allocation and price limits,
// assemble dividends by the identity, and verify exactly. ok only when the
// exact verification and the strong cheapest-bundle check both pass.
struct ExtractResult {
  bool ok = false;
  Allocation x;
  LexPriceSystem system;
  VerificationReport verification;
  VerificationReport strong;
  TierDecomposition tiers;
  PriceCurve curve;
  std::vector<std::string> notes;
};

ExtractResult extract_lde(const Economy& e, const SolverParams& params);

// Number of worker threads to use: params value, else LEXMARKET_THREADS,
// else the hardware count (at least 1).
unsigned resolve_threads(const SolverParams& params);

}  // namespace lexmarket
