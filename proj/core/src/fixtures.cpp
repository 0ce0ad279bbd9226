#include "lexmarket/fixtures.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

namespace lexmarket {
namespace fixtures {

namespace {

Rat fr(long p, long q = 1) {
  Rat r(p, q);
  r.canonicalize();
  return r;
}

RatMat int_rows(std::initializer_list<std::initializer_list<long>> rows) {
  RatMat out;
  for (const auto& row : rows) {
    RatVec r;
    for (long v : row) r.push_back(Rat(v));
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

Instance stable_yet_rejectable() {
  Instance inst;
  inst.name = "stable-yet-rejectable";
  Economy& e = inst.economy;
  e.goods = {"A", "B", "C1", "C2", "C3", "D1", "D2", "D3"};
  e.agent_names = {"1a", "1b", "2a", "2b", "3a", "3b", "4a", "4b"};

  const RatVec u1 = {fr(0), fr(0), fr(1), fr(1), fr(1), fr(1), fr(1), fr(1)};
  const RatVec u2 = {fr(2), fr(0), fr(1), fr(1), fr(1), fr(0), fr(0), fr(0)};
  const RatVec u3 = {fr(0), fr(1), fr(2), fr(2), fr(2), fr(0), fr(0), fr(0)};
  const RatVec u4 = {fr(0), fr(0), fr(0), fr(0), fr(0), fr(1), fr(1), fr(1)};
  e.u = {u1, u1, u2, u2, u3, u3, u4, u4};

  const RatVec w1 = {fr(1, 2), fr(0), fr(0), fr(0), fr(0), fr(1, 6), fr(1, 6), fr(1, 6)};
  const RatVec w2 = {fr(0), fr(0), fr(1, 3), fr(1, 3), fr(1, 3), fr(0), fr(0), fr(0)};
  const RatVec w3 = {fr(0), fr(0), fr(1, 6), fr(1, 6), fr(1, 6), fr(1, 6), fr(1, 6), fr(1, 6)};
  const RatVec w4 = {fr(0), fr(1, 2), fr(0), fr(0), fr(0), fr(1, 6), fr(1, 6), fr(1, 6)};
  e.omega = {w1, w1, w2, w2, w3, w3, w4, w4};

  const RatVec x1 = {fr(0), fr(0), fr(1, 6), fr(1, 6), fr(1, 6), fr(1, 6), fr(1, 6), fr(1, 6)};
  const RatVec x2 = {fr(1, 2), fr(0), fr(1, 6), fr(1, 6), fr(1, 6), fr(0), fr(0), fr(0)};
  const RatVec x3 = {fr(0), fr(1, 2), fr(1, 6), fr(1, 6), fr(1, 6), fr(0), fr(0), fr(0)};
  const RatVec x4 = {fr(0), fr(0), fr(0), fr(0), fr(0), fr(1, 3), fr(1, 3), fr(1, 3)};
  inst.allocation.rows = {x1, x1, x2, x2, x3, x3, x4, x4};
  return inst;
}

Instance satiation_surplus() {
  Instance inst;
  inst.name = "satiation-surplus";
  Economy& e = inst.economy;
  e.goods = {"A", "B1", "B2"};
  e.agent_names = {"1", "2", "3"};
  e.u = int_rows({{2, 1, 1}, {2, 1, 1}, {0, 1, 1}});
  const RatVec w = {fr(1, 3), fr(1, 3), fr(1, 3)};
  e.omega = {w, w, w};

  const RatVec x12 = {fr(1, 2), fr(1, 4), fr(1, 4)};
  inst.allocation.rows = {x12, x12, {fr(0), fr(1, 2), fr(1, 2)}};

  LexPriceSystem sys;
  sys.P = {{fr(2), fr(0), fr(0)}};
  sys.alpha = {{fr(1, 3), fr(1, 3), fr(0)}};
  inst.system = sys;
  return inst;
}

Instance two_tier_chain() {
  Instance inst;
  inst.name = "two-tier-chain";
  Economy& e = inst.economy;
  e.goods = {"A", "B", "C"};
  e.agent_names = {"1", "2", "3"};
  e.u = {{fr(2), fr(1), fr(0)}, {fr(2), fr(1), fr(11, 10)}, {fr(0), fr(1), fr(0)}};
  e.omega = {{fr(1, 2), fr(1, 2), fr(0)}, {fr(1, 2), fr(1, 2), fr(0)}, {fr(0), fr(0), fr(1)}};

  inst.allocation.rows = {{fr(1, 2), fr(1, 2), fr(0)},
                          {fr(1, 2), fr(0), fr(1, 2)},
                          {fr(0), fr(1, 2), fr(1, 2)}};

  LexPriceSystem sys;
  sys.P = {{fr(1), fr(0), fr(0)}, {fr(0), fr(1), fr(0)}};
  sys.alpha = {{fr(0), fr(0), fr(0)}, {fr(0), fr(0), fr(1, 2)}};
  inst.system = sys;
  return inst;
}

namespace {

Economy deep_chain_economy() {
  Economy e;
  e.goods = {"A1", "A2", "B", "C", "D1", "D2"};
  e.agent_names = {"1", "2", "3", "4", "5", "6"};
  const Rat d = fr(11, 10);  // 1 + delta at delta = 1/10
  e.u = {{fr(2), fr(2), fr(1), fr(0), fr(0), fr(0)},
         {fr(2), fr(2), fr(1), d, fr(0), fr(0)},
         {fr(2), fr(2), d, fr(1), fr(0), fr(0)},
         {fr(2), fr(2), fr(0), fr(1), d, d},
         {fr(0), fr(0), fr(0), fr(1), fr(0), fr(0)},
         {fr(0), fr(0), fr(1), fr(0), fr(0), fr(0)}};
  const RatVec wAB = {fr(1, 4), fr(1, 4), fr(1, 2), fr(0), fr(0), fr(0)};
  const RatVec wAC = {fr(1, 4), fr(1, 4), fr(0), fr(1, 2), fr(0), fr(0)};
  const RatVec wD = {fr(0), fr(0), fr(0), fr(0), fr(1, 2), fr(1, 2)};
  e.omega = {wAB, wAB, wAC, wAC, wD, wD};
  return e;
}

}  // namespace

Instance three_tier_chain() {
  Instance inst;
  inst.name = "three-tier-chain";
  inst.economy = deep_chain_economy();

  inst.allocation.rows = {{fr(1, 4), fr(1, 4), fr(1, 2), fr(0), fr(0), fr(0)},
                          {fr(1, 4), fr(1, 4), fr(0), fr(1, 2), fr(0), fr(0)},
                          {fr(1, 4), fr(1, 4), fr(1, 2), fr(0), fr(0), fr(0)},
                          {fr(1, 4), fr(1, 4), fr(0), fr(0), fr(1, 4), fr(1, 4)},
                          {fr(0), fr(0), fr(0), fr(1, 2), fr(1, 4), fr(1, 4)},
                          {fr(0), fr(0), fr(0), fr(0), fr(1, 2), fr(1, 2)}};

  LexPriceSystem sys;
  sys.P = {{fr(1), fr(1), fr(0), fr(0), fr(0), fr(0)},
           {fr(0), fr(0), fr(1), fr(0), fr(0), fr(0)},
           {fr(0), fr(0), fr(0), fr(1), fr(0), fr(0)}};
  sys.alpha = {{fr(0), fr(0), fr(0), fr(0), fr(0), fr(0)},
               {fr(0), fr(0), fr(1, 2), fr(0), fr(0), fr(0)},
               {fr(0), fr(1, 2), fr(0), fr(0), fr(1, 2), fr(0)}};
  inst.system = sys;
  return inst;
}

Instance two_tier_merged() {
  Instance inst;
  inst.name = "two-tier-merged";
  inst.economy = deep_chain_economy();

  // (1+delta)/4 = 11/40, (1-delta)/2 = 9/20, (1-delta)/4 = 9/40,
  // delta/2 = 1/20 at delta = 1/10.
  inst.allocation.rows = {{fr(1, 4), fr(1, 4), fr(1, 2), fr(0), fr(0), fr(0)},
                          {fr(11, 40), fr(11, 40), fr(0), fr(9, 20), fr(0), fr(0)},
                          {fr(9, 40), fr(9, 40), fr(1, 2), fr(1, 20), fr(0), fr(0)},
                          {fr(1, 4), fr(1, 4), fr(0), fr(0), fr(1, 4), fr(1, 4)},
                          {fr(0), fr(0), fr(0), fr(1, 2), fr(1, 4), fr(1, 4)},
                          {fr(0), fr(0), fr(0), fr(0), fr(1, 2), fr(1, 2)}};

  LexPriceSystem sys;
  sys.P = {{fr(1), fr(1), fr(1, 10), fr(0), fr(0), fr(0)},
           {fr(0), fr(0), fr(0), fr(1), fr(0), fr(0)}};
  sys.alpha = {{fr(0), fr(0), fr(0), fr(0), fr(0), fr(0)},
               {fr(0), fr(9, 20), fr(0), fr(0), fr(1, 2), fr(0)}};
  inst.system = sys;
  return inst;
}

Instance perturbed_competitive(const Rat& eps) {
  if (!(eps > 0 && eps < fr(1, 4)))
    throw std::invalid_argument("perturbed_competitive: eps must lie in (0, 1/4)");
  Instance inst;
  inst.name = "perturbed-competitive";
  Economy& e = inst.economy;
  e.goods = {"A", "B", "C"};
  e.agent_names = {"1", "2", "3"};
  e.u = {{fr(2), fr(1), fr(0)}, {fr(2), fr(1), fr(11, 10)}, {fr(0), fr(1), fr(0)}};
  const Rat half = fr(1, 2);
  e.omega = {{half - eps, half, eps}, {half - eps, half, eps}, {2 * eps, fr(0), 1 - 2 * eps}};

  inst.allocation.rows = {{half - eps, half, eps},
                          {half + eps, fr(0), half - eps},
                          {fr(0), half, half}};

  LexPriceSystem sys;
  sys.P = {{fr(1), 4 * eps, fr(0)}};
  sys.alpha = {{fr(0), fr(0), fr(0)}};
  inst.system = sys;
  return inst;
}

std::vector<Instance> all_instances() {
  return {stable_yet_rejectable(), satiation_surplus(),    two_tier_chain(),
          three_tier_chain(),      two_tier_merged(),      perturbed_competitive(fr(1, 8))};
}

namespace {

// Mixes three random permutation matrices with positive integer weights that
// sum to 12, so every entry is a multiple of 1/12. Keeping random data on the
// same lattice as the brute-force blocking oracle (resolution 1/12) makes
// "grid oracle agrees with the exact search" a meaningful comparison; coarser
// denominators such as fifths would be unrepresentable on that grid.
RatMat random_bistochastic(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<long> first(1, 10);
  std::vector<long> weights(3);
  weights[0] = first(rng);
  weights[1] = std::uniform_int_distribution<long>(1, 11 - weights[0])(rng);
  weights[2] = 12 - weights[0] - weights[1];
  RatMat mat(n, RatVec(n, fr(0)));
  for (int k = 0; k < 3; ++k) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t i = 0; i < n; ++i) mat[i][perm[i]] += fr(weights[k], 12);
  }
  return mat;
}

}  // namespace

Economy random_economy(unsigned seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> util(0, 4);
  Economy e;
  for (std::size_t j = 0; j < n; ++j) e.goods.push_back("g" + std::to_string(j + 1));
  for (std::size_t i = 0; i < n; ++i) e.agent_names.push_back("a" + std::to_string(i + 1));
  e.u.assign(n, RatVec(n, fr(0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) e.u[i][j] = Rat(util(rng));
  e.omega = random_bistochastic(rng, n);
  return e;
}

Allocation random_allocation(unsigned seed, std::size_t n) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  Allocation x;
  x.rows = random_bistochastic(rng, n);
  return x;
}

}  // namespace fixtures
}  // namespace lexmarket
