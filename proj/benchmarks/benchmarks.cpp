// Micro-benchmarks for the exact kernels: welfare LP, Birkhoff peeling,
// tuple verification, and the replica-rejection search.

#include <benchmark/benchmark.h>

#include "lexmarket/assignment.hpp"
#include "lexmarket/fixtures.hpp"
#include "lexmarket/lde.hpp"
#include "lexmarket/stability.hpp"

using namespace lexmarket;

namespace {

void bm_welfare_lp(benchmark::State& state) {
  Economy e = fixtures::random_economy(7, static_cast<std::size_t>(state.range(0)));
  RatVec lambda(e.n(), Rat(1));
  for (auto _ : state) {
    WelfareResult r = max_welfare_assignment(e, lambda);
    benchmark::DoNotOptimize(r.value);
  }
}

void bm_birkhoff(benchmark::State& state) {
  Allocation x = fixtures::random_allocation(11, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto terms = bvn_decompose(x.rows);
    benchmark::DoNotOptimize(terms.size());
  }
}

void bm_verify_three_tier(benchmark::State& state) {
  fixtures::Instance inst = fixtures::three_tier_chain();
  for (auto _ : state) {
    VerificationReport r = verify_lde(inst.economy, inst.allocation, *inst.system);
    benchmark::DoNotOptimize(r.ok);
  }
}

void bm_strong_cbp_three_tier(benchmark::State& state) {
  fixtures::Instance inst = fixtures::three_tier_chain();
  for (auto _ : state) {
    VerificationReport r = check_strong_cbp(inst.economy, inst.allocation, *inst.system);
    benchmark::DoNotOptimize(r.ok);
  }
}

void bm_reject_limit(benchmark::State& state) {
  Economy e = fixtures::random_economy(3, 3);
  Allocation x = fixtures::random_allocation(103, 3);
  for (auto _ : state) {
    RejectVerdict v = reject_search(e, x, std::nullopt);
    benchmark::DoNotOptimize(v.rejected);
  }
}

BENCHMARK(bm_welfare_lp)->Arg(4)->Arg(6)->Arg(8);
BENCHMARK(bm_birkhoff)->Arg(4)->Arg(6)->Arg(8);
BENCHMARK(bm_verify_three_tier);
BENCHMARK(bm_strong_cbp_three_tier);
BENCHMARK(bm_reject_limit);

}  // namespace

BENCHMARK_MAIN();
