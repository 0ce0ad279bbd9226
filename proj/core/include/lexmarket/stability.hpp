#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lexmarket/economy.hpp"
#include "lexmarket/rational.hpp"

namespace lexmarket {

struct FpoResult {
  bool efficient = false;
  // When not efficient: a dominating reallocation and the per-agent gains.
  std::optional<Allocation> dominating;
  RatVec gains;
};

// Fractional Pareto optimality over the full assignment polytope, decided by
// the gain-maximizing LP (efficient iff the total attainable gain is zero).
FpoResult is_fpo(const Economy& e, const Allocation& x);

struct IrResult {
  bool individually_rational = false;
  std::optional<std::size_t> agent;  // first violator
};

IrResult is_ir(const Economy& e, const Allocation& x);

enum class BlockMode {
  strong_blocking,  // all members strictly gain (absence = weak core)
  weak_blocking,    // all weakly gain, at least one strictly (absence = strong core)
};

struct BlockWitness {
  std::vector<std::size_t> coalition;
  RatMat bundles;  // one row per coalition member, same order
  Rat total_gain;
};

// First blocking coalition in size-ascending, then lexicographic order.
// Coalitions redistribute their own endowments. Capped at n <= 12.
std::optional<BlockWitness> block_search(const Economy& e, const Allocation& x, BlockMode mode);

struct StabilityVerdict {
  bool stable = false;
  std::optional<BlockWitness> endowment_block;   // strong block against (u, omega)
  std::optional<BlockWitness> allocation_block;  // weak block against (u, x)
};

// Stable = in the weak core of the endowment economy and in the strong core
// of the economy that re-endows every agent with their allocated bundle.
StabilityVerdict is_stable(const Economy& e, const Allocation& x);

enum class RejectRole { endowment, allocation };

struct RejectMember {
  std::size_t agent = 0;
  RejectRole role = RejectRole::endowment;
  Rat weight;              // replica mass fraction (infinite level) or multiplicity/N
  unsigned multiplicity = 0;  // exact copy count at finite level, 0 when fractional
  RatVec bundle;           // average consumption per copy
  bool strict = false;
};

struct CoalitionWitness {
  std::vector<RejectMember> members;
  Rat slack;                         // exact utility slack of the strict members
  std::optional<unsigned> replicas;  // nullopt = infinite-replica (fractional) witness
};

struct RejectVerdict {
  bool rejected = false;
  std::optional<CoalitionWitness> witness;
};

// Rejection test at replica level N (nullopt = the fractional, every-level
// limit). A coalition mixes endowment-bringing copies (strictly improving)
// with allocation-bringing copies (weakly improving; if there are no
// endowment bringers, at least one allocation copy must strictly improve).
// Capped at n <= 8.
RejectVerdict reject_search(const Economy& e, const Allocation& x,
                            std::optional<unsigned> replicas);

// Max-slack test for one fixed role pattern (used by the certifier to turn
// separation failures into concrete coalitions). `endow` / `alloc` mark the
// agents bringing endowment / allocation; `designated_strict` (only used when
// endow is empty) names the allocation bringer that must strictly gain.
std::optional<CoalitionWitness> check_coalition_pattern(
    const Economy& e, const Allocation& x, const std::vector<bool>& endow,
    const std::vector<bool>& alloc, std::optional<std::size_t> designated_strict);

}  // namespace lexmarket
