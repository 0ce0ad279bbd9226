#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lexmarket {

// Exact rational scalar. mpq_class keeps values canonical (gcd-reduced,
// positive denominator), which the string round-trip below relies on.
using Rat = mpq_class;

using RatVec = std::vector<Rat>;
using RatMat = std::vector<RatVec>;

// Parses "p", "-p", or "p/q" (q > 0 after canonicalization). Throws
// std::invalid_argument on malformed input or zero denominator.
Rat rat_from_string(const std::string& s);

// Canonical form: "p" when the denominator is 1, otherwise "p/q".
std::string rat_to_string(const Rat& r);

double rat_to_double(const Rat& r);

// Best rational approximation of v with denominator <= max_den, via
// continued-fraction convergents/semiconvergents. Throws on non-finite v.
Rat rationalize(double v, std::uint64_t max_den);

// Dense linear algebra helpers used throughout the exact layers.
Rat dot(const RatVec& a, const RatVec& b);
RatVec vec_sub(const RatVec& a, const RatVec& b);
RatVec vec_add(const RatVec& a, const RatVec& b);
RatVec vec_scale(const Rat& c, const RatVec& a);
Rat vec_sum(const RatVec& a);
bool is_zero_vec(const RatVec& a);

// Strict lexicographic order on vectors (used for deterministic output
// ordering and tie-breaks).
bool lex_less(const RatVec& a, const RatVec& b);

}  // namespace lexmarket
