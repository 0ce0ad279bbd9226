#pragma once

#include <stdexcept>
#include <vector>

#include "lexmarket/economy.hpp"
#include "lexmarket/rational.hpp"

namespace lexmarket {

// Thrown when an exact enumeration would exceed the supported instance size.
struct InstanceTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bounded polytope {x : A x <= b, E x = f} in dimension A[0].size().
struct Polytope {
  RatMat A;
  RatVec b;
  RatMat E;
  RatVec f;

  std::size_t dim() const { return A.empty() ? (E.empty() ? 0 : E[0].size()) : A[0].size(); }
  void add_le(const RatVec& row, const Rat& rhs);
  void add_eq(const RatVec& row, const Rat& rhs);
  // x_j >= 0 for all coordinates.
  void add_nonnegativity();
};

// All vertices, exact, deduplicated, in ascending lexicographic order.
// Enumerates bases of active constraints; dimension is capped at 8.
std::vector<RatVec> enumerate_vertices(const Polytope& P);

// Vertices of the preferred set {y in the sub-simplex : u_i . y >= t,
// y_j = 0 for j outside S}. S empty-mask means full support. Vectors are
// returned in full dimension n with zeros off S.
std::vector<RatVec> preferred_vertices(const Economy& e, std::size_t agent, const Rat& t,
                                       const std::vector<bool>& support);

}  // namespace lexmarket
