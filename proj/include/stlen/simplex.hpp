#pragma once

#include "stlen/lp.hpp"

namespace stlen {

/// Exact rational two-phase simplex with Bland's anti-cycling rule on a dense
/// tableau. On optimal exit the solution carries a dual vector that is
/// re-verified independently of the pivot path (dual feasibility and strong
/// duality); a verification failure throws std::logic_error.
LPSolution solve_exact(const RationalLP& lp);

struct VertexPoint {
  std::vector<Rat> x;  // one per variable
  Rat value;
};

/// All basic feasible solutions by exhaustive basis enumeration. Independent
/// oracle for solve_exact; refuses LPs with more than 12 variables.
std::vector<VertexPoint> brute_force_vertices(const RationalLP& lp);

}  // namespace stlen
