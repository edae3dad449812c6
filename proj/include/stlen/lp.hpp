#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "stlen/pieces.hpp"
#include "stlen/rational.hpp"

namespace stlen {

enum class Rel { eq, ge };

struct LPRow {
  std::string label;
  std::vector<Rat> coef;  // one per variable
  Rel rel;
  Rat rhs;
  bool operator==(const LPRow&) const = default;
};

/// min objective . x  subject to rows, x >= 0 (nonnegativity implicit).
struct RationalLP {
  std::vector<std::string> vars;
  std::vector<Rat> objective;
  std::vector<LPRow> rows;
  bool operator==(const RationalLP&) const = default;
};

/// The polyhedron of normalized gluing-consistent piece-count vectors:
/// one equality f_T(x) = f_{T'}(x) per compatible turn-type pair (L^2 rows,
/// labeled g0..), the normalization n(x) = 1 counting alpha_1 arcs, and the
/// aggregate inequality chi_Gamma(x) >= 0. Objective: minimize -chi_o(x).
/// Variable order matches collection order.
RationalLP build_polyhedron(const PieceCollection& collection);

/// Plain-text rendering; see README for the grammar. Deterministic, and
/// parse_lp_text(export_lp_text(lp)) == lp.
std::string export_lp_text(const RationalLP& lp);
RationalLP parse_lp_text(const std::string& text);

enum class LPStatus { optimal, infeasible };

struct LPSolution {
  LPStatus status = LPStatus::infeasible;
  Rat value;
  std::vector<Rat> vertex;  // one per variable
  std::vector<Rat> dual;    // one per row
};

nlohmann::json solution_to_json(const RationalLP& lp, const LPSolution& sol);

}  // namespace stlen
