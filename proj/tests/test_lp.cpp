#include <doctest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "stlen/lp.hpp"
#include "stlen/simplex.hpp"

using namespace stlen;
using stlen::testing::cyclic_ctx;

namespace {

Rat product_formula(int p, int q) {
  if (p > q) std::swap(p, q);
  return Rat(1) - Rat(q, p * (q - 1));
}

Rat commutator_formula(int p, int q) { return Rat(1) - Rat(1, std::min(p, q) - 1); }

Rat brute_min(const RationalLP& lp) {
  auto verts = brute_force_vertices(lp);
  REQUIRE(!verts.empty());
  Rat best = verts[0].value;
  for (const auto& v : verts) best = std::min(best, v.value);
  return best;
}

}  // namespace

TEST_CASE("product LP structure for p = q = 2") {
  PieceCollection c = product_collection(2, 2);
  RationalLP lp = build_polyhedron(c);
  REQUIRE(lp.vars == std::vector<std::string>{"A_1", "A_1_1", "B_1", "B_1_1"});
  REQUIRE(lp.rows.size() == 3);

  const LPRow& glue = lp.rows[0];
  CHECK(glue.rel == Rel::eq);
  CHECK(glue.coef == std::vector<Rat>{1, 2, -1, -2});
  CHECK(glue.rhs == 0);

  const LPRow& norm = lp.rows[1];
  CHECK(norm.rel == Rel::eq);
  CHECK(norm.coef == std::vector<Rat>{1, 2, 0, 0});
  CHECK(norm.rhs == 1);

  const LPRow& chi = lp.rows[2];
  CHECK(chi.rel == Rel::ge);
  CHECK(chi.coef == std::vector<Rat>{Rat(1, 2), 0, Rat(1, 2), 0});
  CHECK(chi.rhs == 0);

  CHECK(lp.objective == std::vector<Rat>{Rat(1, 2), 0, Rat(1, 2), 0});
}

TEST_CASE("commutator LP has L^2 gluing rows") {
  RationalLP lp = build_polyhedron(commutator_collection(4, 3));
  CHECK(lp.vars.size() == 21);
  REQUIRE(lp.rows.size() == 6);  // 4 gluing + normalization + chi
  int glue = 0, eq = 0, ge = 0;
  for (const auto& r : lp.rows) {
    if (r.label[0] == 'g') ++glue;
    (r.rel == Rel::eq ? eq : ge)++;
  }
  CHECK(glue == 4);
  CHECK(eq == 5);
  CHECK(ge == 1);
}

TEST_CASE("solve_exact on the closed-form families") {
  SUBCASE("product values") {
    for (int p = 2; p <= 4; ++p)
      for (int q = p; q <= 5; ++q) {
        LPSolution sol = solve_exact(build_polyhedron(product_collection(p, q)));
        REQUIRE(sol.status == LPStatus::optimal);
        CHECK(sol.value == product_formula(p, q));
      }
  }
  SUBCASE("specific instances") {
    CHECK(solve_exact(build_polyhedron(product_collection(2, 2))).value == Rat(0));
    CHECK(solve_exact(build_polyhedron(product_collection(3, 5))).value == Rat(7, 12));
    CHECK(solve_exact(build_polyhedron(commutator_collection(3, 3))).value == Rat(1, 2));
  }
  SUBCASE("commutator values") {
    for (int p = 2; p <= 4; ++p)
      for (int q = p; q <= 4; ++q) {
        LPSolution sol = solve_exact(build_polyhedron(commutator_collection(p, q)));
        REQUIRE(sol.status == LPStatus::optimal);
        CHECK(sol.value == commutator_formula(p, q));
      }
  }
}

TEST_CASE("optimum is nonnegative and the dual is returned") {
  LPSolution sol = solve_exact(build_polyhedron(commutator_collection(2, 3)));
  CHECK(sol.value >= 0);
  CHECK(sol.dual.size() == 6);
}

TEST_CASE("brute force vertex oracle") {
  SUBCASE("product p = q = 2 attains 0 at the double-disk point") {
    RationalLP lp = build_polyhedron(product_collection(2, 2));
    auto verts = brute_force_vertices(lp);
    CHECK(brute_min(lp) == Rat(0));
    bool found = std::any_of(verts.begin(), verts.end(), [](const VertexPoint& v) {
      return v.x == std::vector<Rat>{0, Rat(1, 2), 0, Rat(1, 2)};
    });
    CHECK(found);
  }
  SUBCASE("commutator p = q = 2 attains 0") {
    CHECK(brute_min(build_polyhedron(commutator_collection(2, 2))) == Rat(0));
  }
  SUBCASE("degenerate one-variable LP") {
    RationalLP lp;
    lp.vars = {"x"};
    lp.objective = {Rat(0)};
    lp.rows = {{"r", {Rat(1)}, Rel::eq, Rat(1)}};
    auto verts = brute_force_vertices(lp);
    REQUIRE(verts.size() == 1);
    CHECK(verts[0].x == std::vector<Rat>{Rat(1)});
    CHECK(verts[0].value == 0);
    CHECK(solve_exact(lp).value == 0);
  }
  SUBCASE("dimension cap") {
    CHECK_THROWS_AS(brute_force_vertices(build_polyhedron(commutator_collection(3, 3))),
                    std::invalid_argument);
  }
}

TEST_CASE("oracle equivalence on all small built-in LPs") {
  for (int p = 2; p <= 6; ++p)
    for (int q = p; q <= 6; ++q) {
      if (p + q > 12) continue;
      RationalLP lp = build_polyhedron(product_collection(p, q));
      CHECK(solve_exact(lp).value == brute_min(lp));
    }
  RationalLP lp = build_polyhedron(commutator_collection(2, 2));
  CHECK(solve_exact(lp).value == brute_min(lp));
}

TEST_CASE("forcing middle piece counts to zero keeps the optimum") {
  SUBCASE("product families") {
    for (int p = 3; p <= 4; ++p)
      for (int q = p; q <= 4; ++q) {
        PieceCollection c = product_collection(p, q);
        RationalLP lp = build_polyhedron(c);
        Rat base = solve_exact(lp).value;
        RationalLP restricted = lp;
        for (int v = 0; v < c.size(); ++v) {
          const PieceType& piece = c.pieces[v];
          int ord = element_order(c.ctx->group(piece.side),
                                  c.ctx->arc_element(piece.side, 1));
          int e = piece.turn_count();
          if (e > 1 && e < ord) {
            std::vector<Rat> row(lp.vars.size(), Rat(0));
            row[v] = 1;
            restricted.rows.push_back({"fix_" + lp.vars[v], row, Rel::eq, Rat(0)});
          }
        }
        CHECK(solve_exact(restricted).value == base);
      }
  }
  SUBCASE("commutator family") {
    PieceCollection c = commutator_collection(3, 3);
    RationalLP lp = build_polyhedron(c);
    Rat base = solve_exact(lp).value;
    RationalLP restricted = lp;
    for (int v = 0; v < c.size(); ++v) {
      const PieceType& piece = c.pieces[v];
      // restrict only the single-label pieces P_k^+-, Q_k^+- with 1 < k < order
      bool single_label =
          std::all_of(piece.arcs.begin(), piece.arcs.end(),
                      [&](int a) { return a == piece.arcs[0]; });
      if (!single_label) continue;
      int e = piece.turn_count();
      if (e > 1 && e < 3) {
        std::vector<Rat> row(lp.vars.size(), Rat(0));
        row[v] = 1;
        restricted.rows.push_back({"fix_" + lp.vars[v], row, Rel::eq, Rat(0)});
      }
    }
    CHECK(solve_exact(restricted).value == base);
  }
}

TEST_CASE("LP text export and parse round trip") {
  for (RationalLP lp : {build_polyhedron(product_collection(2, 2)),
                        build_polyhedron(product_collection(3, 4)),
                        build_polyhedron(commutator_collection(2, 3)),
                        build_polyhedron(commutator_collection(4, 3))}) {
    std::string text = export_lp_text(lp);
    RationalLP back = parse_lp_text(text);
    CHECK(back == lp);
    CHECK(export_lp_text(back) == text);
  }
}

TEST_CASE("LP text parse errors") {
  CHECK_THROWS_AS(parse_lp_text("min: 1 x;"), std::invalid_argument);  // missing vars
  CHECK_THROWS_AS(parse_lp_text("vars: x;\nmin: 1 y;"), std::invalid_argument);
  CHECK_THROWS_AS(parse_lp_text("vars: x;\nmin: 1 x;\nr: 1 x < 1;"), std::invalid_argument);
}

TEST_CASE("infeasible LP is reported") {
  RationalLP lp;
  lp.vars = {"x"};
  lp.objective = {Rat(1)};
  lp.rows = {{"r0", {Rat(1)}, Rel::eq, Rat(1)}, {"r1", {Rat(1)}, Rel::eq, Rat(2)}};
  CHECK(solve_exact(lp).status == LPStatus::infeasible);
}

TEST_CASE("solution JSON shape") {
  RationalLP lp = build_polyhedron(product_collection(2, 3));
  LPSolution sol = solve_exact(lp);
  nlohmann::json j = solution_to_json(lp, sol);
  CHECK(j.at("status") == "optimal");
  CHECK(j.at("value") == "1/4");
  CHECK(j.at("vertex").size() == lp.vars.size());
}
