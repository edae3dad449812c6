#include <doctest.h>

#include <algorithm>
#include <set>

#include "fixtures.hpp"
#include "stlen/simplex.hpp"
#include "stlen/surface.hpp"

using namespace stlen;
using stlen::testing::cyclic_ctx;

namespace {

// word ab over Z/p * Z/q: one P_n piece glued to n single-arc B pieces is not
// possible unless counts balance; this builds P_k plus k copies of Q_1.
SimpleSurface fan_surface(const CtxPtr& ctx, int k) {
  SimpleSurface s;
  s.ctx = ctx;
  s.pieces.push_back(make_piece(ctx, Factor::A, std::vector<int>(k, 1)));
  s.match.emplace_back(k, SlotRef{});
  for (int i = 0; i < k; ++i) {
    s.pieces.push_back(make_piece(ctx, Factor::B, {1}));
    s.match.emplace_back(1, SlotRef{});
    s.match[0][i] = {i + 1, 0};
    s.match[i + 1][0] = {0, i};
  }
  s.validate();
  return s;
}

}  // namespace

TEST_CASE("disk piece with tree of single-arc partners") {
  CtxPtr ctx = cyclic_ctx(2, 2, "a b");
  SimpleSurface s = fan_surface(ctx, 2);  // P_2 + 2 Q_1
  CHECK(minus_chi(s) == 1);               // e = 2, d = 1
  CHECK(degree(s) == 2);
  CHECK(hole_count(s) == 2);
  SurfaceStats st = analyze(s);
  CHECK(st.c == 1);
  CHECK(st.comps[0].chi == 1);
  CHECK(kappa(s) == 2);  // tree: 2e - 2
}

TEST_CASE("commutator certificate stats") {
  SUBCASE("p = q = 5 matches the closed form") {
    SimpleSurface s = certificate_commutator(5, 5);
    CHECK(s.piece_count() == 16);
    SurfaceStats st = analyze(s);
    CHECK(st.e == 16);
    CHECK(st.d == 10);
    CHECK(minus_chi(s) == 6);
    CHECK(degree(s) == 8);
    CHECK(st.c == 1);
    CHECK(st.comps[0].chi == 0);
    CHECK(surface_ratio(s) == Rat(3, 4));
    CHECK(kappa(s) == 2 * 16 - 2 + 1);
  }
  SUBCASE("ratio equals 1 - 1/(min(p,q)-1) on a grid") {
    for (int p = 2; p <= 5; ++p)
      for (int q = 2; q <= 5; ++q) {
        SimpleSurface s = certificate_commutator(p, q);
        SurfaceStats st = analyze(s);
        CHECK(st.c == 1);
        CHECK(st.comps[0].chi == 0);
        int m = std::min(p, q);
        if (m == 2)
          CHECK(minus_chi(s) == 0);
        else
          CHECK(surface_ratio(s) == Rat(1) - Rat(1, m - 1));
      }
  }
}

TEST_CASE("product certificate stats") {
  SUBCASE("p = 4, q = 5 roster") {
    SimpleSurface s = certificate_product(4, 5);
    SurfaceStats st = analyze(s);
    CHECK(st.e == 16);  // p (q - 1)
    CHECK(st.v == 16);
    CHECK(st.d == 5);
    CHECK(minus_chi(s) == 11);
    CHECK(degree(s) == 16);
    CHECK(st.c == 1);
    CHECK(st.comps[0].chi == 0);
    CHECK(surface_ratio(s) == Rat(11, 16));
    // roster: one Q_5, four P_4, eleven Q_1
    int q5 = 0, p4 = 0, q1 = 0;
    for (const PieceType& p : s.pieces) {
      if (p.side == Factor::B && p.turn_count() == 5) ++q5;
      if (p.side == Factor::A && p.turn_count() == 4) ++p4;
      if (p.side == Factor::B && p.turn_count() == 1) ++q1;
    }
    CHECK(q5 == 1);
    CHECK(p4 == 4);
    CHECK(q1 == 11);
  }
  SUBCASE("grid, including swapped order") {
    for (int p = 2; p <= 5; ++p)
      for (int q = 2; q <= 5; ++q) {
        SimpleSurface s = certificate_product(p, q);
        SurfaceStats st = analyze(s);
        CHECK(st.c == 1);
        CHECK(st.comps[0].chi == 0);
        int pp = std::min(p, q), qq = std::max(p, q);
        if (pp == 2 && qq == 2)
          CHECK(minus_chi(s) == 0);
        else
          CHECK(surface_ratio(s) == Rat(1) - Rat(qq, pp * (qq - 1)));
      }
  }
  SUBCASE("p = q = 2 is the double-edge torus-like certificate") {
    SimpleSurface s = certificate_product(2, 2);
    CHECK(s.piece_count() == 2);
    CHECK(minus_chi(s) == 0);
    CHECK(degree(s) == 2);
  }
}

TEST_CASE("assemble_from_vector") {
  PieceCollection c = product_collection(2, 2);
  SUBCASE("optimal vertex at scale 2") {
    std::vector<Rat> x{0, Rat(1, 2), 0, Rat(1, 2)};
    SimpleSurface s = assemble_from_vector(c, x);
    CHECK(s.piece_count() == 2);
    CHECK(minus_chi(s) == 0);
    CHECK(degree(s) == 2);
    SurfaceStats st = analyze(s);
    CHECK(st.c == 1);
    CHECK(st.comps[0].chi == 0);
    CHECK(count_vector(s, c) == std::vector<Rat>{0, 1, 0, 1});
  }
  SUBCASE("integer point needs no scaling") {
    std::vector<Rat> x{1, 0, 1, 0};
    SimpleSurface s = assemble_from_vector(c, x, 1);
    CHECK(degree(s) == 1);
    CHECK(s.piece_count() == 2);
    SurfaceStats st = analyze(s);
    CHECK(st.comps[0].chi == 1);
  }
  SUBCASE("infeasible points are rejected") {
    CHECK_THROWS_AS(assemble_from_vector(c, {Rat(1), 0, 0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(assemble_from_vector(c, {Rat(-1), Rat(1), 0, 0}), std::invalid_argument);
  }
  SUBCASE("known roster appears from the hand feasible point, p = q = 5") {
    PieceCollection cc = commutator_collection(5, 5);
    std::vector<Rat> x(cc.size(), Rat(0));
    // x_1^+- = (p-2)/n, x_p^+- = 1/n, w_1 = 2(p-1)/n at n = 2(p-1)
    int n = 8;
    x[cc.index_of_key("A_1")] = Rat(3, n);
    x[cc.index_of_key("A_2")] = Rat(3, n);
    x[cc.index_of_key("A_1_1_1_1_1")] = Rat(1, n);
    x[cc.index_of_key("A_2_2_2_2_2")] = Rat(1, n);
    x[cc.index_of_key("B_1_2")] = Rat(8, n);
    SimpleSurface s = assemble_from_vector(cc, x);
    CHECK(s.piece_count() == 16);
    CHECK(minus_chi(s) == 6);
    CHECK(degree(s) == 8);
    SurfaceStats st = analyze(s);
    CHECK(st.v - st.e == 0);
  }
}

TEST_CASE("surface/LP correspondence for certificates") {
  for (auto [p, q] : std::vector<std::pair<int, int>>{{2, 2}, {2, 3}, {3, 4}}) {
    PieceCollection c = product_collection(p, q);
    SimpleSurface s = certificate_product(p, q);
    std::vector<Rat> v = count_vector(s, c);
    for (Rat& e : v) e /= degree(s);
    CHECK(in_polyhedron(c, v));
    Rat chi_o(0);
    for (int i = 0; i < c.size(); ++i) chi_o += c.pieces[i].chi_o() * v[i];
    CHECK(chi_o == -surface_ratio(s));
    // lower-bound soundness: the optimum never exceeds a realized ratio
    CHECK(solve_exact(build_polyhedron(c)).value <= surface_ratio(s));
  }
}

TEST_CASE("splitting") {
  SUBCASE("oversize single-label piece splits by the subproduct form") {
    CtxPtr ctx = cyclic_ctx(2, 2, "a b");
    SimpleSurface s = fan_surface(ctx, 3);  // P_3 over Z/2: splittable
    auto site = find_splitting(s);
    REQUIRE(site.has_value());
    CHECK_FALSE(site->balanced_pair);
    long long k_before = kappa(s);
    SimpleSurface after = split_piece(s, *site);
    CHECK(after.piece_count() == s.piece_count() + 1);
    CHECK(minus_chi(after) == minus_chi(s) - 1);
    CHECK(degree(after) == degree(s));
    CHECK(analyze(after).e == analyze(s).e);
    long long drop = k_before - kappa(after);
    CHECK((drop == 1 || drop == 2));
  }
  SUBCASE("balanced-pair splitting on the eight-arc commutator piece") {
    CtxPtr ctx = cyclic_ctx(2, 2, "a b a^-1 b^-1");
    // C with two copies of each turn type; (1,1)/(2,2) turns close through
    // one-arc pieces, the mixed turns share two-arc pieces
    SimpleSurface s;
    s.ctx = ctx;
    s.pieces.push_back(make_piece(ctx, Factor::A, {1, 1, 2, 2, 1, 1, 2, 2}));
    s.match.emplace_back(8, SlotRef{});
    auto add = [&](const std::vector<int>& arcs) {
      s.pieces.push_back(make_piece(ctx, Factor::B, arcs));
      s.match.emplace_back(s.pieces.back().turn_count(), SlotRef{});
      return s.piece_count() - 1;
    };
    auto tie = [&](int c_slot, int piece, const TurnType& want) {
      for (int u = 0; u < s.pieces[piece].turn_count(); ++u)
        if (s.pieces[piece].turn(u) == want) {
          s.match[0][c_slot] = {piece, u};
          s.match[piece][u] = {0, c_slot};
          return;
        }
      FAIL("fixture piece lacks wanted turn");
    };
    // slots of C: 0:(1,1) 1:(1,2) 2:(2,2) 3:(2,1) 4:(1,1) 5:(1,2) 6:(2,2) 7:(2,1)
    int b1a = add({1}), b1b = add({1});   // provide (1,1)
    int b2a = add({2}), b2b = add({2});   // provide (2,2)
    int t1a = add({1, 2}), t1b = add({1, 2});
    tie(1, b1a, {Factor::B, 1, 1});
    tie(5, b1b, {Factor::B, 1, 1});
    tie(3, b2a, {Factor::B, 2, 2});
    tie(7, b2b, {Factor::B, 2, 2});
    tie(0, t1a, {Factor::B, 2, 1});
    tie(2, t1a, {Factor::B, 1, 2});
    tie(4, t1b, {Factor::B, 2, 1});
    tie(6, t1b, {Factor::B, 1, 2});
    s.validate();

    // the (1,2)/(2,1) balanced pair pulls out a two-arc disk
    SplitSite site{0, 1, 3, true};
    SimpleSurface after = split_piece(s, site);
    CHECK(after.piece_count() == s.piece_count() + 1);
    CHECK(minus_chi(after) == minus_chi(s) - 1);
    CHECK(after.pieces[0].turn_count() == 2);
    CHECK(after.pieces[0].disk);
    const PieceType& c2 = after.pieces.back();
    CHECK(c2.turn_count() == 6);
    CHECK(c2.disk);

    // the remainder has two consecutive same-type turns with an identity
    // subproduct (order 2), so the subproduct form now applies to it
    auto next_site = find_splitting(after);
    REQUIRE(next_site.has_value());
    SimpleSurface third = split_piece(after, *next_site);
    CHECK(minus_chi(third) == minus_chi(s) - 2);
  }
  SUBCASE("precondition failures throw") {
    CtxPtr ctx = cyclic_ctx(3, 3, "a b");
    SimpleSurface s = fan_surface(ctx, 3);  // P_3 over Z/3 is a disk, no split
    CHECK_FALSE(find_splitting(s).has_value());
    CHECK_THROWS_AS(split_piece(s, SplitSite{0, 0, 1, false}), std::invalid_argument);
    CHECK_THROWS_AS(split_piece(s, SplitSite{0, 0, 1, true}), std::invalid_argument);
  }
}

namespace {

// path fixture over ab, p = q = 2: Q1 - P2 - Q2 - P2' - Q1'
SimpleSurface path_fixture(const CtxPtr& ctx) {
  SimpleSurface s;
  s.ctx = ctx;
  auto add = [&](Factor f, int n) {
    s.pieces.push_back(make_piece(ctx, f, std::vector<int>(n, 1)));
    s.match.emplace_back(n, SlotRef{});
    return s.piece_count() - 1;
  };
  int q1 = add(Factor::B, 1);
  int p2 = add(Factor::A, 2);
  int q2 = add(Factor::B, 2);
  int p2b = add(Factor::A, 2);
  int q1b = add(Factor::B, 1);
  auto tie = [&](int pa, int sa, int pb, int sb) {
    s.match[pa][sa] = {pb, sb};
    s.match[pb][sb] = {pa, sa};
  };
  tie(p2, 0, q1, 0);
  tie(p2, 1, q2, 0);
  tie(p2b, 0, q2, 1);
  tie(p2b, 1, q1b, 0);
  s.validate();
  return s;
}

// chi = 0 fixture with a depth-3 decorative chain over ab, p = q = 3:
// core P3 == Q3 (double edge), chain P3 - Q2 - P2 - Q1, leaf Q3 - P1
SimpleSurface chain_fixture(const CtxPtr& ctx) {
  SimpleSurface s;
  s.ctx = ctx;
  auto add = [&](Factor f, int n) {
    s.pieces.push_back(make_piece(ctx, f, std::vector<int>(n, 1)));
    s.match.emplace_back(n, SlotRef{});
    return s.piece_count() - 1;
  };
  int p3 = add(Factor::A, 3);
  int q3 = add(Factor::B, 3);
  int q2 = add(Factor::B, 2);
  int p2 = add(Factor::A, 2);
  int q1 = add(Factor::B, 1);
  int p1 = add(Factor::A, 1);
  auto tie = [&](int pa, int sa, int pb, int sb) {
    s.match[pa][sa] = {pb, sb};
    s.match[pb][sb] = {pa, sa};
  };
  tie(p3, 0, q3, 0);
  tie(p3, 1, q3, 1);
  tie(p3, 2, q2, 0);
  tie(p2, 0, q2, 1);
  tie(p2, 1, q1, 0);
  tie(p1, 0, q3, 2);
  s.validate();
  return s;
}

}  // namespace

TEST_CASE("rewiring classification and effect") {
  CtxPtr ctx22 = cyclic_ctx(2, 2, "a b");
  SUBCASE("type I on a path: components split into a loop and a tree") {
    SimpleSurface s = path_fixture(ctx22);
    // edges: 0: P2-Q1, 1: P2-Q2, 2: P2'-Q2, 3: P2'-Q1'
    CHECK(classify_rewiring(s, 0, 2) == RewiringType::I);
    CHECK(classify_rewiring(s, 1, 3) == RewiringType::I);
    CHECK(classify_rewiring(s, 0, 1) == RewiringType::other);
    CHECK(classify_rewiring(s, 0, 3) == RewiringType::other);
    long long k_before = kappa(s);
    SimpleSurface after = rewire(s, 0, 2);
    SurfaceStats st = analyze(after);
    CHECK(st.c == 2);
    std::multiset<int> chis{st.comps[0].chi, st.comps[1].chi};
    CHECK(chis == std::multiset<int>{0, 1});
    CHECK(kappa(after) == k_before - 1);
    CHECK(minus_chi(after) == minus_chi(s));
  }
  SUBCASE("type II on a decorative chain") {
    CtxPtr ctx33 = cyclic_ctx(3, 3, "a b");
    SimpleSurface s = chain_fixture(ctx33);
    // locate the two A->B oriented chain edges P3-Q2 and P2-Q1
    std::vector<SurfaceEdge> edges = edge_list(s);
    int e1 = -1, e2 = -1;
    for (int i = 0; i < static_cast<int>(edges.size()); ++i) {
      if (edges[i].a.piece == 0 && edges[i].b.piece == 2) e1 = i;
      if (edges[i].a.piece == 3 && edges[i].b.piece == 4) e2 = i;
    }
    REQUIRE(e1 >= 0);
    REQUIRE(e2 >= 0);
    CHECK(classify_rewiring(s, e1, e2) == RewiringType::II);
    long long k_before = kappa(s);
    SimpleSurface after = rewire(s, e1, e2);
    SurfaceStats st = analyze(after);
    CHECK(st.c == 2);
    CHECK(st.comps[0].chi == 0);
    CHECK(st.comps[1].chi == 0);
    CHECK(kappa(after) == k_before - 1);
  }
  SUBCASE("type III on an unwound core") {
    SimpleSurface cover = finite_cover(certificate_product(2, 2), 2);
    std::vector<SurfaceEdge> edges = edge_list(cover);
    int found1 = -1, found2 = -1;
    for (int i = 0; i < static_cast<int>(edges.size()) && found2 < 0; ++i)
      for (int j = i + 1; j < static_cast<int>(edges.size()) && found2 < 0; ++j)
        if (classify_rewiring(cover, i, j) == RewiringType::III) {
          found1 = i;
          found2 = j;
        }
    REQUIRE(found2 >= 0);
    long long k_before = kappa(cover);
    SimpleSurface after = rewire(cover, found1, found2);
    SurfaceStats st = analyze(after);
    CHECK(st.c == 2);
    CHECK(st.comps[0].chi == 0);
    CHECK(st.comps[1].chi == 0);
    CHECK(kappa(after) == k_before - 1);
  }
  SUBCASE("edges in distinct components merge") {
    auto [uni, off] = disjoint_union(path_fixture(ctx22), path_fixture(ctx22));
    CHECK(classify_rewiring(uni, 0, 4) == RewiringType::merge);
  }
  SUBCASE("same-type edges in different branches are not type II") {
    CtxPtr ctx33 = cyclic_ctx(3, 3, "a b");
    SimpleSurface s = chain_fixture(ctx33);
    std::vector<SurfaceEdge> edges = edge_list(s);
    int branch = -1, chain = -1;
    for (int i = 0; i < static_cast<int>(edges.size()); ++i) {
      if (edges[i].a.piece == 5 || edges[i].b.piece == 5) branch = i;  // Q3 - P1 leaf
      if (edges[i].a.piece == 3 && edges[i].b.piece == 4) chain = i;   // P2 - Q1
    }
    REQUIRE(branch >= 0);
    REQUIRE(chain >= 0);
    CHECK(classify_rewiring(s, branch, chain) == RewiringType::other);
  }
  SUBCASE("opposite-orientation core edges are not type III") {
    SimpleSurface s = certificate_product(2, 2);  // double-edge core
    CHECK(classify_rewiring(s, 0, 1) == RewiringType::other);
  }
  SUBCASE("parallel edges swap to themselves up to edge identity") {
    SimpleSurface s = certificate_product(2, 2);
    SimpleSurface after = rewire(s, 0, 1);
    CHECK(canonical_signature(after) == canonical_signature(s));
  }
  SUBCASE("degenerate and mismatched rewiring rejected") {
    SimpleSurface s = path_fixture(ctx22);
    CHECK_THROWS_AS(rewire(s, 0, 0), std::invalid_argument);
    SimpleSurface c = certificate_commutator(3, 3);
    // edges of distinct turn types exist here
    std::vector<SurfaceEdge> edges = edge_list(c);
    int i = 0, j = 1;
    bool found = false;
    for (i = 0; i < static_cast<int>(edges.size()) && !found; ++i)
      for (j = i + 1; j < static_cast<int>(edges.size()) && !found; ++j)
        if (c.slot_type(edges[i].a) != c.slot_type(edges[j].a)) found = true;
    REQUIRE(found);
    CHECK_THROWS_AS(rewire(c, i - 1, j - 1), std::invalid_argument);
  }
}

TEST_CASE("kappa additivity under disjoint union") {
  SimpleSurface s = certificate_commutator(3, 3);
  auto [uni, off] = disjoint_union(s, s);
  CHECK(kappa(uni) == 2 * kappa(s));
}

TEST_CASE("reduction to irreducible surfaces") {
  SUBCASE("already irreducible input is returned unchanged") {
    SimpleSurface s = certificate_product(3, 3);
    CHECK(is_irreducible(s).irreducible);
    ReduceResult r = reduce_to_irreducible(s);
    CHECK(r.steps == 0);
    REQUIRE(r.components.size() == 1);
    CHECK(canonical_signature(r.components[0]) == canonical_signature(s));
  }
  SUBCASE("long path fires a type-I rewiring") {
    CtxPtr ctx = cyclic_ctx(2, 2, "a b");
    SimpleSurface s = path_fixture(ctx);
    auto res = is_irreducible(s);
    CHECK_FALSE(res.irreducible);
    CHECK(std::holds_alternative<BoundViolation>(*res.witness));  // diameter 4 > 2L^2 = 2
    ReduceResult r = reduce_to_irreducible(s);
    CHECK(r.steps >= 1);
    CHECK(r.steps <= kappa(s));
    CHECK(r.components.size() == 2);
    Rat best = surface_ratio(r.components[0]);
    for (const auto& comp : r.components) best = std::min(best, surface_ratio(comp));
    CHECK(best <= surface_ratio(s));
  }
  SUBCASE("oversize piece splits first") {
    CtxPtr ctx = cyclic_ctx(2, 2, "a b");
    SimpleSurface s = fan_surface(ctx, 3);
    auto res = is_irreducible(s);
    CHECK_FALSE(res.irreducible);
    CHECK(std::holds_alternative<BoundViolation>(*res.witness));  // valence 3 > |A| L^2 = 2
    ReduceResult r = reduce_to_irreducible(s);
    for (const auto& comp : r.components) CHECK(is_irreducible(comp).irreducible);
  }
  SUBCASE("fan surface of exact order is irreducible") {
    CtxPtr ctx = cyclic_ctx(3, 5, "a b");
    SimpleSurface s = fan_surface(ctx, 3);  // P_3 + 3 Q_1, valence 3 <= 1*5
    auto res = is_irreducible(s);
    CHECK(res.irreducible);
  }
  SUBCASE("disconnected input to is_irreducible is an error") {
    SimpleSurface s = certificate_product(2, 2);
    auto [uni, off] = disjoint_union(s, s);
    CHECK_THROWS_AS(is_irreducible(uni), std::invalid_argument);
  }
}

TEST_CASE("finite covers") {
  SimpleSurface s = certificate_commutator(5, 5);
  SUBCASE("k = 1 is an isomorphic copy") {
    SimpleSurface c1 = finite_cover(s, 1);
    CHECK(canonical_signature(c1) == canonical_signature(s));
  }
  SUBCASE("k = 2 doubles the stats and keeps the ratio") {
    SimpleSurface c2 = finite_cover(s, 2);
    CHECK(c2.piece_count() == 32);
    CHECK(minus_chi(c2) == 12);
    CHECK(degree(c2) == 16);
    CHECK(surface_ratio(c2) == Rat(3, 4));
    SurfaceStats st = analyze(c2);
    CHECK(st.c == 1);
    CHECK(st.comps[0].chi == 0);
  }
  SUBCASE("ratio invariance for the product certificate") {
    SimpleSurface c3 = finite_cover(certificate_product(2, 2), 3);
    CHECK(minus_chi(c3) == 0);
    CHECK(degree(c3) == 6);
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(finite_cover(s, 0), std::invalid_argument);
    CtxPtr ctx = cyclic_ctx(2, 2, "a b");
    CHECK_THROWS_AS(finite_cover(fan_surface(ctx, 2), 2), std::invalid_argument);  // tree
  }
}

TEST_CASE("strip surfaces") {
  for (auto ctx : {cyclic_ctx(2, 3, "a b"), cyclic_ctx(3, 3, "a b a^-1 b^-1"),
                   cyclic_ctx(4, 2, "a b a^2 b")}) {
    for (const TurnType& t : all_turn_types(ctx->L())) {
      SimpleSurface s = strip_surface(ctx, t);
      SurfaceStats st = analyze(s);
      CHECK(st.c == 1);
      CHECK(st.comps[0].chi == 1);
      TurnType want = t.side == Factor::A ? t : compatible(t, ctx->L());
      bool found = false;
      for (const SurfaceEdge& e : edge_list(s))
        if (s.slot_type(e.a) == want) found = true;
      CHECK(found);
    }
  }
}

TEST_CASE("approximation by trees") {
  SimpleSurface cert = certificate_commutator(3, 3);
  Rat target = surface_ratio(cert);
  CHECK(target == Rat(1, 2));
  Rat prev;
  for (int k = 1; k <= 4; ++k) {
    SimpleSurface sk = approximate_by_tree(cert, k);
    SurfaceStats st = analyze(sk);
    CHECK(st.c == 1);
    CHECK(st.comps[0].chi == 1);
    Rat r = surface_ratio(sk);
    CHECK(r > target);
    if (k > 1) CHECK(r < prev);
    prev = r;
    CHECK(boundary_components(sk).size() == 1);  // torsion-admissible: one outer boundary
    for (const PieceType& p : sk.pieces)
      if (!p.disk) CHECK_FALSE(sk.ctx->group(p.side).is_identity(p.winding));
  }
  CHECK(prev - target < Rat(1, 5));
}

TEST_CASE("branched cover improvement") {
  SUBCASE("fan over ab, p = 2: unwinding a hole beats the tree ratio") {
    for (int q : {2, 3, 5}) {
      CtxPtr ctx = cyclic_ctx(2, q, "a b");
      SimpleSurface s = fan_surface(ctx, 2);  // P_2 + 2 Q_1, ratio 1/2
      int annulus = -1;
      for (int p = 0; p < s.piece_count(); ++p)
        if (!s.pieces[p].disk) annulus = p;
      REQUIRE(annulus >= 0);
      SimpleSurface better = branched_cover_improvement(s, annulus);
      CHECK(surface_ratio(better) < surface_ratio(s));
      SurfaceStats st = analyze(better);
      CHECK(st.c == 1);
      CHECK(st.comps[0].chi == 1);
    }
  }
  SUBCASE("approximation output improves strictly as well") {
    SimpleSurface t = approximate_by_tree(certificate_commutator(2, 3), 1);
    int annulus = -1;
    for (int p = 0; p < t.piece_count(); ++p)
      if (!t.pieces[p].disk) annulus = p;
    REQUIRE(annulus >= 0);
    SimpleSurface better = branched_cover_improvement(t, annulus);
    CHECK(surface_ratio(better) < surface_ratio(t));
  }
  SUBCASE("disk pieces are rejected") {
    CtxPtr ctx = cyclic_ctx(2, 2, "a b");
    SimpleSurface s = fan_surface(ctx, 2);
    CHECK_THROWS_AS(branched_cover_improvement(s, 0), std::invalid_argument);  // P_2 disk
  }
}

TEST_CASE("boundary traversal reads the word") {
  CtxPtr ctx = cyclic_ctx(2, 2, "a b");
  SimpleSurface s = fan_surface(ctx, 2);
  auto bds = boundary_components(s);
  REQUIRE(bds.size() == 1);
  REQUIRE(bds[0].size() == 4);
  // labels follow the cyclic order alpha_1 beta_1 alpha_1 beta_1
  for (size_t i = 0; i < bds[0].size(); ++i) {
    const SlotRef& arc = bds[0][i];
    Factor side = s.pieces[arc.piece].side;
    CHECK(side == (i % 2 == 0 ? Factor::A : Factor::B));
  }
}

TEST_CASE("small-surface enumeration") {
  SUBCASE("ab with p = q = 2, up to 4 pieces, attains ratio 0") {
    PieceCollection c = product_collection(2, 2);
    auto all = enumerate_small_surfaces_all(c, EnumCaps{4, true, true, true});
    REQUIRE(!all.empty());
    Rat best = surface_ratio(all[0]);
    for (const auto& s : all) best = std::min(best, surface_ratio(s));
    CHECK(best == Rat(0));
  }
  SUBCASE("two-piece census for p = q = 2") {
    PieceCollection c = product_collection(2, 2);
    auto all = enumerate_small_surfaces_all(c, EnumCaps{2, true, true, true});
    CHECK(all.size() == 2);  // P1-Q1 and the P2=Q2 double edge
  }
  SUBCASE("ab with p = 2, q = 3: nothing beats the LP bound 1/4") {
    PieceCollection c = product_collection(2, 3);
    Rat bound = solve_exact(build_polyhedron(c)).value;
    CHECK(bound == Rat(1, 4));
    int count = 0;
    enumerate_small_surfaces(c, EnumCaps{6, true, true, true}, [&](const SimpleSurface& s) {
      CHECK(surface_ratio(s) >= bound);
      ++count;
      return true;
    });
    CHECK(count > 0);
  }
  SUBCASE("empty collection gives an empty stream") {
    PieceCollection c{cyclic_ctx(2, 2, "a b"), Provenance::user, {}};
    CHECK(enumerate_small_surfaces_all(c, EnumCaps{}).empty());
  }
  SUBCASE("work cap refusal") {
    PieceCollection c = product_collection(5, 5);
    EnumCaps caps;
    caps.max_pieces = 8;
    caps.work_cap = 50;
    CHECK_THROWS_AS(enumerate_small_surfaces_all(c, caps), CapExceeded);
  }
}

TEST_CASE("surface JSON and DOT export") {
  SimpleSurface s = certificate_commutator(5, 5);
  SUBCASE("JSON round trip preserves the isomorphism class") {
    nlohmann::json j = surface_to_json(s);
    SimpleSurface back = surface_from_json(s.ctx, j);
    CHECK(canonical_signature(back) == canonical_signature(s));
    CHECK(surface_to_json(back) == j);
  }
  SUBCASE("DOT export is deterministic and complete") {
    std::string dot = surface_to_dot(s);
    CHECK(dot == surface_to_dot(s));
    CHECK(std::count(dot.begin(), dot.end(), '\n') == 2 + 16 + 16);  // header/footer + v + e
    CHECK(dot.find("doublecircle") != std::string::npos);
  }
}
