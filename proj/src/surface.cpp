#include "stlen/surface.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

#include "stlen/lp.hpp"

namespace stlen {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int x, int y) {
    x = find(x);
    y = find(y);
    if (x == y) return false;
    parent[y] = x;
    return true;
  }
};

}  // namespace

void SimpleSurface::validate() const {
  if (pieces.size() != match.size()) throw std::logic_error("matching table size mismatch");
  int L = ctx->L();
  for (int p = 0; p < piece_count(); ++p) {
    if (static_cast<int>(match[p].size()) != pieces[p].turn_count())
      throw std::logic_error("slot count mismatch on piece " + std::to_string(p));
    for (int s = 0; s < pieces[p].turn_count(); ++s) {
      SlotRef q = match[p][s];
      if (q.piece < 0 || q.piece >= piece_count() || q.slot < 0 ||
          q.slot >= pieces[q.piece].turn_count())
        throw std::logic_error("dangling slot reference");
      if (q == SlotRef{p, s}) throw std::logic_error("matching has a fixed point");
      if (match[q.piece][q.slot] != SlotRef{p, s})
        throw std::logic_error("matching is not an involution");
      if (pieces[p].side == pieces[q.piece].side)
        throw std::logic_error("matched slots on the same side");
      TurnType mine = pieces[p].turn(s);
      TurnType theirs = pieces[q.piece].turn(q.slot);
      if (compatible(mine, L) != theirs)
        throw std::logic_error("matched turns are not compatible: " + mine.str() + " vs " +
                               theirs.str());
    }
  }
}

std::vector<SurfaceEdge> edge_list(const SimpleSurface& s) {
  std::vector<SurfaceEdge> out;
  for (int p = 0; p < s.piece_count(); ++p) {
    if (s.pieces[p].side != Factor::A) continue;
    for (int t = 0; t < s.pieces[p].turn_count(); ++t)
      out.push_back({SlotRef{p, t}, s.match[p][t]});
  }
  // already sorted by (a.piece, a.slot) by construction
  return out;
}

SurfaceStats analyze(const SimpleSurface& s) {
  int n = s.piece_count();
  SurfaceStats st;
  st.v = n;
  std::vector<SurfaceEdge> edges = edge_list(s);
  st.e = static_cast<int>(edges.size());

  UnionFind uf(n);
  for (const SurfaceEdge& e : edges) uf.unite(e.a.piece, e.b.piece);
  std::map<int, int> comp_ids;
  st.comp_of.assign(n, -1);
  for (int p = 0; p < n; ++p) {
    int root = uf.find(p);
    auto it = comp_ids.emplace(root, static_cast<int>(comp_ids.size())).first;
    st.comp_of[p] = it->second;
  }
  st.c = static_cast<int>(comp_ids.size());
  st.comps.resize(st.c);

  for (int p = 0; p < n; ++p) {
    ComponentStats& c = st.comps[st.comp_of[p]];
    c.pieces.push_back(p);
    c.v += 1;
    if (s.pieces[p].disk) {
      ++c.disks;
      ++st.d;
    }
    c.degree += s.pieces[p].alpha1_count();
  }
  for (int ei = 0; ei < st.e; ++ei) ++st.comps[st.comp_of[edges[ei].a.piece]].e;
  for (ComponentStats& c : st.comps) {
    c.chi = c.v - c.e;
    c.minus_chi = c.e - c.disks;
    if (c.chi == 0) ++st.ell;
  }

  // adjacency (by edge index) for core/tree structure
  std::vector<std::vector<int>> incident(n);
  for (int ei = 0; ei < st.e; ++ei) {
    incident[edges[ei].a.piece].push_back(ei);
    incident[edges[ei].b.piece].push_back(ei);
  }
  auto edge_other = [&](int ei, int p) {
    return edges[ei].a.piece == p ? edges[ei].b.piece : edges[ei].a.piece;
  };

  st.root_of.assign(n, -1);
  st.depth_of.assign(n, -1);
  st.parent_edge.assign(n, -1);

  for (int ci = 0; ci < st.c; ++ci) {
    ComponentStats& c = st.comps[ci];
    if (c.chi != 0) continue;
    // peel leaves; the survivors form the unique embedded loop
    std::vector<int> deg(n, 0);
    std::vector<bool> alive(n, false);
    std::vector<bool> edge_alive(st.e, false);
    for (int p : c.pieces) {
      alive[p] = true;
      deg[p] = static_cast<int>(incident[p].size());
    }
    for (int ei = 0; ei < st.e; ++ei)
      if (st.comp_of[edges[ei].a.piece] == ci) edge_alive[ei] = true;
    std::queue<int> q;
    for (int p : c.pieces)
      if (deg[p] == 1) q.push(p);
    while (!q.empty()) {
      int p = q.front();
      q.pop();
      if (!alive[p]) continue;
      alive[p] = false;
      for (int ei : incident[p]) {
        if (!edge_alive[ei]) continue;
        edge_alive[ei] = false;
        int o = edge_other(ei, p);
        if (alive[o] && --deg[o] == 1) q.push(o);
      }
    }
    // order the core cycle starting from its smallest vertex
    int start = -1;
    for (int p : c.pieces)
      if (alive[p]) {
        start = p;
        break;
      }
    if (start < 0) throw std::logic_error("chi = 0 component without a core");
    int cur = start;
    do {
      c.core_pieces.push_back(cur);
      int chosen = -1;
      for (int ei : incident[cur])
        if (edge_alive[ei]) {
          chosen = ei;
          break;
        }
      if (chosen < 0) throw std::logic_error("core traversal failed");
      c.core_edges.push_back(chosen);
      edge_alive[chosen] = false;
      cur = edge_other(chosen, cur);
    } while (cur != start);

    // root every decorative-tree vertex at its nearest core vertex
    std::queue<int> bfs;
    for (int p : c.core_pieces) {
      st.root_of[p] = p;
      st.depth_of[p] = 0;
      bfs.push(p);
    }
    std::set<int> core_edge_set(c.core_edges.begin(), c.core_edges.end());
    while (!bfs.empty()) {
      int p = bfs.front();
      bfs.pop();
      for (int ei : incident[p]) {
        if (core_edge_set.count(ei)) continue;
        int o = edge_other(ei, p);
        if (st.depth_of[o] >= 0) continue;
        st.depth_of[o] = st.depth_of[p] + 1;
        st.root_of[o] = st.root_of[p];
        st.parent_edge[o] = ei;
        bfs.push(o);
      }
    }
  }
  return st;
}

long long minus_chi(const SimpleSurface& s) {
  long long a_slots = 0;
  long long b_slots = 0;
  long long d = 0;
  Rat chi_pieces(0);
  for (const PieceType& p : s.pieces) {
    (p.side == Factor::A ? a_slots : b_slots) += p.turn_count();
    if (p.disk) ++d;
    chi_pieces += p.chi_o();
  }
  if (a_slots != b_slots) throw std::logic_error("turn slots do not balance across sides");
  long long e = a_slots;
  long long via_graph = e - d;
  // second route: chi(S) is the sum of the piece contributions chi(P) - e_P/2
  Rat via_pieces = -chi_pieces;
  if (via_pieces != via_graph)
    throw std::logic_error("Euler characteristic cross-check failed");
  return via_graph;
}

long long degree(const SimpleSurface& s) {
  long long n = 0;
  for (const PieceType& p : s.pieces) n += p.alpha1_count();
  return n;
}

long long hole_count(const SimpleSurface& s) {
  return std::count_if(s.pieces.begin(), s.pieces.end(),
                       [](const PieceType& p) { return !p.disk; });
}

Rat surface_ratio(const SimpleSurface& s) {
  long long n = degree(s);
  if (n <= 0) throw std::invalid_argument("surface has degree zero");
  return Rat(minus_chi(s), n);
}

long long kappa(const SimpleSurface& s) {
  SurfaceStats st = analyze(s);
  return 2LL * st.e - 2LL * st.c + st.ell;
}

std::vector<Rat> count_vector(const SimpleSurface& s, const PieceCollection& collection) {
  std::vector<Rat> x(collection.size(), Rat(0));
  for (const PieceType& p : s.pieces) {
    int i = collection.index_of(p);
    if (i < 0) throw std::invalid_argument("surface uses piece " + p.key() +
                                           " outside the collection");
    x[i] += 1;
  }
  return x;
}

bool in_polyhedron(const PieceCollection& collection, const std::vector<Rat>& x,
                   std::string* reason) {
  if (static_cast<int>(x.size()) != collection.size()) {
    if (reason) *reason = "dimension mismatch";
    return false;
  }
  for (const Rat& v : x)
    if (v < 0) {
      if (reason) *reason = "negative component";
      return false;
    }
  RationalLP lp = build_polyhedron(collection);
  for (const LPRow& row : lp.rows) {
    Rat lhs(0);
    for (size_t j = 0; j < x.size(); ++j) lhs += row.coef[j] * x[j];
    bool ok = row.rel == Rel::eq ? lhs == row.rhs : lhs >= row.rhs;
    if (!ok) {
      if (reason) *reason = "violates row " + row.label;
      return false;
    }
  }
  return true;
}

SimpleSurface assemble_from_vector(const PieceCollection& collection, const std::vector<Rat>& x,
                                   long long scale_hint) {
  if (scale_hint < 1) throw std::invalid_argument("scale hint must be positive");
  std::string why;
  if (!in_polyhedron(collection, x, &why))
    throw std::invalid_argument("point is not in the polyhedron: " + why);

  BigInt scale = denominator_lcm(x) * scale_hint;
  SimpleSurface s;
  s.ctx = collection.ctx;
  for (int i = 0; i < collection.size(); ++i) {
    Rat cnt = x[i] * Rat(scale);
    if (denominator(cnt) != 1) throw std::logic_error("scaling failed");
    long long k = to_ll(numerator(cnt));
    for (long long c = 0; c < k; ++c) {
      s.pieces.push_back(collection.pieces[i]);
      s.match.emplace_back(collection.pieces[i].turn_count(), SlotRef{});
    }
  }

  // group slots by turn type, then pair across components first
  int L = s.ctx->L();
  std::map<TurnType, std::vector<SlotRef>> slots_by_type;
  for (int p = 0; p < s.piece_count(); ++p)
    for (int t = 0; t < s.pieces[p].turn_count(); ++t)
      slots_by_type[s.pieces[p].turn(t)].push_back({p, t});

  UnionFind uf(s.piece_count());
  for (int i = 1; i <= L; ++i) {
    for (int j = 1; j <= L; ++j) {
      TurnType ta{Factor::A, i, j};
      TurnType tb = compatible(ta, L);
      auto& as = slots_by_type[ta];
      auto& bs = slots_by_type[tb];
      if (as.size() != bs.size()) throw std::logic_error("gluing counts do not balance");
      std::vector<bool> b_used(bs.size(), false);
      for (const SlotRef& a : as) {
        int chosen = -1;
        for (size_t k = 0; k < bs.size(); ++k)
          if (!b_used[k] && uf.find(a.piece) != uf.find(bs[k].piece)) {
            chosen = static_cast<int>(k);
            break;
          }
        if (chosen < 0)
          for (size_t k = 0; k < bs.size(); ++k)
            if (!b_used[k]) {
              chosen = static_cast<int>(k);
              break;
            }
        b_used[chosen] = true;
        s.match[a.piece][a.slot] = bs[chosen];
        s.match[bs[chosen].piece][bs[chosen].slot] = a;
        uf.unite(a.piece, bs[chosen].piece);
      }
    }
  }
  s.validate();
  return s;
}

namespace {

// make_piece with the rotation it applied, so callers can map slot indices:
// final slot u corresponds to input slot (u + r) mod e.
std::pair<PieceType, int> make_piece_rot(const CtxPtr& ctx, Factor side,
                                         const std::vector<int>& arcs) {
  PieceType p = make_piece(ctx, side, arcs);
  int e = static_cast<int>(arcs.size());
  for (int r = 0; r < e; ++r) {
    bool matches = true;
    for (int k = 0; k < e && matches; ++k) matches = p.arcs[k] == arcs[(r + k) % e];
    if (matches) return {p, r};
  }
  throw std::logic_error("rotation reconstruction failed");
}

bool group_is_abelian(const FiniteGroup& g) {
  for (int x = 0; x < g.order(); ++x)
    for (int y = x + 1; y < g.order(); ++y)
      if (g.mul(x, y) != g.mul(y, x)) return false;
  return true;
}

// Deterministic Eulerian circuit over the label-transition multigraph of the
// given slots (each slot is a turn from(arc) -> to(arc)). Returns the slot
// order of a single closed circuit, or nullopt if none exists.
std::optional<std::vector<int>> single_circuit(const PieceType& piece,
                                               const std::vector<int>& slots) {
  if (slots.empty()) return std::nullopt;
  std::map<int, std::vector<std::pair<int, int>>> out_edges;  // from -> (to, slot)
  std::map<int, int> degree_balance;
  for (int s : slots) {
    TurnType t = piece.turn(s);
    out_edges[t.from].push_back({t.to, s});
    ++degree_balance[t.from];
    --degree_balance[t.to];
  }
  for (auto& [from, v] : out_edges) std::sort(v.begin(), v.end());
  for (auto& [label, bal] : degree_balance)
    if (bal != 0) return std::nullopt;

  // iterative Hierholzer from the smallest label with an out-edge,
  // collecting the slots of the circuit in reverse
  std::map<int, size_t> next_out;
  int start = out_edges.begin()->first;
  std::vector<int> circuit;
  std::vector<std::pair<int, int>> vstack{{start, -1}};  // (label, slot used to get here)
  while (!vstack.empty()) {
    auto [lab, via] = vstack.back();
    auto& outs = out_edges[lab];
    size_t& idx = next_out[lab];
    if (idx < outs.size()) {
      auto [to, slot] = outs[idx++];
      vstack.push_back({to, slot});
    } else {
      vstack.pop_back();
      if (via >= 0) circuit.push_back(via);
    }
  }
  std::reverse(circuit.begin(), circuit.end());
  if (circuit.size() != slots.size()) return std::nullopt;  // disconnected transitions
  return circuit;
}

}  // namespace

std::optional<SplitSite> find_splitting(const SimpleSurface& s) {
  for (int pi = 0; pi < s.piece_count(); ++pi) {
    const PieceType& p = s.pieces[pi];
    int e = p.turn_count();
    if (e < 2) continue;
    const FiniteGroup& g = s.ctx->group(p.side);
    // subproduct form: same-type slots with an identity arc product between
    for (int s1 = 0; s1 < e; ++s1) {
      for (int s2 = s1 + 1; s2 < e; ++s2) {
        if (p.turn(s1) != p.turn(s2)) continue;
        int prod = g.identity();
        for (int k = s1 + 1; k <= s2; ++k)
          prod = g.mul(prod, s.ctx->arc_element(p.side, p.arcs[k % e]));
        if (g.is_identity(prod)) return SplitSite{pi, s1, s2, false};
      }
    }
    if (!group_is_abelian(g)) continue;
    for (int s1 = 0; s1 < e; ++s1) {
      TurnType t1 = p.turn(s1);
      for (int s2 = s1 + 1; s2 < e; ++s2) {
        TurnType t2 = p.turn(s2);
        if (t2.from != t1.to || t2.to != t1.from) continue;
        int w = g.mul(s.ctx->arc_element(p.side, t1.from), s.ctx->arc_element(p.side, t1.to));
        if (!g.is_identity(w)) continue;
        std::vector<int> rest;
        for (int k = 0; k < e; ++k)
          if (k != s1 && k != s2) rest.push_back(k);
        if (!rest.empty() && single_circuit(p, rest)) return SplitSite{pi, s1, s2, true};
      }
    }
  }
  return std::nullopt;
}

SimpleSurface split_piece(const SimpleSurface& s, const SplitSite& site) {
  if (site.piece < 0 || site.piece >= s.piece_count())
    throw std::invalid_argument("bad piece index");
  const PieceType& p = s.pieces[site.piece];
  int e = p.turn_count();
  if (site.s1 < 0 || site.s2 <= site.s1 || site.s2 >= e)
    throw std::invalid_argument("bad slot positions");
  const FiniteGroup& g = s.ctx->group(p.side);

  // disk_arcs/disk_slotmap describe C1; rest_* describe C2; slotmaps list the
  // original slot carried by each input-position slot.
  std::vector<int> disk_arcs, rest_arcs;
  std::vector<int> disk_slots, rest_slots;

  if (!site.balanced_pair) {
    if (p.turn(site.s1) != p.turn(site.s2))
      throw std::invalid_argument("slots do not carry the same turn type");
    int prod = g.identity();
    for (int k = site.s1 + 1; k <= site.s2; ++k)
      prod = g.mul(prod, s.ctx->arc_element(p.side, p.arcs[k % e]));
    if (!g.is_identity(prod))
      throw std::invalid_argument("arc subproduct between the slots is not the identity");
    for (int k = site.s1 + 1; k <= site.s2; ++k) {
      disk_arcs.push_back(p.arcs[k % e]);
      disk_slots.push_back(k % e);
    }
    for (int k = site.s2 + 1; k <= site.s1 + e; ++k) {
      rest_arcs.push_back(p.arcs[k % e]);
      rest_slots.push_back(k % e);
    }
  } else {
    if (!group_is_abelian(g))
      throw std::invalid_argument("balanced-pair splitting needs an abelian factor");
    TurnType t1 = p.turn(site.s1);
    TurnType t2 = p.turn(site.s2);
    if (t2.from != t1.to || t2.to != t1.from)
      throw std::invalid_argument("slots do not carry mutually reversed turn types");
    int w = g.mul(s.ctx->arc_element(p.side, t1.from), s.ctx->arc_element(p.side, t1.to));
    if (!g.is_identity(w))
      throw std::invalid_argument("the two arc labels do not multiply to the identity");
    disk_arcs = {t1.from, t1.to};
    disk_slots = {site.s1, site.s2};
    std::vector<int> rest;
    for (int k = 0; k < e; ++k)
      if (k != site.s1 && k != site.s2) rest.push_back(k);
    if (rest.empty()) throw std::invalid_argument("splitting would leave an empty piece");
    auto circuit = single_circuit(p, rest);
    if (!circuit)
      throw std::invalid_argument("remaining turns do not close into one boundary");
    rest_slots = *circuit;
    for (int slot : rest_slots) rest_arcs.push_back(p.turn(slot).from);
  }
  if (disk_arcs.empty() || rest_arcs.empty())
    throw std::invalid_argument("splitting must leave two nonempty pieces");

  auto [c1, r1] = make_piece_rot(s.ctx, p.side, disk_arcs);
  auto [c2, r2] = make_piece_rot(s.ctx, p.side, rest_arcs);
  if (!c1.disk) throw std::logic_error("extracted piece is not a disk");
  if (c2.disk != p.disk) throw std::logic_error("remainder changed topological type");

  SimpleSurface out;
  out.ctx = s.ctx;
  out.pieces = s.pieces;
  out.match = s.match;
  int c2_index = s.piece_count();
  out.pieces[site.piece] = c1;
  out.pieces.push_back(c2);
  out.match[site.piece].assign(c1.turn_count(), SlotRef{});
  out.match.emplace_back(c2.turn_count(), SlotRef{});

  auto wire = [&out, &s, site](int new_piece, int new_slot, int orig_slot) {
    SlotRef partner = s.match[site.piece][orig_slot];
    out.match[new_piece][new_slot] = partner;
    out.match[partner.piece][partner.slot] = SlotRef{new_piece, new_slot};
  };
  int m1 = c1.turn_count();
  for (int u = 0; u < m1; ++u) wire(site.piece, u, disk_slots[(u + r1) % m1]);
  int m2 = c2.turn_count();
  for (int u = 0; u < m2; ++u) wire(c2_index, u, rest_slots[(u + r2) % m2]);

  out.validate();
  return out;
}

SimpleSurface rewire(const SimpleSurface& s, int e1, int e2) {
  std::vector<SurfaceEdge> edges = edge_list(s);
  if (e1 < 0 || e2 < 0 || e1 >= static_cast<int>(edges.size()) ||
      e2 >= static_cast<int>(edges.size()))
    throw std::invalid_argument("edge index out of range");
  if (e1 == e2) throw std::invalid_argument("rewiring needs two distinct edges");
  const SurfaceEdge& x = edges[e1];
  const SurfaceEdge& y = edges[e2];
  if (s.slot_type(x.a) != s.slot_type(y.a))
    throw std::invalid_argument("edges do not have the same turn type");

  SimpleSurface out = s;
  out.match[x.a.piece][x.a.slot] = y.b;
  out.match[y.b.piece][y.b.slot] = x.a;
  out.match[y.a.piece][y.a.slot] = x.b;
  out.match[x.b.piece][x.b.slot] = y.a;
  out.validate();
  return out;
}

namespace {

// entry side of an edge along a walk: the side of the vertex it is entered at
bool same_entry_side(const SimpleSurface& s, int enter1, int enter2) {
  return s.pieces[enter1].side == s.pieces[enter2].side;
}

// tree path between two vertices within one component (component must be
// acyclic over the given edge set); returns vertex list
std::vector<int> tree_path(const std::vector<std::vector<std::pair<int, int>>>& adj, int from,
                           int to) {
  std::vector<int> prev(adj.size(), -2);
  std::queue<int> q;
  q.push(from);
  prev[from] = -1;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    if (v == to) break;
    for (auto [w, ei] : adj[v])
      if (prev[w] == -2) {
        prev[w] = v;
        q.push(w);
      }
  }
  std::vector<int> path;
  for (int v = to; v != -1; v = prev[v]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

RewiringType classify_rewiring(const SimpleSurface& s, int e1, int e2) {
  std::vector<SurfaceEdge> edges = edge_list(s);
  if (e1 == e2) throw std::invalid_argument("need two distinct edges");
  const SurfaceEdge& x = edges[e1];
  const SurfaceEdge& y = edges[e2];
  if (s.slot_type(x.a) != s.slot_type(y.a))
    throw std::invalid_argument("edges do not have the same turn type");

  SurfaceStats st = analyze(s);
  int cx = st.comp_of[x.a.piece];
  int cy = st.comp_of[y.a.piece];
  if (cx != cy) return RewiringType::merge;
  const ComponentStats& comp = st.comps[cx];

  std::vector<std::vector<std::pair<int, int>>> adj(s.piece_count());
  for (int ei = 0; ei < static_cast<int>(edges.size()); ++ei) {
    adj[edges[ei].a.piece].push_back({edges[ei].b.piece, ei});
    adj[edges[ei].b.piece].push_back({edges[ei].a.piece, ei});
  }

  if (comp.chi == 1) {
    // type I candidate: path starting with e1 and ending with e2 (or the
    // reverse), same orientation at both crossings
    auto try_order = [&](const SurfaceEdge& first, const SurfaceEdge& second) {
      // endpoints of `first` closer to / farther from `second`
      for (int outer : {first.a.piece, first.b.piece}) {
        int inner = outer == first.a.piece ? first.b.piece : first.a.piece;
        for (int far : {second.a.piece, second.b.piece}) {
          int near = far == second.a.piece ? second.b.piece : second.a.piece;
          // path must run outer -e1-> inner ... near -e2-> far without
          // re-crossing either edge
          std::vector<int> mid = tree_path(adj, inner, near);
          if (mid.empty()) continue;
          if (std::find(mid.begin(), mid.end(), outer) != mid.end()) continue;
          if (std::find(mid.begin(), mid.end(), far) != mid.end()) continue;
          if (same_entry_side(s, outer, near)) return true;
        }
      }
      return false;
    };
    if (try_order(x, y) || try_order(y, x)) return RewiringType::I;
    return RewiringType::other;
  }

  if (comp.chi == 0) {
    std::set<int> core_edges(comp.core_edges.begin(), comp.core_edges.end());
    bool x_core = core_edges.count(e1) > 0;
    bool y_core = core_edges.count(e2) > 0;
    if (x_core && y_core) {
      // type III: same orientation along the core cycle
      int pos1 = -1, pos2 = -1;
      for (size_t k = 0; k < comp.core_edges.size(); ++k) {
        if (comp.core_edges[k] == e1) pos1 = static_cast<int>(k);
        if (comp.core_edges[k] == e2) pos2 = static_cast<int>(k);
      }
      // entered at core_pieces[k] when traversed in cycle order
      if (same_entry_side(s, comp.core_pieces[pos1], comp.core_pieces[pos2]))
        return RewiringType::III;
      return RewiringType::other;
    }
    if (!x_core && !y_core) {
      // type II: one edge on the root path of the other, same orientation
      auto rootward = [&](const SurfaceEdge& e) {
        int pa = e.a.piece, pb = e.b.piece;
        return st.depth_of[pa] < st.depth_of[pb] ? std::pair{pa, pb} : std::pair{pb, pa};
      };
      auto [x_up, x_down] = rootward(x);
      auto [y_up, y_down] = rootward(y);
      auto on_root_path = [&](int deep_vertex, int edge_index) {
        for (int v = deep_vertex; st.parent_edge[v] >= 0;) {
          int pe = st.parent_edge[v];
          if (pe == edge_index) return true;
          v = edges[pe].a.piece == v ? edges[pe].b.piece : edges[pe].a.piece;
        }
        return false;
      };
      // shallow edge first; orientation = side of the rootward endpoints
      if (on_root_path(y_up, e1) && same_entry_side(s, x_up, y_up)) return RewiringType::II;
      if (on_root_path(x_up, e2) && same_entry_side(s, y_up, x_up)) return RewiringType::II;
      return RewiringType::other;
    }
    return RewiringType::other;
  }
  return RewiringType::other;
}

std::string rewiring_type_str(RewiringType t) {
  switch (t) {
    case RewiringType::I: return "I";
    case RewiringType::II: return "II";
    case RewiringType::III: return "III";
    case RewiringType::merge: return "merge";
    case RewiringType::other: return "other";
  }
  return "other";
}

namespace {

SimpleSurface extract_component(const SimpleSurface& s, const SurfaceStats& st, int ci) {
  const ComponentStats& c = st.comps[ci];
  std::vector<int> new_index(s.piece_count(), -1);
  SimpleSurface out;
  out.ctx = s.ctx;
  for (int p : c.pieces) {
    new_index[p] = out.piece_count();
    out.pieces.push_back(s.pieces[p]);
    out.match.emplace_back(s.pieces[p].turn_count(), SlotRef{});
  }
  for (int p : c.pieces)
    for (int t = 0; t < s.pieces[p].turn_count(); ++t) {
      SlotRef q = s.match[p][t];
      out.match[new_index[p]][t] = SlotRef{new_index[q.piece], q.slot};
    }
  out.validate();
  return out;
}

}  // namespace

ReduceResult reduce_to_irreducible(const SimpleSurface& s) {
  {
    SurfaceStats st = analyze(s);
    for (const ComponentStats& c : st.comps)
      if (c.chi < 0)
        throw std::invalid_argument("component with negative graph Euler characteristic");
  }
  SimpleSurface cur = s;
  int steps = 0;
  while (true) {
    if (auto site = find_splitting(cur)) {
      cur = split_piece(cur, *site);
      ++steps;
      continue;
    }
    std::vector<SurfaceEdge> edges = edge_list(cur);
    bool fired = false;
    for (int i = 0; i < static_cast<int>(edges.size()) && !fired; ++i) {
      for (int j = i + 1; j < static_cast<int>(edges.size()) && !fired; ++j) {
        if (cur.slot_type(edges[i].a) != cur.slot_type(edges[j].a)) continue;
        RewiringType t = classify_rewiring(cur, i, j);
        if (t == RewiringType::I || t == RewiringType::II || t == RewiringType::III) {
          cur = rewire(cur, i, j);
          ++steps;
          fired = true;
        }
      }
    }
    if (!fired) break;
  }
  ReduceResult out;
  out.steps = steps;
  SurfaceStats st = analyze(cur);
  for (int ci = 0; ci < st.c; ++ci) out.components.push_back(extract_component(cur, st, ci));
  return out;
}

IrreducibilityResult is_irreducible(const SimpleSurface& s) {
  SurfaceStats st = analyze(s);
  if (st.c != 1) throw std::invalid_argument("is_irreducible needs a connected surface");
  const ComponentStats& comp = st.comps[0];
  if (comp.chi < 0)
    return {false, BoundViolation{"graph Euler characteristic is negative", -1}};

  int L = s.ctx->L();
  int valence_bound = L * L * std::max(s.ctx->A.order(), s.ctx->B.order());
  for (int p = 0; p < s.piece_count(); ++p)
    if (s.pieces[p].turn_count() > valence_bound)
      return {false, BoundViolation{"valence exceeds L^2 max(|A|,|B|)", p}};

  int diameter_bound = 2 * L * L;
  std::vector<SurfaceEdge> edges = edge_list(s);
  std::vector<std::vector<int>> adj(s.piece_count());
  for (const SurfaceEdge& e : edges) {
    adj[e.a.piece].push_back(e.b.piece);
    adj[e.b.piece].push_back(e.a.piece);
  }
  if (comp.chi == 1) {
    // tree diameter via double BFS
    auto farthest = [&](int from) {
      std::vector<int> dist(s.piece_count(), -1);
      std::queue<int> q;
      q.push(from);
      dist[from] = 0;
      int best = from;
      while (!q.empty()) {
        int v = q.front();
        q.pop();
        if (dist[v] > dist[best]) best = v;
        for (int w : adj[v])
          if (dist[w] < 0) {
            dist[w] = dist[v] + 1;
            q.push(w);
          }
      }
      return std::pair{best, dist[best]};
    };
    auto [far1, d1] = farthest(0);
    auto [far2, d2] = farthest(far1);
    if (d2 > diameter_bound)
      return {false, BoundViolation{"tree diameter exceeds 2L^2", far2}};
  } else {
    for (int p = 0; p < s.piece_count(); ++p)
      if (st.depth_of[p] > diameter_bound)
        return {false, BoundViolation{"decorative-tree depth exceeds 2L^2", p}};
    if (static_cast<int>(comp.core_edges.size()) > diameter_bound)
      return {false, BoundViolation{"core length exceeds 2L^2", comp.core_pieces[0]}};
  }

  if (auto site = find_splitting(s)) return {false, *site};
  for (int i = 0; i < static_cast<int>(edges.size()); ++i)
    for (int j = i + 1; j < static_cast<int>(edges.size()); ++j) {
      if (s.slot_type(edges[i].a) != s.slot_type(edges[j].a)) continue;
      RewiringType t = classify_rewiring(s, i, j);
      if (t == RewiringType::I || t == RewiringType::II || t == RewiringType::III)
        return {false, RewiringWitness{i, j, t}};
    }
  return {true, std::nullopt};
}

SimpleSurface finite_cover(const SimpleSurface& s, int k) {
  if (k < 1) throw std::invalid_argument("cover degree must be positive");
  SurfaceStats st = analyze(s);
  if (st.c != 1) throw std::invalid_argument("finite_cover needs a connected surface");
  if (st.comps[0].chi != 0)
    throw std::invalid_argument("finite_cover needs chi(Gamma) = 0");

  std::vector<SurfaceEdge> edges = edge_list(s);
  int shift_edge = st.comps[0].core_edges.back();

  int V = s.piece_count();
  SimpleSurface out;
  out.ctx = s.ctx;
  for (int t = 0; t < k; ++t)
    for (int p = 0; p < V; ++p) {
      out.pieces.push_back(s.pieces[p]);
      out.match.emplace_back(s.pieces[p].turn_count(), SlotRef{});
    }
  for (int ei = 0; ei < static_cast<int>(edges.size()); ++ei) {
    const SurfaceEdge& e = edges[ei];
    for (int t = 0; t < k; ++t) {
      int ta = t;
      int tb = ei == shift_edge ? (t + 1) % k : t;
      SlotRef a{ta * V + e.a.piece, e.a.slot};
      SlotRef b{tb * V + e.b.piece, e.b.slot};
      out.match[a.piece][a.slot] = b;
      out.match[b.piece][b.slot] = a;
    }
  }
  out.validate();
  return out;
}

SimpleSurface strip_surface(const CtxPtr& ctx, TurnType t) {
  int L = ctx->L();
  if (t.side == Factor::B) t = compatible(t, L);

  SimpleSurface s;
  s.ctx = ctx;
  auto add_piece = [&](Factor side, const std::vector<int>& arcs) {
    s.pieces.push_back(make_piece(ctx, side, arcs));
    s.match.emplace_back(s.pieces.back().turn_count(), SlotRef{});
    return s.piece_count() - 1;
  };
  auto slot_of = [&](int piece, const TurnType& want) {
    for (int u = 0; u < s.pieces[piece].turn_count(); ++u)
      if (s.pieces[piece].turn(u) == want) return u;
    throw std::logic_error("piece lacks the wanted turn");
  };
  auto tie = [&](SlotRef x, SlotRef y) {
    s.match[x.piece][x.slot] = y;
    s.match[y.piece][y.slot] = x;
  };

  // the holder of a turn (x,y): a one-arc piece when x == y (terminal),
  // otherwise the two-arc piece whose other slot continues the chain
  std::vector<SlotRef> pending;
  int center;
  if (t.from == t.to) {
    center = add_piece(t.side, {t.from});
    pending.push_back({center, 0});
  } else {
    center = add_piece(t.side, {t.from, t.to});
    pending.push_back({center, slot_of(center, t)});
    pending.push_back({center, slot_of(center, TurnType{t.side, t.to, t.from})});
  }

  int guard = 0;
  while (!pending.empty()) {
    if (++guard > 4 * L + 8) throw std::logic_error("strip construction does not terminate");
    SlotRef need = pending.back();
    pending.pop_back();
    TurnType want = compatible(s.slot_type(need), L);
    if (want.from == want.to) {
      int np = add_piece(want.side, {want.from});
      tie(need, {np, 0});
    } else {
      int np = add_piece(want.side, {want.from, want.to});
      tie(need, {np, slot_of(np, want)});
      pending.push_back({np, slot_of(np, TurnType{want.side, want.to, want.from})});
    }
  }
  s.validate();
  return s;
}

std::pair<SimpleSurface, int> disjoint_union(const SimpleSurface& a, const SimpleSurface& b) {
  if (a.ctx->word.syls != b.ctx->word.syls)
    throw std::invalid_argument("surfaces over different words");
  SimpleSurface out = a;
  int offset = a.piece_count();
  for (int p = 0; p < b.piece_count(); ++p) {
    out.pieces.push_back(b.pieces[p]);
    std::vector<SlotRef> row;
    for (const SlotRef& q : b.match[p]) row.push_back({q.piece + offset, q.slot});
    out.match.push_back(std::move(row));
  }
  out.validate();
  return {out, offset};
}

SimpleSurface approximate_by_tree(const SimpleSurface& s, int k) {
  SurfaceStats st = analyze(s);
  if (st.c != 1 || st.comps[0].chi != 0)
    throw std::invalid_argument("approximate_by_tree needs a connected chi(Gamma)=0 surface");

  std::vector<SurfaceEdge> edges = edge_list(s);
  int core_edge = st.comps[0].core_edges.front();
  TurnType t = s.slot_type(edges[core_edge].a);

  SimpleSurface cover = finite_cover(s, k);
  SimpleSurface strip = strip_surface(s.ctx, t);
  auto [uni, offset] = disjoint_union(cover, strip);

  // locate the copy-0 lift of the chosen core edge and the strip's edge of
  // the same type
  std::vector<SurfaceEdge> uedges = edge_list(uni);
  auto find_edge = [&](const SlotRef& a_slot) {
    for (int ei = 0; ei < static_cast<int>(uedges.size()); ++ei)
      if (uedges[ei].a == a_slot) return ei;
    throw std::logic_error("edge not found after union");
  };
  int lift = find_edge(edges[core_edge].a);  // copy 0 keeps original indices
  int strip_edge = -1;
  for (int ei = 0; ei < static_cast<int>(uedges.size()); ++ei) {
    if (uedges[ei].a.piece >= offset && uni.slot_type(uedges[ei].a) == t) {
      strip_edge = ei;
      break;
    }
  }
  if (strip_edge < 0) throw std::logic_error("strip lacks the requested edge type");

  SimpleSurface out = rewire(uni, lift, strip_edge);
  SurfaceStats ost = analyze(out);
  if (ost.c != 1 || ost.comps[0].chi != 1)
    throw std::logic_error("approximation did not produce a connected tree surface");
  return out;
}

SimpleSurface branched_cover_improvement(const SimpleSurface& s, int annulus_piece) {
  SurfaceStats st = analyze(s);
  if (st.c != 1 || st.comps[0].chi != 1)
    throw std::invalid_argument("branched cover needs a connected tree-graph surface");
  if (annulus_piece < 0 || annulus_piece >= s.piece_count())
    throw std::invalid_argument("bad piece index");
  const PieceType& C = s.pieces[annulus_piece];
  if (C.disk) throw std::invalid_argument("piece is a disk (hole order 1); nothing to unwind");
  const FiniteGroup& g = s.ctx->group(C.side);
  int k = element_order(g, C.winding);
  if (k < 2) throw std::logic_error("annulus with identity winding");

  int V = s.piece_count();
  auto adj_index = [&](int p) { return p < annulus_piece ? p : p - 1; };

  SimpleSurface out;
  out.ctx = s.ctx;
  // k copies of S minus the annulus piece
  for (int t = 0; t < k; ++t)
    for (int p = 0; p < V; ++p) {
      if (p == annulus_piece) continue;
      out.pieces.push_back(s.pieces[p]);
      out.match.emplace_back(s.pieces[p].turn_count(), SlotRef{});
    }
  // the covering disk piece
  int eC = C.turn_count();
  std::vector<int> big_arcs;
  for (int t = 0; t < k; ++t) big_arcs.insert(big_arcs.end(), C.arcs.begin(), C.arcs.end());
  auto [big, rot] = make_piece_rot(s.ctx, C.side, big_arcs);
  if (rot != 0 || !big.disk) throw std::logic_error("covering piece construction failed");
  int big_index = out.piece_count();
  out.pieces.push_back(big);
  out.match.emplace_back(big.turn_count(), SlotRef{});

  auto map_slot = [&](int copy, const SlotRef& orig) {
    return SlotRef{copy * (V - 1) + adj_index(orig.piece), orig.slot};
  };
  std::vector<SurfaceEdge> edges = edge_list(s);
  for (const SurfaceEdge& e : edges) {
    bool touches = e.a.piece == annulus_piece || e.b.piece == annulus_piece;
    for (int t = 0; t < k; ++t) {
      if (!touches) {
        SlotRef a = map_slot(t, e.a);
        SlotRef b = map_slot(t, e.b);
        out.match[a.piece][a.slot] = b;
        out.match[b.piece][b.slot] = a;
      } else {
        SlotRef on_c = e.a.piece == annulus_piece ? e.a : e.b;
        SlotRef other = e.a.piece == annulus_piece ? e.b : e.a;
        SlotRef a{big_index, t * eC + on_c.slot};
        SlotRef b = map_slot(t, other);
        out.match[a.piece][a.slot] = b;
        out.match[b.piece][b.slot] = a;
      }
    }
  }
  out.validate();
  return out;
}

namespace {

struct CertPieces {
  SimpleSurface s;
  explicit CertPieces(const CtxPtr& ctx) { s.ctx = ctx; }
  int add(Factor side, const std::vector<int>& arcs) {
    s.pieces.push_back(make_piece(s.ctx, side, arcs));
    s.match.emplace_back(s.pieces.back().turn_count(), SlotRef{});
    return s.piece_count() - 1;
  }
  void tie(int p1, int t1, int p2, int t2) {
    s.match[p1][t1] = {p2, t2};
    s.match[p2][t2] = {p1, t1};
  }
  int slot_of(int piece, const TurnType& want, int nth = 0) {
    for (int u = 0; u < s.pieces[piece].turn_count(); ++u)
      if (s.pieces[piece].turn(u) == want && nth-- == 0) return u;
    throw std::logic_error("piece lacks the wanted turn");
  }
};

}  // namespace

SimpleSurface certificate_product_for(const CtxPtr& ctx) {
  if (!is_product_word(*ctx)) throw std::invalid_argument("word is not of the shape ab");
  int p = element_order(ctx->A, ctx->word.a(1).elt);
  int q = element_order(ctx->B, ctx->word.b(1).elt);
  // the construction places the big trivially-winding piece on the side of
  // the larger order; formulas assume p <= q, so mirror when needed
  bool mirrored = p > q;
  Factor big_side = mirrored ? Factor::A : Factor::B;
  Factor small_side = other(big_side);
  int big_ord = mirrored ? p : q;    // q' in the p <= q normal form
  int small_ord = mirrored ? q : p;  // p'

  CertPieces c(ctx);
  int big0 = c.add(big_side, std::vector<int>(big_ord, 1));
  std::vector<int> smalls;  // pieces with small_ord arcs, one per big slot + core
  int s0 = c.add(small_side, std::vector<int>(small_ord, 1));
  c.tie(big0, 0, s0, 0);
  c.tie(big0, 1, s0, 1);
  for (int t = 2; t < small_ord; ++t) {
    int leaf = c.add(big_side, {1});
    c.tie(s0, t, leaf, 0);
  }
  for (int t = 2; t < big_ord; ++t) {
    int sp = c.add(small_side, std::vector<int>(small_ord, 1));
    c.tie(big0, t, sp, 0);
    for (int u = 1; u < small_ord; ++u) {
      int leaf = c.add(big_side, {1});
      c.tie(sp, u, leaf, 0);
    }
  }
  c.s.validate();
  return c.s;
}

SimpleSurface certificate_commutator_for(const CtxPtr& ctx) {
  if (!is_commutator_word(*ctx))
    throw std::invalid_argument("word is not of the shape a b a^-1 b^-1");
  int p = element_order(ctx->A, ctx->word.a(1).elt);
  int q = element_order(ctx->B, ctx->word.b(1).elt);
  // construction lives on the side of the smaller order
  bool mirrored = p > q;
  Factor side = mirrored ? Factor::B : Factor::A;     // carries P_n^{+-}-style pieces
  Factor glue_side = other(side);                     // carries the 2-arc disk pieces
  int m = mirrored ? q : p;                           // min(p, q)

  CertPieces c(ctx);
  // the 2-arc disk piece on the glue side: arcs (1, 2), turns (1,2) and (2,1)
  auto add_glue = [&]() { return c.add(glue_side, {1, 2}); };
  TurnType plus_partner = compatible(TurnType{side, 1, 1}, 2);   // pairs with (1,1) turns
  TurnType minus_partner = compatible(TurnType{side, 2, 2}, 2);  // pairs with (2,2) turns

  int big_plus = c.add(side, std::vector<int>(m, 1));
  int big_minus = c.add(side, std::vector<int>(m, 2));
  int g0 = add_glue();
  int g1 = add_glue();
  c.tie(big_plus, 0, g0, c.slot_of(g0, plus_partner));
  c.tie(g0, c.slot_of(g0, minus_partner), big_minus, 0);
  c.tie(big_minus, 1, g1, c.slot_of(g1, minus_partner));
  c.tie(g1, c.slot_of(g1, plus_partner), big_plus, 1);
  for (int t = 2; t < m; ++t) {
    int ga = add_glue();
    c.tie(big_plus, t, ga, c.slot_of(ga, plus_partner));
    int leaf_minus = c.add(side, {2});
    c.tie(ga, c.slot_of(ga, minus_partner), leaf_minus, 0);
    int gb = add_glue();
    c.tie(big_minus, t, gb, c.slot_of(gb, minus_partner));
    int leaf_plus = c.add(side, {1});
    c.tie(gb, c.slot_of(gb, plus_partner), leaf_plus, 0);
  }
  c.s.validate();
  return c.s;
}

SimpleSurface certificate_product(int p, int q) {
  if (p < 2 || q < 2) throw std::invalid_argument("orders must be at least 2");
  return certificate_product_for(product_collection(p, q).ctx);
}

SimpleSurface certificate_commutator(int p, int q) {
  if (p < 2 || q < 2) throw std::invalid_argument("orders must be at least 2");
  return certificate_commutator_for(commutator_collection(p, q).ctx);
}

std::vector<std::vector<SlotRef>> boundary_components(const SimpleSurface& s) {
  // next arc after (p, k): cross slot (p, k) to its partner (q, t); the
  // boundary continues on arc t+1 of q
  std::vector<std::vector<SlotRef>> out;
  std::set<SlotRef> seen;
  for (int p = 0; p < s.piece_count(); ++p) {
    for (int a = 0; a < s.pieces[p].turn_count(); ++a) {
      SlotRef arc{p, a};
      if (seen.count(arc)) continue;
      std::vector<SlotRef> orbit;
      SlotRef cur = arc;
      do {
        orbit.push_back(cur);
        seen.insert(cur);
        SlotRef partner = s.match[cur.piece][cur.slot];
        cur = SlotRef{partner.piece, (partner.slot + 1) % s.pieces[partner.piece].turn_count()};
      } while (!(cur == arc));
      out.push_back(std::move(orbit));
    }
  }
  return out;
}

void enumerate_small_surfaces(const PieceCollection& collection, const EnumCaps& caps,
                              const std::function<bool(const SimpleSurface&)>& visit) {
  if (collection.pieces.empty()) return;
  if (caps.max_pieces < 1) throw std::invalid_argument("max_pieces must be positive");
  int L = collection.ctx->L();
  long long work = 0;
  auto charge = [&](long long units) {
    work += units;
    if (work > caps.work_cap)
      throw CapExceeded("surface enumeration exceeds the work cap; reduce max_pieces "
                        "or pass --override-caps (work_cap)");
  };

  std::set<std::string> seen;
  bool stop = false;

  // one multiset of piece-type indices
  auto process_multiset = [&](const std::vector<int>& chosen) {
    // balance check per compatible turn-type pair
    std::map<TurnType, int> count;
    int v = static_cast<int>(chosen.size());
    int slots = 0;
    for (int idx : chosen) {
      const PieceType& p = collection.pieces[idx];
      slots += p.turn_count();
      for (int t = 0; t < p.turn_count(); ++t) ++count[p.turn(t)];
    }
    if (slots % 2) return;
    int e = slots / 2;
    int chi = v - e;
    bool chi_ok = (chi == 0 && caps.allow_chi0) || (chi == 1 && caps.allow_chi1);
    if (caps.connected_only && !chi_ok) return;
    for (int i = 1; i <= L; ++i)
      for (int j = 1; j <= L; ++j) {
        TurnType ta{Factor::A, i, j};
        if (count[ta] != count[compatible(ta, L)]) return;
      }

    // build instances and slot groups
    SimpleSurface base;
    base.ctx = collection.ctx;
    for (int idx : chosen) {
      base.pieces.push_back(collection.pieces[idx]);
      base.match.emplace_back(collection.pieces[idx].turn_count(), SlotRef{});
    }
    std::map<TurnType, std::vector<SlotRef>> groups;
    for (int p = 0; p < base.piece_count(); ++p)
      for (int t = 0; t < base.pieces[p].turn_count(); ++t)
        groups[base.pieces[p].turn(t)].push_back({p, t});

    std::vector<SlotRef> a_slots;
    for (auto& [t, v2] : groups)
      if (t.side == Factor::A) a_slots.insert(a_slots.end(), v2.begin(), v2.end());

    std::function<void(size_t)> rec = [&](size_t pos) {
      if (stop) return;
      charge(1);
      if (pos == a_slots.size()) {
        SurfaceStats st = analyze(base);
        if (caps.connected_only && st.c != 1) return;
        for (const ComponentStats& comp : st.comps) {
          bool ok = (comp.chi == 0 && caps.allow_chi0) || (comp.chi == 1 && caps.allow_chi1);
          if (!ok) return;
        }
        std::string sig = canonical_signature(base);
        if (!seen.insert(sig).second) return;
        if (!visit(base)) stop = true;
        return;
      }
      SlotRef a = a_slots[pos];
      TurnType tb = compatible(base.pieces[a.piece].turn(a.slot), L);
      for (const SlotRef& b : groups[tb]) {
        if (base.match[b.piece][b.slot].piece >= 0) continue;
        base.match[a.piece][a.slot] = b;
        base.match[b.piece][b.slot] = a;
        rec(pos + 1);
        base.match[a.piece][a.slot] = SlotRef{};
        base.match[b.piece][b.slot] = SlotRef{};
        if (stop) return;
      }
    };
    rec(0);
  };

  // multisets of size 1..max_pieces with non-decreasing type index
  std::vector<int> chosen;
  std::function<void(int)> pick = [&](int min_idx) {
    if (stop) return;
    if (!chosen.empty()) process_multiset(chosen);
    if (static_cast<int>(chosen.size()) == caps.max_pieces) return;
    for (int idx = min_idx; idx < collection.size() && !stop; ++idx) {
      chosen.push_back(idx);
      pick(idx);
      chosen.pop_back();
    }
  };
  pick(0);
}

std::vector<SimpleSurface> enumerate_small_surfaces_all(const PieceCollection& collection,
                                                        const EnumCaps& caps) {
  std::vector<SimpleSurface> out;
  enumerate_small_surfaces(collection, caps, [&](const SimpleSurface& s) {
    out.push_back(s);
    return true;
  });
  return out;
}

std::string canonical_signature(const SimpleSurface& s) {
  int n = s.piece_count();

  // iterated neighbourhood refinement with colors renormalized to dense ids
  // each round; instances only need to be permuted within classes that agree
  // on piece type and refined color, which keeps the permutation search small
  std::vector<int> color(n);
  {
    std::map<std::string, int> ids;
    for (int p = 0; p < n; ++p)
      color[p] = ids.emplace(s.pieces[p].key(), static_cast<int>(ids.size())).first->second;
    size_t classes = ids.size();
    for (int round = 0; round < n; ++round) {
      std::vector<std::string> sig(n);
      for (int p = 0; p < n; ++p) {
        std::vector<std::pair<int, int>> nbr;  // (own slot type rank via arcs, partner color)
        for (int t = 0; t < s.pieces[p].turn_count(); ++t)
          nbr.push_back({s.pieces[p].turn(t).from * 1000 + s.pieces[p].turn(t).to,
                         color[s.match[p][t].piece]});
        std::sort(nbr.begin(), nbr.end());
        sig[p] = std::to_string(color[p]);
        for (auto [a, b] : nbr) sig[p] += "," + std::to_string(a) + ":" + std::to_string(b);
      }
      std::map<std::string, int> next_ids;
      for (int p = 0; p < n; ++p)
        color[p] = next_ids.emplace(sig[p], static_cast<int>(next_ids.size())).first->second;
      if (next_ids.size() == classes) break;
      classes = next_ids.size();
    }
  }

  // base order: instances sorted by (piece order, refined color); the
  // canonical form places instances class by class
  std::vector<int> base(n);
  std::iota(base.begin(), base.end(), 0);
  std::stable_sort(base.begin(), base.end(), [&](int x, int y) {
    if (!s.pieces[x].same_type(s.pieces[y])) return piece_order_less(s.pieces[x], s.pieces[y]);
    return color[x] < color[y];
  });
  std::vector<int> class_of_position(n);  // class id at each canonical position
  {
    int cls = 0;
    for (int i = 0; i < n; ++i) {
      if (i > 0 && !(s.pieces[base[i]].same_type(s.pieces[base[i - 1]]) &&
                     color[base[i]] == color[base[i - 1]]))
        ++cls;
      class_of_position[i] = cls;
    }
  }
  auto class_id = [&](int piece) {
    for (int i = 0; i < n; ++i)
      if (base[i] == piece) return class_of_position[i];
    return -1;
  };
  std::vector<int> piece_class(n);
  for (int p = 0; p < n; ++p) piece_class[p] = class_id(p);

  // rotational symmetries per piece type
  auto symmetries = [&](const PieceType& p) {
    std::vector<int> rots;
    int e = p.turn_count();
    for (int r = 0; r < e; ++r) {
      bool same = true;
      for (int k = 0; k < e && same; ++k) same = p.arcs[k] == p.arcs[(r + k) % e];
      if (same) rots.push_back(r);
    }
    return rots;
  };

  // backtracking canonical form: place one instance per position, encode the
  // line of edges back into the placed prefix, and recurse only on candidates
  // achieving the minimal line; the canonical key is the smallest completion
  std::vector<std::string> lines(n);
  std::vector<int> rot(n, 0), place_of(n, -1);
  std::string best;
  long long work = 0;

  auto encode_line = [&](int p, int r) {
    int e = s.pieces[p].turn_count();
    std::string line = s.pieces[p].key();
    std::vector<std::string> pairs;
    for (int t = 0; t < e; ++t) {
      int ts = (t + r) % e;
      SlotRef q = s.match[p][ts];
      int qi = place_of[q.piece];
      if (qi < 0) continue;
      int eq = s.pieces[q.piece].turn_count();
      int qs = (q.slot - rot[qi] + eq) % eq;
      pairs.push_back(std::to_string(t) + ">" + std::to_string(qi) + "." + std::to_string(qs));
    }
    std::sort(pairs.begin(), pairs.end());
    for (const auto& pr : pairs) line += "|" + pr;
    return line + ";";
  };

  std::function<void(int)> place = [&](int i) {
    if (++work > 20000000)
      throw CapExceeded("canonical-form search exceeds its work cap (surface too symmetric)");
    if (i == n) {
      std::string enc;
      for (const auto& l : lines) enc += l;
      if (best.empty() || enc < best) best = enc;
      return;
    }
    // candidates: unused instances of this position's class, each rotation
    std::vector<std::tuple<std::string, int, int>> cand;
    for (int p = 0; p < n; ++p) {
      if (place_of[p] >= 0 || piece_class[p] != class_of_position[i]) continue;
      for (int r : symmetries(s.pieces[p])) cand.push_back({encode_line(p, r), p, r});
    }
    std::sort(cand.begin(), cand.end());
    for (const auto& [line, p, r] : cand) {
      if (line != std::get<0>(cand.front())) break;
      lines[i] = line;
      rot[i] = r;
      place_of[p] = i;
      place(i + 1);
      place_of[p] = -1;
    }
  };
  place(0);
  return best;
}

nlohmann::json surface_to_json(const SimpleSurface& s) {
  nlohmann::json pieces = nlohmann::json::array();
  std::vector<int> offset(s.piece_count() + 1, 0);
  for (int p = 0; p < s.piece_count(); ++p) {
    pieces.push_back({{"type", s.pieces[p].key()}});
    offset[p + 1] = offset[p] + s.pieces[p].turn_count();
  }
  std::vector<std::pair<int, int>> pairs;
  for (int p = 0; p < s.piece_count(); ++p)
    for (int t = 0; t < s.pieces[p].turn_count(); ++t) {
      SlotRef q = s.match[p][t];
      int g1 = offset[p] + t;
      int g2 = offset[q.piece] + q.slot;
      if (g1 < g2) pairs.push_back({g1, g2});
    }
  std::sort(pairs.begin(), pairs.end());
  nlohmann::json matching = nlohmann::json::array();
  for (auto [x, y] : pairs) matching.push_back({x, y});
  return {{"pieces", pieces}, {"matching", matching}};
}

SimpleSurface surface_from_json(const CtxPtr& ctx, const nlohmann::json& j) {
  SimpleSurface s;
  s.ctx = ctx;
  for (const auto& e : j.at("pieces")) {
    s.pieces.push_back(piece_from_key(ctx, e.at("type").get<std::string>()));
    s.match.emplace_back(s.pieces.back().turn_count(), SlotRef{});
  }
  std::vector<SlotRef> global;
  for (int p = 0; p < s.piece_count(); ++p)
    for (int t = 0; t < s.pieces[p].turn_count(); ++t) global.push_back({p, t});
  for (const auto& e : j.at("matching")) {
    int g1 = e.at(0).get<int>();
    int g2 = e.at(1).get<int>();
    if (g1 < 0 || g2 < 0 || g1 >= static_cast<int>(global.size()) ||
        g2 >= static_cast<int>(global.size()))
      throw std::invalid_argument("matching index out of range");
    s.match[global[g1].piece][global[g1].slot] = global[g2];
    s.match[global[g2].piece][global[g2].slot] = global[g1];
  }
  s.validate();
  return s;
}

std::string surface_to_dot(const SimpleSurface& s) {
  std::ostringstream os;
  os << "graph gluing {\n";
  for (int p = 0; p < s.piece_count(); ++p) {
    os << "  p" << p << " [label=\"" << s.pieces[p].key() << "\" shape="
       << (s.pieces[p].disk ? "circle" : "doublecircle") << "];\n";
  }
  for (const SurfaceEdge& e : edge_list(s)) {
    os << "  p" << e.a.piece << " -- p" << e.b.piece << " [label=\""
       << s.slot_type(e.a).str() << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace stlen
