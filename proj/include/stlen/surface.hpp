#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "stlen/pieces.hpp"

namespace stlen {

struct SlotRef {
  int piece = -1;
  int slot = -1;
  bool operator==(const SlotRef&) const = default;
  auto operator<=>(const SlotRef&) const = default;
};

/// Concrete piece instances plus a perfect matching of compatible turn slots.
/// Immutable in spirit: every operation returns a new surface.
struct SimpleSurface {
  CtxPtr ctx;
  std::vector<PieceType> pieces;
  std::vector<std::vector<SlotRef>> match;  // match[p][s] = partner slot

  int piece_count() const { return static_cast<int>(pieces.size()); }
  TurnType slot_type(const SlotRef& s) const { return pieces[s.piece].turn(s.slot); }

  /// Checks the matching is a fixed-point-free involution pairing compatible
  /// turns. Throws std::logic_error on violation.
  void validate() const;
};

/// A matched pair, A-side slot first. Edge lists are sorted by the A slot,
/// which fixes the edge indexing used by rewiring operations.
struct SurfaceEdge {
  SlotRef a;
  SlotRef b;
};

std::vector<SurfaceEdge> edge_list(const SimpleSurface& s);

struct ComponentStats {
  std::vector<int> pieces;  // sorted instance indices
  int v = 0;
  int e = 0;
  int chi = 0;  // v - e
  int disks = 0;
  long long degree = 0;
  long long minus_chi = 0;          // e - disks
  std::vector<int> core_pieces;     // cyclic order; empty unless chi == 0
  std::vector<int> core_edges;      // core_edges[k] joins core_pieces[k] -> [k+1]
};

struct SurfaceStats {
  int v = 0, e = 0, c = 0, ell = 0, d = 0;
  std::vector<int> comp_of;  // piece -> component id
  std::vector<ComponentStats> comps;
  // rooted structure of chi == 0 components (empty entries elsewhere):
  std::vector<int> root_of;      // nearest core piece (or self on the core)
  std::vector<int> depth_of;     // distance to the core
  std::vector<int> parent_edge;  // edge index toward the root; -1 on the core
};

SurfaceStats analyze(const SimpleSurface& s);

/// -chi(S) = e - d, cross-checked against the piecewise formula; the two
/// routes disagreeing is an internal inconsistency.
long long minus_chi(const SimpleSurface& s);

/// Degree n(S): total count of alpha_1 arcs across pieces.
long long degree(const SimpleSurface& s);

/// Number of holes H(S) = number of annulus pieces.
long long hole_count(const SimpleSurface& s);

/// -chi(S) / n(S); degree must be positive.
Rat surface_ratio(const SimpleSurface& s);

/// Termination measure 2e - 2c + ell.
long long kappa(const SimpleSurface& s);

/// Piece-type counts of S in collection order; throws if S uses a type
/// outside the collection.
std::vector<Rat> count_vector(const SimpleSurface& s, const PieceCollection& collection);

/// Membership test for the polyhedron of build_polyhedron(collection).
bool in_polyhedron(const PieceCollection& collection, const std::vector<Rat>& x,
                   std::string* reason = nullptr);

/// Realizes a rational feasible point as a surface with v(S) = n x, where n
/// is scale_hint times the lcm of denominators. Matching pairs slots across
/// distinct components first, then round-robin.
SimpleSurface assemble_from_vector(const PieceCollection& collection, const std::vector<Rat>& x,
                                   long long scale_hint = 1);

struct SplitSite {
  int piece = -1;
  int s1 = -1;
  int s2 = -1;
  bool balanced_pair = false;  // the abelian-factor variant
};

/// First applicable splitting in deterministic order (piece index, then slot
/// pairs; the subproduct form before the balanced-pair form).
std::optional<SplitSite> find_splitting(const SimpleSurface& s);

/// Splitting at the given site: replaces the piece by a disk piece and a
/// piece of the original shape; the matching is untouched. Preconditions per
/// SplitSite flavor; throws std::invalid_argument when they fail.
SimpleSurface split_piece(const SimpleSurface& s, const SplitSite& site);

/// Partner swap across two same-type edges (by index into edge_list).
SimpleSurface rewire(const SimpleSurface& s, int e1, int e2);

enum class RewiringType { I, II, III, merge, other };

std::string rewiring_type_str(RewiringType t);

/// Classifies what rewiring the two edges would perform. Requires same-type
/// edges (throws otherwise).
RewiringType classify_rewiring(const SimpleSurface& s, int e1, int e2);

struct ReduceResult {
  std::vector<SimpleSurface> components;  // each connected and irreducible
  int steps = 0;
};

/// Applies splittings and type I/II/III rewirings until none applies, then
/// splits into connected components. Requires chi(Gamma) >= 0 on every input
/// component; terminates within kappa(S) steps.
ReduceResult reduce_to_irreducible(const SimpleSurface& s);

struct BoundViolation {
  std::string which;
  int piece = -1;
};

struct RewiringWitness {
  int e1;
  int e2;
  RewiringType type;
};

using IrreducibilityWitness = std::variant<SplitSite, RewiringWitness, BoundViolation>;

struct IrreducibilityResult {
  bool irreducible = false;
  std::optional<IrreducibilityWitness> witness;
};

/// Connected surfaces only (throws on disconnected input). Checks the fast
/// necessary bounds (valence, tree diameter, decorative-tree depth, core
/// length) before the exhaustive witness search.
IrreducibilityResult is_irreducible(const SimpleSurface& s);

/// Cyclic k-fold cover unwinding the core of a connected chi(Gamma) = 0
/// surface.
SimpleSurface finite_cover(const SimpleSurface& s, int k);

/// A connected tree-graph surface containing a matched turn pair of the given
/// type (either side's name of the pair works).
SimpleSurface strip_surface(const CtxPtr& ctx, TurnType t);

/// Approximation step: the k-fold cover merged with a strip by one
/// cross-component rewiring. Result is connected with chi(Gamma) = 1.
SimpleSurface approximate_by_tree(const SimpleSurface& s, int k);

/// Branched-cover improvement at an annulus piece of a tree-graph surface:
/// k copies of S minus the piece, joined through one disk piece covering its
/// boundary k times (k = order of the winding class). Strictly decreases
/// -chi/n.
SimpleSurface branched_cover_improvement(const SimpleSurface& s, int annulus_piece);

/// Built-in certificate families (connected, chi(Gamma) = 0, ratio equal to
/// the closed forms). The _for variants build over the word's own context;
/// the (p, q) variants build the cyclic model. Order of p and q is free.
SimpleSurface certificate_product_for(const CtxPtr& ctx);
SimpleSurface certificate_commutator_for(const CtxPtr& ctx);
SimpleSurface certificate_product(int p, int q);
SimpleSurface certificate_commutator(int p, int q);

struct EnumCaps {
  int max_pieces = 6;
  bool allow_chi0 = true;
  bool allow_chi1 = true;
  bool connected_only = true;
  long long work_cap = 5000000;  // refuse beyond this many matcher steps
};

/// Exhaustive enumeration up to isomorphism within the caps; the visitor
/// returns false to stop early.
void enumerate_small_surfaces(const PieceCollection& collection, const EnumCaps& caps,
                              const std::function<bool(const SimpleSurface&)>& visit);

std::vector<SimpleSurface> enumerate_small_surfaces_all(const PieceCollection& collection,
                                                        const EnumCaps& caps);

/// Boundary components as cyclic arc sequences (piece, arc index); only
/// components containing arcs are listed (annulus holes carry no arcs).
std::vector<std::vector<SlotRef>> boundary_components(const SimpleSurface& s);

std::pair<SimpleSurface, int> disjoint_union(const SimpleSurface& a, const SimpleSurface& b);

/// Canonical isomorphism key (piece types up to instance relabeling and
/// rotational symmetry).
std::string canonical_signature(const SimpleSurface& s);

nlohmann::json surface_to_json(const SimpleSurface& s);
SimpleSurface surface_from_json(const CtxPtr& ctx, const nlohmann::json& j);
std::string surface_to_dot(const SimpleSurface& s);

}  // namespace stlen
