#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stlen/rational.hpp"
#include "stlen/word.hpp"

namespace stlen {

/// Raised when a generation or enumeration would exceed its cap and the
/// override flag is not set.
struct CapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A turn travels from an arc labeled `from` to an arc labeled `to`
/// (1-based indices into the word's arcs on the given side).
struct TurnType {
  Factor side;
  int from;
  int to;
  bool operator==(const TurnType&) const = default;
  auto operator<=>(const TurnType&) const = default;
  std::string str() const;
};

/// The gluing rule: (alpha_i, alpha_j) pairs with (beta_{j-1}, beta_i),
/// indices mod L in 1..L. An involution between A-turns and B-turns.
TurnType compatible(const TurnType& t, int L);

/// All L^2 A-side turn types followed by all L^2 B-side ones, in lex order.
std::vector<TurnType> all_turn_types(int L);

/// A polygonal boundary: a side plus a cyclic arc-label sequence, stored in
/// canonical rotation (lexicographically minimal). The winding class is the
/// ordered product of the named syllable elements from the canonical start;
/// a piece is a disk iff the winding class is the identity.
struct PieceType {
  Factor side;
  std::vector<int> arcs;  // canonical rotation, 1-based arc indices
  int winding;
  bool disk;

  int turn_count() const { return static_cast<int>(arcs.size()); }
  /// Turn at slot t (0-based): from arcs[t] to arcs[(t+1) % e].
  TurnType turn(int slot) const;
  /// Number of alpha_1 arcs (the degree contribution).
  int alpha1_count() const;

  Rat chi_gamma() const;  // 1 - e/2
  Rat chi_o() const;      // (disk ? 1 : 0) - e/2

  /// Stable text key, e.g. "A_1_2"; used as the LP variable name.
  std::string key() const;

  bool same_type(const PieceType& o) const { return side == o.side && arcs == o.arcs; }
  bool operator==(const PieceType&) const = default;
};

/// Canonicalizes the rotation, computes winding and shape. Throws on empty
/// arc sequences or out-of-range indices.
PieceType make_piece(const CtxPtr& ctx, Factor side, std::vector<int> arcs);

PieceType piece_from_key(const CtxPtr& ctx, const std::string& key);

enum class Provenance { generic_bounded, commutator_builtin, product_builtin, user };

std::string provenance_str(Provenance p);

struct PieceCollection {
  CtxPtr ctx;
  Provenance provenance = Provenance::user;
  std::vector<PieceType> pieces;  // ordered: side A first, then (length, lex arcs)

  int size() const { return static_cast<int>(pieces.size()); }
  /// Index of a piece equal (as a type) to `p`, or -1.
  int index_of(const PieceType& p) const;
  int index_of_key(const std::string& key) const;
};

/// Deterministic collection order: side A before B, then by (length, lex arcs).
bool piece_order_less(const PieceType& a, const PieceType& b);

/// All piece types with at most max_turns arcs on each side, enumerated as
/// necklaces (rotation-canonical sequences). Default bound per side is
/// |factor| * L^2, which is sufficient: any larger piece admits a splitting.
/// Refuses when the projected enumeration exceeds 10^6 sequences unless
/// override_cap is set.
PieceCollection generic_bounded_collection(const CtxPtr& ctx,
                                           std::optional<int> max_turns = std::nullopt,
                                           bool override_cap = false);

/// The 3p+3q reduced collection for a commutator-shaped word
/// a b a^-1 b^-1 (orders p, q >= 2): pieces with n copies of arc 1, n copies
/// of arc 2, and the trivially-winding mixed pieces, on each side.
PieceCollection commutator_collection_for(const CtxPtr& ctx);
PieceCollection commutator_collection(int p, int q);

/// The p+q reduced collection for a length-one word ab.
PieceCollection product_collection_for(const CtxPtr& ctx);
PieceCollection product_collection(int p, int q);

/// Pattern detection used by collection choice and certificates.
bool is_product_word(const Context& ctx);     // L == 1
bool is_commutator_word(const Context& ctx);  // L == 2, a2 = a1^-1, b2 = b1^-1

nlohmann::json collection_to_json(const PieceCollection& c);
PieceCollection collection_from_json(const CtxPtr& ctx, const nlohmann::json& j);

}  // namespace stlen
