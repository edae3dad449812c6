#include "stlen/pieces.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace stlen {

std::string TurnType::str() const {
  std::string s = side == Factor::A ? "a" : "b";
  return "(" + s + std::to_string(from) + "," + s + std::to_string(to) + ")";
}

TurnType compatible(const TurnType& t, int L) {
  auto norm = [L](int i) { return (i - 1 + L) % L + 1; };
  if (t.from < 1 || t.from > L || t.to < 1 || t.to > L)
    throw std::invalid_argument("turn index out of range");
  if (t.side == Factor::A) return TurnType{Factor::B, norm(t.to - 1), t.from};
  return TurnType{Factor::A, t.to, norm(t.from + 1)};
}

std::vector<TurnType> all_turn_types(int L) {
  std::vector<TurnType> out;
  out.reserve(2 * L * L);
  for (Factor side : {Factor::A, Factor::B})
    for (int i = 1; i <= L; ++i)
      for (int j = 1; j <= L; ++j) out.push_back({side, i, j});
  return out;
}

TurnType PieceType::turn(int slot) const {
  int e = turn_count();
  return TurnType{side, arcs[slot], arcs[(slot + 1) % e]};
}

int PieceType::alpha1_count() const {
  if (side != Factor::A) return 0;
  return static_cast<int>(std::count(arcs.begin(), arcs.end(), 1));
}

Rat PieceType::chi_gamma() const { return Rat(1) - Rat(turn_count(), 2); }

Rat PieceType::chi_o() const { return Rat(disk ? 1 : 0) - Rat(turn_count(), 2); }

std::string PieceType::key() const {
  std::string s(1, factor_char(side));
  for (int a : arcs) s += "_" + std::to_string(a);
  return s;
}

namespace {

std::vector<int> canonical_rotation(std::vector<int> arcs) {
  int n = static_cast<int>(arcs.size());
  int best = 0;
  auto less_rot = [&](int r1, int r2) {
    for (int k = 0; k < n; ++k) {
      int x = arcs[(r1 + k) % n], y = arcs[(r2 + k) % n];
      if (x != y) return x < y;
    }
    return false;
  };
  for (int r = 1; r < n; ++r)
    if (less_rot(r, best)) best = r;
  std::rotate(arcs.begin(), arcs.begin() + best, arcs.end());
  return arcs;
}

}  // namespace

PieceType make_piece(const CtxPtr& ctx, Factor side, std::vector<int> arcs) {
  if (arcs.empty()) throw std::invalid_argument("a piece needs at least one arc");
  int L = ctx->L();
  for (int a : arcs)
    if (a < 1 || a > L)
      throw std::invalid_argument("arc index " + std::to_string(a) + " out of range 1.." +
                                  std::to_string(L));
  arcs = canonical_rotation(std::move(arcs));
  const FiniteGroup& g = ctx->group(side);
  int w = g.identity();
  for (int a : arcs) w = g.mul(w, ctx->arc_element(side, a));
  return PieceType{side, std::move(arcs), w, g.is_identity(w)};
}

PieceType piece_from_key(const CtxPtr& ctx, const std::string& key) {
  if (key.size() < 3 || (key[0] != 'A' && key[0] != 'B') || key[1] != '_')
    throw std::invalid_argument("bad piece key '" + key + "'");
  Factor side = key[0] == 'A' ? Factor::A : Factor::B;
  std::vector<int> arcs;
  size_t i = 2;
  while (i <= key.size()) {
    size_t j = key.find('_', i);
    if (j == std::string::npos) j = key.size();
    try {
      arcs.push_back(std::stoi(key.substr(i, j - i)));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad piece key '" + key + "'");
    }
    i = j + 1;
  }
  return make_piece(ctx, side, std::move(arcs));
}

std::string provenance_str(Provenance p) {
  switch (p) {
    case Provenance::generic_bounded: return "generic-bounded";
    case Provenance::commutator_builtin: return "commutator-builtin";
    case Provenance::product_builtin: return "product-builtin";
    case Provenance::user: return "user";
  }
  return "user";
}

int PieceCollection::index_of(const PieceType& p) const {
  for (int i = 0; i < size(); ++i)
    if (pieces[i].same_type(p)) return i;
  return -1;
}

int PieceCollection::index_of_key(const std::string& key) const {
  for (int i = 0; i < size(); ++i)
    if (pieces[i].key() == key) return i;
  return -1;
}

bool piece_order_less(const PieceType& a, const PieceType& b) {
  if (a.side != b.side) return a.side == Factor::A;
  if (a.arcs.size() != b.arcs.size()) return a.arcs.size() < b.arcs.size();
  return a.arcs < b.arcs;
}

namespace {

// FKM generation of k-ary necklaces of length n (as minimal rotations, which
// is exactly the canonical form used by make_piece). Alphabet is 0..k-1.
void necklaces(int k, int n, const std::function<void(const std::vector<int>&)>& emit) {
  std::vector<int> a(n + 1, 0);
  std::function<void(int, int)> rec = [&](int t, int p) {
    if (t > n) {
      if (n % p == 0) emit(std::vector<int>(a.begin() + 1, a.end()));
      return;
    }
    a[t] = a[t - p];
    rec(t + 1, p);
    for (int j = a[t - p] + 1; j < k; ++j) {
      a[t] = j;
      rec(t + 1, t);
    }
  };
  rec(1, 1);
}

double projected_necklace_count(int k, int max_len) {
  double total = 0;
  for (int e = 1; e <= max_len; ++e) {
    total += std::pow(static_cast<double>(k), e) / e;
    if (total > 1e18) return total;
  }
  return total;
}

void sort_and_check(PieceCollection& c) {
  std::sort(c.pieces.begin(), c.pieces.end(), piece_order_less);
  for (size_t i = 1; i < c.pieces.size(); ++i)
    if (c.pieces[i].same_type(c.pieces[i - 1]))
      throw std::logic_error("duplicate piece type in collection");
}

}  // namespace

PieceCollection generic_bounded_collection(const CtxPtr& ctx, std::optional<int> max_turns,
                                           bool override_cap) {
  int L = ctx->L();
  PieceCollection out{ctx, Provenance::generic_bounded, {}};
  for (Factor side : {Factor::A, Factor::B}) {
    int bound = max_turns.value_or(ctx->group(side).order() * L * L);
    if (bound < 1) throw std::invalid_argument("max_turns must be positive");
    if (!override_cap && projected_necklace_count(L, bound) > 1e6)
      throw CapExceeded("projected enumeration for side " +
                        std::string(1, factor_char(side)) + " exceeds 10^6 sequences; "
                        "pass --override-caps (override_cap) to proceed");
    for (int e = 1; e <= bound; ++e) {
      necklaces(L, e, [&](const std::vector<int>& word0) {
        std::vector<int> arcs(word0.size());
        for (size_t i = 0; i < word0.size(); ++i) arcs[i] = word0[i] + 1;
        out.pieces.push_back(make_piece(ctx, side, std::move(arcs)));
      });
    }
  }
  sort_and_check(out);
  return out;
}

bool is_product_word(const Context& ctx) { return ctx.L() == 1; }

bool is_commutator_word(const Context& ctx) {
  if (ctx.L() != 2) return false;
  const CyclicWord& w = ctx.word;
  return w.a(2).elt == ctx.A.inv(w.a(1).elt) && w.b(2).elt == ctx.B.inv(w.b(1).elt);
}

PieceCollection commutator_collection_for(const CtxPtr& ctx) {
  if (!is_commutator_word(*ctx))
    throw std::invalid_argument("word is not of the shape a b a^-1 b^-1");
  int p = element_order(ctx->A, ctx->word.a(1).elt);
  int q = element_order(ctx->B, ctx->word.b(1).elt);
  if (p < 2 || q < 2) throw std::invalid_argument("syllable orders must be at least 2");
  PieceCollection out{ctx, Provenance::commutator_builtin, {}};
  auto add_side = [&](Factor side, int ord) {
    for (int n = 1; n <= ord; ++n) {
      out.pieces.push_back(make_piece(ctx, side, std::vector<int>(n, 1)));
      out.pieces.push_back(make_piece(ctx, side, std::vector<int>(n, 2)));
      std::vector<int> mixed(2 * n, 1);
      std::fill(mixed.begin() + n, mixed.end(), 2);
      out.pieces.push_back(make_piece(ctx, side, std::move(mixed)));
    }
  };
  add_side(Factor::A, p);
  add_side(Factor::B, q);
  sort_and_check(out);
  return out;
}

PieceCollection commutator_collection(int p, int q) {
  if (p < 2 || q < 2) throw std::invalid_argument("orders must be at least 2");
  FiniteGroup A = FiniteGroup::cyclic(p, "a");
  FiniteGroup B = FiniteGroup::cyclic(q, "b");
  CyclicWord w{{{Factor::A, 1}, {Factor::B, 1}, {Factor::A, p - 1}, {Factor::B, q - 1}}};
  return commutator_collection_for(make_context(std::move(A), std::move(B), w));
}

PieceCollection product_collection_for(const CtxPtr& ctx) {
  if (!is_product_word(*ctx)) throw std::invalid_argument("word is not of the shape ab");
  int p = element_order(ctx->A, ctx->word.a(1).elt);
  int q = element_order(ctx->B, ctx->word.b(1).elt);
  if (p < 2 || q < 2) throw std::invalid_argument("syllable orders must be at least 2");
  PieceCollection out{ctx, Provenance::product_builtin, {}};
  for (int n = 1; n <= p; ++n)
    out.pieces.push_back(make_piece(ctx, Factor::A, std::vector<int>(n, 1)));
  for (int n = 1; n <= q; ++n)
    out.pieces.push_back(make_piece(ctx, Factor::B, std::vector<int>(n, 1)));
  sort_and_check(out);
  return out;
}

PieceCollection product_collection(int p, int q) {
  if (p < 2 || q < 2) throw std::invalid_argument("orders must be at least 2");
  FiniteGroup A = FiniteGroup::cyclic(p, "a");
  FiniteGroup B = FiniteGroup::cyclic(q, "b");
  CyclicWord w{{{Factor::A, 1}, {Factor::B, 1}}};
  return product_collection_for(make_context(std::move(A), std::move(B), w));
}

nlohmann::json collection_to_json(const PieceCollection& c) {
  nlohmann::json arr = nlohmann::json::array();
  for (const PieceType& p : c.pieces) {
    arr.push_back({{"side", std::string(1, factor_char(p.side))},
                   {"arcs", p.arcs},
                   {"winding", c.ctx->group(p.side).name(p.winding)},
                   {"shape", p.disk ? "disk" : "annulus"}});
  }
  return arr;
}

PieceCollection collection_from_json(const CtxPtr& ctx, const nlohmann::json& j) {
  PieceCollection out{ctx, Provenance::user, {}};
  for (const auto& e : j) {
    Factor side = e.at("side").get<std::string>() == "A" ? Factor::A : Factor::B;
    out.pieces.push_back(make_piece(ctx, side, e.at("arcs").get<std::vector<int>>()));
  }
  sort_and_check(out);
  return out;
}

}  // namespace stlen
