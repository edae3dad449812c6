#include "stlen/certify.hpp"

#include <algorithm>
#include <chrono>

#include "stlen/lp.hpp"

namespace stlen {

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

StlReport torsion_report(GroupPair groups, RawWord input, RawWord conjugator) {
  StlReport r;
  r.groups = std::move(groups);
  r.input = std::move(input);
  r.conjugator = std::move(conjugator);
  r.collection_provenance = "none";
  r.lower_bound = 0;
  r.upper_bound = Rat(0);
  r.exact = true;
  r.value = Rat(0);
  return r;
}

struct Candidate {
  Rat ratio;
  SimpleSurface surface;
};

void consider(std::optional<Candidate>& best, const SimpleSurface& s) {
  SurfaceStats st = analyze(s);
  if (st.c != 1) return;
  if (st.comps[0].chi != 0 && st.comps[0].chi != 1) return;
  if (degree(s) <= 0) return;
  Rat r = surface_ratio(s);
  if (!best || r < best->ratio) best = Candidate{r, s};
}

}  // namespace

StlReport compute_stl(const FiniteGroup& A, const FiniteGroup& B, const RawWord& word,
                      const StlOptions& options) {
  GroupPair groups{A, B};
  Reduced reduced = free_reduce(groups, word);
  CyclicReduction cr = cyclically_reduce(groups, reduced);
  if (cr.core.is_identity() || cr.core.is_factor_element())
    return torsion_report(std::move(groups), word, cr.conjugator);

  StlReport r;
  r.groups = groups;
  r.input = word;
  r.core = to_cyclic_word(cr.core);
  r.conjugator = cr.conjugator;
  CtxPtr ctx = make_context(A, B, *r.core);

  auto t0 = std::chrono::steady_clock::now();
  PieceCollection collection;
  switch (options.collection) {
    case CollectionChoice::automatic:
      if (is_product_word(*ctx))
        collection = product_collection_for(ctx);
      else if (is_commutator_word(*ctx))
        collection = commutator_collection_for(ctx);
      else
        collection = generic_bounded_collection(ctx, options.max_turns, options.override_caps);
      break;
    case CollectionChoice::generic:
      collection = generic_bounded_collection(ctx, options.max_turns, options.override_caps);
      break;
    case CollectionChoice::builtin:
      if (is_product_word(*ctx))
        collection = product_collection_for(ctx);
      else if (is_commutator_word(*ctx))
        collection = commutator_collection_for(ctx);
      else
        throw std::invalid_argument(
            "no built-in collection: the word matches neither ab nor a b a^-1 b^-1");
      break;
    case CollectionChoice::user:
      if (!options.user_collection)
        throw std::invalid_argument("collection choice 'user' needs a collection");
      collection = collection_from_json(ctx, *options.user_collection);
      break;
  }
  r.collection_provenance = provenance_str(collection.provenance);
  r.collection_size = collection.size();
  r.timings.collection_ms = ms_since(t0);

  t0 = std::chrono::steady_clock::now();
  RationalLP lp = build_polyhedron(collection);
  LPSolution sol = solve_exact(lp);
  if (sol.status != LPStatus::optimal)
    throw std::runtime_error("gluing polyhedron is empty; the word admits no closed surface");
  r.lp = sol;
  r.lower_bound = sol.value;
  r.timings.lp_ms = ms_since(t0);

  t0 = std::chrono::steady_clock::now();
  std::optional<Candidate> best;

  // built-in certificate families, justified by the isometric embedding of
  // the cyclic subgroups generated by the syllables
  if (is_product_word(*ctx)) consider(best, certificate_product_for(ctx));
  if (is_commutator_word(*ctx)) consider(best, certificate_commutator_for(ctx));

  // realize the optimal vertex and reduce; usable when every component of the
  // assembly has nonnegative graph Euler characteristic
  {
    SimpleSurface assembled = assemble_from_vector(collection, sol.vertex);
    SurfaceStats st = analyze(assembled);
    bool usable = std::all_of(st.comps.begin(), st.comps.end(),
                              [](const ComponentStats& c) { return c.chi >= 0; });
    if (usable) {
      ReduceResult red = reduce_to_irreducible(assembled);
      for (const SimpleSurface& comp : red.components) consider(best, comp);
    }
  }

  // toy exhaustive search, only when the collection is small enough for it
  if (collection.size() <= 10) {
    try {
      EnumCaps caps;
      caps.max_pieces = options.enum_max_pieces;
      enumerate_small_surfaces(collection, caps, [&](const SimpleSurface& s) {
        consider(best, s);
        return true;
      });
    } catch (const CapExceeded&) {
      // enumeration is an optional certificate source
    }
  }

  if (best) {
    r.upper_bound = best->ratio;
    r.certificate = best->surface;
    r.exact = *r.upper_bound == r.lower_bound;
    if (r.exact) r.value = r.lower_bound;

    SimpleSurface tree = best->surface;
    if (analyze(tree).comps[0].chi == 0) tree = approximate_by_tree(tree, 1);
    r.factorization = extract_factorization(tree);
  }
  r.timings.certificate_ms = ms_since(t0);
  return r;
}

TorsionFactorization extract_factorization(const SimpleSurface& s) {
  SurfaceStats st = analyze(s);
  if (st.c != 1 || st.comps[0].chi != 1)
    throw std::invalid_argument("extraction needs a connected tree-graph surface");
  auto bds = boundary_components(s);
  if (bds.size() != 1) throw std::invalid_argument("surface has more than one outer boundary");

  const CtxPtr& ctx = s.ctx;
  std::vector<SlotRef> orbit = bds[0];

  // root the peeling at the piece owning an alpha_1 arc at the walk origin;
  // every other piece's arcs then form a contiguous active block
  int start = -1;
  for (size_t i = 0; i < orbit.size() && start < 0; ++i) {
    const PieceType& p = s.pieces[orbit[i].piece];
    if (p.side == Factor::A && p.arcs[orbit[i].slot] == 1) start = static_cast<int>(i);
  }
  if (start < 0) throw std::logic_error("boundary walk never passes alpha_1");
  std::rotate(orbit.begin(), orbit.begin() + start, orbit.end());
  int root = orbit[0].piece;

  int n_entries = static_cast<int>(orbit.size());
  std::vector<bool> entry_active(n_entries, true);
  std::vector<std::vector<bool>> slot_active(s.piece_count());
  std::vector<int> active_slots(s.piece_count());
  std::vector<bool> piece_alive(s.piece_count(), true);
  for (int p = 0; p < s.piece_count(); ++p) {
    slot_active[p].assign(s.pieces[p].turn_count(), true);
    active_slots[p] = s.pieces[p].turn_count();
  }

  auto entry_syllable = [&](const SlotRef& arc) {
    const PieceType& p = s.pieces[arc.piece];
    return Syllable{p.side, ctx->arc_element(p.side, p.arcs[arc.slot])};
  };
  GroupPair groups{ctx->A, ctx->B};

  TorsionFactorization out;
  out.power = degree(s);

  int alive = s.piece_count();
  while (alive > 1) {
    int leaf = -1;
    for (int p = 0; p < s.piece_count() && leaf < 0; ++p)
      if (piece_alive[p] && p != root && active_slots[p] == 1) leaf = p;
    if (leaf < 0) throw std::logic_error("peeling found no leaf in a tree");

    RawWord conj;
    int block_elt = ctx->group(s.pieces[leaf].side).identity();
    bool in_block = false;
    bool after_block = false;
    for (int i = 0; i < n_entries; ++i) {
      if (!entry_active[i]) continue;
      if (orbit[i].piece == leaf) {
        if (after_block) throw std::logic_error("leaf arcs are not contiguous");
        in_block = true;
        const PieceType& p = s.pieces[leaf];
        block_elt = ctx->group(p.side).mul(block_elt, ctx->arc_element(p.side, p.arcs[orbit[i].slot]));
        entry_active[i] = false;
      } else if (!in_block) {
        conj.push_back(entry_syllable(orbit[i]));
      } else {
        after_block = true;
      }
    }
    if (!ctx->group(s.pieces[leaf].side).is_identity(block_elt))
      out.parts.push_back({conj, Syllable{s.pieces[leaf].side, block_elt}});

    // release the partner of the leaf's single active slot
    for (int t = 0; t < s.pieces[leaf].turn_count(); ++t) {
      if (!slot_active[leaf][t]) continue;
      SlotRef q = s.match[leaf][t];
      slot_active[q.piece][q.slot] = false;
      --active_slots[q.piece];
    }
    piece_alive[leaf] = false;
    --alive;
  }

  // the root block is whatever remains
  int root_elt = ctx->group(s.pieces[root].side).identity();
  for (int i = 0; i < n_entries; ++i) {
    if (!entry_active[i]) continue;
    if (orbit[i].piece != root) throw std::logic_error("non-root arcs left after peeling");
    const PieceType& p = s.pieces[root];
    root_elt = ctx->group(p.side).mul(root_elt, ctx->arc_element(p.side, p.arcs[orbit[i].slot]));
  }
  if (!ctx->group(s.pieces[root].side).is_identity(root_elt))
    out.parts.push_back({{}, Syllable{s.pieces[root].side, root_elt}});

  if (!verify_factorization(groups, ctx->word, out))
    throw std::logic_error("extracted factorization fails verification");
  return out;
}

std::optional<long long> tl_upper_bound(const FiniteGroup& A, const FiniteGroup& B,
                                        const RawWord& word, long long n,
                                        const StlOptions& options) {
  if (n < 1) throw std::invalid_argument("power must be positive");
  GroupPair groups{A, B};
  Reduced reduced = free_reduce(groups, word);
  if (reduced.is_identity()) return 0;
  CyclicReduction cr = cyclically_reduce(groups, reduced);
  if (cr.core.is_identity()) return 0;
  if (cr.core.is_factor_element()) return 1;  // torsion in a finite factor

  CtxPtr ctx = make_context(A, B, to_cyclic_word(cr.core));
  std::optional<long long> best;
  auto consider_tree = [&](const SimpleSurface& s) {
    if (degree(s) != n) return;
    long long h = hole_count(s);
    if (!best || h < *best) best = h;
  };

  // approximation family over the built-in certificates
  std::optional<SimpleSurface> cert;
  if (is_product_word(*ctx)) cert = certificate_product_for(ctx);
  if (is_commutator_word(*ctx)) cert = certificate_commutator_for(ctx);
  if (cert) {
    long long nc = degree(*cert);
    for (int k = 1; k * nc <= n; ++k) {
      SimpleSurface t = approximate_by_tree(*cert, k);
      if (degree(t) == n) consider_tree(t);
      if (degree(t) > n) break;
    }
  }

  // toy enumeration of tree surfaces over a reasonable collection
  try {
    PieceCollection collection;
    if (is_product_word(*ctx))
      collection = product_collection_for(ctx);
    else if (is_commutator_word(*ctx))
      collection = commutator_collection_for(ctx);
    else
      collection = generic_bounded_collection(ctx, options.max_turns, options.override_caps);
    if (collection.size() <= 12) {
      EnumCaps caps;
      caps.max_pieces = std::max(options.enum_max_pieces, 6);
      caps.allow_chi0 = false;
      enumerate_small_surfaces(collection, caps, [&](const SimpleSurface& s) {
        consider_tree(s);
        return true;
      });
    }
  } catch (const CapExceeded&) {
  }
  return best;
}

nlohmann::json report_to_json(const StlReport& r, bool with_timings) {
  GroupPair groups{r.groups.A, r.groups.B};
  nlohmann::json j;
  j["group_a"] = r.groups.A.to_json();
  j["group_b"] = r.groups.B.to_json();
  j["word"] = word_str(groups, r.input);
  if (r.core) j["core"] = word_to_json(*r.core);
  j["collection"] = {{"provenance", r.collection_provenance}, {"pieces", r.collection_size}};
  auto rat_json = [](const Rat& v) {
    return nlohmann::json{{"num", to_ll(numerator(v))}, {"den", to_ll(denominator(v))}};
  };
  j["lower_bound"] = rat_json(r.lower_bound);
  j["upper_bound"] = r.upper_bound ? rat_json(*r.upper_bound) : nlohmann::json();
  j["exact"] = r.exact;
  j["value"] = r.value ? rat_json(*r.value) : nlohmann::json();
  if (r.certificate) {
    nlohmann::json cert = surface_to_json(*r.certificate);
    SurfaceStats st = analyze(*r.certificate);
    cert["stats"] = {{"pieces", r.certificate->piece_count()},
                     {"edges", st.e},
                     {"disks", st.d},
                     {"degree", degree(*r.certificate)},
                     {"minus_chi", minus_chi(*r.certificate)},
                     {"chi_gamma", st.comps[0].chi}};
    j["certificate"] = cert;
  } else {
    j["certificate"] = nlohmann::json();
  }
  if (r.factorization) {
    nlohmann::json parts = nlohmann::json::array();
    for (const auto& part : r.factorization->parts) {
      nlohmann::json conj = nlohmann::json::array();
      for (const Syllable& s : part.conjugator)
        conj.push_back({std::string(1, factor_char(s.factor)), s.elt});
      parts.push_back({{"conjugator", conj},
                       {"torsion", {std::string(1, factor_char(part.torsion.factor)),
                                    part.torsion.elt}}});
    }
    j["factorization"] = {{"power", r.factorization->power}, {"parts", parts}};
  } else {
    j["factorization"] = nlohmann::json();
  }
  if (with_timings) {
    j["timings"] = {{"collection_ms", r.timings.collection_ms},
                    {"lp_ms", r.timings.lp_ms},
                    {"certificate_ms", r.timings.certificate_ms}};
  }
  return j;
}

bool revalidate_report(const FiniteGroup& A, const FiniteGroup& B, const nlohmann::json& j) {
  if (!j.at("exact").get<bool>()) return !j.at("value").is_object();
  if (j.at("certificate").is_null() || !j.at("core").is_object()) return false;
  CyclicWord core = word_from_json(j.at("core"));
  CtxPtr ctx = make_context(A, B, core);
  SimpleSurface cert = surface_from_json(ctx, j.at("certificate"));
  SurfaceStats st = analyze(cert);
  if (st.c != 1 || (st.comps[0].chi != 0 && st.comps[0].chi != 1)) return false;
  Rat ratio = surface_ratio(cert);
  Rat value(j.at("value").at("num").get<long long>(), j.at("value").at("den").get<long long>());
  Rat lower(j.at("lower_bound").at("num").get<long long>(),
            j.at("lower_bound").at("den").get<long long>());
  return ratio == value && lower == value;
}

}  // namespace stlen
