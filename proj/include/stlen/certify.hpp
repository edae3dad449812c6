#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "stlen/simplex.hpp"
#include "stlen/surface.hpp"

namespace stlen {

enum class CollectionChoice { automatic, generic, builtin, user };

struct StlOptions {
  CollectionChoice collection = CollectionChoice::automatic;
  std::optional<int> max_turns;
  int enum_max_pieces = 4;
  bool override_caps = false;
  /// Collection for CollectionChoice::user.
  std::optional<nlohmann::json> user_collection;
};

struct StlReport {
  GroupPair groups;
  RawWord input;
  std::optional<CyclicWord> core;  // absent when the word conjugates into a factor
  RawWord conjugator;

  std::string collection_provenance;
  int collection_size = 0;

  Rat lower_bound;
  std::optional<Rat> upper_bound;
  bool exact = false;
  std::optional<Rat> value;

  std::optional<SimpleSurface> certificate;
  std::optional<TorsionFactorization> factorization;
  std::optional<LPSolution> lp;

  struct Timings {
    double collection_ms = 0;
    double lp_ms = 0;
    double certificate_ms = 0;
  } timings;
};

/// End-to-end pipeline: reduce the word, build a sufficient collection, take
/// the exact LP lower bound, then the best certificate upper bound from the
/// built-in families, the reduced LP-vertex surface, and toy enumeration.
/// Words conjugate into a factor short-circuit to exact 0.
StlReport compute_stl(const FiniteGroup& A, const FiniteGroup& B, const RawWord& word,
                      const StlOptions& options = {});

/// Reads an explicit torsion factorization of g^n off a connected tree-graph
/// surface by peeling leaf pieces from the outer boundary word. The result
/// always passes verify_factorization (checked; violation is internal error).
TorsionFactorization extract_factorization(const SimpleSurface& s);

/// H(S) for the best available tree-graph surface of degree n: an upper bound
/// on the torsion length of g^n. Absent when no such surface is found at the
/// toy caps.
std::optional<long long> tl_upper_bound(const FiniteGroup& A, const FiniteGroup& B,
                                        const RawWord& word, long long n,
                                        const StlOptions& options = {});

nlohmann::json report_to_json(const StlReport& r, bool with_timings = false);

/// Reloads the embedded certificate and recomputes its stats; true iff the
/// serialized rationals reproduce exactly.
bool revalidate_report(const FiniteGroup& A, const FiniteGroup& B, const nlohmann::json& j);

}  // namespace stlen
