#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stlen/group.hpp"

namespace stlen {

enum class Factor { A, B };

inline Factor other(Factor f) { return f == Factor::A ? Factor::B : Factor::A; }
inline char factor_char(Factor f) { return f == Factor::A ? 'A' : 'B'; }

struct Syllable {
  Factor factor;
  int elt;
  bool operator==(const Syllable&) const = default;
  auto operator<=>(const Syllable&) const = default;
};

using RawWord = std::vector<Syllable>;

/// A freely reduced word: alternating factors, no identity syllables.
/// May be empty (identity), a single syllable (factor element), or mixed.
struct Reduced {
  std::vector<Syllable> syls;
  bool is_identity() const { return syls.empty(); }
  bool is_factor_element() const { return syls.size() == 1; }
};

/// A cyclically reduced alternating word a_1 b_1 ... a_L b_L in canonical
/// rotation (A-first, lexicographically minimal among A-first rotations).
struct CyclicWord {
  std::vector<Syllable> syls;  // size 2L
  int half_length() const { return static_cast<int>(syls.size()) / 2; }
  /// i in 1..L
  const Syllable& a(int i) const { return syls[2 * (i - 1)]; }
  const Syllable& b(int i) const { return syls[2 * (i - 1) + 1]; }
  bool operator==(const CyclicWord&) const = default;
};

/// Factor groups plus the target word; shared immutably by collections,
/// surfaces and reports.
struct Context {
  FiniteGroup A;
  FiniteGroup B;
  CyclicWord word;
  const FiniteGroup& group(Factor f) const { return f == Factor::A ? A : B; }
  int L() const { return word.half_length(); }
  /// Element of the factor represented by the arc with the given side/index.
  int arc_element(Factor side, int index) const {
    return side == Factor::A ? word.a(index).elt : word.b(index).elt;
  }
};

using CtxPtr = std::shared_ptr<const Context>;

struct GroupPair {
  FiniteGroup A;
  FiniteGroup B;
  const FiniteGroup& group(Factor f) const { return f == Factor::A ? A : B; }
};

Reduced free_reduce(const GroupPair& groups, const RawWord& raw);
RawWord inverse_word(const GroupPair& groups, const RawWord& w);

struct CyclicReduction {
  RawWord conjugator;  // input = conjugator . core . conjugator^-1 after free reduction
  Reduced core;        // cyclically reduced; mixed cores are in canonical rotation
};

/// Input must already be freely reduced.
CyclicReduction cyclically_reduce(const GroupPair& groups, const Reduced& word);

/// Lifts a mixed, even-length, A-first cyclically reduced core into a
/// CyclicWord; throws if the core is not of that shape.
CyclicWord to_cyclic_word(const Reduced& core);

CtxPtr make_context(FiniteGroup A, FiniteGroup B, const CyclicWord& w);

struct TorsionFactorization {
  long long power = 1;  // n
  struct Part {
    RawWord conjugator;
    Syllable torsion;
  };
  std::vector<Part> parts;
};

/// True iff the product over parts of conjugator . torsion . conjugator^-1
/// freely reduces to g^power. Shares no code path with the extractor.
bool verify_factorization(const GroupPair& groups, const CyclicWord& g,
                          const TorsionFactorization& f);

struct ParseError : std::runtime_error {
  ParseError(std::string msg, int line, int column)
      : std::runtime_error(msg + " (line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ")"),
        line(line),
        column(column) {}
  int line;
  int column;
};

/// Word text grammar: whitespace-separated tokens. `a` / `b` (with optional
/// `^k`, k any integer) name the generators of cyclic factors A and B;
/// `A:i` / `B:i` (with optional `^k`) give elements of either factor by index.
RawWord parse_word_text(const GroupPair& groups, const std::string& text);

std::string word_str(const GroupPair& groups, const RawWord& w);
std::string word_str(const GroupPair& groups, const CyclicWord& w);

nlohmann::json word_to_json(const CyclicWord& w);
CyclicWord word_from_json(const nlohmann::json& j);

}  // namespace stlen
