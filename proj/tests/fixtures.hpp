#pragma once

#include <array>
#include <string>
#include <vector>

#include "stlen/pieces.hpp"
#include "stlen/word.hpp"

namespace stlen::testing {

// Symmetric group on 3 letters as an explicit Cayley table. Elements are the
// permutations of {0,1,2} in the order: e, (012), (021), (01), (02), (12).
inline std::vector<std::array<int, 3>> s3_perms() {
  return {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {1, 0, 2}, {2, 1, 0}, {0, 2, 1}};
}

inline std::vector<std::vector<int>> s3_table() {
  auto perms = s3_perms();
  auto compose = [](const std::array<int, 3>& f, const std::array<int, 3>& g) {
    // (f*g)(x) = f(g(x))
    return std::array<int, 3>{f[g[0]], f[g[1]], f[g[2]]};
  };
  std::vector<std::vector<int>> table(6, std::vector<int>(6));
  for (int x = 0; x < 6; ++x)
    for (int y = 0; y < 6; ++y) {
      auto fg = compose(perms[x], perms[y]);
      for (int z = 0; z < 6; ++z)
        if (perms[z] == fg) table[x][y] = z;
    }
  return table;
}

inline FiniteGroup make_s3() {
  return FiniteGroup::from_table(s3_table(), {"e", "r", "r2", "s01", "s02", "s12"});
}

inline CtxPtr make_ctx(FiniteGroup A, FiniteGroup B, const std::string& word_text) {
  GroupPair gp{A, B};
  RawWord raw = parse_word_text(gp, word_text);
  Reduced red = free_reduce(gp, raw);
  CyclicReduction cr = cyclically_reduce(gp, red);
  return make_context(std::move(A), std::move(B), to_cyclic_word(cr.core));
}

inline CtxPtr cyclic_ctx(int p, int q, const std::string& word_text) {
  return make_ctx(FiniteGroup::cyclic(p, "a"), FiniteGroup::cyclic(q, "b"), word_text);
}

}  // namespace stlen::testing
