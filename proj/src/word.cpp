#include "stlen/word.hpp"

#include <algorithm>
#include <sstream>

namespace stlen {

Reduced free_reduce(const GroupPair& groups, const RawWord& raw) {
  std::vector<Syllable> out;
  for (const Syllable& s : raw) {
    const FiniteGroup& g = groups.group(s.factor);
    g.check_element(s.elt);
    if (g.is_identity(s.elt)) continue;
    Syllable cur = s;
    while (true) {
      if (out.empty() || out.back().factor != cur.factor) {
        out.push_back(cur);
        break;
      }
      int prod = groups.group(cur.factor).mul(out.back().elt, cur.elt);
      out.pop_back();
      if (groups.group(cur.factor).is_identity(prod)) break;
      cur = {cur.factor, prod};
    }
  }
  return Reduced{std::move(out)};
}

RawWord inverse_word(const GroupPair& groups, const RawWord& w) {
  RawWord out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it)
    out.push_back({it->factor, groups.group(it->factor).inv(it->elt)});
  return out;
}

namespace {

// Lexicographic comparison of rotations by (factor, element index) pairs.
bool rotation_less(const std::vector<Syllable>& syls, int r1, int r2) {
  int n = static_cast<int>(syls.size());
  for (int k = 0; k < n; ++k) {
    const Syllable& x = syls[(r1 + k) % n];
    const Syllable& y = syls[(r2 + k) % n];
    if (x != y) return x < y;
  }
  return false;
}

}  // namespace

CyclicReduction cyclically_reduce(const GroupPair& groups, const Reduced& word) {
  RawWord conj;
  std::vector<Syllable> w = word.syls;

  // strip matching ends: w = l^-1 . (l f) m . l
  while (w.size() >= 2 && w.front().factor == w.back().factor) {
    Syllable f = w.front();
    Syllable l = w.back();
    const FiniteGroup& g = groups.group(f.factor);
    conj.push_back({l.factor, g.inv(l.elt)});
    w.erase(w.begin());
    w.pop_back();
    int z = g.mul(l.elt, f.elt);
    if (!g.is_identity(z)) w.insert(w.begin(), Syllable{f.factor, z});
  }

  if (w.size() >= 2) {
    // rotate to A-first
    if (w.front().factor == Factor::B) {
      conj.push_back(w.front());
      std::rotate(w.begin(), w.begin() + 1, w.end());
    }
    // canonical rotation: lexicographically minimal among A-first rotations
    int n = static_cast<int>(w.size());
    int best = 0;
    for (int r = 2; r < n; r += 2)
      if (rotation_less(w, r, best)) best = r;
    for (int k = 0; k < best; ++k) conj.push_back(w[k]);
    std::rotate(w.begin(), w.begin() + best, w.end());
  }

  return CyclicReduction{std::move(conj), Reduced{std::move(w)}};
}

CyclicWord to_cyclic_word(const Reduced& core) {
  if (core.syls.size() < 2 || core.syls.size() % 2 != 0)
    throw std::invalid_argument("core is not an alternating word of positive even length");
  for (size_t i = 0; i < core.syls.size(); ++i) {
    Factor expect = (i % 2 == 0) ? Factor::A : Factor::B;
    if (core.syls[i].factor != expect)
      throw std::invalid_argument("core does not alternate A,B,...,A,B");
  }
  return CyclicWord{core.syls};
}

CtxPtr make_context(FiniteGroup A, FiniteGroup B, const CyclicWord& w) {
  for (const Syllable& s : w.syls) {
    const FiniteGroup& g = s.factor == Factor::A ? A : B;
    g.check_element(s.elt);
    if (g.is_identity(s.elt)) throw std::invalid_argument("word contains identity syllable");
  }
  return std::make_shared<const Context>(Context{std::move(A), std::move(B), w});
}

bool verify_factorization(const GroupPair& groups, const CyclicWord& g,
                          const TorsionFactorization& f) {
  if (f.power < 1) return false;
  RawWord product;
  for (const auto& part : f.parts) {
    const FiniteGroup& fg = groups.group(part.torsion.factor);
    fg.check_element(part.torsion.elt);
    if (fg.is_identity(part.torsion.elt)) return false;  // torsion element must have order > 1
    product.insert(product.end(), part.conjugator.begin(), part.conjugator.end());
    product.push_back(part.torsion);
    RawWord inv = inverse_word(groups, part.conjugator);
    product.insert(product.end(), inv.begin(), inv.end());
  }
  RawWord target;
  for (long long k = 0; k < f.power; ++k)
    target.insert(target.end(), g.syls.begin(), g.syls.end());
  return free_reduce(groups, product).syls == free_reduce(groups, target).syls;
}

namespace {

long long parse_exponent(const std::string& tok, size_t caret, int line, int col) {
  std::string exp = tok.substr(caret + 1);
  if (exp.empty()) throw ParseError("empty exponent in token '" + tok + "'", line, col);
  try {
    size_t used = 0;
    long long k = std::stoll(exp, &used);
    if (used != exp.size()) throw std::invalid_argument("");
    return k;
  } catch (const std::exception&) {
    throw ParseError("bad exponent in token '" + tok + "'", line, col);
  }
}

}  // namespace

RawWord parse_word_text(const GroupPair& groups, const std::string& text) {
  RawWord out;
  int line = 1, col = 1;
  size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      ++col;
      ++i;
      continue;
    }
    int tok_col = col;
    size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
      ++col;
    }
    std::string tok = text.substr(start, i - start);

    size_t caret = tok.find('^');
    std::string head = caret == std::string::npos ? tok : tok.substr(0, caret);
    long long k = caret == std::string::npos ? 1 : parse_exponent(tok, caret, line, tok_col);

    Factor factor;
    int base;
    if (head == "a" || head == "b") {
      factor = head == "a" ? Factor::A : Factor::B;
      const FiniteGroup& g = groups.group(factor);
      if (g.kind() != FiniteGroup::Kind::cyclic)
        throw ParseError("token '" + head + "' requires a cyclic factor; use " +
                             std::string(1, factor_char(factor)) + ":<index> for table groups",
                         line, tok_col);
      base = g.order() > 1 ? 1 : 0;
    } else if (head.size() > 2 && (head[0] == 'A' || head[0] == 'B') && head[1] == ':') {
      factor = head[0] == 'A' ? Factor::A : Factor::B;
      try {
        size_t used = 0;
        base = std::stoi(head.substr(2), &used);
        if (used != head.size() - 2) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw ParseError("bad element index in token '" + tok + "'", line, tok_col);
      }
      if (base < 0 || base >= groups.group(factor).order())
        throw ParseError("element index out of range in token '" + tok + "'", line, tok_col);
    } else {
      throw ParseError("unrecognized token '" + tok + "'", line, tok_col);
    }
    out.push_back({factor, groups.group(factor).pow(base, k)});
  }
  return out;
}

namespace {

std::string syllable_str(const GroupPair& groups, const Syllable& s) {
  return groups.group(s.factor).name(s.elt);
}

}  // namespace

std::string word_str(const GroupPair& groups, const RawWord& w) {
  std::ostringstream os;
  for (size_t i = 0; i < w.size(); ++i) {
    if (i) os << ' ';
    os << syllable_str(groups, w[i]);
  }
  return os.str();
}

std::string word_str(const GroupPair& groups, const CyclicWord& w) {
  return word_str(groups, w.syls);
}

nlohmann::json word_to_json(const CyclicWord& w) {
  nlohmann::json syls = nlohmann::json::array();
  for (const Syllable& s : w.syls)
    syls.push_back({std::string(1, factor_char(s.factor)), s.elt});
  return {{"syllables", syls}};
}

CyclicWord word_from_json(const nlohmann::json& j) {
  std::vector<Syllable> syls;
  for (const auto& e : j.at("syllables")) {
    std::string f = e.at(0).get<std::string>();
    syls.push_back({f == "A" ? Factor::A : Factor::B, e.at(1).get<int>()});
  }
  return to_cyclic_word(Reduced{std::move(syls)});
}

}  // namespace stlen
