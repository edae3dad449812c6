#include "stlen/lp.hpp"

#include <algorithm>
#include <sstream>

namespace stlen {

RationalLP build_polyhedron(const PieceCollection& collection) {
  if (collection.pieces.empty()) throw std::invalid_argument("empty piece collection");
  const CtxPtr& ctx = collection.ctx;
  int L = ctx->L();
  int N = collection.size();

  RationalLP lp;
  lp.vars.reserve(N);
  for (const PieceType& p : collection.pieces) lp.vars.push_back(p.key());

  // turn-type counts per piece: f_T(e_P)
  auto turn_count = [](const PieceType& p, const TurnType& t) {
    int c = 0;
    for (int s = 0; s < p.turn_count(); ++s)
      if (p.turn(s) == t) ++c;
    return c;
  };

  int gi = 0;
  for (int i = 1; i <= L; ++i) {
    for (int j = 1; j <= L; ++j) {
      TurnType ta{Factor::A, i, j};
      TurnType tb = compatible(ta, L);
      LPRow row{"g" + std::to_string(gi++), std::vector<Rat>(N), Rel::eq, Rat(0)};
      for (int v = 0; v < N; ++v) {
        const PieceType& p = collection.pieces[v];
        if (p.side == Factor::A)
          row.coef[v] = turn_count(p, ta);
        else
          row.coef[v] = -Rat(turn_count(p, tb));
      }
      lp.rows.push_back(std::move(row));
    }
  }

  LPRow norm{"norm", std::vector<Rat>(N), Rel::eq, Rat(1)};
  for (int v = 0; v < N; ++v) norm.coef[v] = collection.pieces[v].alpha1_count();
  lp.rows.push_back(std::move(norm));

  LPRow chi{"chi", std::vector<Rat>(N), Rel::ge, Rat(0)};
  for (int v = 0; v < N; ++v) chi.coef[v] = collection.pieces[v].chi_gamma();
  lp.rows.push_back(std::move(chi));

  lp.objective.resize(N);
  for (int v = 0; v < N; ++v) lp.objective[v] = -collection.pieces[v].chi_o();
  return lp;
}

namespace {

void render_expr(std::ostringstream& os, const std::vector<std::string>& vars,
                 const std::vector<Rat>& coef) {
  bool first = true;
  for (size_t v = 0; v < vars.size(); ++v) {
    if (coef[v] == 0) continue;
    Rat c = coef[v];
    if (first) {
      if (c < 0) {
        os << "- ";
        c = -c;
      }
      first = false;
    } else {
      os << (c < 0 ? " - " : " + ");
      if (c < 0) c = -c;
    }
    os << rat_str(c) << ' ' << vars[v];
  }
  if (first) os << "0";
}

}  // namespace

std::string export_lp_text(const RationalLP& lp) {
  std::ostringstream os;
  os << "vars:";
  for (const auto& v : lp.vars) os << ' ' << v;
  os << ";\n";
  os << "min: ";
  render_expr(os, lp.vars, lp.objective);
  os << ";\n";
  for (const LPRow& row : lp.rows) {
    os << row.label << ": ";
    render_expr(os, lp.vars, row.coef);
    os << (row.rel == Rel::eq ? " = " : " >= ") << rat_str(row.rhs) << ";\n";
  }
  return os.str();
}

namespace {

struct Tok {
  std::string s;
  int pos;
};

std::vector<Tok> tokenize(const std::string& text) {
  std::vector<Tok> toks;
  size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    int pos = static_cast<int>(i);
    if (c == ':' || c == ';' || c == '+' || c == '-' || c == '=') {
      toks.push_back({std::string(1, c), pos});
      ++i;
    } else if (c == '>' && i + 1 < text.size() && text[i + 1] == '=') {
      toks.push_back({">=", pos});
      i += 2;
    } else {
      size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) &&
             std::string(":;+-=>").find(text[j]) == std::string::npos)
        ++j;
      // rationals may contain '/', variable names contain '_' and digits
      toks.push_back({text.substr(i, j - i), pos});
      i = j;
    }
  }
  return toks;
}

struct Parser {
  std::vector<Tok> toks;
  size_t at = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    int pos = at < toks.size() ? toks[at].pos : -1;
    throw std::invalid_argument("LP parse error at offset " + std::to_string(pos) + ": " + msg);
  }
  bool peek_is(const std::string& s) const { return at < toks.size() && toks[at].s == s; }
  std::string next() {
    if (at >= toks.size()) fail("unexpected end of input");
    return toks[at++].s;
  }
  void expect(const std::string& s) {
    if (next() != s) {
      --at;
      fail("expected '" + s + "'");
    }
  }
  bool is_number(const std::string& s) const {
    return !s.empty() && (std::isdigit(static_cast<unsigned char>(s[0])) || s[0] == '/');
  }

  std::vector<Rat> parse_expr(const std::vector<std::string>& vars) {
    std::vector<Rat> coef(vars.size(), Rat(0));
    bool any = false;
    int sign = 1;
    while (!peek_is(";") && !peek_is("=") && !peek_is(">=")) {
      if (peek_is("+")) {
        next();
        sign = 1;
        continue;
      }
      if (peek_is("-")) {
        next();
        sign = -1;
        continue;
      }
      std::string t = next();
      if (!is_number(t)) fail("expected coefficient, got '" + t + "'");
      Rat c = rat_parse(t);
      if (peek_is(";") || peek_is("=") || peek_is(">=") || peek_is("+") || peek_is("-")) {
        // bare constant: only the literal 0 is allowed (empty expression)
        if (c != 0) fail("bare nonzero constant in expression");
        any = true;
        sign = 1;
        continue;
      }
      std::string var = next();
      auto it = std::find(vars.begin(), vars.end(), var);
      if (it == vars.end()) fail("unknown variable '" + var + "'");
      coef[it - vars.begin()] += sign * c;
      sign = 1;
      any = true;
    }
    if (!any) fail("empty expression");
    return coef;
  }
};

}  // namespace

RationalLP parse_lp_text(const std::string& text) {
  Parser p{tokenize(text)};
  RationalLP lp;

  p.expect("vars");
  p.expect(":");
  while (!p.peek_is(";")) lp.vars.push_back(p.next());
  p.expect(";");
  if (lp.vars.empty()) p.fail("no variables declared");

  p.expect("min");
  p.expect(":");
  lp.objective = p.parse_expr(lp.vars);
  p.expect(";");

  while (p.at < p.toks.size()) {
    LPRow row;
    row.label = p.next();
    p.expect(":");
    row.coef = p.parse_expr(lp.vars);
    std::string rel = p.next();
    if (rel == "=")
      row.rel = Rel::eq;
    else if (rel == ">=")
      row.rel = Rel::ge;
    else
      p.fail("expected '=' or '>='");
    row.rhs = rat_parse(p.next());
    p.expect(";");
    lp.rows.push_back(std::move(row));
  }
  return lp;
}

nlohmann::json solution_to_json(const RationalLP& lp, const LPSolution& sol) {
  nlohmann::json j;
  j["status"] = sol.status == LPStatus::optimal ? "optimal" : "infeasible";
  if (sol.status == LPStatus::optimal) {
    j["value"] = rat_str(sol.value);
    nlohmann::json vert = nlohmann::json::object();
    for (size_t v = 0; v < lp.vars.size(); ++v) vert[lp.vars[v]] = rat_str(sol.vertex[v]);
    j["vertex"] = vert;
  }
  return j;
}

}  // namespace stlen
