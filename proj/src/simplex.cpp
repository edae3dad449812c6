#include "stlen/simplex.hpp"

#include <algorithm>
#include <numeric>

namespace stlen {

namespace {

// Standard form min c.x, A x = b, x >= 0. Columns: original variables first,
// then one slack per >=-row. Rows keep their original order; `flipped` marks
// rows negated to make b nonnegative.
struct Standard {
  int n_vars = 0;
  int n_cols = 0;
  std::vector<std::vector<Rat>> A;
  std::vector<Rat> b;
  std::vector<Rat> c;
  std::vector<bool> flipped;
};

Standard to_standard(const RationalLP& lp) {
  Standard s;
  s.n_vars = static_cast<int>(lp.vars.size());
  int n_ge = 0;
  for (const LPRow& r : lp.rows)
    if (r.rel == Rel::ge) ++n_ge;
  s.n_cols = s.n_vars + n_ge;
  s.c.assign(s.n_cols, Rat(0));
  for (int j = 0; j < s.n_vars; ++j) s.c[j] = lp.objective[j];

  int slack_at = s.n_vars;
  for (const LPRow& r : lp.rows) {
    if (static_cast<int>(r.coef.size()) != s.n_vars)
      throw std::invalid_argument("row '" + r.label + "' has wrong width");
    std::vector<Rat> row(s.n_cols, Rat(0));
    for (int j = 0; j < s.n_vars; ++j) row[j] = r.coef[j];
    if (r.rel == Rel::ge) row[slack_at++] = -1;
    Rat rhs = r.rhs;
    bool flip = rhs < 0;
    if (flip) {
      for (auto& v : row) v = -v;
      rhs = -rhs;
    }
    s.A.push_back(std::move(row));
    s.b.push_back(rhs);
    s.flipped.push_back(flip);
  }
  return s;
}

struct Tableau {
  // T is m x (width+1); the last column holds b. basis[i] is the column
  // basic in row i.
  int width;
  std::vector<std::vector<Rat>> T;
  std::vector<int> basis;

  int rows() const { return static_cast<int>(T.size()); }

  void pivot(int r, int j) {
    Rat p = T[r][j];
    for (auto& v : T[r]) v /= p;
    for (int i = 0; i < rows(); ++i) {
      if (i == r || T[i][j] == 0) continue;
      Rat f = T[i][j];
      for (int k = 0; k <= width; ++k) T[i][k] -= f * T[r][k];
    }
    basis[r] = j;
  }
};

// Bland's rule: entering = lowest-index column with negative reduced cost;
// leaving = min-ratio row, ties broken by lowest basic column index.
// `allowed` limits the entering candidates. Returns false on unbounded.
bool run_simplex(Tableau& t, const std::vector<Rat>& cost, int allowed) {
  int m = t.rows();
  while (true) {
    std::vector<Rat> y(m);
    for (int i = 0; i < m; ++i) y[i] = cost[t.basis[i]];
    int enter = -1;
    for (int j = 0; j < allowed && enter < 0; ++j) {
      Rat red = cost[j];
      for (int i = 0; i < m; ++i)
        if (t.T[i][j] != 0) red -= y[i] * t.T[i][j];
      if (red < 0) enter = j;
    }
    if (enter < 0) return true;

    int leave = -1;
    Rat best;
    for (int i = 0; i < m; ++i) {
      if (t.T[i][enter] <= 0) continue;
      Rat ratio = t.T[i][t.width] / t.T[i][enter];
      if (leave < 0 || ratio < best || (ratio == best && t.basis[i] < t.basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave < 0) return false;
    t.pivot(leave, enter);
  }
}

// Solves M y = rhs for square M by Gauss elimination; M must be invertible.
std::vector<Rat> solve_square(std::vector<std::vector<Rat>> M, std::vector<Rat> rhs) {
  int n = static_cast<int>(M.size());
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r)
      if (M[r][col] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) throw std::logic_error("singular basis matrix");
    std::swap(M[col], M[piv]);
    std::swap(rhs[col], rhs[piv]);
    Rat p = M[col][col];
    for (int k = col; k < n; ++k) M[col][k] /= p;
    rhs[col] /= p;
    for (int r = 0; r < n; ++r) {
      if (r == col || M[r][col] == 0) continue;
      Rat f = M[r][col];
      for (int k = col; k < n; ++k) M[r][k] -= f * M[col][k];
      rhs[r] -= f * rhs[col];
    }
  }
  return rhs;
}

void verify_optimality(const RationalLP& lp, const LPSolution& sol) {
  int n = static_cast<int>(lp.vars.size());
  // primal feasibility and objective value
  Rat obj(0);
  for (int j = 0; j < n; ++j) {
    if (sol.vertex[j] < 0) throw std::logic_error("negative vertex component");
    obj += lp.objective[j] * sol.vertex[j];
  }
  if (obj != sol.value) throw std::logic_error("vertex value mismatch");
  for (const LPRow& r : lp.rows) {
    Rat lhs(0);
    for (int j = 0; j < n; ++j) lhs += r.coef[j] * sol.vertex[j];
    if (r.rel == Rel::eq ? lhs != r.rhs : lhs < r.rhs)
      throw std::logic_error("vertex violates row '" + r.label + "'");
  }
  // dual feasibility and strong duality
  Rat dual_obj(0);
  for (size_t i = 0; i < lp.rows.size(); ++i) {
    if (lp.rows[i].rel == Rel::ge && sol.dual[i] < 0)
      throw std::logic_error("negative multiplier on >= row '" + lp.rows[i].label + "'");
    dual_obj += sol.dual[i] * lp.rows[i].rhs;
  }
  if (dual_obj != sol.value) throw std::logic_error("strong duality fails");
  for (int j = 0; j < n; ++j) {
    Rat red = lp.objective[j];
    for (size_t i = 0; i < lp.rows.size(); ++i) red -= sol.dual[i] * lp.rows[i].coef[j];
    if (red < 0) throw std::logic_error("negative reduced cost on " + lp.vars[j]);
  }
}

}  // namespace

LPSolution solve_exact(const RationalLP& lp) {
  Standard s = to_standard(lp);
  int m = static_cast<int>(s.A.size());

  // phase 1 tableau with one artificial per row
  Tableau t;
  t.width = s.n_cols + m;
  t.T.assign(m, std::vector<Rat>(t.width + 1, Rat(0)));
  t.basis.resize(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < s.n_cols; ++j) t.T[i][j] = s.A[i][j];
    t.T[i][s.n_cols + i] = 1;
    t.T[i][t.width] = s.b[i];
    t.basis[i] = s.n_cols + i;
  }
  std::vector<Rat> cost1(t.width, Rat(0));
  for (int i = 0; i < m; ++i) cost1[s.n_cols + i] = 1;
  if (!run_simplex(t, cost1, t.width)) throw std::logic_error("phase 1 unbounded");

  Rat phase1(0);
  for (int i = 0; i < m; ++i) phase1 += cost1[t.basis[i]] * t.T[i][t.width];
  if (phase1 != 0) return LPSolution{LPStatus::infeasible, Rat(0), {}, {}};

  // drive artificials out of the basis; rows that cannot pivot are redundant
  std::vector<int> kept_rows;
  {
    std::vector<bool> drop(m, false);
    for (int i = 0; i < t.rows(); ++i) {
      if (t.basis[i] < s.n_cols) continue;
      int j = 0;
      while (j < s.n_cols && t.T[i][j] == 0) ++j;
      if (j < s.n_cols)
        t.pivot(i, j);
      else
        drop[i] = true;
    }
    Tableau t2;
    t2.width = s.n_cols;
    for (int i = 0; i < m; ++i) {
      if (drop[i]) continue;
      std::vector<Rat> row(t.T[i].begin(), t.T[i].begin() + s.n_cols);
      row.push_back(t.T[i][t.width]);
      t2.T.push_back(std::move(row));
      t2.basis.push_back(t.basis[i]);
      kept_rows.push_back(i);
    }
    t = std::move(t2);
  }

  std::vector<Rat> cost2(s.n_cols, Rat(0));
  for (int j = 0; j < s.n_cols; ++j) cost2[j] = s.c[j];
  if (!run_simplex(t, cost2, s.n_cols))
    throw std::runtime_error("LP is unbounded");

  LPSolution sol;
  sol.status = LPStatus::optimal;
  std::vector<Rat> full(s.n_cols, Rat(0));
  for (int i = 0; i < t.rows(); ++i) full[t.basis[i]] = t.T[i][t.width];
  sol.vertex.assign(full.begin(), full.begin() + s.n_vars);
  sol.value = 0;
  for (int j = 0; j < s.n_cols; ++j) sol.value += s.c[j] * full[j];

  // simplex multipliers from B^T y = c_B over the kept original rows
  {
    int mk = t.rows();
    std::vector<std::vector<Rat>> Bt(mk, std::vector<Rat>(mk));
    std::vector<Rat> cb(mk);
    for (int i = 0; i < mk; ++i) {
      for (int r = 0; r < mk; ++r) Bt[i][r] = s.A[kept_rows[r]][t.basis[i]];
      cb[i] = s.c[t.basis[i]];
    }
    std::vector<Rat> y = solve_square(std::move(Bt), std::move(cb));
    sol.dual.assign(lp.rows.size(), Rat(0));
    for (int r = 0; r < mk; ++r)
      sol.dual[kept_rows[r]] = s.flipped[kept_rows[r]] ? -y[r] : y[r];
  }

  verify_optimality(lp, sol);
  return sol;
}

std::vector<VertexPoint> brute_force_vertices(const RationalLP& lp) {
  if (lp.vars.size() > 12)
    throw std::invalid_argument("brute_force_vertices: dimension too large (> 12 variables)");
  Standard s = to_standard(lp);
  int m = static_cast<int>(s.A.size());

  // independent rows via Gauss elimination on a working copy
  std::vector<int> rows_kept;
  {
    std::vector<std::vector<Rat>> M = s.A;
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    int rank = 0;
    for (int col = 0; col < s.n_cols && rank < m; ++col) {
      int piv = -1;
      for (int r = rank; r < m; ++r)
        if (M[order[r]][col] != 0) {
          piv = r;
          break;
        }
      if (piv < 0) continue;
      std::swap(order[rank], order[piv]);
      int pr = order[rank];
      for (int r = 0; r < m; ++r) {
        int rr = order[r];
        if (rr == pr || M[rr][col] == 0) continue;
        Rat f = M[rr][col] / M[pr][col];
        for (int k = 0; k < s.n_cols; ++k) M[rr][k] -= f * M[pr][k];
      }
      ++rank;
    }
    rows_kept.assign(order.begin(), order.begin() + rank);
    std::sort(rows_kept.begin(), rows_kept.end());
  }
  int r = static_cast<int>(rows_kept.size());

  std::vector<VertexPoint> out;
  std::vector<int> comb(r);
  std::iota(comb.begin(), comb.end(), 0);
  auto advance = [&]() {
    int i = r - 1;
    while (i >= 0 && comb[i] == s.n_cols - r + i) --i;
    if (i < 0) return false;
    ++comb[i];
    for (int k = i + 1; k < r; ++k) comb[k] = comb[k - 1] + 1;
    return true;
  };
  if (r == 0) return out;

  do {
    std::vector<std::vector<Rat>> B(r, std::vector<Rat>(r));
    std::vector<Rat> rhs(r);
    for (int i = 0; i < r; ++i) {
      for (int k = 0; k < r; ++k) B[i][k] = s.A[rows_kept[i]][comb[k]];
      rhs[i] = s.b[rows_kept[i]];
    }
    std::vector<Rat> xb;
    try {
      xb = solve_square(std::move(B), std::move(rhs));
    } catch (const std::logic_error&) {
      continue;  // singular basis
    }
    bool feasible = std::all_of(xb.begin(), xb.end(), [](const Rat& v) { return v >= 0; });
    if (!feasible) continue;
    std::vector<Rat> x(s.n_vars, Rat(0));
    for (int k = 0; k < r; ++k)
      if (comb[k] < s.n_vars) x[comb[k]] = xb[k];
    // the basic solution must satisfy the full (possibly redundant) system
    std::vector<Rat> fullx(s.n_cols, Rat(0));
    for (int k = 0; k < r; ++k) fullx[comb[k]] = xb[k];
    bool consistent = true;
    for (int i = 0; i < m && consistent; ++i) {
      Rat lhs(0);
      for (int j = 0; j < s.n_cols; ++j) lhs += s.A[i][j] * fullx[j];
      consistent = lhs == s.b[i];
    }
    if (!consistent) continue;
    Rat value(0);
    for (int j = 0; j < s.n_vars; ++j) value += lp.objective[j] * x[j];
    bool dup = std::any_of(out.begin(), out.end(),
                           [&](const VertexPoint& v) { return v.x == x; });
    if (!dup) out.push_back(VertexPoint{std::move(x), value});
  } while (advance());

  return out;
}

}  // namespace stlen
