#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "speedscale/errors.hpp"
#include "speedscale/rational.hpp"

namespace speedscale::simplex {

enum class Relation { le, ge, eq };

struct Constraint {
  std::vector<Rat> coeffs;
  Relation rel;
  Rat rhs;
};

// Minimize c.x subject to the rows, x >= 0. All arithmetic is exact.
struct Problem {
  std::size_t num_vars = 0;
  std::vector<Rat> objective;
  std::vector<Constraint> rows;
};

enum class Status { optimal, infeasible, unbounded };

struct Result {
  Status status;
  Rat objective;
  std::vector<Rat> solution;
};

// Warm start: basis[r] names the basic variable of row r. Structural
// variables are 0..num_vars-1; num_vars + r denotes the slack (le) or surplus
// (ge) of row r. The basis must be nonsingular and primal feasible; on any
// defect the solver falls back to a cold two-phase start.
struct Warmstart {
  std::vector<int> basis;
};

namespace detail {

struct Tableau {
  std::size_t rows = 0;
  std::size_t cols = 0;  // structural + slack + artificial
  std::vector<std::vector<Rat>> a;
  std::vector<Rat> rhs;
  std::vector<int> basis;     // basic column per row
  std::vector<Rat> cost;      // phase-2 reduced costs
  std::vector<Rat> cost1;     // phase-1 reduced costs (artificial sum)
  bool phase1 = false;
  Rat cost_value;             // current phase-2 objective value
  Rat cost1_value;

  void pivot(std::size_t row, std::size_t col) {
    std::vector<Rat>& pr = a[row];
    if (pr[col] != 1) {
      Rat inv = 1 / pr[col];
      for (Rat& v : pr)
        if (v != 0) v *= inv;
      rhs[row] *= inv;
      pr[col] = 1;
    }
    std::vector<std::size_t> support;
    support.reserve(cols);
    for (std::size_t j = 0; j < cols; ++j)
      if (pr[j] != 0) support.push_back(j);
    auto eliminate = [&](std::vector<Rat>& target, Rat& target_rhs) {
      Rat factor = target[col];
      if (factor == 0) return;
      for (std::size_t j : support) target[j] -= factor * pr[j];
      target_rhs -= factor * rhs[row];
      target[col] = 0;
    };
    for (std::size_t r = 0; r < rows; ++r)
      if (r != row) eliminate(a[r], rhs[r]);
    eliminate(cost, cost_value);
    if (phase1) eliminate(cost1, cost1_value);
    basis[row] = static_cast<int>(col);
  }
};

// Entering column under Dantzig (most negative reduced cost) or Bland
// (lowest index with negative reduced cost); -1 when optimal.
inline int entering_column(const std::vector<Rat>& cost, std::size_t cols, bool bland,
                           const std::vector<bool>& allowed) {
  int best = -1;
  for (std::size_t j = 0; j < cols; ++j) {
    if (!allowed[j] || cost[j] >= 0) continue;
    if (bland) return static_cast<int>(j);
    if (best < 0 || cost[j] < cost[static_cast<std::size_t>(best)]) best = static_cast<int>(j);
  }
  return best;
}

// Leaving row by minimum ratio; ties resolved by lowest basic variable index,
// which together with Bland entering guarantees finite termination.
inline int leaving_row(const Tableau& t, std::size_t col) {
  int best = -1;
  Rat best_ratio;
  for (std::size_t r = 0; r < t.rows; ++r) {
    if (t.a[r][col] <= 0) continue;
    Rat ratio = t.rhs[r] / t.a[r][col];
    if (best < 0 || ratio < best_ratio ||
        (ratio == best_ratio && t.basis[r] < t.basis[static_cast<std::size_t>(best)])) {
      best = static_cast<int>(r);
      best_ratio = ratio;
    }
  }
  return best;
}

inline Status run_simplex(Tableau& t, const std::vector<bool>& allowed) {
  long iterations = 0;
  const long bland_after = 200 + 20 * static_cast<long>(t.rows);
  const long hard_cap = 100000 + 1000 * static_cast<long>(t.rows);
  while (true) {
    bool bland = iterations >= bland_after;
    const std::vector<Rat>& cost = t.phase1 ? t.cost1 : t.cost;
    int col = entering_column(cost, t.cols, bland, allowed);
    if (col < 0) return Status::optimal;
    int row = leaving_row(t, static_cast<std::size_t>(col));
    if (row < 0) return Status::unbounded;
    t.pivot(static_cast<std::size_t>(row), static_cast<std::size_t>(col));
    if (++iterations > hard_cap) throw internal_error("simplex iteration cap exceeded");
  }
}

}  // namespace detail

inline Result solve(const Problem& problem, const Warmstart* warm = nullptr) {
  const std::size_t nv = problem.num_vars;
  const std::size_t m = problem.rows.size();
  if (problem.objective.size() != nv) throw internal_error("simplex: objective size mismatch");
  for (const auto& row : problem.rows)
    if (row.coeffs.size() != nv) throw internal_error("simplex: row size mismatch");

  // Column layout: structural | one slack/surplus per non-eq row | artificials.
  std::vector<int> slack_col(m, -1);
  std::size_t cols = nv;
  for (std::size_t r = 0; r < m; ++r)
    if (problem.rows[r].rel != Relation::eq) slack_col[r] = static_cast<int>(cols++);

  auto build = [&](std::size_t total_cols) {
    detail::Tableau t;
    t.rows = m;
    t.cols = total_cols;
    t.a.assign(m, std::vector<Rat>(total_cols, Rat(0)));
    t.rhs.assign(m, Rat(0));
    t.basis.assign(m, -1);
    t.cost.assign(total_cols, Rat(0));
    t.cost_value = 0;
    t.cost1.assign(total_cols, Rat(0));
    t.cost1_value = 0;
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t j = 0; j < nv; ++j) t.a[r][j] = problem.rows[r].coeffs[j];
      t.rhs[r] = problem.rows[r].rhs;
      if (slack_col[r] >= 0)
        t.a[r][static_cast<std::size_t>(slack_col[r])] =
            problem.rows[r].rel == Relation::le ? 1 : -1;
    }
    for (std::size_t j = 0; j < nv; ++j) t.cost[j] = problem.objective[j];
    return t;
  };

  auto extract = [&](const detail::Tableau& t) {
    Result res;
    res.status = Status::optimal;
    res.solution.assign(nv, Rat(0));
    for (std::size_t r = 0; r < m; ++r)
      if (t.basis[r] >= 0 && static_cast<std::size_t>(t.basis[r]) < nv)
        res.solution[static_cast<std::size_t>(t.basis[r])] = t.rhs[r];
    res.objective = 0;
    for (std::size_t j = 0; j < nv; ++j) res.objective += problem.objective[j] * res.solution[j];
    return res;
  };

  // Warm path: caller supplies a full feasible basis, no artificials needed.
  if (warm && warm->basis.size() == m) {
    detail::Tableau t = build(cols);
    bool usable = true;
    std::vector<bool> used(cols, false);
    for (std::size_t r = 0; r < m && usable; ++r) {
      int b = warm->basis[r];
      int col = b >= 0 && static_cast<std::size_t>(b) < nv ? b
                : b >= static_cast<int>(nv) && static_cast<std::size_t>(b) < nv + m
                    ? slack_col[static_cast<std::size_t>(b) - nv]
                    : -1;
      if (col < 0 || used[static_cast<std::size_t>(col)]) usable = false;
      else {
        used[static_cast<std::size_t>(col)] = true;
        t.basis[r] = col;
      }
    }
    if (usable) {
      // Reduce to basis form. Callers order rows so this elimination is
      // triangular; any singular column means the warm basis is unusable.
      for (std::size_t r = 0; r < m && usable; ++r) {
        auto col = static_cast<std::size_t>(t.basis[r]);
        if (t.a[r][col] == 0) {
          usable = false;
          break;
        }
        t.pivot(r, col);
      }
      if (usable)
        for (std::size_t r = 0; r < m; ++r)
          if (t.rhs[r] < 0) usable = false;
      if (usable) {
        std::vector<bool> allowed(cols, true);
        Status st = detail::run_simplex(t, allowed);
        if (st == Status::unbounded) return Result{Status::unbounded, Rat(0), {}};
        return extract(t);
      }
    }
    // Fall through to the cold start on any defect.
  }

  // Cold start: normalize rhs >= 0, take slacks with +1 coefficient as basic
  // where available, add artificials elsewhere, and run two phases.
  std::vector<Constraint> rows = problem.rows;
  std::vector<bool> flipped(m, false);
  for (std::size_t r = 0; r < m; ++r)
    if (rows[r].rhs < 0) {
      flipped[r] = true;
      rows[r].rhs = -rows[r].rhs;
      for (Rat& v : rows[r].coeffs) v = -v;
      if (rows[r].rel == Relation::le) rows[r].rel = Relation::ge;
      else if (rows[r].rel == Relation::ge) rows[r].rel = Relation::le;
    }
  std::vector<bool> needs_artificial(m, false);
  std::size_t artificials = 0;
  for (std::size_t r = 0; r < m; ++r) {
    needs_artificial[r] = rows[r].rel != Relation::le;
    if (needs_artificial[r]) ++artificials;
  }
  detail::Tableau t = build(cols + artificials);
  // Rebuild rows from the normalized copies.
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t j = 0; j < nv; ++j) t.a[r][j] = rows[r].coeffs[j];
    t.rhs[r] = rows[r].rhs;
    if (slack_col[r] >= 0)
      t.a[r][static_cast<std::size_t>(slack_col[r])] = rows[r].rel == Relation::le ? 1 : -1;
  }
  t.phase1 = true;
  std::size_t next_art = cols;
  for (std::size_t r = 0; r < m; ++r) {
    if (needs_artificial[r]) {
      t.a[r][next_art] = 1;
      t.basis[r] = static_cast<int>(next_art);
      t.cost1[next_art] = 1;
      ++next_art;
    } else {
      t.basis[r] = slack_col[r];
    }
  }
  // Reduce both cost rows against the starting basis (artificials have unit
  // cost in phase 1; slacks cost nothing in either phase).
  for (std::size_t r = 0; r < m; ++r) {
    auto b = static_cast<std::size_t>(t.basis[r]);
    if (t.cost1[b] != 0) {
      Rat factor = t.cost1[b];
      for (std::size_t j = 0; j < t.cols; ++j)
        if (t.a[r][j] != 0) t.cost1[j] -= factor * t.a[r][j];
      t.cost1_value -= factor * t.rhs[r];
      t.cost1[b] = 0;
    }
  }
  std::vector<bool> allowed(t.cols, true);
  Status st = detail::run_simplex(t, allowed);
  if (st == Status::unbounded) throw internal_error("phase 1 unbounded");
  // cost1_value tracks minus the artificial sum; nonzero means infeasible.
  if (t.cost1_value != 0) return Result{Status::infeasible, Rat(0), {}};
  // Drive artificials out of the basis; drop rows that turn out redundant.
  for (std::size_t r = 0; r < m; ++r) {
    if (t.basis[r] < static_cast<int>(cols)) continue;
    bool pivoted = false;
    for (std::size_t j = 0; j < cols && !pivoted; ++j)
      if (t.a[r][j] != 0) {
        t.pivot(r, j);
        pivoted = true;
      }
    if (!pivoted) t.rhs[r] = 0;  // redundant row, keep inert
  }
  t.phase1 = false;
  for (std::size_t j = cols; j < t.cols; ++j) allowed[j] = false;
  st = detail::run_simplex(t, allowed);
  if (st == Status::unbounded) return Result{Status::unbounded, Rat(0), {}};
  return extract(t);
}

}  // namespace speedscale::simplex
