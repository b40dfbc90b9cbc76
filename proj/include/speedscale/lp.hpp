#pragma once

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "speedscale/core.hpp"
#include "speedscale/dispatch.hpp"
#include "speedscale/metrics.hpp"
#include "speedscale/simplex.hpp"

namespace speedscale {

// Rows are tagged by origin. Jobs are relabeled by completion position
// (1-based in tags), matching the usual presentation: Ordering(p) keeps
// Chat_p >= Chat_{p-1}; Completion(p, q) bounds Chat_p by the work released
// at or after r_q that must precede it; ConvexSum(p) normalizes job p's level
// shares; NonNeg(p, i) keeps each share nonnegative; BudgetCap caps energy.
enum class LpRowKind { ordering, completion, convex_sum, non_negative, budget_cap };

struct LpRow {
  LpRowKind kind;
  int j = 0;       // 1-based completion position (level for NonNeg's second slot)
  int jprime = 0;  // second tag: predecessor / representative position / level
  std::vector<Rat> coeffs;
  simplex::Relation rel;
  Rat rhs;
};

// Variables: Chat per completion position, then level shares lambda_{p,i}.
struct LpModel {
  int num_jobs = 0;
  int num_levels = 0;
  Ordering ordering;           // positions -> job indices
  std::vector<Rat> objective;  // over all variables
  Rat flow_offset;             // sum of w_j r_j, subtracted for the flow form
  std::vector<LpRow> rows;
  bool budget = false;
  Rat budget_value;

  std::size_t chat_var(int p) const { return static_cast<std::size_t>(p); }
  std::size_t lambda_var(int p, int level) const {
    return static_cast<std::size_t>(num_jobs + p * num_levels + (level - 1));
  }
  std::size_t num_vars() const {
    return static_cast<std::size_t>(num_jobs + num_jobs * num_levels);
  }
};

namespace detail {

// Shared construction of ordering/completion/convex/nonneg rows plus the
// flow part of the objective.
inline LpModel base_lp(const Instance& instance, const Ordering& ordering) {
  require_completion_ordering(instance, ordering);
  const int n = instance.n();
  const int k = instance.profile.k();
  LpModel model;
  model.num_jobs = n;
  model.num_levels = k;
  model.ordering = ordering;
  model.objective.assign(model.num_vars(), Rat(0));
  model.flow_offset = 0;

  auto job_at = [&](int p) -> const Job& {
    return instance.jobs[static_cast<std::size_t>(ordering.order[static_cast<std::size_t>(p)])];
  };
  auto x_of = [&](int p, int level) { return job_at(p).volume / instance.profile.speed(level); };

  for (int p = 0; p < n; ++p) {
    model.objective[model.chat_var(p)] = job_at(p).weight;
    model.flow_offset += job_at(p).weight * job_at(p).release;
  }

  // Rows are emitted per position in ascending order (ordering row first,
  // then that position's completion rows); lp_solve's warm start relies on
  // encountering each position's rows in this sequence.
  for (int p = 0; p < n; ++p) {
    if (p > 0) {
      LpRow row;
      row.kind = LpRowKind::ordering;
      row.j = p + 1;
      row.jprime = p;
      row.coeffs.assign(model.num_vars(), Rat(0));
      row.coeffs[model.chat_var(p)] = 1;
      row.coeffs[model.chat_var(p - 1)] = -1;
      row.rel = simplex::Relation::ge;
      row.rhs = 0;
      model.rows.push_back(std::move(row));
    }
    // One row per distinct release among prior-or-equal positions whose
    // release does not exceed r_p.
    std::map<Rat, int> distinct;  // release value -> representative position
    for (int q = 0; q <= p; ++q)
      if (job_at(q).release <= job_at(p).release) distinct.try_emplace(job_at(q).release, q);
    for (const auto& [t, q_rep] : distinct) {
      LpRow row;
      row.kind = LpRowKind::completion;
      row.j = p + 1;
      row.jprime = q_rep + 1;
      row.coeffs.assign(model.num_vars(), Rat(0));
      row.coeffs[model.chat_var(p)] = 1;
      for (int q = 0; q <= p; ++q)
        if (job_at(q).release >= t)
          for (int i = 1; i <= k; ++i) row.coeffs[model.lambda_var(q, i)] = -x_of(q, i);
      row.rel = simplex::Relation::ge;
      row.rhs = t;
      model.rows.push_back(std::move(row));
    }
  }
  for (int p = 0; p < n; ++p) {
    LpRow row;
    row.kind = LpRowKind::convex_sum;
    row.j = p + 1;
    row.coeffs.assign(model.num_vars(), Rat(0));
    for (int i = 1; i <= k; ++i) row.coeffs[model.lambda_var(p, i)] = 1;
    row.rel = simplex::Relation::eq;
    row.rhs = 1;
    model.rows.push_back(std::move(row));
  }
  for (int p = 0; p < n; ++p)
    for (int i = 1; i <= k; ++i) {
      // Share bounds are tracked as tagged rows but enforced as variable
      // bounds by the solver, so the coefficient vector stays empty.
      LpRow row;
      row.kind = LpRowKind::non_negative;
      row.j = p + 1;
      row.jprime = i;
      row.rel = simplex::Relation::ge;
      row.rhs = 0;
      model.rows.push_back(std::move(row));
    }
  return model;
}

}  // namespace detail

// Extended-completion relaxation for a fixed completion ordering, objective
// sum w_j Chat_j + sum lambda_j^i E_j^i.
inline LpModel build_fe_lp(const Instance& instance, const Ordering& ordering) {
  LpModel model = detail::base_lp(instance, ordering);
  const int k = instance.profile.k();
  for (int p = 0; p < instance.n(); ++p) {
    const Job& job = instance.jobs[static_cast<std::size_t>(ordering.order[static_cast<std::size_t>(p)])];
    for (int i = 1; i <= k; ++i)
      model.objective[model.lambda_var(p, i)] =
          job.volume * instance.profile.power(i) / instance.profile.speed(i);
  }
  return model;
}

// Same rows plus an energy cap; objective is the extended flow alone.
inline LpModel build_budget_lp(const Instance& instance, const Ordering& ordering) {
  if (!instance.variant.is_budget()) throw input_error("lp: instance has no energy budget");
  LpModel model = detail::base_lp(instance, ordering);
  const int k = instance.profile.k();
  LpRow row;
  row.kind = LpRowKind::budget_cap;
  row.coeffs.assign(model.num_vars(), Rat(0));
  for (int p = 0; p < instance.n(); ++p) {
    const Job& job = instance.jobs[static_cast<std::size_t>(ordering.order[static_cast<std::size_t>(p)])];
    for (int i = 1; i <= k; ++i)
      row.coeffs[model.lambda_var(p, i)] =
          job.volume * instance.profile.power(i) / instance.profile.speed(i);
  }
  row.rel = simplex::Relation::le;
  row.rhs = instance.variant.budget;
  model.budget = true;
  model.budget_value = instance.variant.budget;
  model.rows.push_back(std::move(row));
  return model;
}

enum class LpStatus { optimal, infeasible };

struct LpSolution {
  LpStatus status = LpStatus::optimal;
  std::vector<Rat> chat;  // extended completions, indexed by job
  Allocation lambda;      // level shares, indexed by job
  Rat objective;          // sum w Chat (+ sum lambda E unless budget)
  Rat flow_objective;     // objective minus sum w_j r_j
};

// Direct translation of the model for cross-checks: every non-bound row as
// stated, solved cold. The production path below substitutes out one level
// share per job and warm starts instead.
inline simplex::Problem to_simplex_problem(const LpModel& model) {
  simplex::Problem problem;
  problem.num_vars = model.num_vars();
  problem.objective = model.objective;
  for (const LpRow& row : model.rows) {
    if (row.kind == LpRowKind::non_negative) continue;  // variable bound
    problem.rows.push_back(simplex::Constraint{row.coeffs, row.rel, row.rhs});
  }
  return problem;
}

inline LpSolution solve(const LpModel& model) {
  const int n = model.num_jobs;
  const int k = model.num_levels;

  // Substituted level: the energy-cheapest one (P_i / s_i minimal, lowest
  // index on ties). With its share eliminated via sum_i lambda = 1, every
  // remaining row is an inequality and an all-cheapest-level crash basis is
  // primal feasible, so phase 1 is never needed.
  int sub = 1;
  {
    // Energy per unit volume at level i is P_i/s_i; recover it from any
    // convex_sum-free data: the model stores E coefficients only in the
    // objective (flow-energy) or budget row, so derive from stored rows.
    const std::vector<Rat>* energy_coeffs = nullptr;
    if (model.budget) {
      for (const LpRow& row : model.rows)
        if (row.kind == LpRowKind::budget_cap) energy_coeffs = &row.coeffs;
    } else {
      energy_coeffs = &model.objective;
    }
    // Minimize total energy of pure level i across jobs; per-job argmin is
    // level-uniform, so the sum picks the same level.
    Rat best;
    for (int i = 1; i <= k; ++i) {
      Rat total = 0;
      for (int p = 0; p < n; ++p) total += (*energy_coeffs)[model.lambda_var(p, i)];
      if (i == 1 || total < best) {
        best = total;
        sub = i;
      }
    }
  }

  const std::size_t solver_vars = static_cast<std::size_t>(n) + static_cast<std::size_t>(n) * static_cast<std::size_t>(k - 1);
  auto solver_col = [&](int p, int level) {
    // Chat_p -> p; lambda_{p, i != sub} packed after.
    int idx = level < sub ? level - 1 : level - 2;
    return static_cast<std::size_t>(n + p * (k - 1) + idx);
  };

  auto transform = [&](const std::vector<Rat>& coeffs, const Rat& rhs_or_const, bool is_objective) {
    std::pair<std::vector<Rat>, Rat> out;
    out.first.assign(solver_vars, Rat(0));
    out.second = rhs_or_const;
    for (int p = 0; p < n; ++p) {
      out.first[static_cast<std::size_t>(p)] = coeffs[model.chat_var(p)];
      const Rat& sub_coeff = coeffs[model.lambda_var(p, sub)];
      if (is_objective)
        out.second += sub_coeff;  // constant term joins the objective
      else
        out.second -= sub_coeff;  // constant term moves to the rhs
      for (int i = 1; i <= k; ++i) {
        if (i == sub) continue;
        out.first[solver_col(p, i)] = coeffs[model.lambda_var(p, i)] - sub_coeff;
      }
    }
    return out;
  };

  simplex::Problem problem;
  problem.num_vars = solver_vars;
  auto [objective, objective_constant] = transform(model.objective, Rat(0), true);
  problem.objective = std::move(objective);

  // Track rows for the crash basis: per position, its ordering row and its
  // completion rows with transformed rhs.
  std::vector<int> ordering_row_of(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<int>> completion_rows_of(static_cast<std::size_t>(n));
  bool budget_infeasible = false;
  for (const LpRow& row : model.rows) {
    if (row.kind == LpRowKind::non_negative || row.kind == LpRowKind::convex_sum) continue;
    auto [coeffs, rhs] = transform(row.coeffs, row.rhs, false);
    int r = static_cast<int>(problem.rows.size());
    if (row.kind == LpRowKind::ordering) ordering_row_of[static_cast<std::size_t>(row.j - 1)] = r;
    if (row.kind == LpRowKind::completion)
      completion_rows_of[static_cast<std::size_t>(row.j - 1)].push_back(r);
    if (row.kind == LpRowKind::budget_cap && rhs < 0) budget_infeasible = true;
    problem.rows.push_back(simplex::Constraint{std::move(coeffs), row.rel, std::move(rhs)});
  }
  if (budget_infeasible) {
    // Even the energy-cheapest pure allocation exceeds the budget.
    LpSolution sol;
    sol.status = LpStatus::infeasible;
    return sol;
  }
  if (k > 1)
    for (int p = 0; p < n; ++p) {
      // lambda_{p,sub} >= 0 becomes a cap on the remaining shares.
      simplex::Constraint cap;
      cap.coeffs.assign(solver_vars, Rat(0));
      for (int i = 1; i <= k; ++i)
        if (i != sub) cap.coeffs[solver_col(p, i)] = 1;
      cap.rel = simplex::Relation::le;
      cap.rhs = 1;
      problem.rows.push_back(std::move(cap));
    }

  // Crash basis: all jobs on the substituted level. Chat values follow the
  // running maximum of each position's tightest completion row; the binding
  // row (or the ordering row when the maximum carries over) hosts Chat_p.
  simplex::Warmstart warm;
  warm.basis.assign(problem.rows.size(), 0);
  for (std::size_t r = 0; r < problem.rows.size(); ++r)
    warm.basis[r] = static_cast<int>(problem.num_vars + r);  // default: own slack
  Rat running_chat;
  for (int p = 0; p < n; ++p) {
    int best_row = -1;
    const Rat* best_rhs = nullptr;
    for (int r : completion_rows_of[static_cast<std::size_t>(p)])
      if (!best_rhs || problem.rows[static_cast<std::size_t>(r)].rhs > *best_rhs) {
        best_row = r;
        best_rhs = &problem.rows[static_cast<std::size_t>(r)].rhs;
      }
    if (p == 0 || *best_rhs >= running_chat) {
      warm.basis[static_cast<std::size_t>(best_row)] = p;  // Chat_p basic in its binding row
      running_chat = *best_rhs;
    } else {
      warm.basis[static_cast<std::size_t>(ordering_row_of[static_cast<std::size_t>(p)])] = p;
    }
  }

  simplex::Result result = simplex::solve(problem, &warm);
  if (result.status == simplex::Status::infeasible) {
    LpSolution sol;
    sol.status = LpStatus::infeasible;
    return sol;
  }
  if (result.status == simplex::Status::unbounded)
    throw internal_error("lp: unbounded model");

  LpSolution sol;
  sol.status = LpStatus::optimal;
  sol.chat.assign(static_cast<std::size_t>(n), Rat(0));
  sol.lambda.lambda.assign(static_cast<std::size_t>(n),
                           std::vector<Rat>(static_cast<std::size_t>(k), Rat(0)));
  for (int p = 0; p < n; ++p) {
    auto job = static_cast<std::size_t>(model.ordering.order[static_cast<std::size_t>(p)]);
    sol.chat[job] = result.solution[static_cast<std::size_t>(p)];
    Rat rest = 0;
    for (int i = 1; i <= k; ++i) {
      if (i == sub) continue;
      const Rat& share = result.solution[solver_col(p, i)];
      sol.lambda.lambda[job][static_cast<std::size_t>(i - 1)] = share;
      rest += share;
    }
    sol.lambda.lambda[job][static_cast<std::size_t>(sub - 1)] = 1 - rest;
  }
  sol.objective = result.objective + objective_constant;
  sol.flow_objective = sol.objective - model.flow_offset;
  return sol;
}

// Rebuilds the schedule behind an optimal solution: per-job processing times
// from the level shares, dispatched in the LP's completion ordering. Verifies
// the round trip exactly: extended completions and the objective of the
// schedule must match the solution.
inline Schedule reconstruct(const LpSolution& solution, const Instance& instance,
                            const Ordering& ordering) {
  if (solution.status != LpStatus::optimal)
    throw input_error("reconstruct: solution is not optimal");
  const int n = instance.n();
  const int k = instance.profile.k();
  std::vector<Rat> x(static_cast<std::size_t>(n), Rat(0));
  for (int j = 0; j < n; ++j)
    for (int i = 1; i <= k; ++i)
      x[static_cast<std::size_t>(j)] +=
          solution.lambda.lambda[static_cast<std::size_t>(j)][static_cast<std::size_t>(i - 1)] *
          instance.jobs[static_cast<std::size_t>(j)].volume / instance.profile.speed(i);
  Schedule schedule = dispatch_ordering(instance, ordering, x);
  ScheduleMetrics metrics = evaluate(schedule, instance, &ordering);
  for (int j = 0; j < n; ++j)
    if ((*metrics.extended_completion)[static_cast<std::size_t>(j)] !=
        solution.chat[static_cast<std::size_t>(j)])
      throw internal_error("reconstruct: extended completion mismatch on job " +
                           std::to_string(j + 1));
  Rat chat_objective = *metrics.extended_objective;
  for (int j = 0; j < n; ++j)
    chat_objective += instance.jobs[static_cast<std::size_t>(j)].weight *
                      instance.jobs[static_cast<std::size_t>(j)].release;
  if (instance.variant.is_budget()) {
    if (chat_objective != solution.objective)
      throw internal_error("reconstruct: flow objective mismatch");
    if (metrics.energy > instance.variant.budget)
      throw internal_error("reconstruct: energy budget exceeded");
  } else if (chat_objective != solution.objective) {
    throw internal_error("reconstruct: objective mismatch");
  }
  return schedule;
}

// Diagnostic LP-format dump. Coefficients print as exact decimals when the
// denominator allows, otherwise as high-precision roundings flagged up top.
inline std::string export_lp_text(const LpModel& model) {
  bool rounded = false;
  auto decimal = [&rounded](const Rat& value) {
    Int den = value.get_den();
    Int two(2), five(5);
    Int d = den;
    while (d % two == 0) d /= two;
    while (d % five == 0) d /= five;
    if (d == 1) {
      // Terminating decimal: scale to an integer over a power of ten.
      int digits = 0;
      Int num = value.get_num();
      Int rest = den;
      while (rest % two == 0) { rest /= two; ++digits; }
      int fives = 0;
      while (rest % five == 0) { rest /= five; ++fives; }
      digits = std::max(digits, fives);
      Int scale = 1;
      for (int i = 0; i < digits; ++i) scale *= 10;
      Int scaled = num * scale / den;
      std::string text = scaled.get_str();
      if (digits == 0) return text;
      bool negative = text[0] == '-';
      std::string body = negative ? text.substr(1) : text;
      while (static_cast<int>(body.size()) <= digits) body.insert(body.begin(), '0');
      body.insert(body.size() - static_cast<std::size_t>(digits), ".");
      return (negative ? "-" : "") + body;
    }
    rounded = true;
    mpf_class approx(value, 256);
    std::ostringstream os;
    os.precision(18);
    os << approx;
    return os.str();
  };
  auto var_name = [&](std::size_t v) {
    if (v < static_cast<std::size_t>(model.num_jobs))
      return "C" + std::to_string(v + 1);
    std::size_t rest = v - static_cast<std::size_t>(model.num_jobs);
    auto p = rest / static_cast<std::size_t>(model.num_levels);
    auto i = rest % static_cast<std::size_t>(model.num_levels);
    return "l_" + std::to_string(p + 1) + "_" + std::to_string(i + 1);
  };
  std::ostringstream body;
  auto emit_terms = [&](const std::vector<Rat>& coeffs) {
    bool first = true;
    for (std::size_t v = 0; v < coeffs.size(); ++v) {
      if (coeffs[v] == 0) continue;
      Rat a = coeffs[v];
      if (first) {
        if (a < 0) { body << "- "; a = -a; }
        first = false;
      } else {
        body << (a < 0 ? " - " : " + ");
        if (a < 0) a = -a;
      }
      if (a != 1) body << decimal(a) << " ";
      body << var_name(v);
    }
    if (first) body << "0 C1";
  };
  body << "Minimize\n obj: ";
  emit_terms(model.objective);
  body << "\nSubject To\n";
  int row_id = 0;
  for (const LpRow& row : model.rows) {
    if (row.kind == LpRowKind::non_negative) continue;  // covered by bounds
    body << " r" << ++row_id << ": ";
    emit_terms(row.coeffs);
    switch (row.rel) {
      case simplex::Relation::le: body << " <= "; break;
      case simplex::Relation::ge: body << " >= "; break;
      case simplex::Relation::eq: body << " = "; break;
    }
    body << decimal(row.rhs) << "\n";
  }
  body << "End\n";
  std::string header;
  if (rounded) header = "\\ some coefficients rounded for this text format\n";
  return header + body.str();
}

}  // namespace speedscale
