#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "speedscale/core.hpp"
#include "speedscale/lp.hpp"
#include "speedscale/metrics.hpp"

namespace speedscale {

struct OracleResult {
  Schedule schedule;
  Ordering ordering;     // argmin ordering, lexicographically smallest on ties
  Rat objective;         // flow form: flow + energy, or flow under a budget
  long orderings_tried = 0;
  long lps_solved = 0;   // orderings that survived the lower-bound prune
};

// Ground truth by enumeration: the optimum over completion orderings of the
// per-ordering relaxation is the true optimum. Orderings that only permute
// jobs with identical (release, volume, weight) are enumerated once, and an
// ordering is only solved when a cheap lower bound (every job at top speed,
// every unit of volume at the cheapest energy rate) beats the incumbent.
inline OracleResult exact_optimum(const Instance& instance, int max_n = 8) {
  const int n = instance.n();
  if (n == 0) throw input_error("oracle: instance has no jobs");
  if (n > max_n)
    throw input_error("oracle: " + std::to_string(n) + " jobs exceed the enumeration cap of " +
                      std::to_string(max_n));

  // Job classes by identical data; a permutation of class ids stands for all
  // orderings that place each class's jobs in ascending index order. Classes
  // are numbered by ascending (release, volume, weight) so the enumeration
  // starts from a release-sorted ordering, which tends to be near-optimal
  // and makes the prune bite early.
  std::vector<Job> reps;
  for (const Job& job : instance.jobs)
    if (std::find(reps.begin(), reps.end(), job) == reps.end()) reps.push_back(job);
  std::sort(reps.begin(), reps.end(), [](const Job& a, const Job& b) {
    if (a.release != b.release) return a.release < b.release;
    if (a.volume != b.volume) return a.volume < b.volume;
    return a.weight < b.weight;
  });
  std::vector<int> class_id(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    class_id[static_cast<std::size_t>(j)] = static_cast<int>(
        std::find(reps.begin(), reps.end(), instance.jobs[static_cast<std::size_t>(j)]) -
        reps.begin());
  std::vector<std::vector<int>> members(reps.size());
  for (int j = 0; j < n; ++j)
    members[static_cast<std::size_t>(class_id[static_cast<std::size_t>(j)])].push_back(j);

  std::vector<int> sequence = class_id;
  std::sort(sequence.begin(), sequence.end());

  const int k = instance.profile.k();
  Rat flow_offset = 0;
  for (const Job& job : instance.jobs) flow_offset += job.weight * job.release;
  Rat min_energy_rate = instance.profile.power(1) / instance.profile.speed(1);
  for (int i = 2; i <= k; ++i)
    min_energy_rate = std::min(min_energy_rate,
                               Rat(instance.profile.power(i) / instance.profile.speed(i)));
  Rat min_energy = 0;
  for (const Job& job : instance.jobs) min_energy = min_energy + job.volume * min_energy_rate;
  if (instance.variant.is_budget() && min_energy > instance.variant.budget)
    throw infeasible_error("oracle: no ordering admits the energy budget");

  // Lower bound for one class sequence. Pick, for every position p, the
  // completion row that is tightest when all work runs at top speed; any
  // feasible point satisfies those n rows, so
  //   objective >= sum_p w_p t*_p + sum_q (cnt_q x_q + E_q) - offset,
  // where cnt_q is the weight of positions whose picked row covers q. Each
  // job's term is bounded below independently: cnt x + E(x) is convex and
  // piecewise linear in the processing time x, hence minimized at a pure
  // level, giving v_q min_i (cnt_q + P_i)/s_i. Under a budget the energy
  // leaves the objective and the floor is the top-speed processing time.
  std::vector<const Job*> by_pos(static_cast<std::size_t>(n));
  std::vector<Rat> cnt(static_cast<std::size_t>(n));
  auto lower_bound = [&](const std::vector<int>& seq) {
    for (int p = 0; p < n; ++p)
      by_pos[static_cast<std::size_t>(p)] = &reps[static_cast<std::size_t>(seq[static_cast<std::size_t>(p)])];
    Rat total = -flow_offset;
    std::fill(cnt.begin(), cnt.end(), Rat(0));
    for (int p = 0; p < n; ++p) {
      Rat best_row;
      int best_q0 = -1;
      for (int q0 = 0; q0 <= p; ++q0) {
        const Rat& t = by_pos[static_cast<std::size_t>(q0)]->release;
        if (t > by_pos[static_cast<std::size_t>(p)]->release) continue;
        Rat row = t;
        for (int q = 0; q <= p; ++q)
          if (by_pos[static_cast<std::size_t>(q)]->release >= t)
            row += by_pos[static_cast<std::size_t>(q)]->volume / instance.profile.speed(k);
        if (best_q0 < 0 || row > best_row) {
          best_row = row;
          best_q0 = q0;
        }
      }
      const Rat& t = by_pos[static_cast<std::size_t>(best_q0)]->release;
      const Rat& w = by_pos[static_cast<std::size_t>(p)]->weight;
      total += w * t;
      for (int q = 0; q <= p; ++q)
        if (by_pos[static_cast<std::size_t>(q)]->release >= t) cnt[static_cast<std::size_t>(q)] += w;
    }
    for (int q = 0; q < n; ++q) {
      auto qi = static_cast<std::size_t>(q);
      if (instance.variant.is_budget()) {
        total += cnt[qi] * by_pos[qi]->volume / instance.profile.speed(k);
        continue;
      }
      Rat best_level;
      for (int i = 1; i <= k; ++i) {
        Rat term = by_pos[qi]->volume * (cnt[qi] + instance.profile.power(i)) /
                   instance.profile.speed(i);
        if (i == 1 || term < best_level) best_level = term;
      }
      total += best_level;
    }
    return total;
  };

  std::optional<OracleResult> best;
  std::optional<LpSolution> best_solution;
  long tried = 0;
  long solved = 0;
  do {
    ++tried;
    if (best && lower_bound(sequence) > best->objective) continue;
    Ordering ordering;
    ordering.kind = OrderingKind::completion;
    ordering.order.reserve(static_cast<std::size_t>(n));
    std::vector<std::size_t> next(members.size(), 0);
    for (int c : sequence)
      ordering.order.push_back(members[static_cast<std::size_t>(c)][next[static_cast<std::size_t>(c)]++]);

    LpModel model = instance.variant.is_budget() ? build_budget_lp(instance, ordering)
                                                 : build_fe_lp(instance, ordering);
    ++solved;
    LpSolution solution = solve(model);
    if (solution.status != LpStatus::optimal) continue;
    bool better = !best || solution.flow_objective < best->objective ||
                  (solution.flow_objective == best->objective &&
                   ordering.order < best->ordering.order);
    if (better) {
      OracleResult candidate;
      candidate.ordering = ordering;
      candidate.objective = solution.flow_objective;
      best = std::move(candidate);
      best_solution = std::move(solution);
    }
  } while (std::next_permutation(sequence.begin(), sequence.end()));

  if (!best) throw infeasible_error("oracle: no ordering admits the energy budget");
  best->orderings_tried = tried;
  best->lps_solved = solved;
  best->schedule = reconstruct(*best_solution, instance, best->ordering);
  // The relaxation's value at the argmin ordering is attained by the real
  // schedule; anything else is a solver fault.
  Rat realized = evaluate(best->schedule, instance).objective;
  if (realized != best->objective)
    throw internal_error("oracle: reconstructed objective " + to_string(realized) +
                         " differs from the enumerated optimum " + to_string(best->objective));
  return best.value();
}

struct AuditReport {
  OracleResult optimum;
  std::vector<std::string> notes;
  bool identity_checked = false;  // two-speed budget processing-time identity
};

// Exhaustive self-checks on the enumerated optimum. A failure here is a
// solver bug, not bad input.
inline AuditReport audit_optimum(const Instance& instance, int max_n = 8) {
  AuditReport report;
  report.optimum = exact_optimum(instance, max_n);

  if (!instance.variant.is_budget()) {
    OptimalityWitness witness = optimality_witness(report.optimum.schedule, instance);
    if (!witness.violations.empty()) {
      const WitnessViolation& v = witness.violations.front();
      throw internal_error("audit failed: optimal schedule admits a profitable " +
                           std::string(v.kind == WitnessViolation::Kind::shrink_profitable
                                           ? "shrink"
                                           : "expand") +
                           " on job " + std::to_string(v.job + 1));
    }
    report.notes.push_back("optimality witness clean");
    return report;
  }

  // Two-speed budget identity: with s1 = 1 and P1 V < B < P2 V / s2, the
  // optimal total processing time is V - (B - P1 V) / Delta_1.
  if (instance.profile.k() == 2 && instance.profile.speed(1) == 1) {
    Rat volume = 0;
    for (const Job& job : instance.jobs) volume += job.volume;
    const Rat& budget = instance.variant.budget;
    Rat slow_all = instance.profile.power(1) * volume;
    Rat fast_all = instance.profile.power(2) * volume / instance.profile.speed(2);
    if (slow_all < budget && budget < fast_all) {
      Rat processing = 0;
      for (const Segment& seg : report.optimum.schedule.segments)
        if (!seg.is_idle()) processing += seg.end - seg.start;
      Rat expected = volume - (budget - slow_all) / instance.profile.delta(1);
      if (processing != expected)
        throw internal_error("audit failed: total processing time " + to_string(processing) +
                             " differs from the budget identity value " + to_string(expected));
      report.identity_checked = true;
      report.notes.push_back("two-speed processing-time identity holds");
    } else {
      report.notes.push_back(
          budget >= fast_all
              ? "budget at or above the all-fast cost: identity regime not entered"
              : "budget at or below the all-slow cost: identity regime not entered");
    }
  } else {
    report.notes.push_back("identity only defined for two speeds with unit bottom speed");
  }
  return report;
}

}  // namespace speedscale
