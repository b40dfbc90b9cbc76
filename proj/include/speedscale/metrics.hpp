#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "speedscale/core.hpp"
#include "speedscale/schedule.hpp"

namespace speedscale {

struct ScheduleMetrics {
  std::vector<Rat> completion;   // C_j
  std::vector<Rat> processing;   // x_j, total machine time given to j
  std::vector<Rat> avg_speed;    // v_j / x_j
  Rat flow;                      // sum of w_j (C_j - r_j)
  Rat energy;
  Rat objective;                 // flow + energy, or flow alone under a budget

  // Present when a completion ordering is supplied. Extended completions are
  // the running maxima of C along the ordering, indexed by job.
  std::optional<std::vector<Rat>> extended_completion;
  std::optional<Rat> extended_flow;       // sum of w_j (Chat_j - r_j)
  std::optional<Rat> extended_objective;  // extended flow (+ energy unless budget)
};

namespace detail {

// Completion time per job straight off the segments; assumes feasibility has
// been or will be checked by evaluate().
inline std::vector<Rat> completions_of(const Schedule& schedule, int n) {
  std::vector<Rat> completion(static_cast<std::size_t>(n), Rat(0));
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (const Segment& seg : schedule.segments) {
    if (seg.is_idle()) continue;
    auto j = static_cast<std::size_t>(seg.job);
    if (!seen[j] || completion[j] < seg.end) completion[j] = seg.end;
    seen[j] = true;
  }
  for (int j = 0; j < n; ++j)
    if (!seen[static_cast<std::size_t>(j)])
      throw infeasible_error("job " + std::to_string(j + 1) + " is never processed");
  return completion;
}

}  // namespace detail

// Checks feasibility (segments sorted and disjoint, releases respected,
// volumes exactly met) and computes all metrics.
inline ScheduleMetrics evaluate(const Schedule& schedule, const Instance& instance,
                                const Ordering* ordering = nullptr) {
  const int n = instance.n();
  const int k = instance.profile.k();
  ScheduleMetrics m;
  m.completion.assign(static_cast<std::size_t>(n), Rat(0));
  m.processing.assign(static_cast<std::size_t>(n), Rat(0));
  m.avg_speed.assign(static_cast<std::size_t>(n), Rat(0));
  std::vector<Rat> volume_done(static_cast<std::size_t>(n), Rat(0));
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  m.energy = 0;

  const Rat* previous_end = nullptr;
  for (const Segment& seg : schedule.segments) {
    if (seg.start >= seg.end) throw infeasible_error("segment with non-positive duration");
    if (previous_end && *previous_end > seg.start)
      throw infeasible_error("segments overlap or are unsorted");
    previous_end = &seg.end;
    if (seg.is_idle()) continue;
    if (seg.job < 0 || seg.job >= n) throw infeasible_error("segment references unknown job");
    if (seg.level < 1 || seg.level > k) throw infeasible_error("segment references unknown speed level");
    auto j = static_cast<std::size_t>(seg.job);
    if (seg.start < instance.jobs[j].release)
      throw infeasible_error("job " + std::to_string(seg.job + 1) + " processed before release");
    Rat duration = seg.end - seg.start;
    m.processing[j] += duration;
    volume_done[j] += duration * instance.profile.speed(seg.level);
    m.energy += duration * instance.profile.power(seg.level);
    if (!seen[j] || m.completion[j] < seg.end) m.completion[j] = seg.end;
    seen[j] = true;
  }

  m.flow = 0;
  for (int j = 0; j < n; ++j) {
    auto ji = static_cast<std::size_t>(j);
    if (!seen[ji]) throw infeasible_error("job " + std::to_string(j + 1) + " is never processed");
    if (volume_done[ji] != instance.jobs[ji].volume)
      throw infeasible_error("job " + std::to_string(j + 1) + " volume mismatch: processed " +
                             to_string(volume_done[ji]) + " of " + to_string(instance.jobs[ji].volume));
    m.avg_speed[ji] = instance.jobs[ji].volume / m.processing[ji];
    m.flow += instance.jobs[ji].weight * (m.completion[ji] - instance.jobs[ji].release);
  }
  m.objective = instance.variant.is_budget() ? m.flow : m.flow + m.energy;

  if (ordering) {
    if (ordering->kind != OrderingKind::completion)
      throw input_error("extended completions require a completion ordering");
    if (ordering->size() != n) throw input_error("ordering size mismatch");
    std::vector<Rat> chat(static_cast<std::size_t>(n));
    Rat running;
    for (int p = 0; p < n; ++p) {
      auto j = static_cast<std::size_t>(ordering->order[static_cast<std::size_t>(p)]);
      running = p == 0 ? m.completion[j] : std::max(running, m.completion[j]);
      chat[j] = running;
    }
    Rat ext_flow = 0;
    for (int j = 0; j < n; ++j) {
      auto ji = static_cast<std::size_t>(j);
      ext_flow += instance.jobs[ji].weight * (chat[ji] - instance.jobs[ji].release);
    }
    m.extended_completion = std::move(chat);
    m.extended_flow = ext_flow;
    m.extended_objective = instance.variant.is_budget() ? ext_flow : ext_flow + m.energy;
  }
  return m;
}

// Affection: j affects j' when C_j <= C_{j'} and C_j > r_{j'}; shrinking j
// then lets j' finish earlier. The lower variant relaxes the second
// comparison to C_j >= r_{j'} and governs expansions. Sets are transitive
// closures and always contain the job itself.
struct AffectionSets {
  std::vector<std::vector<int>> strict;  // K_j, sorted job indices
  std::vector<std::vector<int>> lower;   // K+_j
  std::vector<Rat> kappa;                // summed weights over K_j
  std::vector<Rat> kappa_plus;
};

inline AffectionSets affection(const Schedule& schedule, const Instance& instance) {
  const int n = instance.n();
  std::vector<Rat> completion = detail::completions_of(schedule, n);
  auto closure = [&](bool lower) {
    std::vector<std::vector<int>> sets(static_cast<std::size_t>(n));
    std::vector<std::vector<int>> direct(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const Rat& ca = completion[static_cast<std::size_t>(a)];
        const Rat& rb = instance.jobs[static_cast<std::size_t>(b)].release;
        bool hit = ca <= completion[static_cast<std::size_t>(b)] && (lower ? ca >= rb : ca > rb);
        if (hit) direct[static_cast<std::size_t>(a)].push_back(b);
      }
    for (int j = 0; j < n; ++j) {
      std::vector<bool> reached(static_cast<std::size_t>(n), false);
      std::vector<int> stack{j};
      reached[static_cast<std::size_t>(j)] = true;  // a job always (lower) affects itself
      while (!stack.empty()) {
        int a = stack.back();
        stack.pop_back();
        for (int b : direct[static_cast<std::size_t>(a)])
          if (!reached[static_cast<std::size_t>(b)]) {
            reached[static_cast<std::size_t>(b)] = true;
            stack.push_back(b);
          }
      }
      for (int b = 0; b < n; ++b)
        if (reached[static_cast<std::size_t>(b)]) sets[static_cast<std::size_t>(j)].push_back(b);
    }
    return sets;
  };
  AffectionSets sets;
  sets.strict = closure(false);
  sets.lower = closure(true);
  auto weigh = [&](const std::vector<std::vector<int>>& families) {
    std::vector<Rat> out(static_cast<std::size_t>(n), Rat(0));
    for (int j = 0; j < n; ++j)
      for (int b : families[static_cast<std::size_t>(j)])
        out[static_cast<std::size_t>(j)] += instance.jobs[static_cast<std::size_t>(b)].weight;
    return out;
  };
  sets.kappa = weigh(sets.strict);
  sets.kappa_plus = weigh(sets.lower);
  return sets;
}

// For unit jobs dispatched first-in-first-out, affection reduces to maximal
// consecutive runs linked by C_j > r_{j+1}. Returns inclusive [first, last]
// job-index ranges partitioning all jobs.
inline std::vector<std::pair<int, int>> affection_chains(const Schedule& schedule,
                                                         const Instance& instance) {
  const int n = instance.n();
  if (!instance.unit_size() || !instance.unit_weight())
    throw input_error("affection_chains requires a unit-size unit-weight instance");
  for (int j = 1; j < n; ++j)
    if (instance.jobs[static_cast<std::size_t>(j)].release <
        instance.jobs[static_cast<std::size_t>(j - 1)].release)
      throw input_error("affection_chains requires jobs indexed by nondecreasing release");
  // Non-preemptive in index order: each job occupies one contiguous run of
  // segments, runs appear in index order.
  int expected = 0;
  std::size_t s = 0;
  while (s < schedule.segments.size()) {
    while (s < schedule.segments.size() && schedule.segments[s].is_idle()) ++s;
    if (s >= schedule.segments.size()) break;
    int job = schedule.segments[s].job;
    if (job != expected) throw input_error("affection_chains requires a non-preemptive FIFO schedule");
    while (s < schedule.segments.size() && schedule.segments[s].job == job) {
      if (s + 1 < schedule.segments.size() && schedule.segments[s + 1].job == job &&
          schedule.segments[s].end != schedule.segments[s + 1].start)
        throw input_error("affection_chains requires a non-preemptive FIFO schedule");
      ++s;
    }
    ++expected;
  }
  if (expected != n) throw input_error("affection_chains requires a non-preemptive FIFO schedule");

  std::vector<Rat> completion = detail::completions_of(schedule, n);
  std::vector<std::pair<int, int>> chains;
  int first = 0;
  for (int j = 0; j < n; ++j) {
    bool linked = j + 1 < n && completion[static_cast<std::size_t>(j)] >
                                   instance.jobs[static_cast<std::size_t>(j + 1)].release;
    if (!linked) {
      chains.emplace_back(first, j);
      first = j + 1;
    }
  }
  return chains;
}

// Marginal energies for changing a job's processing time. Shrinking a job
// running at average speed in [s_i, s_{i+1}) costs delta_i per unit of time
// removed; +inf at the top speed. Expanding a job at speed in (s_i, s_{i+1}]
// recovers delta_i per unit added; -inf at the bottom speed.
struct JobEnergies {
  ExtRat shrink;  // Delta_j
  ExtRat expand;  // Delta+_j
};

namespace detail {

// Bracket of an average speed: shrink bracket i has s in [s_i, s_{i+1}),
// expand bracket i has s in (s_i, s_{i+1}].
inline int shrink_bracket(const Rat& s, const SpeedProfile& profile) {
  const int k = profile.k();
  if (s < profile.speed(1) || s > profile.speed(k))
    throw infeasible_error("average speed " + to_string(s) + " outside profile range");
  if (s == profile.speed(k)) return k;  // sentinel: delta_ext(k) = +inf
  int i = 1;
  while (s >= profile.speed(i + 1)) ++i;
  return i;
}

inline int expand_bracket(const Rat& s, const SpeedProfile& profile) {
  const int k = profile.k();
  if (s < profile.speed(1) || s > profile.speed(k))
    throw infeasible_error("average speed " + to_string(s) + " outside profile range");
  if (s == profile.speed(1)) return 0;  // sentinel: delta_ext(0) = -inf
  int i = 1;
  while (s > profile.speed(i + 1)) ++i;
  return i;
}

}  // namespace detail

inline std::vector<JobEnergies> shrink_expand_energies(const Schedule& schedule,
                                                       const Instance& instance) {
  const int n = instance.n();
  std::vector<Rat> completion = detail::completions_of(schedule, n);  // feasibility guard
  std::vector<Rat> processing(static_cast<std::size_t>(n), Rat(0));
  for (const Segment& seg : schedule.segments)
    if (!seg.is_idle()) processing[static_cast<std::size_t>(seg.job)] += seg.end - seg.start;
  std::vector<JobEnergies> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    auto ji = static_cast<std::size_t>(j);
    Rat s = instance.jobs[ji].volume / processing[ji];
    out.push_back(JobEnergies{instance.profile.delta_ext(detail::shrink_bracket(s, instance.profile)),
                              instance.profile.delta_ext(detail::expand_bracket(s, instance.profile))});
  }
  return out;
}

struct WitnessViolation {
  enum class Kind { shrink_profitable, expand_profitable };
  int job;
  Kind kind;
  Rat margin;  // kappa - Delta, or Delta+ - kappa+
};

// Local-optimality certificate: at an optimum, kappa_j - Delta_j <= 0 and
// Delta+_j - kappa+_j <= 0 for every job. Violations list every job where a
// marginal shrink or expansion would strictly improve flow + energy.
struct OptimalityWitness {
  AffectionSets affection;
  std::vector<JobEnergies> energies;
  std::vector<WitnessViolation> violations;
};

inline OptimalityWitness optimality_witness(const Schedule& schedule, const Instance& instance) {
  if (instance.variant.is_budget())
    throw input_error("optimality_witness applies to the flow-plus-energy objective only");
  OptimalityWitness w;
  w.affection = affection(schedule, instance);
  w.energies = shrink_expand_energies(schedule, instance);
  for (int j = 0; j < instance.n(); ++j) {
    auto ji = static_cast<std::size_t>(j);
    const ExtRat& delta = w.energies[ji].shrink;
    const ExtRat& delta_plus = w.energies[ji].expand;
    if (delta.is_finite() && w.affection.kappa[ji] > delta.value())
      w.violations.push_back({j, WitnessViolation::Kind::shrink_profitable,
                              w.affection.kappa[ji] - delta.value()});
    if (delta_plus.is_finite() && delta_plus.value() > w.affection.kappa_plus[ji])
      w.violations.push_back({j, WitnessViolation::Kind::expand_profitable,
                              delta_plus.value() - w.affection.kappa_plus[ji]});
  }
  return w;
}

struct PerturbPrediction {
  Rat flow_delta;
  Rat energy_delta;
};

// Predicts the exact objective change from setting x_j := x_j + eps while
// keeping every other processing time fixed and rebuilding the schedule
// non-idling in the same completion order. Valid only while neither the
// affection structure nor j's speed bracket changes on the open interval;
// rejects eps beyond the first such boundary.
inline PerturbPrediction perturb_processing_time(const Schedule& schedule, const Instance& instance,
                                                 int job, const Rat& eps) {
  if (job < 0 || job >= instance.n()) throw input_error("perturb: job index out of range");
  if (eps == 0) throw input_error("perturb: eps must be nonzero");
  const auto ji = static_cast<std::size_t>(job);
  AffectionSets sets = affection(schedule, instance);
  std::vector<Rat> completion = detail::completions_of(schedule, instance.n());
  std::vector<Rat> processing(static_cast<std::size_t>(instance.n()), Rat(0));
  for (const Segment& seg : schedule.segments)
    if (!seg.is_idle()) processing[static_cast<std::size_t>(seg.job)] += seg.end - seg.start;
  const Rat& volume = instance.jobs[ji].volume;
  Rat speed = volume / processing[ji];
  const SpeedProfile& profile = instance.profile;

  if (eps < 0) {
    Rat eta = -eps;
    int bracket = detail::shrink_bracket(speed, profile);
    if (bracket >= profile.k())
      throw input_error("perturb: eps too large, job already at top speed");
    Rat room = processing[ji] - volume / profile.speed(bracket + 1);
    if (eta > room)
      throw input_error("perturb: eps too large, crosses speed level x^" + std::to_string(bracket + 1));
    // Affection changes when an affected completion crosses a release, or
    // when it reaches a stationary completion from above. The latter rejects
    // even an exact landing: the shrunk tail then refills ahead of the
    // stationary job's block and the rebuilt completion jumps.
    std::vector<bool> moving(static_cast<std::size_t>(instance.n()), false);
    for (int a : sets.strict[ji]) moving[static_cast<std::size_t>(a)] = true;
    for (int a : sets.strict[ji])
      for (int b = 0; b < instance.n(); ++b) {
        const Rat& rb = instance.jobs[static_cast<std::size_t>(b)].release;
        const Rat& ca = completion[static_cast<std::size_t>(a)];
        if (ca > rb && ca - eta < rb)
          throw input_error("perturb: eps too large, crosses a release boundary");
        const Rat& cb = completion[static_cast<std::size_t>(b)];
        if (!moving[static_cast<std::size_t>(b)] && cb < ca && ca - eta <= cb)
          throw input_error("perturb: eps too large, reaches a stationary completion");
      }
    Rat delta = profile.delta(bracket);
    return PerturbPrediction{eps * sets.kappa[ji], -eps * delta};
  }

  int bracket = detail::expand_bracket(speed, profile);
  if (bracket < 1) throw input_error("perturb: eps too large, expansion below bottom speed impossible");
  Rat room = volume / profile.speed(bracket) - processing[ji];
  if (eps > room)
    throw input_error("perturb: eps too large, crosses speed level x^" + std::to_string(bracket));
  for (int a : sets.lower[ji])
    for (int b = 0; b < instance.n(); ++b) {
      const Rat& rb = instance.jobs[static_cast<std::size_t>(b)].release;
      const Rat& ca = completion[static_cast<std::size_t>(a)];
      if (ca < rb && ca + eps > rb)
        throw input_error("perturb: eps too large, crosses a release boundary");
    }
  Rat delta_plus = profile.delta(bracket);
  return PerturbPrediction{eps * sets.kappa_plus[ji], -eps * delta_plus};
}

}  // namespace speedscale
