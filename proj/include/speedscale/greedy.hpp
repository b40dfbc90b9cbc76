#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "speedscale/core.hpp"
#include "speedscale/dispatch.hpp"
#include "speedscale/metrics.hpp"
#include "speedscale/schedule.hpp"

namespace speedscale {

// Why a step stopped: the job's processing time reached the next pure-speed
// point (its Delta changes there), a completion in its chain landed on a
// release (its kappa changes there), or a probe point where neither changed.
enum class StepEnd { speed_level_hit, affection_break, balanced };

inline std::string to_string(StepEnd reason) {
  switch (reason) {
    case StepEnd::speed_level_hit: return "speed-level-hit";
    case StepEnd::affection_break: return "affection-break";
    case StepEnd::balanced: return "balanced";
  }
  return "?";
}

struct TraceStep {
  int job = 0;  // original job index
  Rat x_before;
  Rat x_after;
  Rat kappa;     // at the step's start
  ExtRat delta;  // at the step's start
  StepEnd reason = StepEnd::speed_level_hit;
};

struct ConstructionTrace {
  Ordering ordering;  // completion ordering the construction works in
  std::vector<TraceStep> steps;
};

struct GreedyResult {
  Schedule schedule;
  ConstructionTrace trace;
};

// kappa - Delta as an extended value (-inf when the job cannot shrink).
inline ExtRat kd_score(const Rat& kappa, const ExtRat& delta) {
  if (delta.is_pos_inf()) return ExtRat::neg_inf();
  return ExtRat(kappa - delta.value());
}

namespace detail {

// Speed-up state for unit instances: per-position processing times under the
// FIFO completion ordering, with completions, strict affection chains and
// level brackets maintained incrementally.
struct UnitState {
  const Instance* instance;
  Ordering fifo;
  std::vector<Rat> release;     // by position, nondecreasing
  std::vector<Rat> x;          // by position
  std::vector<Rat> completion;  // by position
  int n;
  int k;

  UnitState(const Instance& ins, bool require_fe) : instance(&ins) {
    if (!ins.unit_size() || !ins.unit_weight())
      throw input_error("greedy: a unit-size unit-weight instance is required");
    if (require_fe && ins.variant.is_budget())
      throw input_error("greedy: the flow-plus-energy variant is required");
    fifo = fifo_ordering(ins);
    n = ins.n();
    k = ins.profile.k();
    release.resize(static_cast<std::size_t>(n));
    for (int p = 0; p < n; ++p)
      release[static_cast<std::size_t>(p)] =
          ins.jobs[static_cast<std::size_t>(fifo.order[static_cast<std::size_t>(p)])].release;
    x.assign(static_cast<std::size_t>(n), Rat(1) / ins.profile.speed(1));
    completion.resize(static_cast<std::size_t>(n));
    recompute();
  }

  void recompute() {
    for (int p = 0; p < n; ++p) {
      auto pi = static_cast<std::size_t>(p);
      Rat start = p == 0 ? release[pi] : std::max(completion[pi - 1], release[pi]);
      if (start < release[pi]) start = release[pi];
      completion[pi] = start + x[pi];
    }
  }

  // Last position reachable from p via strict links C_q > r_{q+1}.
  int chain_end(int p) const {
    int m = p;
    while (m + 1 < n &&
           completion[static_cast<std::size_t>(m)] > release[static_cast<std::size_t>(m + 1)])
      ++m;
    return m;
  }

  Rat kappa(int p) const { return Rat(chain_end(p) - p + 1); }

  // Non-strict variant, the lower affection used after a step lands exactly
  // on a release.
  Rat kappa_plus(int p) const {
    int m = p;
    while (m + 1 < n &&
           completion[static_cast<std::size_t>(m)] >= release[static_cast<std::size_t>(m + 1)])
      ++m;
    return Rat(m - p + 1);
  }

  int bracket(int p) const {
    return shrink_bracket(Rat(1) / x[static_cast<std::size_t>(p)], instance->profile);
  }

  ExtRat delta(int p) const { return instance->profile.delta_ext(bracket(p)); }

  ExtRat delta_plus(int p) const {
    return instance->profile.delta_ext(
        expand_bracket(Rat(1) / x[static_cast<std::size_t>(p)], instance->profile));
  }

  // One speed-up step for position p: shrink x_p to the nearest critical
  // point (level boundary, or the first chain completion landing on a
  // release). Requires delta(p) finite, i.e. p below top speed.
  TraceStep step(int p) {
    auto pi = static_cast<std::size_t>(p);
    int i = bracket(p);
    Rat d_level = x[pi] - Rat(1) / instance->profile.speed(i + 1);
    std::optional<Rat> d_affect;
    int m = chain_end(p);
    for (int q = p; q < m; ++q) {
      Rat gap = completion[static_cast<std::size_t>(q)] - release[static_cast<std::size_t>(q + 1)];
      if (!d_affect || gap < *d_affect) d_affect = gap;
    }
    TraceStep out;
    out.job = fifo.order[pi];
    out.x_before = x[pi];
    out.kappa = kappa(p);
    out.delta = instance->profile.delta_ext(i);
    Rat eps;
    if (!d_affect || d_level <= *d_affect) {
      eps = d_level;
      out.reason = StepEnd::speed_level_hit;
    } else {
      eps = *d_affect;
      out.reason = StepEnd::affection_break;
    }
    x[pi] -= eps;
    out.x_after = x[pi];
    recompute();
    return out;
  }

  GreedyResult finish(ConstructionTrace trace) const {
    std::vector<Rat> by_job(static_cast<std::size_t>(n));
    for (int p = 0; p < n; ++p)
      by_job[static_cast<std::size_t>(fifo.order[static_cast<std::size_t>(p)])] =
          x[static_cast<std::size_t>(p)];
    GreedyResult result;
    result.schedule = dispatch_ordering(*instance, fifo, by_job);
    result.trace = std::move(trace);
    return result;
  }

  long step_cap() const { return static_cast<long>(n) * (n + k) + 1; }
};

}  // namespace detail

// Speed up, globally greedily, the job with maximum kappa - Delta while some
// job has kappa >= Delta; each step runs to the nearest critical point.
// Optimal for unit-size unit-weight flow-plus-energy instances.
inline GreedyResult kappa_delta(const Instance& instance) {
  detail::UnitState st(instance, true);
  ConstructionTrace trace;
  trace.ordering = st.fifo;
  for (long steps = 0;; ++steps) {
    if (steps > st.step_cap()) throw internal_error("kappa_delta: step bound exceeded");
    int best = -1;
    Rat best_score;
    for (int p = 0; p < st.n; ++p) {
      ExtRat delta = st.delta(p);
      Rat kap = st.kappa(p);
      if (delta.is_pos_inf() || kap < delta.value()) continue;  // guard kappa >= Delta
      Rat score = kap - delta.value();
      if (best == -1 || score > best_score) {
        best = p;
        best_score = score;
      }
    }
    if (best == -1) break;
    trace.steps.push_back(st.step(best));
  }
  return st.finish(std::move(trace));
}

// First failed generalization: a single FIFO pass, speeding each job while
// kappa_j >= Delta_j regardless of how many levels it climbs.
inline GreedyResult naive_two_speed_sweep(const Instance& instance) {
  detail::UnitState st(instance, true);
  ConstructionTrace trace;
  trace.ordering = st.fifo;
  long steps = 0;
  for (int p = 0; p < st.n; ++p) {
    for (;;) {
      if (++steps > st.step_cap()) throw internal_error("naive sweep: step bound exceeded");
      ExtRat delta = st.delta(p);
      if (delta.is_pos_inf() || st.kappa(p) < delta.value()) break;
      trace.steps.push_back(st.step(p));
    }
  }
  return st.finish(std::move(trace));
}

// Second failed generalization: one FIFO pass per level i, speeding job j
// while kappa_j >= Delta_i and Delta_j <= Delta_i.
inline GreedyResult naive_per_level_sweep(const Instance& instance) {
  detail::UnitState st(instance, true);
  ConstructionTrace trace;
  trace.ordering = st.fifo;
  long steps = 0;
  for (int i = 1; i <= st.k; ++i) {
    ExtRat level_delta = instance.profile.delta_ext(i);
    for (int p = 0; p < st.n; ++p) {
      for (;;) {
        if (++steps > st.step_cap() * st.k)
          throw internal_error("naive sweep: step bound exceeded");
        if (level_delta.is_pos_inf() || st.kappa(p) < level_delta.value()) break;
        if (!(st.delta(p) <= level_delta)) break;
        trace.steps.push_back(st.step(p));
      }
    }
  }
  return st.finish(std::move(trace));
}

// Extended affection for a fixed completion ordering. Position p' (>= p) is
// extendedly affected by p if C_p > r_{p'} and Chat_{p'} > Chat_{p'-1}, or if
// Chat_p > Chat_{p-1} and Chat_p = Chat_{p'}; closed transitively. Chat_0 is
// a -inf sentinel, so the first position's own membership needs no guard.
struct ExtendedAffectionReport {
  std::vector<std::set<int>> sets;  // by job, containing job indices
  std::vector<Rat> kappa_hat;       // by job
};

inline ExtendedAffectionReport extended_affection(const Schedule& schedule,
                                                  const Instance& instance,
                                                  const Ordering& ordering) {
  ScheduleMetrics metrics = evaluate(schedule, instance, &ordering);
  const int n = instance.n();
  auto chat_of = [&](int p) -> const Rat& {
    return (*metrics.extended_completion)[static_cast<std::size_t>(
        ordering.order[static_cast<std::size_t>(p)])];
  };
  auto job_of = [&](int p) { return ordering.order[static_cast<std::size_t>(p)]; };
  auto rises = [&](int p) {  // Chat_p > Chat_{p-1}, with Chat_0 = -inf
    return p == 0 || chat_of(p) > chat_of(p - 1);
  };
  std::vector<std::vector<bool>> direct(static_cast<std::size_t>(n),
                                        std::vector<bool>(static_cast<std::size_t>(n), false));
  for (int p = 0; p < n; ++p) {
    const Rat& cp = metrics.completion[static_cast<std::size_t>(job_of(p))];
    for (int q = p; q < n; ++q) {
      bool rule_a =
          cp > instance.jobs[static_cast<std::size_t>(job_of(q))].release && rises(q);
      bool rule_b = rises(p) && chat_of(p) == chat_of(q);
      if (rule_a || rule_b) direct[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] = true;
    }
  }
  ExtendedAffectionReport report;
  report.sets.assign(static_cast<std::size_t>(n), {});
  report.kappa_hat.assign(static_cast<std::size_t>(n), Rat(0));
  for (int p = 0; p < n; ++p) {
    // Transitive closure by forward sweep from p.
    std::vector<bool> in(static_cast<std::size_t>(n), false);
    std::vector<int> queue;
    auto add = [&](int q) {
      if (!in[static_cast<std::size_t>(q)]) {
        in[static_cast<std::size_t>(q)] = true;
        queue.push_back(q);
      }
    };
    for (int q = p; q < n; ++q)
      if (direct[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)]) add(q);
    for (std::size_t head = 0; head < queue.size(); ++head)
      for (int q = queue[head]; q < n; ++q)
        if (direct[static_cast<std::size_t>(queue[head])][static_cast<std::size_t>(q)]) add(q);
    auto pj = static_cast<std::size_t>(job_of(p));
    for (int q = 0; q < n; ++q)
      if (in[static_cast<std::size_t>(q)]) {
        report.sets[pj].insert(job_of(q));
        report.kappa_hat[pj] += instance.jobs[static_cast<std::size_t>(job_of(q))].weight;
      }
  }
  return report;
}

// Experimental: the greedy with kappa replaced by the extended affection
// weight, for arbitrary sizes and weights under a given completion ordering.
// Steps land on probe points (level boundaries and current completion gaps);
// probes where neither the chosen job's kappa-hat nor Delta changed are
// recorded as balanced and the loop re-evaluates. Outputs are meant to be
// compared against the LP optimum, never trusted on their own.
inline GreedyResult kappa_delta_c(const Instance& instance, const Ordering& ordering) {
  if (instance.variant.is_budget())
    throw input_error("kappa_delta_c: the flow-plus-energy variant is required");
  require_completion_ordering(instance, ordering);
  const int n = instance.n();
  const int k = instance.profile.k();
  std::vector<Rat> x(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    x[static_cast<std::size_t>(j)] =
        instance.jobs[static_cast<std::size_t>(j)].volume / instance.profile.speed(1);
  std::vector<int> position(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) position[static_cast<std::size_t>(ordering.order[static_cast<std::size_t>(p)])] = p;

  ConstructionTrace trace;
  trace.ordering = ordering;
  Schedule schedule = dispatch_ordering(instance, ordering, x);
  ExtendedAffectionReport report = extended_affection(schedule, instance, ordering);
  const long cap = 4L * n * n * (n + k) + 64;
  for (long steps = 0;; ++steps) {
    if (steps > cap) throw internal_error("kappa_delta_c: step bound exceeded");
    ScheduleMetrics metrics = evaluate(schedule, instance, &ordering);
    int best = -1;
    Rat best_score;
    ExtRat best_delta = ExtRat::pos_inf();
    for (int p = 0; p < n; ++p) {
      int j = ordering.order[static_cast<std::size_t>(p)];
      auto ji = static_cast<std::size_t>(j);
      Rat speed = instance.jobs[ji].volume / x[ji];
      ExtRat delta = instance.profile.delta_ext(detail::shrink_bracket(speed, instance.profile));
      if (delta.is_pos_inf() || report.kappa_hat[ji] < delta.value()) continue;
      Rat score = report.kappa_hat[ji] - delta.value();
      if (best == -1 || score > best_score) {
        best = p;
        best_score = score;
        best_delta = delta;
      }
    }
    if (best == -1) break;
    int j = ordering.order[static_cast<std::size_t>(best)];
    auto ji = static_cast<std::size_t>(j);

    // Probe points: the level boundary, plus every currently positive
    // completion-vs-release and completion-vs-completion gap that could
    // close while x_j shrinks. The smallest one bounds the step.
    Rat speed = instance.jobs[ji].volume / x[ji];
    int br = detail::shrink_bracket(speed, instance.profile);
    Rat eps = x[ji] - instance.jobs[ji].volume / instance.profile.speed(br + 1);
    for (int a = 0; a < n; ++a) {
      if (position[static_cast<std::size_t>(a)] < best) continue;  // cannot move
      const Rat& ca = metrics.completion[static_cast<std::size_t>(a)];
      for (int b = 0; b < n; ++b) {
        Rat gap_r = ca - instance.jobs[static_cast<std::size_t>(b)].release;
        if (gap_r > 0 && gap_r < eps) eps = gap_r;
        Rat gap_c = ca - metrics.completion[static_cast<std::size_t>(b)];
        if (gap_c > 0 && gap_c < eps) eps = gap_c;
      }
    }

    TraceStep step;
    step.job = j;
    step.x_before = x[ji];
    step.kappa = report.kappa_hat[ji];
    step.delta = best_delta;
    x[ji] -= eps;
    step.x_after = x[ji];
    schedule = dispatch_ordering(instance, ordering, x);
    report = extended_affection(schedule, instance, ordering);
    Rat new_speed = instance.jobs[ji].volume / x[ji];
    ExtRat new_delta =
        instance.profile.delta_ext(detail::shrink_bracket(new_speed, instance.profile));
    if (new_delta != best_delta)
      step.reason = StepEnd::speed_level_hit;
    else if (report.kappa_hat[ji] != step.kappa)
      step.reason = StepEnd::affection_break;
    else
      step.reason = StepEnd::balanced;
    trace.steps.push_back(step);
  }
  GreedyResult result;
  result.schedule = std::move(schedule);
  result.trace = std::move(trace);
  return result;
}

// Construction audit for unit instances: replays a trace from the all-slow
// start and checks, per step, that exactly the recorded job sped up (x
// strictly decreasing), that the step ran until kappa or Delta changed and
// no further (kappa before = kappa+ after, Delta before = Delta+ after),
// that the job maximized kappa - Delta among jobs not yet at their final
// speed, and the stronger rule: maximal among all jobs.
enum class KdRuleCondition { one_job_per_step, kd_change, kd_order_final, kd_rule };

inline std::string to_string(KdRuleCondition c) {
  switch (c) {
    case KdRuleCondition::one_job_per_step: return "one-job-per-step";
    case KdRuleCondition::kd_change: return "kappa-delta-change";
    case KdRuleCondition::kd_order_final: return "kappa-delta-order-among-unfinished";
    case KdRuleCondition::kd_rule: return "kappa-delta-rule";
  }
  return "?";
}

struct KdRuleViolation {
  int step = 0;  // 1-based
  KdRuleCondition condition;
  std::string detail;
};

struct KdRuleResult {
  std::optional<KdRuleViolation> violation;
  bool ok() const { return !violation.has_value(); }
};

inline KdRuleResult validate_kd_rule(const ConstructionTrace& trace, const Instance& instance) {
  detail::UnitState st(instance, true);
  // Final processing times, for the not-yet-at-final-speed restriction.
  std::vector<Rat> final_x = st.x;
  std::vector<int> pos_of(static_cast<std::size_t>(st.n));
  for (int p = 0; p < st.n; ++p)
    pos_of[static_cast<std::size_t>(st.fifo.order[static_cast<std::size_t>(p)])] = p;
  for (const TraceStep& step : trace.steps) {
    auto pi = static_cast<std::size_t>(pos_of[static_cast<std::size_t>(step.job)]);
    final_x[pi] = step.x_after;
  }

  KdRuleResult result;
  auto fail = [&](int step, KdRuleCondition c, std::string detail) {
    result.violation = KdRuleViolation{step, c, std::move(detail)};
    return result;
  };
  for (std::size_t t = 0; t < trace.steps.size(); ++t) {
    const TraceStep& step = trace.steps[t];
    int display = static_cast<int>(t) + 1;
    if (step.job < 0 || step.job >= st.n)
      return fail(display, KdRuleCondition::one_job_per_step, "job index out of range");
    int p = pos_of[static_cast<std::size_t>(step.job)];
    auto pi = static_cast<std::size_t>(p);
    if (st.x[pi] != step.x_before)
      return fail(display, KdRuleCondition::one_job_per_step,
                  "x before step does not match the replayed state");
    if (!(step.x_after < step.x_before))
      return fail(display, KdRuleCondition::one_job_per_step, "x did not strictly decrease");
    if (step.x_after < Rat(1) / instance.profile.speed(st.k))
      return fail(display, KdRuleCondition::one_job_per_step, "x below the top-speed point");

    Rat kappa_before = st.kappa(p);
    ExtRat delta_before = st.delta(p);
    ExtRat chosen_score = kd_score(kappa_before, delta_before);
    // The rule: maximal kappa - Delta among all jobs.
    for (int q = 0; q < st.n; ++q) {
      ExtRat other = kd_score(st.kappa(q), st.delta(q));
      if (other > chosen_score) {
        std::ostringstream os;
        os << "job " << st.fifo.order[static_cast<std::size_t>(q)] + 1
           << " has larger kappa - Delta";
        // Condition 5 only restricts against jobs still below final speed.
        bool unfinished = st.x[static_cast<std::size_t>(q)] > final_x[static_cast<std::size_t>(q)];
        return fail(display,
                    unfinished ? KdRuleCondition::kd_order_final : KdRuleCondition::kd_rule,
                    os.str());
      }
    }

    st.x[pi] = step.x_after;
    st.recompute();
    if (st.kappa_plus(p) != kappa_before)
      return fail(display, KdRuleCondition::kd_change,
                  "kappa before != kappa+ after (step crossed an affection change)");
    if (st.delta_plus(p) != delta_before)
      return fail(display, KdRuleCondition::kd_change,
                  "Delta before != Delta+ after (step crossed a level boundary)");
  }
  return result;
}

// Line-oriented trace dump: one step per line.
inline std::string format_trace(const ConstructionTrace& trace) {
  std::ostringstream os;
  for (std::size_t t = 0; t < trace.steps.size(); ++t) {
    const TraceStep& s = trace.steps[t];
    os << "step " << t + 1 << ": job " << s.job + 1 << " x " << to_string(s.x_before) << " -> "
       << to_string(s.x_after) << " kappa " << to_string(s.kappa) << " Delta " << s.delta.str()
       << " end " << to_string(s.reason) << "\n";
  }
  return os.str();
}

}  // namespace speedscale
