#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "speedscale/core.hpp"
#include "speedscale/dispatch.hpp"
#include "speedscale/rational.hpp"
#include "speedscale/schedule.hpp"

namespace speedscale {

// The three-job, three-speed instance on which both naive greedy
// generalizations fail (one of them for alpha < 1/2, the other for
// alpha > 1/2). alpha = 1 would collapse the Delta table to (2, 2), so the
// parameter is restricted to [0, 1).
inline Instance counterexample_instance(const Rat& alpha) {
  if (alpha < 0 || alpha >= 1)
    throw input_error("counterexample: alpha must lie in [0, 1), got " + to_string(alpha));
  Instance ins;
  ins.jobs = {{rat(0), rat(1), rat(1)}, {rat(1, 3), rat(1), rat(1)}, {rat(4, 3), rat(1), rat(1)}};
  ins.profile = SpeedProfile({rat(1), rat(2), rat(3)}, {rat(1), rat(3) + alpha, rat(6) + alpha});
  ins.variant = Variant::flow_energy();
  return ins;
}

// Replaces every segment of a job outside the subset with idle time of the
// same extent.
inline Schedule restrict_schedule(const Schedule& schedule, const std::set<int>& jobs) {
  Schedule out = schedule;
  for (Segment& seg : out.segments)
    if (!seg.is_idle() && !jobs.count(seg.job)) seg = Segment::idle(seg.start, seg.end);
  return out;
}

// Embeds a two-speed budget instance (unit weights, arbitrary volumes) into
// a flow-plus-energy instance on 2n+1 jobs: one large job that must finish
// before a burst of n late jobs, which forces exactly the budgeted amount of
// fast running among the original jobs.
inline CompactInstance budget_to_fe(const Instance& budget_instance) {
  if (budget_instance.profile.k() != 2)
    throw input_error("budget_to_fe: exactly two speeds are required");
  if (!budget_instance.variant.is_budget())
    throw input_error("budget_to_fe: a budget instance is required");
  if (!budget_instance.unit_weight())
    throw input_error("budget_to_fe: unit weights are required");
  if (budget_instance.n() == 0) throw input_error("budget_to_fe: instance has no jobs");
  ValidationResult base_check = validate_profile(budget_instance.profile);
  if (!base_check.ok()) throw input_error("budget_to_fe: " + base_check.issues.front().detail);

  // The construction assumes the slow speed is the time unit; rescale time
  // when it is not (speeds and powers divided by s1, releases multiplied).
  Instance source = budget_instance;
  Rat s1 = source.profile.speed(1);
  bool rescaled = s1 != 1;
  if (rescaled) {
    std::vector<Rat> speeds, powers;
    for (int i = 1; i <= source.profile.k(); ++i) {
      speeds.push_back(source.profile.speed(i) / s1);
      powers.push_back(source.profile.power(i) / s1);
    }
    source.profile = SpeedProfile(std::move(speeds), std::move(powers));
    for (Job& job : source.jobs) job.release *= s1;
  }

  const int n = source.n();
  const Rat s2 = source.profile.speed(2);
  const Rat P1 = source.profile.power(1);
  Rat volume = 0;
  for (const Job& job : source.jobs) volume += job.volume;
  const Rat& budget = source.variant.budget;
  if (!(P1 * volume < budget && budget < source.profile.power(2) * volume / s2))
    throw input_error("budget_to_fe: budget " + to_string(budget) +
                      " outside the open range (" + to_string(P1 * volume) + ", " +
                      to_string(Rat(source.profile.power(2) * volume / s2)) + ")");

  const Rat Y = (budget - P1 * volume) / source.profile.delta(1);
  SrptResult base = srpt_schedule(source, 1);

  CompactInstance out;
  out.variant = Variant::flow_energy();
  for (const Job& job : source.jobs)
    out.groups.push_back(JobGroup{Job{job.release, job.volume, rat(1)}, Int(1)});
  Rat big_volume = base.idle + (s2 + 1) * volume + Y;
  out.groups.push_back(JobGroup{Job{rat(0), big_volume, rat(1)}, Int(1)});
  Rat burst_release = base.makespan + (s2 + 1) * volume;
  out.groups.push_back(JobGroup{Job{burst_release, Y + 1, rat(1)}, Int(n)});

  Rat P2_new = (Rat(n) + rat(3, 2)) * (s2 - 1) + P1 * s2;
  out.profile = SpeedProfile({rat(1), s2}, {P1, P2_new});
  Rat delta1 = out.profile.delta(1);
  if (!(Rat(n + 1) < delta1 && delta1 < Rat(n + 2)))
    throw internal_error("budget_to_fe: Delta_1 = " + to_string(delta1) +
                         " escaped (n+1, n+2)");

  out.provenance["reduction"] = "budget-to-fe";
  out.provenance["Y"] = to_string(Y);
  out.provenance["base_makespan"] = to_string(base.makespan);
  out.provenance["base_idle"] = to_string(base.idle);
  out.provenance["Delta_1"] = to_string(delta1);
  out.provenance["source_budget"] = to_string(budget);
  out.provenance["source_volume"] = to_string(volume);
  if (rescaled) out.provenance["time_rescaled_by"] = to_string(s1);
  return out;
}

namespace detail {

inline void check_subset_sum_input(const std::vector<Int>& elements, const Int& target) {
  if (elements.size() < 2)
    throw input_error("subset sum reduction: at least two elements are required");
  Int sum = 0;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (elements[i] <= 0)
      throw input_error("subset sum reduction: elements must be positive integers");
    if (i + 1 < elements.size() && elements[i] < elements[i + 1])
      throw input_error("subset sum reduction: elements must be nonincreasing");
    sum += elements[i];
  }
  // Sorted input makes the pairwise bound a_i <= 2 a_{i'} equivalent to
  // a_1 <= 2 a_m.
  if (elements.front() > 2 * elements.back())
    throw input_error("subset sum reduction: largest element exceeds twice the smallest");
  if (!(target > elements.front() && target < sum))
    throw input_error("subset sum reduction: target must lie strictly between a_1 and the sum");
}

}  // namespace detail

// SubsetSum embedded into weighted unit-size flow-plus-energy scheduling.
// Package i carries element a_i as the weight gap between its head job and
// the release offset of its m tail jobs; a block of K early filler jobs and
// a huge late block of tiny-weight jobs pin the optimum's structure. The
// late block's size is exponential in spirit (99 m^8 a_1^3 jobs), so the
// result stays grouped.
inline CompactInstance subsetsum_to_feidwu(const std::vector<Int>& elements, const Int& target) {
  detail::check_subset_sum_input(elements, target);
  const long m = static_cast<long>(elements.size());
  const Int& a1 = elements.front();
  const Int a1_cubed = pow_int(a1, 3);
  const Int m_int(m);

  CompactInstance out;
  out.variant = Variant::flow_energy();

  // J_0: K = ceil(m^2/2 + A/(2 a_1^2)) filler jobs at time zero.
  Rat k_value = rat(m * m, 2) + Rat(target) / Rat(2 * a1 * a1);
  Int K = rat_ceil(k_value);
  Rat w0 = Rat(1) / Rat(32 * pow_int(m_int, 5));
  out.groups.push_back(JobGroup{Job{rat(0), rat(1), w0}, K});

  // Packages J_1..J_m: a head of weight a_i/m, then m tails of weight
  // 2 m a_1^3 released a_i/(2 a_1^2) before the next integer grid point.
  for (long i = 1; i <= m; ++i) {
    const Int& a_i = elements[static_cast<std::size_t>(i - 1)];
    Rat r_head((i - 1) * (m + 1));
    Rat alpha_i = Rat(a_i) / Rat(2 * a1 * a1);
    out.groups.push_back(JobGroup{Job{r_head, rat(1), Rat(a_i) / Rat(m_int)}, Int(1)});
    out.groups.push_back(
        JobGroup{Job{r_head + 1 - alpha_i, rat(1), Rat(2 * m_int * a1_cubed)}, m_int});
  }

  // J_{m+1}: K~ = 99 m^8 a_1^3 tiny-weight jobs after everything else.
  Int K_tilde = 99 * pow_int(m_int, 8) * a1_cubed;
  Rat w_late = Rat(1) / Rat(33 * pow_int(m_int, 5));
  Rat r_late = Rat(m * (m + 1)) + Rat(K) - rat(m * m, 2) - Rat(target) / Rat(2 * a1 * a1);
  out.groups.push_back(JobGroup{Job{r_late, rat(1), w_late}, K_tilde});

  Rat P2 = Rat(3 * pow_int(m_int, 3) * a1_cubed) + w_late + 2;
  out.profile = SpeedProfile({rat(1), rat(2)}, {rat(1), P2});
  Rat delta1 = out.profile.delta(1);
  Rat expected_delta = Rat(3 * pow_int(m_int, 3) * a1_cubed) + w_late;
  if (delta1 != expected_delta)
    throw internal_error("subsetsum_to_feidwu: Delta_1 = " + to_string(delta1) +
                         ", expected " + to_string(expected_delta));

  out.provenance["reduction"] = "subsetsum-to-feidwu";
  std::string elems;
  for (const Int& a : elements) elems += (elems.empty() ? "" : ",") + a.get_str();
  out.provenance["elements"] = elems;
  out.provenance["target"] = target.get_str();
  out.provenance["K"] = K.get_str();
  out.provenance["K_tilde"] = K_tilde.get_str();
  out.provenance["Delta_1"] = to_string(delta1);
  return out;
}

// SubsetSum embedded into two-speed budget scheduling with unit weights.
// Package i is a big job of volume a_i plus a small job of volume
// 2 delta a_i released mid-package; packages are shifted apart by the
// previous package's all-slow finish plus one so they cannot interact. The
// budget pays for running exactly a target's worth of big-job volume fast.
inline CompactInstance subsetsum_to_bidua(const std::vector<Int>& elements, const Int& target) {
  detail::check_subset_sum_input(elements, target);
  const long m = static_cast<long>(elements.size());
  const Int& a1 = elements.front();
  Rat delta = Rat(1) / Rat(a1 * m * m);

  CompactInstance out;
  Rat sum = 0;
  for (const Int& a : elements) sum += Rat(a);
  out.variant = Variant::with_budget((1 + 4 * delta) * sum + Rat(target));
  out.profile = SpeedProfile({rat(1), rat(2)}, {rat(1), rat(4)});

  Ordering priority;
  priority.kind = OrderingKind::priority;
  Rat offset = 0;
  for (long i = 1; i <= m; ++i) {
    Rat a_i(elements[static_cast<std::size_t>(i - 1)]);
    out.groups.push_back(JobGroup{Job{offset, a_i, rat(1)}, Int(1)});
    out.groups.push_back(JobGroup{Job{offset + a_i / 2, 2 * delta * a_i, rat(1)}, Int(1)});
    // The small job preempts the big one wherever speeds allow.
    priority.order.push_back(static_cast<int>(2 * (i - 1) + 1));
    priority.order.push_back(static_cast<int>(2 * (i - 1)));
    offset += a_i + 2 * delta * a_i + 1;
  }
  out.ordering = priority;

  out.provenance["reduction"] = "subsetsum-to-bidua";
  std::string elems;
  for (const Int& a : elements) elems += (elems.empty() ? "" : ",") + a.get_str();
  out.provenance["elements"] = elems;
  out.provenance["target"] = target.get_str();
  out.provenance["delta"] = to_string(delta);
  out.provenance["budget"] = to_string(out.variant.budget);
  // YES instances reach total flow <= sum_i (a_i + 2 delta a_i) - (1/2 + delta) A.
  Rat base_flow = (1 + 2 * delta) * sum;
  out.provenance["base_flow"] = to_string(base_flow);
  out.provenance["yes_flow_threshold"] =
      to_string(Rat(base_flow - (rat(1, 2) + delta) * Rat(target)));
  return out;
}

}  // namespace speedscale
