#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "speedscale/errors.hpp"
#include "speedscale/rational.hpp"

namespace speedscale {

// A job: released at `release`, needs `volume` units of work, weighted by
// `weight` in the flow objective.
struct Job {
  Rat release;
  Rat volume;
  Rat weight;

  friend bool operator==(const Job& a, const Job& b) {
    return a.release == b.release && a.volume == b.volume && a.weight == b.weight;
  }
};

// Discrete speed levels s_1 < ... < s_k with running powers P_1 < ... < P_k.
// Level indices are 1-based throughout. delta(i) is the marginal energy per
// unit of processing time freed when moving volume from level i to i+1:
//   delta_i = (P_{i+1} s_i - P_i s_{i+1}) / (s_{i+1} - s_i).
class SpeedProfile {
 public:
  SpeedProfile() = default;
  SpeedProfile(std::vector<Rat> speeds, std::vector<Rat> powers)
      : speeds_(std::move(speeds)), powers_(std::move(powers)) {}

  int k() const { return static_cast<int>(speeds_.size()); }
  const std::vector<Rat>& speeds() const { return speeds_; }
  const std::vector<Rat>& powers() const { return powers_; }

  const Rat& speed(int level) const { return speeds_.at(level - 1); }
  const Rat& power(int level) const { return powers_.at(level - 1); }

  Rat delta(int i) const {
    if (i < 1 || i >= k()) throw internal_error("delta index out of range");
    const Rat& s_lo = speed(i);
    const Rat& s_hi = speed(i + 1);
    return (power(i + 1) * s_lo - power(i) * s_hi) / (s_hi - s_lo);
  }

  // Extends the table with delta_0 = -inf and delta_k = +inf.
  ExtRat delta_ext(int i) const {
    if (i <= 0) return ExtRat::neg_inf();
    if (i >= k()) return ExtRat::pos_inf();
    return ExtRat(delta(i));
  }

  friend bool operator==(const SpeedProfile& a, const SpeedProfile& b) {
    return a.speeds_ == b.speeds_ && a.powers_ == b.powers_;
  }

 private:
  std::vector<Rat> speeds_;
  std::vector<Rat> powers_;
};

enum class VariantKind { flow_energy, budget };

// Objective selector: minimize flow + energy, or minimize flow subject to an
// energy budget.
struct Variant {
  VariantKind kind = VariantKind::flow_energy;
  Rat budget;  // meaningful only for VariantKind::budget

  static Variant flow_energy() { return Variant{VariantKind::flow_energy, Rat()}; }
  static Variant with_budget(Rat b) { return Variant{VariantKind::budget, std::move(b)}; }
  bool is_budget() const { return kind == VariantKind::budget; }

  friend bool operator==(const Variant& a, const Variant& b) {
    return a.kind == b.kind && (a.kind != VariantKind::budget || a.budget == b.budget);
  }
};

enum class OrderingKind { completion, priority };

// A permutation of job indices (0-based). order[p] is the job at position p:
// for completion orderings, the p-th job to finish; for priority orderings,
// the p-th highest dispatch priority.
struct Ordering {
  OrderingKind kind = OrderingKind::completion;
  std::vector<int> order;

  int size() const { return static_cast<int>(order.size()); }

  // positions()[j] = position of job j in the ordering.
  std::vector<int> positions() const {
    std::vector<int> pos(order.size());
    for (int p = 0; p < size(); ++p) pos[static_cast<std::size_t>(order[p])] = p;
    return pos;
  }

  friend bool operator==(const Ordering& a, const Ordering& b) {
    return a.kind == b.kind && a.order == b.order;
  }
};

struct Instance {
  std::vector<Job> jobs;
  SpeedProfile profile;
  Variant variant;
  std::optional<Ordering> ordering;  // optional fixed ordering carried with the data

  int n() const { return static_cast<int>(jobs.size()); }

  bool unit_size() const {
    return std::all_of(jobs.begin(), jobs.end(), [](const Job& j) { return j.volume == 1; });
  }
  bool unit_weight() const {
    return std::all_of(jobs.begin(), jobs.end(), [](const Job& j) { return j.weight == 1; });
  }
};

// A job template with a multiplicity. Generated hardness instances carry job
// counts far beyond what is ever scheduled, so groups are only expanded on
// demand and under an explicit size cap.
struct JobGroup {
  Job job;
  Int count;
};

struct CompactInstance {
  std::vector<JobGroup> groups;
  SpeedProfile profile;
  Variant variant;
  std::optional<Ordering> ordering;
  std::map<std::string, std::string> provenance;

  Int total_jobs() const {
    Int total = 0;
    for (const auto& g : groups) total += g.count;
    return total;
  }

  Instance expand(long max_jobs = 100000) const {
    if (total_jobs() > max_jobs)
      throw input_error("instance too large to expand: " + to_string(total_jobs()) + " jobs");
    Instance inst;
    inst.profile = profile;
    inst.variant = variant;
    inst.ordering = ordering;
    for (const auto& g : groups) {
      if (g.count < 0) throw input_error("negative job count");
      for (Int i = 0; i < g.count; ++i) inst.jobs.push_back(g.job);
    }
    return inst;
  }

  static CompactInstance from_instance(const Instance& inst) {
    CompactInstance c;
    c.profile = inst.profile;
    c.variant = inst.variant;
    c.ordering = inst.ordering;
    for (const Job& j : inst.jobs) c.groups.push_back(JobGroup{j, 1});
    return c;
  }
};

enum class ValidationCode {
  empty_profile,
  length_mismatch,
  non_monotone_speeds,
  superfluous_speed,
  non_positive_volume,
  non_positive_weight,
};

struct ValidationIssue {
  ValidationCode code;
  int index;  // 1-based level or job index, 0 when not applicable
  std::string detail;
};

struct ValidationResult {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
};

// A profile is valid when speeds and powers are strictly increasing and
// positive, and the delta table is strictly increasing. The latter makes the
// pure-speed energy points convex in processing time, so a non-monotone table
// marks a level no optimal schedule would ever use; such profiles are
// rejected outright rather than silently pruned.
inline ValidationResult validate_profile(const SpeedProfile& profile) {
  ValidationResult result;
  const auto& s = profile.speeds();
  const auto& p = profile.powers();
  if (s.empty() || p.empty()) {
    result.issues.push_back({ValidationCode::empty_profile, 0, "profile must have at least one level"});
    return result;
  }
  if (s.size() != p.size()) {
    result.issues.push_back({ValidationCode::length_mismatch, 0, "speeds and powers differ in length"});
    return result;
  }
  const int k = profile.k();
  for (int i = 1; i <= k; ++i) {
    if (profile.speed(i) <= 0 || profile.power(i) <= 0)
      result.issues.push_back({ValidationCode::non_monotone_speeds, i, "levels must be positive"});
    if (i > 1 && profile.speed(i) <= profile.speed(i - 1))
      result.issues.push_back({ValidationCode::non_monotone_speeds, i, "speeds must strictly increase"});
    if (i > 1 && profile.power(i) <= profile.power(i - 1))
      result.issues.push_back({ValidationCode::non_monotone_speeds, i, "powers must strictly increase"});
  }
  if (!result.ok()) return result;
  for (int i = 1; i + 1 < k; ++i) {
    if (profile.delta(i) >= profile.delta(i + 1))
      result.issues.push_back({ValidationCode::superfluous_speed, i + 1,
                               "delta table not strictly increasing at level " + std::to_string(i + 1)});
  }
  return result;
}

struct InstanceValidation {
  ValidationResult result;
  Instance normalized;
  Rat shift;  // added to every release during normalization
};

// Validates profile and jobs, then shifts releases so the earliest is 0.
// Normalization is idempotent.
inline InstanceValidation validate_instance(const Instance& instance) {
  InstanceValidation v;
  v.result = validate_profile(instance.profile);
  v.normalized = instance;
  v.shift = 0;
  for (int j = 0; j < instance.n(); ++j) {
    if (instance.jobs[static_cast<std::size_t>(j)].volume <= 0)
      v.result.issues.push_back({ValidationCode::non_positive_volume, j + 1, "job volume must be positive"});
    if (instance.jobs[static_cast<std::size_t>(j)].weight <= 0)
      v.result.issues.push_back({ValidationCode::non_positive_weight, j + 1, "job weight must be positive"});
  }
  if (!v.result.ok() || instance.n() == 0) return v;
  Rat min_release = instance.jobs[0].release;
  for (const Job& job : instance.jobs) min_release = std::min(min_release, job.release);
  v.shift = -min_release;
  for (Job& job : v.normalized.jobs) job.release += v.shift;
  return v;
}

// A completion ordering must be a permutation of all job indices.
inline void require_completion_ordering(const Instance& instance, const Ordering& ordering) {
  if (instance.n() == 0) throw input_error("instance has no jobs");
  if (ordering.kind != OrderingKind::completion)
    throw input_error("a completion ordering is required");
  if (ordering.size() != instance.n()) throw input_error("ordering size mismatch");
  std::vector<bool> seen(static_cast<std::size_t>(instance.n()), false);
  for (int j : ordering.order) {
    if (j < 0 || j >= instance.n() || seen[static_cast<std::size_t>(j)])
      throw input_error("ordering is not a permutation of the job indices");
    seen[static_cast<std::size_t>(j)] = true;
  }
}

// Completion ordering of all jobs sorted by (release, index). Requires a
// unit-size, unit-weight instance; that is the regime where first-in-first-out
// dispatch is known to be safe to fix upfront.
inline Ordering fifo_ordering(const Instance& instance) {
  if (!instance.unit_size() || !instance.unit_weight())
    throw input_error("fifo_ordering requires a unit-size unit-weight instance");
  Ordering ordering;
  ordering.kind = OrderingKind::completion;
  ordering.order.resize(static_cast<std::size_t>(instance.n()));
  for (int j = 0; j < instance.n(); ++j) ordering.order[static_cast<std::size_t>(j)] = j;
  std::stable_sort(ordering.order.begin(), ordering.order.end(), [&](int a, int b) {
    return instance.jobs[static_cast<std::size_t>(a)].release <
           instance.jobs[static_cast<std::size_t>(b)].release;
  });
  return ordering;
}

}  // namespace speedscale
