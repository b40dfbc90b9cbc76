#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "speedscale/core.hpp"
#include "speedscale/schedule.hpp"

namespace speedscale {

// Per-job convex weights over speed levels; lambda[j][i-1] is the share of
// job j's processing time spent at level i.
struct Allocation {
  std::vector<std::vector<Rat>> lambda;
};

// Realizes a target processing time x in [v/s_k, v/s_1] with minimal energy:
// support on the unique adjacent pair of levels bracketing v/x (a single
// level when x lands exactly on a pure-speed point).
inline std::vector<Rat> realize_two_speed(const Rat& volume, const Rat& target_x,
                                          const SpeedProfile& profile) {
  const int k = profile.k();
  if (volume <= 0) throw input_error("realize_two_speed: volume must be positive");
  if (target_x < volume / profile.speed(k) || target_x > volume / profile.speed(1))
    throw input_error("realize_two_speed: target time " + to_string(target_x) +
                      " outside [v/s_k, v/s_1]");
  std::vector<Rat> lambda(static_cast<std::size_t>(k), Rat(0));
  for (int i = 1; i <= k; ++i)
    if (target_x == volume / profile.speed(i)) {
      lambda[static_cast<std::size_t>(i - 1)] = 1;
      return lambda;
    }
  int i = 1;
  while (target_x <= volume / profile.speed(i + 1)) ++i;
  Rat x_lo = volume / profile.speed(i);      // slower level, longer time
  Rat x_hi = volume / profile.speed(i + 1);  // faster level, shorter time
  Rat share = (target_x - x_hi) / (x_lo - x_hi);
  lambda[static_cast<std::size_t>(i - 1)] = share;
  lambda[static_cast<std::size_t>(i)] = 1 - share;
  return lambda;
}

// Energy of processing `volume` under the given level shares.
inline Rat allocation_energy(const std::vector<Rat>& lambda, const Rat& volume,
                             const SpeedProfile& profile) {
  Rat energy = 0;
  for (int i = 1; i <= static_cast<int>(lambda.size()); ++i)
    energy += lambda[static_cast<std::size_t>(i - 1)] * volume * profile.power(i) / profile.speed(i);
  return energy;
}

// Non-idling preemptive dispatch: whenever the machine is free and jobs are
// available, run the released unfinished job earliest in the ordering. Each
// job receives exactly its requested processing time, realized on the
// canonical two adjacent levels with the faster level first (one speed switch
// per job in its own processing time).
inline Schedule dispatch_ordering(const Instance& instance, const Ordering& ordering,
                                  const std::vector<Rat>& processing_times) {
  const int n = instance.n();
  if (ordering.size() != n) throw input_error("dispatch_ordering: ordering size mismatch");
  if (static_cast<int>(processing_times.size()) != n)
    throw input_error("dispatch_ordering: processing time vector size mismatch");
  std::vector<std::vector<Rat>> lambda(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    lambda[static_cast<std::size_t>(j)] =
        realize_two_speed(instance.jobs[static_cast<std::size_t>(j)].volume,
                          processing_times[static_cast<std::size_t>(j)], instance.profile);

  std::vector<int> position = ordering.positions();
  std::vector<Rat> remaining = processing_times;
  std::vector<Rat> releases;
  for (const Job& job : instance.jobs) releases.push_back(job.release);
  std::sort(releases.begin(), releases.end());
  releases.erase(std::unique(releases.begin(), releases.end()), releases.end());

  std::vector<std::vector<std::pair<Rat, Rat>>> intervals(static_cast<std::size_t>(n));
  Rat t = n > 0 ? releases.front() : Rat(0);
  int finished = 0;
  while (finished < n) {
    int pick = -1;
    for (int j = 0; j < n; ++j) {
      auto ji = static_cast<std::size_t>(j);
      if (remaining[ji] > 0 && instance.jobs[ji].release <= t &&
          (pick < 0 || position[ji] < position[static_cast<std::size_t>(pick)]))
        pick = j;
    }
    auto next_release = std::upper_bound(releases.begin(), releases.end(), t);
    if (pick < 0) {
      t = *next_release;  // exists: some job is still unreleased
      continue;
    }
    auto pi = static_cast<std::size_t>(pick);
    Rat until = t + remaining[pi];
    if (next_release != releases.end() && *next_release < until) until = *next_release;
    auto& list = intervals[pi];
    if (!list.empty() && list.back().second == t)
      list.back().second = until;
    else
      list.emplace_back(t, until);
    remaining[pi] -= until - t;
    if (remaining[pi] == 0) ++finished;
    t = until;
  }

  // Split each job's machine time into level segments, faster level first.
  std::vector<Segment> segments;
  for (int j = 0; j < n; ++j) {
    auto ji = static_cast<std::size_t>(j);
    std::vector<std::pair<Rat, int>> chunks;  // (duration, level) in processing order
    for (int i = instance.profile.k(); i >= 1; --i) {
      const Rat& share = lambda[ji][static_cast<std::size_t>(i - 1)];
      if (share > 0)
        chunks.emplace_back(share * instance.jobs[ji].volume / instance.profile.speed(i), i);
    }
    std::size_t c = 0;
    Rat chunk_left = chunks.empty() ? Rat(0) : chunks[0].first;
    for (const auto& [begin, end] : intervals[ji]) {
      Rat cursor = begin;
      while (cursor < end) {
        Rat take = std::min(Rat(end - cursor), chunk_left);
        segments.push_back(Segment::work(cursor, cursor + take, j, chunks[c].second));
        cursor += take;
        chunk_left -= take;
        if (chunk_left == 0 && c + 1 < chunks.size()) chunk_left = chunks[++c].first;
      }
    }
  }
  std::sort(segments.begin(), segments.end(),
            [](const Segment& a, const Segment& b) { return a.start < b.start; });
  return Schedule{std::move(segments)};
}

struct SrptResult {
  Schedule schedule;
  Rat makespan;
  Rat idle;  // makespan minus total busy time
};

// Preemptive shortest-remaining-processing-time at one fixed speed level.
// Ties prefer the currently running job, then the lowest index.
inline SrptResult srpt_schedule(const Instance& instance, int level) {
  const int n = instance.n();
  if (level < 1 || level > instance.profile.k())
    throw input_error("srpt_schedule: speed level out of range");
  const Rat& s = instance.profile.speed(level);
  std::vector<Rat> remaining;
  std::vector<Rat> releases;
  for (const Job& job : instance.jobs) {
    remaining.push_back(job.volume);
    releases.push_back(job.release);
  }
  std::sort(releases.begin(), releases.end());
  releases.erase(std::unique(releases.begin(), releases.end()), releases.end());

  std::vector<Segment> segments;
  Rat t = 0;
  int finished = 0;
  int running = -1;
  Rat total_volume = 0;
  for (const Job& job : instance.jobs) total_volume += job.volume;
  while (finished < n) {
    int pick = -1;
    for (int j = 0; j < n; ++j) {
      auto ji = static_cast<std::size_t>(j);
      if (remaining[ji] <= 0 || instance.jobs[ji].release > t) continue;
      if (pick < 0) {
        pick = j;
        continue;
      }
      auto pi = static_cast<std::size_t>(pick);
      if (remaining[ji] < remaining[pi] || (remaining[ji] == remaining[pi] && j == running))
        pick = j;
    }
    auto next_release = std::upper_bound(releases.begin(), releases.end(), t);
    if (pick < 0) {
      t = *next_release;
      running = -1;
      continue;
    }
    auto pi = static_cast<std::size_t>(pick);
    Rat until = t + remaining[pi] / s;
    if (next_release != releases.end() && *next_release < until) until = *next_release;
    if (!segments.empty() && segments.back().job == pick && segments.back().end == t)
      segments.back().end = until;
    else
      segments.push_back(Segment::work(t, until, pick, level));
    remaining[pi] -= (until - t) * s;
    running = remaining[pi] > 0 ? pick : -1;
    if (remaining[pi] == 0) ++finished;
    t = until;
  }
  Rat makespan = segments.empty() ? Rat(0) : segments.back().end;
  return SrptResult{Schedule{std::move(segments)}, makespan, makespan - total_volume / s};
}

}  // namespace speedscale
