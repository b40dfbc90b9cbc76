#pragma once

#include <utility>
#include <vector>

#include "speedscale/core.hpp"

namespace speedscale {

// A half-open slice [start, end) of machine time. Work segments carry a job
// (0-based) and a speed level (1-based); idle segments carry neither.
struct Segment {
  Rat start;
  Rat end;
  int job = kIdle;    // kIdle for idle time
  int level = 0;      // 0 for idle time

  static constexpr int kIdle = -1;

  bool is_idle() const { return job == kIdle; }

  static Segment idle(Rat start, Rat end) { return Segment{std::move(start), std::move(end), kIdle, 0}; }
  static Segment work(Rat start, Rat end, int job, int level) {
    return Segment{std::move(start), std::move(end), job, level};
  }

  friend bool operator==(const Segment& a, const Segment& b) {
    return a.start == b.start && a.end == b.end && a.job == b.job && a.level == b.level;
  }
};

// Segments are kept sorted by start time and must not overlap. Gaps between
// segments are implicit idle time.
struct Schedule {
  std::vector<Segment> segments;

  friend bool operator==(const Schedule& a, const Schedule& b) { return a.segments == b.segments; }
};

}  // namespace speedscale
