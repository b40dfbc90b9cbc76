#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "speedscale/core.hpp"
#include "speedscale/io.hpp"
#include "speedscale/metrics.hpp"
#include "speedscale/schedule.hpp"

namespace speedscale {

namespace detail {

// Coordinates are rounded half-up to exactly two decimals from rationals, so
// the emitted SVG is byte-identical across runs and platforms.
inline std::string svg_coord(const Rat& value) {
  Int cents = rat_floor(value * 100 + rat(1, 2));
  bool negative = cents < 0;
  Int a = abs(cents);
  Int whole = a / 100;
  long frac = Int(a % 100).get_si();
  std::string out = negative ? "-" : "";
  out += whole.get_str();
  out += '.';
  out += static_cast<char>('0' + frac / 10);
  out += static_cast<char>('0' + frac % 10);
  return out;
}

inline const char* level_color(int level) {
  static const char* palette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
                                  "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};
  return palette[(level - 1) % 10];
}

}  // namespace detail

// One lane per job, work segments shaded by speed level, a triangle at each
// release and a diamond at each completion. Idle time stays unshaded.
inline std::string gantt_svg(const Schedule& schedule, const Instance& instance) {
  const int n = instance.n();
  const int k = instance.profile.k();
  ScheduleMetrics metrics = evaluate(schedule, instance);

  Rat horizon = 0;
  for (const Segment& seg : schedule.segments) horizon = std::max(horizon, seg.end);
  for (const Job& job : instance.jobs) horizon = std::max(horizon, job.release);
  if (horizon <= 0) horizon = 1;

  const Rat left = 70, top = 46, plot_w = 720, row_h = 28, bottom = 34, right = 24;
  const Rat width = left + plot_w + right;
  const Rat height = top + row_h * n + bottom;
  auto x_of = [&](const Rat& t) { return detail::svg_coord(left + t / horizon * plot_w); };

  std::string svg;
  auto put = [&](const std::string& s) { svg += s; };
  put("<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
      detail::svg_coord(width) + "\" height=\"" + detail::svg_coord(height) +
      "\" font-family=\"monospace\" font-size=\"11\">\n");
  put("<rect x=\"0\" y=\"0\" width=\"" + detail::svg_coord(width) + "\" height=\"" +
      detail::svg_coord(height) + "\" fill=\"#ffffff\"/>\n");

  // Legend: one swatch per speed level.
  {
    Rat lx = left;
    for (int i = 1; i <= k; ++i) {
      put("<rect x=\"" + detail::svg_coord(lx) + "\" y=\"12\" width=\"12\" height=\"12\" fill=\"" +
          detail::level_color(i) + "\" stroke=\"#333333\" stroke-width=\"0.5\"/>\n");
      put("<text x=\"" + detail::svg_coord(lx + 16) + "\" y=\"22\">s=" +
          to_string(instance.profile.speed(i)) + "</text>\n");
      lx += 90;
    }
  }

  // Lanes.
  for (int j = 0; j < n; ++j) {
    Rat lane_top = top + row_h * j;
    put("<line x1=\"" + detail::svg_coord(left) + "\" y1=\"" + detail::svg_coord(lane_top + row_h) +
        "\" x2=\"" + detail::svg_coord(left + plot_w) + "\" y2=\"" +
        detail::svg_coord(lane_top + row_h) + "\" stroke=\"#dddddd\"/>\n");
    put("<text x=\"10\" y=\"" + detail::svg_coord(lane_top + row_h / 2 + 4) + "\">J" +
        std::to_string(j + 1) + "</text>\n");
  }

  // Work segments (idle segments render as background).
  for (const Segment& seg : schedule.segments) {
    if (seg.is_idle()) continue;
    Rat lane_top = top + row_h * seg.job;
    put("<rect x=\"" + x_of(seg.start) + "\" y=\"" + detail::svg_coord(lane_top + 5) +
        "\" width=\"" + detail::svg_coord((seg.end - seg.start) / horizon * plot_w) +
        "\" height=\"18\" fill=\"" + detail::level_color(seg.level) +
        "\" stroke=\"#333333\" stroke-width=\"0.5\"><title>J" + std::to_string(seg.job + 1) +
        " [" + to_string(seg.start) + ", " + to_string(seg.end) + ") level " +
        std::to_string(seg.level) + "</title></rect>\n");
  }

  // Release triangles (down, above the bar) and completion diamonds.
  for (int j = 0; j < n; ++j) {
    auto ji = static_cast<std::size_t>(j);
    Rat lane_top = top + row_h * j;
    std::string rx = x_of(instance.jobs[ji].release);
    put("<path d=\"M " + rx + " " + detail::svg_coord(lane_top + 5) + " l -4 -5 l 8 0 Z\" "
        "fill=\"#000000\"><title>r = " + to_string(instance.jobs[ji].release) +
        "</title></path>\n");
    std::string cx = x_of(metrics.completion[ji]);
    Rat cy = lane_top + row_h / 2;
    put("<path d=\"M " + cx + " " + detail::svg_coord(cy - 5) + " l 4 5 l -4 5 l -4 -5 Z\" "
        "fill=\"#000000\"><title>C = " + to_string(metrics.completion[ji]) +
        "</title></path>\n");
  }

  // Time axis with integer ticks.
  {
    Rat axis_y = top + row_h * n + 6;
    put("<line x1=\"" + detail::svg_coord(left) + "\" y1=\"" + detail::svg_coord(axis_y) +
        "\" x2=\"" + detail::svg_coord(left + plot_w) + "\" y2=\"" + detail::svg_coord(axis_y) +
        "\" stroke=\"#333333\"/>\n");
    Int step = std::max(Int(1), rat_ceil(horizon / 12));
    for (Int t = 0; Rat(t) <= horizon; t += step) {
      std::string tx = x_of(Rat(t));
      put("<line x1=\"" + tx + "\" y1=\"" + detail::svg_coord(axis_y) + "\" x2=\"" + tx +
          "\" y2=\"" + detail::svg_coord(axis_y + 4) + "\" stroke=\"#333333\"/>\n");
      put("<text x=\"" + tx + "\" y=\"" + detail::svg_coord(axis_y + 16) +
          "\" text-anchor=\"middle\">" + t.get_str() + "</text>\n");
    }
  }

  put("</svg>\n");
  return svg;
}

inline void emit_gantt(const Schedule& schedule, const Instance& instance,
                       const std::string& path) {
  write_text_file(path, gantt_svg(schedule, instance));
}

}  // namespace speedscale
