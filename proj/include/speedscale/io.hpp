#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "speedscale/core.hpp"
#include "speedscale/metrics.hpp"
#include "speedscale/schedule.hpp"

namespace speedscale {

// Insertion-ordered documents keep serialization byte-stable: the writer
// fixes the key order, so write -> read -> write is the identity on bytes.
using Json = nlohmann::ordered_json;

namespace detail {

inline Error parse_error(const std::string& where, const std::string& what) {
  return input_error(where + ": " + what);
}

inline Rat json_rat(const Json& v, const std::string& where) {
  if (v.is_string()) {
    try {
      return parse_rat(v.get<std::string>());
    } catch (const Error& e) {
      throw parse_error(where, e.what());
    }
  }
  if (v.is_number_integer()) return Rat(static_cast<long>(v.get<std::int64_t>()));
  throw parse_error(where, "expected an exact rational string, got " + v.dump());
}

inline Int json_count(const Json& v, const std::string& where) {
  std::string text;
  if (v.is_string())
    text = v.get<std::string>();
  else if (v.is_number_integer())
    text = std::to_string(v.get<std::int64_t>());
  else
    throw parse_error(where, "expected an integer count, got " + v.dump());
  try {
    Int c(text);
    if (c <= 0) throw parse_error(where, "count must be positive");
    return c;
  } catch (const std::invalid_argument&) {
    throw parse_error(where, "malformed integer '" + text + "'");
  }
}

inline const Json& json_field(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw parse_error(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw parse_error(where, std::string("missing field '") + key + "'");
  return *it;
}

inline std::vector<Rat> json_rat_array(const Json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw parse_error(where, "expected a nonempty array");
  std::vector<Rat> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(json_rat(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace detail

inline Json ordering_to_json(const Ordering& ordering) {
  Json j;
  j["kind"] = ordering.kind == OrderingKind::completion ? "completion" : "priority";
  Json order = Json::array();
  for (int job : ordering.order) order.push_back(job + 1);  // 1-based on disk
  j["order"] = std::move(order);
  return j;
}

inline Ordering ordering_from_json(const Json& v, const std::string& where = "ordering") {
  Ordering out;
  const Json* order = &v;
  if (v.is_object()) {
    const Json& kind = detail::json_field(v, "kind", where);
    if (kind == "completion")
      out.kind = OrderingKind::completion;
    else if (kind == "priority")
      out.kind = OrderingKind::priority;
    else
      throw detail::parse_error(where + ".kind", "expected \"completion\" or \"priority\"");
    order = &detail::json_field(v, "order", where);
  }
  // A bare array is shorthand for a completion ordering.
  if (!order->is_array()) throw detail::parse_error(where + ".order", "expected an array");
  for (std::size_t i = 0; i < order->size(); ++i) {
    const Json& e = (*order)[i];
    if (!e.is_number_integer())
      throw detail::parse_error(where + ".order", "expected 1-based job indices");
    out.order.push_back(static_cast<int>(e.get<std::int64_t>()) - 1);
  }
  return out;
}

inline Json instance_to_json(const CompactInstance& compact) {
  Json j;
  Json jobs = Json::array();
  for (const JobGroup& g : compact.groups) {
    Json job;
    job["r"] = to_string(g.job.release);
    job["v"] = to_string(g.job.volume);
    job["w"] = to_string(g.job.weight);
    if (g.count != 1) job["count"] = g.count.get_str();
    jobs.push_back(std::move(job));
  }
  j["jobs"] = std::move(jobs);
  Json speeds = Json::array(), powers = Json::array();
  for (const Rat& s : compact.profile.speeds()) speeds.push_back(to_string(s));
  for (const Rat& p : compact.profile.powers()) powers.push_back(to_string(p));
  j["speeds"] = std::move(speeds);
  j["powers"] = std::move(powers);
  if (compact.variant.is_budget())
    j["variant"] = Json{{"budget", to_string(compact.variant.budget)}};
  else
    j["variant"] = "fe";
  if (compact.ordering) j["ordering"] = ordering_to_json(*compact.ordering);
  if (!compact.provenance.empty()) {
    Json prov;
    for (const auto& [key, value] : compact.provenance) prov[key] = value;
    j["provenance"] = std::move(prov);
  }
  return j;
}

inline Json instance_to_json(const Instance& instance) {
  CompactInstance compact;
  for (const Job& job : instance.jobs) compact.groups.push_back(JobGroup{job, Int(1)});
  compact.profile = instance.profile;
  compact.variant = instance.variant;
  return instance_to_json(compact);
}

inline CompactInstance instance_from_json(const Json& j, const std::string& where = "instance") {
  CompactInstance out;
  const Json& jobs = detail::json_field(j, "jobs", where);
  if (!jobs.is_array()) throw detail::parse_error(where + ".jobs", "expected an array");
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    std::string at = where + ".jobs[" + std::to_string(i) + "]";
    const Json& job = jobs[i];
    JobGroup g;
    g.job.release = detail::json_rat(detail::json_field(job, "r", at), at + ".r");
    g.job.volume = detail::json_rat(detail::json_field(job, "v", at), at + ".v");
    g.job.weight = detail::json_rat(detail::json_field(job, "w", at), at + ".w");
    g.count = job.contains("count") ? detail::json_count(job["count"], at + ".count") : Int(1);
    out.groups.push_back(std::move(g));
  }
  std::vector<Rat> speeds =
      detail::json_rat_array(detail::json_field(j, "speeds", where), where + ".speeds");
  std::vector<Rat> powers =
      detail::json_rat_array(detail::json_field(j, "powers", where), where + ".powers");
  out.profile = SpeedProfile(std::move(speeds), std::move(powers));
  const Json& variant = detail::json_field(j, "variant", where);
  if (variant.is_string() && variant == "fe")
    out.variant = Variant::flow_energy();
  else if (variant.is_object() && variant.contains("budget"))
    out.variant =
        Variant::with_budget(detail::json_rat(variant["budget"], where + ".variant.budget"));
  else
    throw detail::parse_error(where + ".variant", "expected \"fe\" or {\"budget\": \"p/q\"}");
  if (j.contains("ordering")) out.ordering = ordering_from_json(j["ordering"], where + ".ordering");
  if (j.contains("provenance")) {
    const Json& prov = j["provenance"];
    if (!prov.is_object()) throw detail::parse_error(where + ".provenance", "expected an object");
    for (const auto& [key, value] : prov.items()) {
      if (!value.is_string())
        throw detail::parse_error(where + ".provenance." + key, "expected a string");
      out.provenance[key] = value.get<std::string>();
    }
  }
  return out;
}

// Metrics are recomputed on write so emitted files are self-describing; the
// reader ignores them (the schedule is fully determined by its segments).
inline Json schedule_to_json(const Schedule& schedule, const Instance* instance = nullptr,
                             const Ordering* ordering = nullptr) {
  Json j;
  Json segments = Json::array();
  for (const Segment& seg : schedule.segments) {
    Json s;
    s["start"] = to_string(seg.start);
    s["end"] = to_string(seg.end);
    if (seg.is_idle()) {
      s["idle"] = true;
    } else {
      s["job"] = seg.job + 1;  // 1-based on disk
      s["level"] = seg.level;
    }
    segments.push_back(std::move(s));
  }
  j["segments"] = std::move(segments);
  if (instance) {
    ScheduleMetrics m = evaluate(schedule, *instance, ordering);
    Json metrics;
    Json completion = Json::array();
    for (const Rat& c : m.completion) completion.push_back(to_string(c));
    metrics["completion"] = std::move(completion);
    metrics["flow"] = to_string(m.flow);
    metrics["energy"] = to_string(m.energy);
    metrics["objective"] = to_string(m.objective);
    if (m.extended_completion) {
      Json chat = Json::array();
      for (const Rat& c : *m.extended_completion) chat.push_back(to_string(c));
      metrics["extended_completion"] = std::move(chat);
      metrics["extended_flow"] = to_string(*m.extended_flow);
      metrics["extended_objective"] = to_string(*m.extended_objective);
    }
    j["metrics"] = std::move(metrics);
  }
  return j;
}

inline Schedule schedule_from_json(const Json& j, const std::string& where = "schedule") {
  // Solver output wraps its schedule; accept it directly so results pipe back in.
  if (j.is_object() && !j.contains("segments") && j.contains("schedule"))
    return schedule_from_json(j["schedule"], where + ".schedule");
  Schedule out;
  const Json& segments = detail::json_field(j, "segments", where);
  if (!segments.is_array()) throw detail::parse_error(where + ".segments", "expected an array");
  for (std::size_t i = 0; i < segments.size(); ++i) {
    std::string at = where + ".segments[" + std::to_string(i) + "]";
    const Json& s = segments[i];
    Rat start = detail::json_rat(detail::json_field(s, "start", at), at + ".start");
    Rat end = detail::json_rat(detail::json_field(s, "end", at), at + ".end");
    if (s.contains("idle") && s["idle"] == true) {
      out.segments.push_back(Segment::idle(std::move(start), std::move(end)));
      continue;
    }
    const Json& job = detail::json_field(s, "job", at);
    const Json& level = detail::json_field(s, "level", at);
    if (!job.is_number_integer() || !level.is_number_integer())
      throw detail::parse_error(at, "job and level must be integers");
    out.segments.push_back(Segment::work(std::move(start), std::move(end),
                                         static_cast<int>(job.get<std::int64_t>()) - 1,
                                         static_cast<int>(level.get<std::int64_t>())));
  }
  return out;
}

inline std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open '" + path + "' for reading");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw input_error(path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw input_error("failed writing '" + path + "'");
}

inline CompactInstance read_instance(const std::string& path) {
  return instance_from_json(read_json_file(path), path);
}

template <typename InstanceLike>
inline void write_instance(const InstanceLike& instance, const std::string& path) {
  write_text_file(path, dump_json(instance_to_json(instance)));
}

inline Schedule read_schedule(const std::string& path) {
  return schedule_from_json(read_json_file(path), path);
}

inline void write_schedule(const Schedule& schedule, const std::string& path,
                           const Instance* instance = nullptr,
                           const Ordering* ordering = nullptr) {
  write_text_file(path, dump_json(schedule_to_json(schedule, instance, ordering)));
}

}  // namespace speedscale
