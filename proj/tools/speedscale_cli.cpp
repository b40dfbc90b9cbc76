#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "speedscale/gantt.hpp"
#include "speedscale/greedy.hpp"
#include "speedscale/io.hpp"
#include "speedscale/lp.hpp"
#include "speedscale/oracle.hpp"
#include "speedscale/reductions.hpp"

using namespace speedscale;

namespace {

// Machine-readable result on stdout, human summary on stderr.
void emit(const Json& result, const std::string& summary) {
  std::cout << dump_json(result);
  std::cerr << summary << "\n";
}

Instance load_instance(const std::string& path, long expand_cap) {
  return read_instance(path).expand(expand_cap);
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> parts;
  std::string::size_type pos = 0;
  while (true) {
    auto comma = text.find(',', pos);
    parts.push_back(text.substr(pos, comma == std::string::npos ? comma : comma - pos));
    if (comma == std::string::npos) return parts;
    pos = comma + 1;
  }
}

// "fifo", or a comma-separated permutation of 1..n in completion order.
Ordering ordering_from_flag(const std::string& flag, const Instance& instance,
                            const CompactInstance& compact) {
  if (flag.empty()) {
    if (compact.ordering && compact.ordering->kind == OrderingKind::completion)
      return *compact.ordering;
    if (compact.ordering)
      std::cerr << "note: embedded priority ordering ignored, using fifo\n";
    return fifo_ordering(instance);
  }
  if (flag == "fifo") return fifo_ordering(instance);
  Ordering out;
  out.kind = OrderingKind::completion;
  for (const std::string& part : split_commas(flag)) {
    try {
      out.order.push_back(std::stoi(part) - 1);
    } catch (const std::exception&) {
      throw input_error("--ordering: malformed position '" + part + "'");
    }
  }
  require_completion_ordering(instance, out);
  return out;
}

std::vector<Int> parse_elements(const std::string& text) {
  std::vector<Int> out;
  for (const std::string& part : split_commas(text)) {
    try {
      out.emplace_back(part);
    } catch (const std::invalid_argument&) {
      throw input_error("--elements: malformed integer '" + part + "'");
    }
  }
  return out;
}

int run_solve_lp(const std::string& path, const std::string& ordering_flag,
                 const std::string& export_path, long expand_cap) {
  CompactInstance compact = read_instance(path);
  Instance instance = compact.expand(expand_cap);
  Ordering ordering = ordering_from_flag(ordering_flag, instance, compact);
  LpModel model = instance.variant.is_budget() ? build_budget_lp(instance, ordering)
                                               : build_fe_lp(instance, ordering);
  if (!export_path.empty()) write_text_file(export_path, export_lp_text(model));
  LpSolution solution = solve(model);
  if (solution.status == LpStatus::infeasible)
    throw infeasible_error("budget too small for this ordering");
  Schedule schedule = reconstruct(solution, instance, ordering);

  Json result;
  result["ordering"] = ordering_to_json(ordering);
  result["objective"] = to_string(solution.objective);
  result["flow_objective"] = to_string(solution.flow_objective);
  Json chat = Json::array();
  for (const Rat& c : solution.chat) chat.push_back(to_string(c));
  result["extended_completion"] = std::move(chat);
  result["schedule"] = schedule_to_json(schedule, &instance, &ordering);
  emit(result, "lp optimum for this ordering: objective " + to_string(solution.objective) +
                   " (flow form " + to_string(solution.flow_objective) + ")");
  return 0;
}

int run_solve_greedy(const std::string& path, const std::string& variant,
                     const std::string& ordering_flag, bool trace, long expand_cap) {
  CompactInstance compact = read_instance(path);
  Instance instance = compact.expand(expand_cap);
  GreedyResult g;
  if (variant == "kd")
    g = kappa_delta(instance);
  else if (variant == "naive2")
    g = naive_two_speed_sweep(instance);
  else if (variant == "naiveK")
    g = naive_per_level_sweep(instance);
  else if (variant == "kd-c")
    g = kappa_delta_c(instance, ordering_from_flag(ordering_flag, instance, compact));
  else
    throw input_error("--variant: expected kd, naive2, naiveK, or kd-c");
  ScheduleMetrics metrics = evaluate(g.schedule, instance);

  Json result;
  result["variant"] = variant;
  result["objective"] = to_string(metrics.objective);
  result["steps"] = g.trace.steps.size();
  result["schedule"] = schedule_to_json(g.schedule, &instance, &g.trace.ordering);
  if (trace) std::cerr << format_trace(g.trace);
  emit(result, variant + ": objective " + to_string(metrics.objective) + " after " +
                   std::to_string(g.trace.steps.size()) + " steps");
  return 0;
}

int run_oracle(const std::string& path, int max_n, long expand_cap) {
  Instance instance = load_instance(path, expand_cap);
  OracleResult best = exact_optimum(instance, max_n);

  Json result;
  result["ordering"] = ordering_to_json(best.ordering);
  result["objective"] = to_string(best.objective);
  result["orderings_tried"] = best.orderings_tried;
  result["lps_solved"] = best.lps_solved;
  result["schedule"] = schedule_to_json(best.schedule, &instance, &best.ordering);
  emit(result, "oracle optimum: objective " + to_string(best.objective) + " (" +
                   std::to_string(best.lps_solved) + " of " +
                   std::to_string(best.orderings_tried) + " orderings solved)");
  return 0;
}

int run_reduce(const std::string& kind, const std::string& path, const std::string& elements_flag,
               const std::string& target_flag, const std::string& alpha_flag, long expand_cap) {
  CompactInstance out;
  if (kind == "budget-to-fe") {
    if (path.empty()) throw input_error("budget-to-fe needs an instance file");
    out = budget_to_fe(load_instance(path, expand_cap));
  } else if (kind == "ss-to-feidwu" || kind == "ss-to-bidua") {
    if (elements_flag.empty() || target_flag.empty())
      throw input_error(kind + " needs --elements and --target");
    std::vector<Int> elements = parse_elements(elements_flag);
    Int target;
    try {
      target = Int(target_flag);
    } catch (const std::invalid_argument&) {
      throw input_error("--target: malformed integer '" + target_flag + "'");
    }
    out = kind == "ss-to-feidwu" ? subsetsum_to_feidwu(elements, target)
                                 : subsetsum_to_bidua(elements, target);
  } else if (kind == "counterexample") {
    Instance instance = counterexample_instance(parse_rat(alpha_flag));
    for (const Job& job : instance.jobs) out.groups.push_back(JobGroup{job, Int(1)});
    out.profile = instance.profile;
    out.variant = instance.variant;
    out.provenance["reduction"] = "counterexample";
    out.provenance["alpha"] = alpha_flag;
  } else {
    throw input_error("reduce: expected budget-to-fe, ss-to-feidwu, ss-to-bidua, "
                      "or counterexample");
  }
  emit(instance_to_json(out), "generated " + kind + " instance with " +
                                  out.total_jobs().get_str() + " jobs in " +
                                  std::to_string(out.groups.size()) + " groups");
  return 0;
}

int run_verify(const std::string& instance_path, const std::string& schedule_path,
               long expand_cap) {
  CompactInstance compact = read_instance(instance_path);
  Instance instance = compact.expand(expand_cap);
  Schedule schedule = read_schedule(schedule_path);
  const Ordering* ordering = nullptr;
  if (compact.ordering && compact.ordering->kind == OrderingKind::completion)
    ordering = &*compact.ordering;
  ScheduleMetrics metrics = evaluate(schedule, instance, ordering);
  if (instance.variant.is_budget() && metrics.energy > instance.variant.budget)
    throw infeasible_error("energy " + to_string(metrics.energy) + " exceeds budget " +
                           to_string(instance.variant.budget));

  Json result;
  result["valid"] = true;
  result["schedule"] = schedule_to_json(schedule, &instance, ordering);
  emit(result, "schedule verifies: objective " + to_string(metrics.objective));
  return 0;
}

int run_gantt(const std::string& instance_path, const std::string& schedule_path,
              const std::string& out_path, long expand_cap) {
  Instance instance = load_instance(instance_path, expand_cap);
  Schedule schedule = read_schedule(schedule_path);
  emit_gantt(schedule, instance, out_path);
  Json result;
  result["written"] = out_path;
  emit(result, "wrote " + out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact toolkit for single-machine speed-scaling schedules"};
  app.require_subcommand(1);
  long expand_cap = 100000;
  app.add_option("--expand-cap", expand_cap,
                 "refuse to expand job groups beyond this many jobs");

  auto* solve_lp = app.add_subcommand(
      "solve-lp", "solve the completion-ordered relaxation exactly and rebuild a schedule");
  std::string lp_instance, lp_ordering, lp_export;
  solve_lp->add_option("instance", lp_instance, "instance JSON file")->required();
  solve_lp->add_option("--ordering", lp_ordering,
                       "fifo or comma-separated 1-based job indices in completion order");
  solve_lp->add_option("--export-lp", lp_export, "also write the model in LP text format");

  auto* solve_greedy =
      app.add_subcommand("solve-greedy", "run a greedy speed-up construction");
  std::string greedy_instance, greedy_variant = "kd", greedy_ordering;
  bool greedy_trace = false;
  solve_greedy->add_option("instance", greedy_instance, "instance JSON file")->required();
  solve_greedy->add_option("--variant", greedy_variant, "kd, naive2, naiveK, or kd-c");
  solve_greedy->add_option("--ordering", greedy_ordering, "completion ordering for kd-c");
  solve_greedy->add_flag("--trace", greedy_trace, "print the construction trace to stderr");

  auto* oracle = app.add_subcommand("oracle", "exact optimum by ordering enumeration");
  std::string oracle_instance;
  int max_n = 8;
  if (const char* env = std::getenv("SPEEDSCALE_MAX_N")) max_n = std::atoi(env);
  oracle->add_option("instance", oracle_instance, "instance JSON file")->required();
  oracle->add_option("--max-n", max_n, "largest job count the oracle will enumerate");

  auto* reduce = app.add_subcommand("reduce", "generate a hardness or counterexample instance");
  std::string reduce_kind, reduce_instance, reduce_elements, reduce_target, reduce_alpha = "0";
  reduce->add_option("kind", reduce_kind,
                     "budget-to-fe, ss-to-feidwu, ss-to-bidua, or counterexample")
      ->required();
  reduce->add_option("instance", reduce_instance, "source instance (budget-to-fe)");
  reduce->add_option("--elements", reduce_elements, "comma-separated SubsetSum elements");
  reduce->add_option("--target", reduce_target, "SubsetSum target");
  reduce->add_option("--alpha", reduce_alpha, "counterexample parameter in [0,1)");

  auto* verify = app.add_subcommand("verify", "check a schedule against its instance");
  std::string verify_instance, verify_schedule;
  verify->add_option("instance", verify_instance, "instance JSON file")->required();
  verify->add_option("schedule", verify_schedule, "schedule JSON file")->required();

  auto* gantt = app.add_subcommand("gantt", "render a schedule as SVG");
  std::string gantt_instance, gantt_schedule, gantt_out;
  gantt->add_option("instance", gantt_instance, "instance JSON file")->required();
  gantt->add_option("schedule", gantt_schedule, "schedule JSON file")->required();
  gantt->add_option("-o,--out", gantt_out, "output SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (solve_lp->parsed()) return run_solve_lp(lp_instance, lp_ordering, lp_export, expand_cap);
    if (solve_greedy->parsed())
      return run_solve_greedy(greedy_instance, greedy_variant, greedy_ordering, greedy_trace,
                              expand_cap);
    if (oracle->parsed()) return run_oracle(oracle_instance, max_n, expand_cap);
    if (reduce->parsed())
      return run_reduce(reduce_kind, reduce_instance, reduce_elements, reduce_target, reduce_alpha,
                        expand_cap);
    if (verify->parsed()) return run_verify(verify_instance, verify_schedule, expand_cap);
    if (gantt->parsed()) return run_gantt(gantt_instance, gantt_schedule, gantt_out, expand_cap);
  } catch (const Error& e) {
    Json err;
    err["error"] = Json{{"kind", e.kind() == ErrorKind::input      ? "input"
                                 : e.kind() == ErrorKind::infeasible ? "infeasible"
                                                                     : "internal"},
                        {"message", e.what()}};
    std::cout << dump_json(err);
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::input: return 2;
      case ErrorKind::infeasible: return 3;
      case ErrorKind::internal: return 4;
    }
  }
  return 0;
}
