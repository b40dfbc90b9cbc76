#include <sys/wait.h>

#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "speedscale/gantt.hpp"
#include "speedscale/greedy.hpp"
#include "speedscale/io.hpp"
#include "speedscale/oracle.hpp"
#include "speedscale/reductions.hpp"
#include "test_support.hpp"

using namespace speedscale;
using Catch::Matchers::ContainsSubstring;

namespace {

std::filesystem::path scratch_dir() {
  static const std::filesystem::path dir = [] {
    std::filesystem::path d = std::filesystem::temp_directory_path() / "speedscale_io_scratch";
    std::filesystem::remove_all(d);
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string write_scratch(const std::string& name, const std::string& text) {
  std::filesystem::path path = scratch_dir() / name;
  write_text_file(path.string(), text);
  return path.string();
}

struct CliRun {
  int exit = -1;
  std::string out;
  std::string err;
};

CliRun run_cli(const std::string& args) {
  std::filesystem::path out = scratch_dir() / "cli_stdout.txt";
  std::filesystem::path err = scratch_dir() / "cli_stderr.txt";
  std::string cmd =
      std::string(SPEEDSCALE_CLI_PATH) + " " + args + " > " + out.string() + " 2> " + err.string();
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return CliRun{WEXITSTATUS(status), slurp(out), slurp(err)};
}

CompactInstance demo_compact() {
  CompactInstance ci;
  ci.groups.push_back(JobGroup{Job{rat(0), rat(1), rat(1)}, Int(1)});
  ci.groups.push_back(JobGroup{Job{rat(1, 3), rat(7, 2), rat(2, 5)}, Int(3)});
  ci.profile = SpeedProfile({rat(1), rat(2)}, {rat(1), rat(4)});
  ci.variant = Variant::with_budget(rat(7, 2));
  Ordering ord;
  ord.kind = OrderingKind::priority;
  ord.order = {1, 0};
  ci.ordering = ord;
  ci.provenance["reduction"] = "demo";
  return ci;
}

}  // namespace

TEST_CASE("instances round-trip through json byte-identically") {
  CompactInstance ci = demo_compact();
  std::string text = dump_json(instance_to_json(ci));
  CompactInstance back = instance_from_json(Json::parse(text));
  CHECK(dump_json(instance_to_json(back)) == text);
  REQUIRE(back.groups.size() == 2);
  CHECK(back.groups[0].job == ci.groups[0].job);
  CHECK(back.groups[1].job == ci.groups[1].job);
  CHECK(back.groups[1].count == 3);
  CHECK(back.profile.speeds() == ci.profile.speeds());
  CHECK(back.profile.powers() == ci.profile.powers());
  CHECK(back.variant == ci.variant);
  REQUIRE(back.ordering.has_value());
  CHECK(back.ordering->kind == OrderingKind::priority);
  CHECK(back.ordering->order == std::vector<int>{1, 0});
  CHECK(back.provenance.at("reduction") == "demo");

  // The plain-instance overload writes singleton groups and omits counts.
  Instance ce = counterexample_instance(rat(0));
  std::string plain = dump_json(instance_to_json(ce));
  CHECK(plain.find("count") == std::string::npos);
  CompactInstance cback = instance_from_json(Json::parse(plain));
  CHECK(cback.total_jobs() == 3);
  CHECK(cback.expand().jobs[2] == ce.jobs[2]);
}

TEST_CASE("rationals parse exactly from strings and integers") {
  Json j = Json::parse(R"({"jobs": [{"r": "1/3", "v": 2, "w": "4/6"}],
                           "speeds": ["1", "2"], "powers": ["1", "4"],
                           "variant": "fe"})");
  CompactInstance ci = instance_from_json(j);
  CHECK(ci.groups[0].job.release == Rat(1) / 3);
  CHECK(ci.groups[0].job.volume == 2);
  CHECK(ci.groups[0].job.weight == Rat(2) / 3);

  Json f = Json::parse(R"({"jobs": [{"r": 0.5, "v": "1", "w": "1"}],
                           "speeds": ["1"], "powers": ["1"], "variant": "fe"})");
  CHECK_THROWS_WITH(instance_from_json(f), ContainsSubstring("exact rational string"));
}

TEST_CASE("parse errors carry field locations") {
  auto parse = [](const char* text) { return instance_from_json(Json::parse(text)); };
  CHECK_THROWS_WITH(parse(R"({"jobs": [{"r": "0", "v": "1", "w": "1"}, {"r": "0", "w": "1"}],
                              "speeds": ["1"], "powers": ["1"], "variant": "fe"})"),
                    ContainsSubstring("instance.jobs[1]: missing field 'v'"));
  CHECK_THROWS_WITH(parse(R"({"jobs": [{"r": "1.5", "v": "1", "w": "1"}],
                              "speeds": ["1"], "powers": ["1"], "variant": "fe"})"),
                    ContainsSubstring("instance.jobs[0].r"));
  CHECK_THROWS_WITH(parse(R"({"jobs": [{"r": "0", "v": "1", "w": "1"}],
                              "speeds": ["1", "x"], "powers": ["1", "4"], "variant": "fe"})"),
                    ContainsSubstring("instance.speeds[1]"));
  CHECK_THROWS_WITH(parse(R"({"jobs": [{"r": "0", "v": "1", "w": "1"}],
                              "speeds": ["1"], "powers": ["1"], "variant": "nope"})"),
                    ContainsSubstring("instance.variant"));
  CHECK_THROWS_WITH(parse(R"({"jobs": {}, "speeds": ["1"], "powers": ["1"], "variant": "fe"})"),
                    ContainsSubstring("instance.jobs: expected an array"));
  CHECK_THROWS_WITH(parse(R"({"jobs": [{"r": "0", "v": "1", "w": "1", "count": 0}],
                              "speeds": ["1"], "powers": ["1"], "variant": "fe"})"),
                    ContainsSubstring("count must be positive"));
  CHECK_THROWS_WITH(parse(R"({"jobs": [{"r": "0", "v": "1", "w": "1", "count": "abc"}],
                              "speeds": ["1"], "powers": ["1"], "variant": "fe"})"),
                    ContainsSubstring("malformed integer 'abc'"));
  CHECK_THROWS_WITH(parse(R"({"jobs": [{"r": "0", "v": "1", "w": "1", "count": 1.5}],
                              "speeds": ["1"], "powers": ["1"], "variant": "fe"})"),
                    ContainsSubstring("expected an integer count"));
  CHECK_THROWS_WITH(parse(R"([1, 2, 3])"), ContainsSubstring("instance: expected an object"));
  CHECK_THROWS_WITH(parse(R"({"jobs": [{"r": "0", "v": "1", "w": "1"}],
                              "speeds": ["1"], "powers": ["1"], "variant": "fe",
                              "provenance": {"alpha": 3}})"),
                    ContainsSubstring("instance.provenance.alpha"));
}

TEST_CASE("job groups keep counts as strings") {
  CompactInstance feid = subsetsum_to_feidwu({Int(2), Int(2)}, Int(3));
  std::string text = dump_json(instance_to_json(feid));
  CHECK(text.find("\"count\": \"202752\"") != std::string::npos);
  CompactInstance back = instance_from_json(Json::parse(text));
  CHECK(back.total_jobs() == feid.total_jobs());
  CHECK(back.groups.back().count == Int("202752"));

  // Counts are arbitrary-precision; values past int64 survive the trip.
  Json j = Json::parse(R"({"jobs": [{"r": "0", "v": "1", "w": "1",
                                     "count": "12345678901234567890123"}],
                           "speeds": ["1"], "powers": ["1"], "variant": "fe"})");
  CompactInstance huge = instance_from_json(j);
  CHECK(huge.total_jobs() == Int("12345678901234567890123"));
  CHECK(dump_json(instance_to_json(huge)).find("12345678901234567890123") != std::string::npos);
}

TEST_CASE("a bare order array is completion shorthand") {
  Json base = Json::parse(R"({"jobs": [{"r": "0", "v": "1", "w": "1"},
                                       {"r": "1", "v": "1", "w": "1"}],
                              "speeds": ["1"], "powers": ["1"], "variant": "fe"})");
  Json bare = base;
  bare["ordering"] = Json::parse("[2, 1]");
  CompactInstance ci = instance_from_json(bare);
  REQUIRE(ci.ordering.has_value());
  CHECK(ci.ordering->kind == OrderingKind::completion);
  CHECK(ci.ordering->order == std::vector<int>{1, 0});

  Json object = base;
  object["ordering"] = Json::parse(R"({"kind": "priority", "order": [2, 1]})");
  CompactInstance cp = instance_from_json(object);
  CHECK(cp.ordering->kind == OrderingKind::priority);
  CHECK(cp.ordering->order == std::vector<int>{1, 0});

  Json bad_kind = base;
  bad_kind["ordering"] = Json::parse(R"({"kind": "weird", "order": [1, 2]})");
  CHECK_THROWS_WITH(instance_from_json(bad_kind), ContainsSubstring("instance.ordering.kind"));
  Json bad_entry = base;
  bad_entry["ordering"] = Json::parse(R"([1, "two"])");
  CHECK_THROWS_WITH(instance_from_json(bad_entry), ContainsSubstring("1-based job indices"));

  Ordering ord;
  ord.kind = OrderingKind::completion;
  ord.order = {1, 0};
  Json written = ordering_to_json(ord);
  CHECK(written["kind"] == "completion");
  CHECK(written["order"] == Json::parse("[2, 1]"));
}

TEST_CASE("schedules round-trip with idle and work segments") {
  Schedule s;
  s.segments.push_back(Segment::idle(rat(0), rat(1, 2)));
  s.segments.push_back(Segment::work(rat(1, 2), rat(5, 4), 0, 2));
  std::string text = dump_json(schedule_to_json(s));
  CHECK(text.find("\"job\": 1") != std::string::npos);  // 1-based on disk
  CHECK(text.find("\"idle\": true") != std::string::npos);
  CHECK(text.find("metrics") == std::string::npos);
  Schedule back = schedule_from_json(Json::parse(text));
  CHECK(back == s);
  CHECK(dump_json(schedule_to_json(back)) == text);

  CHECK_THROWS_WITH(schedule_from_json(Json::parse(R"({"segments": [{"start": "0"}]})")),
                    ContainsSubstring("schedule.segments[0]: missing field 'end'"));
  CHECK_THROWS_WITH(schedule_from_json(Json::parse(
                        R"({"segments": [{"start": "0", "end": "1", "job": "a", "level": 1}]})")),
                    ContainsSubstring("job and level must be integers"));
  CHECK_THROWS_WITH(schedule_from_json(Json::parse(R"({"segments": 7})")),
                    ContainsSubstring("schedule.segments: expected an array"));
}

TEST_CASE("emitted schedules carry recomputed metrics") {
  Instance ins;
  ins.profile = SpeedProfile({rat(1), rat(2)}, {rat(1), rat(4)});
  ins.variant = Variant::flow_energy();
  ins.jobs.push_back(Job{rat(0), rat(1), rat(1)});
  Schedule s;
  s.segments.push_back(Segment::work(rat(0), rat(1, 2), 0, 2));

  Json j = schedule_to_json(s, &ins);
  CHECK(j["metrics"]["completion"] == Json::parse(R"(["1/2"])"));
  CHECK(j["metrics"]["flow"] == "1/2");
  CHECK(j["metrics"]["energy"] == "2");
  CHECK(j["metrics"]["objective"] == "5/2");
  CHECK(!j["metrics"].contains("extended_flow"));

  Ordering ord;
  ord.kind = OrderingKind::completion;
  ord.order = {0};
  Json with_ord = schedule_to_json(s, &ins, &ord);
  CHECK(with_ord["metrics"].contains("extended_completion"));
  CHECK(with_ord["metrics"].contains("extended_flow"));
  CHECK(with_ord["metrics"].contains("extended_objective"));

  // The reader ignores the metrics block entirely.
  Json tampered = j;
  tampered["metrics"]["objective"] = "999";
  CHECK(schedule_from_json(tampered) == s);
}

TEST_CASE("instance files read and write with located errors") {
  CompactInstance ci = demo_compact();
  std::string path = (scratch_dir() / "demo_instance.json").string();
  write_instance(ci, path);
  CompactInstance back = read_instance(path);
  CHECK(back.groups.size() == 2);
  CHECK(back.variant == ci.variant);
  CHECK(dump_json(instance_to_json(back)) == dump_json(instance_to_json(ci)));

  CHECK_THROWS_WITH(read_json_file((scratch_dir() / "missing.json").string()),
                    ContainsSubstring("cannot open"));
  std::string broken = write_scratch("broken.json", "{oops\n");
  CHECK_THROWS_WITH(read_instance(broken), ContainsSubstring("broken.json"));
  std::string incomplete = write_scratch(
      "incomplete.json", R"({"jobs": [{"r": "0", "w": "1"}], "speeds": ["1"],
                             "powers": ["1"], "variant": "fe"})");
  // Field locations are prefixed by the file path.
  CHECK_THROWS_WITH(read_instance(incomplete),
                    ContainsSubstring("incomplete.json.jobs[0]: missing field 'v'"));
  CHECK_THROWS_AS(write_text_file(scratch_dir().string(), "x"), Error);
}

TEST_CASE("the cli reduces and solves the counterexample") {
  CliRun red = run_cli("reduce counterexample --alpha 1/4");
  REQUIRE(red.exit == 0);
  CHECK_THAT(red.err, ContainsSubstring("generated counterexample instance with 3 jobs"));
  Json inst = Json::parse(red.out);
  CHECK(inst["provenance"]["alpha"] == "1/4");
  std::string path = write_scratch("cli_ce.json", red.out);

  CliRun kd = run_cli("solve-greedy " + path);
  REQUIRE(kd.exit == 0);
  Json res = Json::parse(kd.out);
  CHECK(res["variant"] == "kd");
  CHECK(res["objective"] == "19/3");
  CHECK(res["schedule"]["metrics"]["objective"] == "19/3");
  CHECK_THAT(kd.err, ContainsSubstring("kd: objective 19/3"));

  CliRun again = run_cli("solve-greedy " + path);
  CHECK(again.out == kd.out);
  CHECK(again.err == kd.err);

  CliRun naive = run_cli("solve-greedy " + path + " --variant naive2");
  REQUIRE(naive.exit == 0);
  CHECK(Json::parse(naive.out)["objective"] == "77/12");

  CliRun kdc = run_cli("solve-greedy " + path + " --variant kd-c --ordering 1,2,3");
  REQUIRE(kdc.exit == 0);
  CHECK(Json::parse(kdc.out)["objective"] == "19/3");

  CliRun bogus = run_cli("solve-greedy " + path + " --variant magic");
  CHECK(bogus.exit == 2);
  CHECK(Json::parse(bogus.out)["error"]["kind"] == "input");

  CliRun capped = run_cli("--expand-cap 2 solve-greedy " + path);
  CHECK(capped.exit == 2);
  CHECK_THAT(Json::parse(capped.out)["error"]["message"].get<std::string>(),
             ContainsSubstring("too large to expand"));
}

TEST_CASE("the cli oracle is deterministic") {
  CompactInstance two;
  two.groups.push_back(JobGroup{Job{rat(0), rat(1), rat(1)}, Int(1)});
  two.groups.push_back(JobGroup{Job{rat(1, 2), rat(1), rat(1)}, Int(1)});
  two.profile = SpeedProfile({rat(1), rat(2)}, {rat(1), rat(4)});
  two.variant = Variant::flow_energy();
  std::string path = (scratch_dir() / "cli_two.json").string();
  write_instance(two, path);

  CliRun a = run_cli("oracle " + path);
  CliRun b = run_cli("oracle " + path);
  REQUIRE(a.exit == 0);
  CHECK(a.out == b.out);
  Json res = Json::parse(a.out);
  OracleResult opt = exact_optimum(two.expand());
  CHECK(res["objective"] == to_string(opt.objective));
  CHECK(res["ordering"]["order"][0].get<int>() == opt.ordering.order[0] + 1);
  CHECK(res["orderings_tried"].get<long>() == opt.orderings_tried);

  CliRun capped = run_cli("oracle " + path + " --max-n 1");
  CHECK(capped.exit == 2);
  Json err = Json::parse(capped.out);
  CHECK(err["error"]["kind"] == "input");
  CHECK_THAT(err["error"]["message"].get<std::string>(), ContainsSubstring("enumeration cap"));
}

TEST_CASE("the cli verifies schedules and rejects corruption") {
  CliRun red = run_cli("reduce counterexample --alpha 1/4");
  REQUIRE(red.exit == 0);
  std::string ipath = write_scratch("verify_ce.json", red.out);
  CliRun kd = run_cli("solve-greedy " + ipath);
  REQUIRE(kd.exit == 0);
  Json sched = Json::parse(kd.out)["schedule"];
  std::string spath = write_scratch("verify_sched.json", dump_json(sched));

  CliRun ok = run_cli("verify " + ipath + " " + spath);
  REQUIRE(ok.exit == 0);
  CHECK(Json::parse(ok.out)["valid"] == true);
  CHECK_THAT(ok.err, ContainsSubstring("schedule verifies"));

  // Solver output feeds straight back in: the embedded schedule is unwrapped.
  std::string wpath = write_scratch("verify_wrapped.json", kd.out);
  CliRun wrapped = run_cli("verify " + ipath + " " + wpath);
  CHECK(wrapped.exit == 0);
  CHECK(Json::parse(wrapped.out)["valid"] == true);

  // Volume short by 1/1000: infeasible, exit 3.
  Schedule s = schedule_from_json(sched);
  s.segments.back().end -= rat(1, 1000);
  std::string cpath = write_scratch("verify_bad.json", dump_json(schedule_to_json(s)));
  CliRun bad = run_cli("verify " + ipath + " " + cpath);
  CHECK(bad.exit == 3);
  Json err = Json::parse(bad.out);
  CHECK(err["error"]["kind"] == "infeasible");
  CHECK_THAT(err["error"]["message"].get<std::string>(), ContainsSubstring("volume mismatch"));

  std::string mpath = write_scratch("verify_broken.json", "{oops\n");
  CliRun broken = run_cli("verify " + mpath + " " + spath);
  CHECK(broken.exit == 2);
  CHECK(Json::parse(broken.out)["error"]["kind"] == "input");

  // A correct-volume schedule that overspends a budget instance.
  CompactInstance bud;
  bud.groups.push_back(JobGroup{Job{rat(0), rat(2), rat(1)}, Int(1)});
  bud.profile = SpeedProfile({rat(1), rat(2)}, {rat(1), rat(4)});
  bud.variant = Variant::with_budget(rat(3));
  std::string bpath = (scratch_dir() / "verify_budget.json").string();
  write_instance(bud, bpath);
  Schedule fast;
  fast.segments.push_back(Segment::work(rat(0), rat(1), 0, 2));
  std::string fpath = write_scratch("verify_fast.json", dump_json(schedule_to_json(fast)));
  CliRun over = run_cli("verify " + bpath + " " + fpath);
  CHECK(over.exit == 3);
  CHECK_THAT(Json::parse(over.out)["error"]["message"].get<std::string>(),
             ContainsSubstring("exceeds budget"));
}

TEST_CASE("the cli lp solver honors ordering flags") {
  CliRun red = run_cli("reduce counterexample --alpha 1/4");
  REQUIRE(red.exit == 0);
  std::string ipath = write_scratch("lp_ce.json", red.out);

  CliRun fifo = run_cli("solve-lp " + ipath + " --ordering fifo");
  REQUIRE(fifo.exit == 0);
  Json res = Json::parse(fifo.out);
  CHECK(res["objective"] == "8");
  CHECK(res["flow_objective"] == "19/3");
  CHECK(res["schedule"]["metrics"]["objective"] == "19/3");
  CHECK(res["schedule"]["metrics"].contains("extended_completion"));

  CliRun perm = run_cli("solve-lp " + ipath + " --ordering 1,2,3");
  REQUIRE(perm.exit == 0);
  CHECK(Json::parse(perm.out)["objective"] == "8");

  CliRun swapped = run_cli("solve-lp " + ipath + " --ordering 2,1,3");
  REQUIRE(swapped.exit == 0);
  CHECK(Json::parse(swapped.out)["objective"] == "25/3");
  CHECK(Json::parse(swapped.out)["flow_objective"] == "20/3");

  CliRun dup = run_cli("solve-lp " + ipath + " --ordering 2,2,1");
  CHECK(dup.exit == 2);

  std::string model = (scratch_dir() / "model.lp").string();
  CliRun exported = run_cli("solve-lp " + ipath + " --export-lp " + model);
  REQUIRE(exported.exit == 0);
  CHECK_THAT(slurp(model), ContainsSubstring("Minimize"));

  // An embedded completion ordering is the default; an embedded priority
  // ordering is ignored with a note.
  CompactInstance ci = instance_from_json(Json::parse(red.out));
  Ordering ord;
  ord.kind = OrderingKind::completion;
  ord.order = {1, 0, 2};
  ci.ordering = ord;
  std::string epath = (scratch_dir() / "lp_embedded.json").string();
  write_instance(ci, epath);
  CliRun embedded = run_cli("solve-lp " + epath);
  REQUIRE(embedded.exit == 0);
  CHECK(Json::parse(embedded.out)["objective"] == "25/3");
  ci.ordering->kind = OrderingKind::priority;
  write_instance(ci, epath);
  CliRun noted = run_cli("solve-lp " + epath);
  REQUIRE(noted.exit == 0);
  CHECK(Json::parse(noted.out)["objective"] == "8");
  CHECK_THAT(noted.err, ContainsSubstring("embedded priority ordering ignored"));

  // A budget below the all-slow energy is infeasible for every ordering.
  // The default fifo ordering only exists for unit-size unit-weight
  // instances, so the sized job needs an explicit permutation.
  CompactInstance tight;
  tight.groups.push_back(JobGroup{Job{rat(0), rat(2), rat(1)}, Int(1)});
  tight.profile = SpeedProfile({rat(1), rat(2)}, {rat(1), rat(4)});
  tight.variant = Variant::with_budget(rat(1));
  std::string tpath = (scratch_dir() / "lp_tight.json").string();
  write_instance(tight, tpath);
  CliRun unit_only = run_cli("solve-lp " + tpath);
  CHECK(unit_only.exit == 2);
  CHECK_THAT(Json::parse(unit_only.out)["error"]["message"].get<std::string>(),
             ContainsSubstring("unit-size unit-weight"));
  CliRun infeasible = run_cli("solve-lp " + tpath + " --ordering 1");
  CHECK(infeasible.exit == 3);
  CHECK(Json::parse(infeasible.out)["error"]["kind"] == "infeasible");
  CHECK_THAT(Json::parse(infeasible.out)["error"]["message"].get<std::string>(),
             ContainsSubstring("budget too small for this ordering"));
}

TEST_CASE("the cli generates reduction instances") {
  CliRun bidua = run_cli("reduce ss-to-bidua --elements 3,2 --target 4");
  REQUIRE(bidua.exit == 0);
  Json inst = Json::parse(bidua.out);
  CHECK(inst["provenance"]["yes_flow_threshold"] == "7/2");
  CHECK(inst["ordering"]["kind"] == "priority");
  CHECK_THAT(bidua.err, ContainsSubstring("4 jobs in 4 groups"));

  CliRun feidwu = run_cli("reduce ss-to-feidwu --elements 2,2 --target 3");
  REQUIRE(feidwu.exit == 0);
  CHECK_THAT(feidwu.err, ContainsSubstring("202761 jobs in 6 groups"));

  CompactInstance bud;
  bud.groups.push_back(JobGroup{Job{rat(0), rat(2), rat(1)}, Int(1)});
  bud.profile = SpeedProfile({rat(1), rat(2)}, {rat(1), rat(4)});
  bud.variant = Variant::with_budget(rat(3));
  std::string bpath = (scratch_dir() / "reduce_budget.json").string();
  write_instance(bud, bpath);
  CliRun fe = run_cli("reduce budget-to-fe " + bpath);
  REQUIRE(fe.exit == 0);
  Json fej = Json::parse(fe.out);
  CHECK(fej["variant"] == "fe");
  CHECK(fej["provenance"]["Y"] == "1/2");

  CHECK(run_cli("reduce budget-to-fe").exit == 2);
  CHECK(run_cli("reduce ss-to-bidua --elements 3,2").exit == 2);
  CliRun malformed = run_cli("reduce ss-to-bidua --elements 3,x --target 4");
  CHECK(malformed.exit == 2);
  CHECK_THAT(Json::parse(malformed.out)["error"]["message"].get<std::string>(),
             ContainsSubstring("--elements"));
  CHECK(run_cli("reduce nonsense").exit == 2);
  CHECK(run_cli("bogus-subcommand").exit == 2);
  CHECK(run_cli("solve-lp").exit == 2);
}

TEST_CASE("the cli renders deterministic gantt charts") {
  CliRun red = run_cli("reduce counterexample --alpha 1/4");
  REQUIRE(red.exit == 0);
  std::string ipath = write_scratch("gantt_ce.json", red.out);
  CliRun kd = run_cli("solve-greedy " + ipath);
  REQUIRE(kd.exit == 0);
  std::string spath =
      write_scratch("gantt_sched.json", dump_json(Json::parse(kd.out)["schedule"]));

  std::string out1 = (scratch_dir() / "gantt1.svg").string();
  CliRun one = run_cli("gantt " + ipath + " " + spath + " -o " + out1);
  REQUIRE(one.exit == 0);
  CHECK(Json::parse(one.out)["written"] == out1);
  std::string svg = slurp(out1);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK_THAT(svg, ContainsSubstring(">J3<"));  // one lane per job
  CHECK_THAT(svg, ContainsSubstring("J1 [0, 1/2) level 2"));
  CHECK_THAT(svg, ContainsSubstring("r = 4/3"));
  CHECK_THAT(svg, ContainsSubstring("C = 7/3"));
  CHECK_THAT(svg, ContainsSubstring("s=3"));  // legend covers every level

  std::string out2 = (scratch_dir() / "gantt2.svg").string();
  CliRun two = run_cli("gantt " + ipath + " " + spath + " -o " + out2);
  REQUIRE(two.exit == 0);
  CHECK(slurp(out2) == svg);

  CliRun missing = run_cli("gantt " + ipath + " " + spath);
  CHECK(missing.exit == 2);
}
