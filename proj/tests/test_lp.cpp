#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "speedscale/lp.hpp"
#include "speedscale/reductions.hpp"
#include "test_support.hpp"

using namespace speedscale;

namespace {

Ordering completion_order(std::vector<int> order) {
  Ordering o;
  o.order = std::move(order);
  return o;
}

// One package of paired jobs: a big slow-by-default job and a small late one.
Instance package_instance(const Rat& budget) {
  Instance ins;
  ins.profile = SpeedProfile({rat(1), rat(2)}, {rat(1), rat(4)});
  ins.variant = Variant::with_budget(budget);
  ins.jobs = {{rat(0), rat(2), rat(1)}, {rat(1), rat(2), rat(1)}};
  return ins;
}

}  // namespace

TEST_CASE("fe lp rows for the three-job instance") {
  Instance ce = counterexample_instance(rat(0));
  Ordering fifo = fifo_ordering(ce);
  LpModel model = build_fe_lp(ce, fifo);
  CHECK(model.num_jobs == 3);
  CHECK(model.num_levels == 3);
  CHECK(model.num_vars() == 12);
  CHECK(model.flow_offset == rat(5, 3));
  CHECK(!model.budget);

  // Per position: its ordering row, then completion rows by ascending
  // release; convex rows and share bounds follow en bloc.
  std::vector<LpRowKind> kinds;
  for (const LpRow& row : model.rows) kinds.push_back(row.kind);
  std::vector<LpRowKind> expect = {
      LpRowKind::completion,
      LpRowKind::ordering, LpRowKind::completion, LpRowKind::completion,
      LpRowKind::ordering, LpRowKind::completion, LpRowKind::completion, LpRowKind::completion,
      LpRowKind::convex_sum, LpRowKind::convex_sum, LpRowKind::convex_sum};
  for (int i = 0; i < 9; ++i) expect.push_back(LpRowKind::non_negative);
  CHECK(kinds == expect);

  // The third position's completion row anchored at t = 1/3 sums the
  // processing times of positions 2 and 3.
  const LpRow& row = model.rows[6];
  REQUIRE(row.kind == LpRowKind::completion);
  CHECK(row.j == 3);
  CHECK(row.jprime == 2);
  CHECK(row.rhs == rat(1, 3));
  CHECK(row.coeffs[model.chat_var(2)] == 1);
  CHECK(row.coeffs[model.chat_var(0)] == 0);
  for (int p : {1, 2}) {
    CHECK(row.coeffs[model.lambda_var(p, 1)] == -1);
    CHECK(row.coeffs[model.lambda_var(p, 2)] == rat(-1, 2));
    CHECK(row.coeffs[model.lambda_var(p, 3)] == rat(-1, 3));
  }
  for (int i = 1; i <= 3; ++i) CHECK(row.coeffs[model.lambda_var(0, i)] == 0);

  // Objective: weights on the completions, E_j^i = v P_i / s_i on the shares.
  CHECK(model.objective[model.chat_var(0)] == 1);
  CHECK(model.objective[model.lambda_var(0, 1)] == 1);
  CHECK(model.objective[model.lambda_var(0, 2)] == rat(3, 2));
  CHECK(model.objective[model.lambda_var(0, 3)] == 2);
}

TEST_CASE("lp optimum matches the greedy value on the three-job instance") {
  Instance ce = counterexample_instance(rat(1, 4));
  Ordering fifo = fifo_ordering(ce);
  LpSolution sol = solve(build_fe_lp(ce, fifo));
  REQUIRE(sol.status == LpStatus::optimal);
  CHECK(sol.flow_objective == rat(19, 3));
  CHECK(sol.objective == rat(19, 3) + rat(5, 3));
  Schedule schedule = reconstruct(sol, ce, fifo);
  ScheduleMetrics m = evaluate(schedule, ce, &fifo);
  CHECK(*m.extended_objective == sol.flow_objective);
}

TEST_CASE("budget lp honors the fixed completion ordering") {
  Instance ins = package_instance(rat(6));
  LpModel model = build_budget_lp(ins, completion_order({1, 0}));
  CHECK(model.budget);
  CHECK(model.budget_value == 6);
  bool saw_cap = false;
  for (const LpRow& row : model.rows)
    if (row.kind == LpRowKind::budget_cap) {
      saw_cap = true;
      CHECK(row.rel == simplex::Relation::le);
      CHECK(row.rhs == 6);
      CHECK(row.coeffs[model.lambda_var(0, 1)] == 2);
      CHECK(row.coeffs[model.lambda_var(0, 2)] == 4);
    }
  CHECK(saw_cap);

  // Small job first: the whole budget slack goes to the small job, flow 4.
  LpSolution late_big = solve(model);
  REQUIRE(late_big.status == LpStatus::optimal);
  CHECK(late_big.flow_objective == 4);
  CHECK(late_big.lambda.lambda[1] == std::vector<Rat>{rat(0), rat(1)});
  CHECK(late_big.lambda.lambda[0] == std::vector<Rat>{rat(1), rat(0)});

  // Big job first: racing it through before the small release is cheaper.
  LpSolution early_big = solve(build_budget_lp(ins, completion_order({0, 1})));
  REQUIRE(early_big.status == LpStatus::optimal);
  CHECK(early_big.flow_objective == 3);

  Schedule schedule = reconstruct(early_big, ins, completion_order({0, 1}));
  ScheduleMetrics m = evaluate(schedule, ins, nullptr);
  CHECK(m.energy == 6);  // the cap binds
  CHECK(m.flow == 3);
}

TEST_CASE("budget lp reports infeasibility below the all-slow energy") {
  Instance ins = package_instance(rat(7, 2));  // all-slow energy is 4
  LpSolution sol = solve(build_budget_lp(ins, completion_order({0, 1})));
  CHECK(sol.status == LpStatus::infeasible);
  CHECK_THROWS_AS(reconstruct(sol, ins, completion_order({0, 1})), Error);

  // At exactly the all-slow energy the only feasible point is all-slow.
  Instance tight = package_instance(rat(4));
  LpSolution at = solve(build_budget_lp(tight, completion_order({0, 1})));
  REQUIRE(at.status == LpStatus::optimal);
  CHECK(at.lambda.lambda[0] == std::vector<Rat>{rat(1), rat(0)});
  CHECK(at.lambda.lambda[1] == std::vector<Rat>{rat(1), rat(0)});
  // Big [0,2], small [2,4] wholly after its release: flow 2 + 3.
  CHECK(at.flow_objective == 5);

  CHECK_THROWS_AS(build_budget_lp(counterexample_instance(rat(0)),
                                  completion_order({0, 1, 2})),
                  Error);
}

TEST_CASE("warm path agrees with the direct translation") {
  ts::Rng rng(71);
  int solved = 0;
  for (int trial = 0; trial < 60; ++trial) {
    Instance ins;
    switch (trial % 3) {
      case 0: ins = ts::random_unit_instance(rng, 5); break;
      case 1: ins = ts::random_weighted_instance(rng); break;
      default: ins = ts::random_general_instance(rng); break;
    }
    Ordering ordering = ts::random_ordering(rng, ins.n());
    LpModel model = build_fe_lp(ins, ordering);
    LpSolution warm = solve(model);
    simplex::Result cold = simplex::solve(to_simplex_problem(model));
    REQUIRE(warm.status == LpStatus::optimal);
    REQUIRE(cold.status == simplex::Status::optimal);
    CHECK(warm.objective == cold.objective);
    ++solved;
  }
  for (int trial = 0; trial < 30; ++trial) {
    Instance ins = ts::random_budget_instance(rng);
    Ordering ordering = ts::random_ordering(rng, ins.n());
    LpModel model = build_budget_lp(ins, ordering);
    LpSolution warm = solve(model);
    simplex::Result cold = simplex::solve(to_simplex_problem(model));
    REQUIRE(warm.status == LpStatus::optimal);  // budget above all-slow by construction
    REQUIRE(cold.status == simplex::Status::optimal);
    CHECK(warm.objective == cold.objective);
    ++solved;
  }
  CHECK(solved == 90);
}

TEST_CASE("reconstruct round trips and shares stay convex") {
  ts::Rng rng(73);
  for (int trial = 0; trial < 40; ++trial) {
    Instance ins = trial % 2 ? ts::random_general_instance(rng) : ts::random_budget_instance(rng);
    Ordering ordering = ts::random_ordering(rng, ins.n());
    LpModel model = ins.variant.is_budget() ? build_budget_lp(ins, ordering) : build_fe_lp(ins, ordering);
    LpSolution sol = solve(model);
    REQUIRE(sol.status == LpStatus::optimal);
    for (const auto& shares : sol.lambda.lambda) {
      Rat sum = 0;
      for (const Rat& share : shares) {
        CHECK(share >= 0);
        sum += share;
      }
      CHECK(sum == 1);
    }
    Schedule schedule = reconstruct(sol, ins, ordering);
    ScheduleMetrics m = evaluate(schedule, ins, &ordering);
    CHECK(*m.extended_completion == sol.chat);
    if (ins.variant.is_budget()) CHECK(m.energy <= ins.variant.budget);
  }
}

TEST_CASE("any dispatched allocation is dominated by the lp optimum") {
  ts::Rng rng(79);
  int compared = 0;
  for (int trial = 0; trial < 60; ++trial) {
    Instance ins = trial % 2 ? ts::random_weighted_instance(rng) : ts::random_general_instance(rng);
    Ordering ordering = ts::random_ordering(rng, ins.n());
    LpSolution sol = solve(build_fe_lp(ins, ordering));
    REQUIRE(sol.status == LpStatus::optimal);
    std::vector<Rat> x;
    for (const Job& job : ins.jobs) {
      Rat lo = job.volume / ins.profile.speed(ins.profile.k());
      Rat hi = job.volume / ins.profile.speed(1);
      x.push_back(lo + Rat(ts::pick(rng, 0, 5)) / 5 * (hi - lo));
    }
    Schedule schedule = dispatch_ordering(ins, ordering, x);
    ScheduleMetrics m = evaluate(schedule, ins, &ordering);
    CHECK(*m.extended_objective >= sol.flow_objective);
    ++compared;
  }
  CHECK(compared == 60);
}

TEST_CASE("lp text export prints exact decimals") {
  Instance ins;
  ins.profile = SpeedProfile({rat(1), rat(2)}, {rat(1), rat(4)});
  ins.variant = Variant::flow_energy();
  ins.jobs = {{rat(0), rat(1), rat(1)}};
  LpModel model = build_fe_lp(ins, completion_order({0}));
  std::string text = export_lp_text(model);
  CHECK(text ==
        "Minimize\n"
        " obj: C1 + l_1_1 + 2 l_1_2\n"
        "Subject To\n"
        " r1: C1 - l_1_1 - 0.5 l_1_2 >= 0\n"
        " r2: l_1_1 + l_1_2 = 1\n"
        "End\n");
  CHECK(export_lp_text(model) == text);  // deterministic

  // A denominator with a factor other than 2 or 5 forces the rounding header.
  Instance thirds = ins;
  thirds.profile = SpeedProfile({rat(1), rat(3)}, {rat(1), rat(4)});
  std::string rounded = export_lp_text(build_fe_lp(thirds, completion_order({0})));
  CHECK(rounded.rfind("\\ some coefficients rounded", 0) == 0);
}
