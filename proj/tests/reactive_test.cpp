#include <doctest.h>

#include <atomic>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "dsched/core/fjs_io.hpp"
#include "dsched/core/generator.hpp"
#include "dsched/reactive/dispatch.hpp"
#include "dsched/reactive/handle.hpp"
#include "dsched/reactive/window.hpp"
#include "dsched/util/rng.hpp"

using namespace dsched;

TEST_CASE("select_action: argmax with canonical tie-break") {
  RuleValidator v;
  Instance inst = parse_fjs("2 1 1\n1 1 1 3\n1 1 1 3\n");
  Simulator sim(inst, {});
  sim.settle();
  // Equal scores on both candidates: the canonically first action wins.
  auto tie = select_action(v.validate("1"), sim.state());
  REQUIRE(tie.has_value());
  CHECK(*tie == Action{0, 0, 0});
}

TEST_CASE("select_action: SPT picks the shortest of {7,2,4}") {
  RuleValidator v;
  Instance inst = parse_fjs("3 3 1\n1 1 1 7\n1 1 2 2\n1 1 3 4\n");
  Simulator sim(inst, {});
  sim.settle();
  auto a = select_action(v.validate("-op_proc_time"), sim.state());
  REQUIRE(a.has_value());
  CHECK(*a == Action{1, 0, 1});
}

TEST_CASE("select_action: empty feasible set means wait") {
  RuleValidator v;
  Instance inst = parse_fjs("1 1 1\n1 1 1 3\n");
  DisturbanceScript script = parse_disturbances("fail 0 1 5\n", 1);
  Simulator sim(inst, script);
  sim.settle();
  CHECK_FALSE(select_action(v.validate("1"), sim.state()).has_value());
}

TEST_CASE("dispatch records epoch, version and candidates in the window") {
  RuleValidator v;
  ActiveRuleHandle handle(v.validate("-op_proc_time"));
  ObservationWindow window;
  Instance inst = parse_fjs("2 2 1\n1 2 1 3 2 4\n1 1 1 5\n");
  Simulator sim(inst, {});
  sim.settle();

  auto a = dispatch(handle, sim.state(), window, 1);
  REQUIRE(a.has_value());
  auto snap = window.snapshot();
  REQUIRE(snap.decisions.size() == 1);
  const DecisionRecord& r = snap.decisions[0];
  CHECK(r.epoch == 1);
  CHECK(r.rule_version == 1);
  CHECK(r.candidate_count == 3);
  CHECK_FALSE(r.wait);
  CHECK(r.latency_us >= 0.0);

  DecisionRecord fixed;
  fixed.epoch = 12;
  fixed.clock = 34.5;
  fixed.action = Action{3, 2, 1};
  fixed.candidate_count = 4;
  fixed.rule_version = 2;
  fixed.latency_us = 1.5;
  CHECK(format_decision_line(fixed) == "12 34.5 j3.o2.m1 4 v2 1.5");
  fixed.wait = true;
  CHECK(format_decision_line(fixed) == "12 34.5 wait 4 v2 1.5");
}

TEST_CASE("swap between dispatches changes the recorded version") {
  RuleValidator v;
  ActiveRuleHandle handle(v.validate("-op_proc_time"));
  ObservationWindow window;
  Instance inst = parse_fjs("2 1 1\n1 1 1 3\n1 1 1 5\n");
  Simulator sim(inst, {});
  sim.settle();

  dispatch(handle, sim.state(), window, 1);
  std::uint64_t replaced = handle.swap(v.validate("op_proc_time"));
  CHECK(replaced == 1);
  dispatch(handle, sim.state(), window, 2);

  auto snap = window.snapshot();
  REQUIRE(snap.decisions.size() == 2);
  CHECK(snap.decisions[0].rule_version == 1);
  CHECK(snap.decisions[1].rule_version == 2);
}

TEST_CASE("redeploying identical text still increments the deployment") {
  RuleValidator v;
  CompiledRule rule = v.validate("clock");
  ActiveRuleHandle handle(rule);
  CHECK(handle.deployment_count() == 1);
  handle.swap(rule);
  CHECK(handle.deployment_count() == 2);
  CHECK(handle.current().deployment == 2);
  CHECK(handle.current().rule.source == "clock");
}

TEST_CASE("concurrent swaps and dispatches never observe a torn rule") {
  RuleValidator v;
  ActiveRuleHandle handle(v.validate("-op_proc_time"));
  ObservationWindow window(4096);
  Instance inst = parse_fjs("2 2 1\n1 2 1 3 2 4\n1 1 1 5\n");
  Simulator sim(inst, {});
  sim.settle();
  const SimState& state = sim.state();

  constexpr int kSwaps = 200;
  constexpr int kDispatches = 2000;
  std::atomic<bool> go{false};

  std::thread swapper([&] {
    while (!go.load()) {
    }
    for (int i = 0; i < kSwaps; ++i)
      handle.swap(v.validate(i % 2 ? "-op_proc_time" : "job_wait_time - op_proc_time"));
  });

  std::vector<std::uint64_t> seen;
  seen.reserve(kDispatches);
  bool all_rules_intact = true;
  std::thread dispatcher([&] {
    while (!go.load()) {
    }
    for (int i = 0; i < kDispatches; ++i) {
      const InstalledRule& installed = handle.current();
      // The snapshot must be internally consistent: the deployment id and the
      // rule it points to were installed together.
      if (installed.rule.expr == nullptr) all_rules_intact = false;
      (void)select_action(installed.rule, state);
      seen.push_back(installed.deployment);
    }
  });

  go.store(true);
  swapper.join();
  dispatcher.join();

  CHECK(all_rules_intact);
  CHECK(handle.deployment_count() == 1 + kSwaps);
  std::uint64_t prev = 0;
  bool in_range = true, monotone = true;
  for (std::uint64_t d : seen) {
    if (d < 1 || d > 1 + kSwaps) in_range = false;
    if (d < prev) monotone = false;  // versions observed by one dispatcher are monotone
    prev = d;
  }
  CHECK(in_range);
  CHECK(monotone);
}

TEST_CASE("property: positive affine rescaling preserves every selection") {
  RuleValidator v;
  Rng rng(1234);
  // Dyadic scales and integer offsets keep a*f+b exact, so ties survive.
  const double scales[] = {0.5, 1.0, 2.0, 8.0};
  const double offsets[] = {0.0, 5.0, -3.0};
  for (int trial = 0; trial < 10; ++trial) {
    GeneratorParams p;
    p.n_jobs = 5;
    p.n_machines = 3;
    p.max_ops = 3;
    p.max_flex = 2;
    Instance inst = generate_instance(p, 3000 + trial);

    CompiledRule base = v.validate("job_remaining_work - op_proc_time");
    double a = scales[rng.uniform_int(0, 3)];
    double b = offsets[rng.uniform_int(0, 2)];
    std::string scaled_text = std::to_string(a) + " * (job_remaining_work - op_proc_time)" +
                              (b < 0 ? " - " + std::to_string(-b) : " + " + std::to_string(b));
    CompiledRule scaled = v.validate(scaled_text);

    std::vector<Action> seq_base, seq_scaled;
    auto run = [&](const CompiledRule& rule, std::vector<Action>& out) {
      Policy policy = [&](const SimState& st) {
        auto act = select_action(rule, st);
        if (act) out.push_back(*act);
        return act;
      };
      return run_episode(inst, {}, policy);
    };
    ScheduleResult r1 = run(base, seq_base);
    ScheduleResult r2 = run(scaled, seq_scaled);
    CHECK(r1.makespan == r2.makespan);
    REQUIRE(seq_base.size() == seq_scaled.size());
    for (std::size_t i = 0; i < seq_base.size(); ++i) CHECK(seq_base[i] == seq_scaled[i]);
  }
}

TEST_CASE("throughput fixture: 10 completions over 5 time units is 2.0") {
  ObservationWindow window;
  for (int i = 0; i < 10; ++i)
    window.record_completion(CompletionEvent{0.5 * (i + 1), i, 0});
  CHECK(window.throughput(5.0) == 2.0);
}

TEST_CASE("throughput reference moves as the completion buffer overflows") {
  ObservationWindow window(4);
  for (int i = 1; i <= 6; ++i)
    window.record_completion(CompletionEvent{static_cast<Time>(i), i, 0});
  // Buffer holds {3,4,5,6}; reference is the newest evicted time, 2.
  CHECK(window.throughput(6.0) == 1.0);
  CHECK(window.snapshot().reference_time == 2.0);
  CHECK(window.throughput(2.0) == 0.0);  // no elapsed time, no rate
}

TEST_CASE("summarize: empty window yields zeroed statistics, no bottleneck") {
  ObservationWindow window;
  Instance inst = parse_fjs("1 2 1\n1 1 1 3\n");
  Simulator sim(inst, {});
  sim.settle();
  SummaryProfile p = summarize(window, sim.state(), "-op_proc_time");
  CHECK(p.window_len == 0);
  CHECK(p.mean_utilization == 0.0);
  CHECK(p.max_utilization == 0.0);
  CHECK(p.bottleneck_machine == -1);
  CHECK(p.throughput == 0.0);
  CHECK(p.mean_job_wait == 0.0);
  CHECK(p.current_rule == "-op_proc_time");
  CHECK(p.active_failures.empty());
  CHECK(p.objective == "makespan");
  REQUIRE(p.queue_lengths.size() == 2);
  CHECK(p.queue_lengths[0] == 1);  // the ready op is eligible on machine 0 only
  CHECK(p.queue_lengths[1] == 0);
}

TEST_CASE("summarize: the machine holding most processed time is the bottleneck") {
  ObservationWindow window;
  Instance inst = parse_fjs("2 2 1\n1 1 1 8\n1 1 2 2\n");
  Simulator sim(inst, {});
  sim.settle();
  sim.start(Action{0, 0, 0});
  sim.start(Action{1, 0, 1});
  sim.advance();  // t=2, machine 1 done
  sim.advance();  // t=8, machine 0 done: 80% of processed time
  SummaryProfile p = summarize(window, sim.state(), "r");
  CHECK(p.bottleneck_machine == 0);
  CHECK(p.max_utilization == 1.0);
  CHECK(p.mean_utilization == doctest::Approx(0.625));
}

TEST_CASE("summarize: failed machines are listed") {
  ObservationWindow window;
  Instance inst = parse_fjs("1 2 1\n1 1 1 3\n");
  DisturbanceScript script = parse_disturbances("fail 0 2 5\n", 2);
  Simulator sim(inst, script);
  sim.settle();
  SummaryProfile p = summarize(window, sim.state(), "r");
  REQUIRE(p.active_failures.size() == 1);
  CHECK(p.active_failures[0] == 1);
}
