#include "dsched/core/oracle.hpp"

#include <algorithm>
#include <limits>

#include "dsched/core/sim.hpp"

namespace dsched {

namespace {

// Per-job earliest-conceivable finish: remaining work at the fastest eligible
// machine for each incomplete operation, ignoring machine contention.
Time lower_bound(const SimState& state) {
  Time bound = state.clock;
  for (std::size_t i = 0; i < state.jobs.size(); ++i) {
    const Job& job = state.jobs[i];
    Time t = std::max(state.clock, job.arrival_time);
    for (std::size_t j = 0; j < job.operations.size(); ++j) {
      const OpProgress& prog = state.progress[i][j];
      const Operation& op = job.operations[j];
      switch (prog.phase) {
        case OpPhase::complete:
          continue;
        case OpPhase::running: {
          // remaining is frozen at dispatch; time left from now is busy_until - clock.
          const MachineState& m = state.machines[static_cast<std::size_t>(prog.machine)];
          t += (m.busy_until - state.clock) * (op.min_time() / op.time_on(prog.machine));
          break;
        }
        case OpPhase::suspended:
          t += prog.remaining * (op.min_time() / op.time_on(prog.machine));
          break;
        case OpPhase::ready:
        case OpPhase::unreleased:
          t += op.min_time();
          break;
      }
    }
    bound = std::max(bound, t);
  }
  return bound;
}

void search(const Simulator& sim, Time& best) {
  if (lower_bound(sim.state()) >= best) return;
  if (sim.done()) {
    best = std::min(best, sim.result().makespan);
    return;
  }

  for (const Action& action : feasible_actions(sim.state())) {
    Simulator next = sim;
    next.start(action);
    search(next, best);
  }
  if (sim.has_pending_event()) {
    Simulator next = sim;
    next.advance();
    next.settle();
    search(next, best);
  }
}

}  // namespace

Time brute_force_best(const Instance& instance, const DisturbanceScript& script,
                      const OracleLimits& limits) {
  int total_ops = instance.total_operations();
  for (const auto& ev : script.events)
    if (ev.kind == Disturbance::Kind::job_arrival)
      total_ops += static_cast<int>(ev.job.operations.size());
  if (total_ops > limits.max_total_ops)
    throw DomainError("instance exceeds the brute-force cap of " +
                      std::to_string(limits.max_total_ops) + " operations");

  Simulator root(instance, script);
  root.settle();
  Time best = std::numeric_limits<Time>::infinity();
  search(root, best);
  return best;
}

}  // namespace dsched
