#include "dsched/rules/features.hpp"

#include <algorithm>

namespace dsched {

double FeatureVector::get(Feature f) const {
  switch (f) {
    case Feature::op_proc_time: return op_proc_time;
    case Feature::job_remaining_work: return job_remaining_work;
    case Feature::job_remaining_ops: return job_remaining_ops;
    case Feature::op_index: return op_index;
    case Feature::num_eligible: return num_eligible;
    case Feature::machine_queue_len: return machine_queue_len;
    case Feature::machine_workload: return machine_workload;
    case Feature::job_wait_time: return job_wait_time;
    case Feature::clock: return clock;
    case Feature::machine_idle_time: return machine_idle_time;
  }
  return 0.0;
}

FeatureVector extract_features(const SimState& state, const Action& action) {
  const Job& job = state.jobs[static_cast<std::size_t>(action.job_id)];
  const Operation& op = state.operation(action);
  const OpProgress& prog = state.progress_of(action);
  const MachineState& machine = state.machines[static_cast<std::size_t>(action.machine)];

  FeatureVector fv;
  fv.op_proc_time = op.time_on(action.machine);

  // Remaining work prices each op at its fastest alternative; a suspended
  // current op contributes only its leftover fraction of that price.
  for (std::size_t j = static_cast<std::size_t>(action.op_index); j < job.operations.size();
       ++j) {
    const Operation& rest = job.operations[j];
    const OpProgress& rp = state.progress[static_cast<std::size_t>(action.job_id)][j];
    if (rp.phase == OpPhase::suspended)
      fv.job_remaining_work += rp.remaining * (rest.min_time() / rest.time_on(rp.machine));
    else
      fv.job_remaining_work += rest.min_time();
  }
  fv.job_remaining_ops =
      static_cast<double>(job.operations.size() - static_cast<std::size_t>(action.op_index));
  fv.op_index = static_cast<double>(action.op_index + 1);
  fv.num_eligible = static_cast<double>(op.alternatives.size());

  int queue = 0;
  for (std::size_t i = 0; i < state.jobs.size(); ++i) {
    int j = state.frontier_op(static_cast<int>(i));
    if (j >= 0 && state.operation(static_cast<int>(i), j).eligible_on(action.machine)) ++queue;
  }
  fv.machine_queue_len = static_cast<double>(queue);

  fv.machine_workload = machine.workload_at(state.clock);
  fv.job_wait_time = std::max(0.0, state.clock - prog.ready_since);
  fv.clock = state.clock;
  fv.machine_idle_time = std::max(0.0, machine.idle_time_at(state.clock));
  return fv;
}

}  // namespace dsched
