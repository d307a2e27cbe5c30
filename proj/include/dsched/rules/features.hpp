#pragma once

#include "dsched/core/sim.hpp"
#include "dsched/rules/ast.hpp"

namespace dsched {

// Shop-floor attributes of one (state, action) pair. All finite, all >= 0.
struct FeatureVector {
  double op_proc_time = 0.0;        // p_{i,j,k} on the candidate machine
  double job_remaining_work = 0.0;  // min-alternative times over remaining ops
  double job_remaining_ops = 0.0;   // incomplete ops of the job, current included
  double op_index = 0.0;            // 1-based position within the job
  double num_eligible = 0.0;        // |M_{i,j}|
  double machine_queue_len = 0.0;   // dispatchable ops eligible on the machine
  double machine_workload = 0.0;    // cumulative busy time of the machine
  double job_wait_time = 0.0;       // clock - instant the op became dispatchable
  double clock = 0.0;
  double machine_idle_time = 0.0;   // clock - busy - failed time

  double get(Feature f) const;
};

// Pure function of (state, action); the action must be feasible.
FeatureVector extract_features(const SimState& state, const Action& action);

}  // namespace dsched
