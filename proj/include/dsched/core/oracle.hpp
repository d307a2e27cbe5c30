#pragma once

#include "dsched/core/disturbance.hpp"
#include "dsched/core/types.hpp"

namespace dsched {

struct OracleLimits {
  int max_total_ops = 8;
};

// Minimum makespan over exhaustive enumeration of dispatch sequences: every
// decision epoch branches over all feasible actions plus wait-until-next-event.
// Branch-and-bound on a per-job remaining-work lower bound keeps desk-scale
// instances tractable. Throws DomainError when the instance (including
// scripted arrivals) exceeds the operation cap.
Time brute_force_best(const Instance& instance, const DisturbanceScript& script = {},
                      const OracleLimits& limits = {});

}  // namespace dsched
