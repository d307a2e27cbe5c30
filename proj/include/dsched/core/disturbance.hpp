#pragma once

#include <string>
#include <vector>

#include "dsched/core/types.hpp"

namespace dsched {

struct Disturbance {
  enum class Kind { job_arrival, machine_failure, machine_recovery };

  Kind kind = Kind::job_arrival;
  Time time = 0.0;
  Job job;           // job_arrival: the arriving job (operation indices rebased on arrival)
  int machine = -1;  // machine_failure / machine_recovery
  Time duration = 0.0;  // machine_failure: implied recovery after this long
};

struct DisturbanceScript {
  std::vector<Disturbance> events;  // times non-decreasing

  // Throws DomainError if times decrease, a failure has non-positive
  // duration, or a referenced machine is out of range for `machine_count`.
  void validate(int machine_count) const;
};

}  // namespace dsched
