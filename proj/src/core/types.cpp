#include "dsched/core/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace dsched {

bool Operation::eligible_on(int machine) const {
  for (const auto& [m, t] : alternatives)
    if (m == machine) return true;
  return false;
}

Time Operation::time_on(int machine) const {
  for (const auto& [m, t] : alternatives)
    if (m == machine) return t;
  throw DomainError("operation (" + std::to_string(job_id) + "," + std::to_string(op_index) +
                    ") is not eligible on machine " + std::to_string(machine));
}

Time Operation::min_time() const {
  Time best = std::numeric_limits<Time>::infinity();
  for (const auto& [m, t] : alternatives) best = std::min(best, t);
  return best;
}

int Instance::total_operations() const {
  int n = 0;
  for (const auto& job : jobs) n += static_cast<int>(job.operations.size());
  return n;
}

void Instance::validate() const {
  if (machine_count < 1) throw DomainError("instance has no machines");
  if (jobs.empty()) throw DomainError("instance has no jobs");
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const Job& job = jobs[i];
    if (job.id != static_cast<int>(i))
      throw DomainError("job id " + std::to_string(job.id) + " does not match its position");
    if (job.operations.empty())
      throw DomainError("job " + std::to_string(job.id) + " has no operations");
    if (!(job.arrival_time >= 0.0) || !std::isfinite(job.arrival_time))
      throw DomainError("job " + std::to_string(job.id) + " has invalid arrival time");
    for (std::size_t j = 0; j < job.operations.size(); ++j) {
      const Operation& op = job.operations[j];
      if (op.job_id != job.id || op.op_index != static_cast<int>(j))
        throw DomainError("operation indices inconsistent in job " + std::to_string(job.id));
      if (op.alternatives.empty())
        throw DomainError("operation (" + std::to_string(job.id) + "," + std::to_string(j) +
                          ") has no eligible machines");
      int prev_machine = -1;
      for (const auto& [m, t] : op.alternatives) {
        if (m < 0 || m >= machine_count)
          throw DomainError("machine index " + std::to_string(m) + " out of range");
        if (m <= prev_machine)
          throw DomainError("alternatives not sorted or machine repeated in operation (" +
                            std::to_string(job.id) + "," + std::to_string(j) + ")");
        prev_machine = m;
        if (!(t > 0.0) || !std::isfinite(t))
          throw DomainError("non-positive processing time in operation (" +
                            std::to_string(job.id) + "," + std::to_string(j) + ")");
      }
    }
  }
}

bool canonical_less(const Action& a, const Action& b) {
  if (a.job_id != b.job_id) return a.job_id < b.job_id;
  if (a.op_index != b.op_index) return a.op_index < b.op_index;
  return a.machine < b.machine;
}

void ScheduleResult::check(const std::vector<Job>& jobs) const {
  // No overlap per machine.
  std::map<int, std::vector<GanttSegment>> per_machine;
  for (const auto& seg : gantt) {
    if (seg.end < seg.start) throw SimError("gantt segment runs backwards");
    per_machine[seg.machine].push_back(seg);
  }
  for (auto& [machine, segs] : per_machine) {
    std::sort(segs.begin(), segs.end(),
              [](const GanttSegment& a, const GanttSegment& b) { return a.start < b.start; });
    for (std::size_t i = 1; i < segs.size(); ++i) {
      if (segs[i].start < segs[i - 1].end)
        throw SimError("overlapping segments on machine " + std::to_string(machine));
    }
  }

  // Precedence within each job and per-operation processing conservation.
  for (const auto& job : jobs) {
    Time prev_end = -std::numeric_limits<Time>::infinity();
    for (const auto& op : job.operations) {
      Time op_start = std::numeric_limits<Time>::infinity();
      Time op_end = -std::numeric_limits<Time>::infinity();
      // Work is conserved as a fraction of the per-machine processing time so
      // that preempted operations resumed on a different machine still sum to
      // one full execution.
      double fraction = 0.0;
      bool found = false;
      for (const auto& seg : gantt) {
        if (seg.job_id != job.id || seg.op_index != op.op_index) continue;
        found = true;
        op_start = std::min(op_start, seg.start);
        op_end = std::max(op_end, seg.end);
        fraction += seg.duration() / op.time_on(seg.machine);
      }
      if (!found)
        throw SimError("operation (" + std::to_string(job.id) + "," +
                       std::to_string(op.op_index) + ") missing from gantt");
      if (std::abs(fraction - 1.0) > 1e-9)
        throw SimError("processing not conserved for operation (" + std::to_string(job.id) +
                       "," + std::to_string(op.op_index) + ")");
      if (op_start < prev_end)
        throw SimError("precedence violated in job " + std::to_string(job.id));
      prev_end = op_end;
    }
    if (job.id >= static_cast<int>(completion_times.size()) ||
        completion_times[job.id] != prev_end)
      throw SimError("completion time mismatch for job " + std::to_string(job.id));
  }
}

}  // namespace dsched
