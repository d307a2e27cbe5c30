#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dsched {

// Simulation time in abstract units. Scripted benchmarks use exact literals,
// so comparisons against scripted event times are exact.
using Time = double;

class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

class SimError : public std::runtime_error {
 public:
  explicit SimError(const std::string& what) : std::runtime_error(what) {}
};

struct Operation {
  int job_id = 0;
  int op_index = 0;  // 0-based position within the job
  // (machine, processing time), kept sorted by machine id
  std::vector<std::pair<int, Time>> alternatives;

  bool eligible_on(int machine) const;
  Time time_on(int machine) const;  // throws DomainError if not eligible
  Time min_time() const;
};

struct Job {
  int id = 0;
  Time arrival_time = 0.0;  // 0 for initially present jobs
  std::vector<Operation> operations;
};

struct Instance {
  std::string name;
  int machine_count = 0;
  std::vector<Job> jobs;

  int total_operations() const;
  // Throws DomainError on any broken invariant: empty jobs/alternatives,
  // machine index out of range, non-positive or non-finite times,
  // inconsistent job/op indices.
  void validate() const;
};

struct Action {
  int job_id = 0;
  int op_index = 0;
  int machine = 0;

  friend bool operator==(const Action&, const Action&) = default;
};

// Canonical dispatch order: (job_id, op_index, machine) ascending.
bool canonical_less(const Action& a, const Action& b);

struct GanttSegment {
  int machine = 0;
  int job_id = 0;
  int op_index = 0;
  Time start = 0.0;
  Time end = 0.0;

  Time duration() const { return end - start; }
  friend bool operator==(const GanttSegment&, const GanttSegment&) = default;
};

struct ScheduleResult {
  std::vector<Time> completion_times;  // per job, aligned with the runtime job table
  Time makespan = 0.0;
  std::vector<GanttSegment> gantt;
  long decision_count = 0;

  // Verifies conservation, machine exclusivity and precedence on the gantt.
  // Throws SimError with a description of the first violation.
  void check(const std::vector<Job>& jobs) const;
};

}  // namespace dsched
