#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "dsched/core/disturbance.hpp"
#include "dsched/core/types.hpp"

namespace dsched {

enum class OpPhase { unreleased, ready, running, suspended, complete };

struct OpProgress {
  OpPhase phase = OpPhase::unreleased;
  Time ready_since = 0.0;
  // running: time left on the assigned machine; suspended: time that was left
  // on `machine` when the failure hit. Transferring a suspended remainder to
  // machine k scales it by p_k / p_machine (same machine resumes exactly).
  Time remaining = 0.0;
  int machine = -1;
  Time completion = -1.0;
  Time processed = 0.0;  // total executed duration across segments
};

enum class MachinePhase { idle, busy, failed };

struct MachineState {
  MachinePhase phase = MachinePhase::idle;
  int job_id = -1, op_index = -1;  // valid while busy
  Time busy_until = 0.0;           // busy: scheduled completion instant
  Time segment_start = 0.0;        // busy: start of the current segment
  Time failed_since = 0.0;
  Time recover_at = std::numeric_limits<Time>::infinity();
  Time busy_total = 0.0;  // closed segments only
  Time failed_total = 0.0;

  Time workload_at(Time clock) const {
    return busy_total + (phase == MachinePhase::busy ? clock - segment_start : 0.0);
  }
  Time failed_time_at(Time clock) const {
    return failed_total + (phase == MachinePhase::failed ? clock - failed_since : 0.0);
  }
  Time idle_time_at(Time clock) const {
    return clock - workload_at(clock) - failed_time_at(clock);
  }
};

// Self-contained view a policy may inspect. `jobs` is the runtime job table:
// instance jobs followed by scripted arrivals in script order.
struct SimState {
  Time clock = 0.0;
  int machine_count = 0;
  std::vector<Job> jobs;
  std::vector<bool> arrived;
  std::vector<std::vector<OpProgress>> progress;  // [job][op]
  std::vector<MachineState> machines;

  const Operation& operation(int job_id, int op_index) const {
    return jobs[static_cast<std::size_t>(job_id)].operations[static_cast<std::size_t>(op_index)];
  }
  const Operation& operation(const Action& a) const { return operation(a.job_id, a.op_index); }
  const OpProgress& progress_of(const Action& a) const {
    return progress[static_cast<std::size_t>(a.job_id)][static_cast<std::size_t>(a.op_index)];
  }
  // Next dispatchable op of a job, -1 if none (not arrived, running or done).
  int frontier_op(int job_id) const;
  bool all_complete() const;
};

// Exactly the actions satisfying readiness, eligibility, machine idleness and
// non-failure, in canonical (job_id, op_index, machine) ascending order.
std::vector<Action> feasible_actions(const SimState& state);

struct CompletionEvent {
  Time time = 0.0;
  int job_id = 0;
  int op_index = 0;
};

// Discrete-event simulation of one episode. Scripted arrivals are registered
// in the job table up front (unarrived) so completion bookkeeping is stable.
// Simultaneous events are applied in the fixed order: machine recoveries,
// operation completions, machine failures, job arrivals.
class Simulator {
 public:
  Simulator(const Instance& instance, const DisturbanceScript& script);

  const SimState& state() const { return state_; }
  const std::vector<CompletionEvent>& completions() const { return completions_; }
  const std::vector<GanttSegment>& gantt() const { return gantt_; }

  bool done() const { return state_.all_complete(); }
  bool has_pending_event() const;
  Time next_event_time() const;  // infinity when nothing is pending
  std::size_t pending_event_count() const;

  // Starts the operation on the machine at the current clock.
  // Throws SimError if the action is infeasible.
  void start(const Action& action);

  // Advances the clock to the next event and applies every event due at that
  // instant. Returns elapsed time. Throws SimError when nothing is pending or
  // a scripted event would move the clock backward.
  Time advance();

  // Fires all events due exactly now (zero elapsed time). Called by the
  // episode loop before opening a decision epoch.
  void settle();

  // External events consumed so far, usable as the recorded disturbance
  // script for sandbox replays.
  DisturbanceScript recorded_events() const;

  ScheduleResult result() const;  // valid once done()

 private:
  void apply_recovery(int machine);
  void apply_completion(int machine);
  void apply_failure(int machine, Time duration);
  void apply_arrival(int job_id);

  SimState state_;
  std::vector<Disturbance> external_;  // script + instance arrivals, time-ordered
  std::size_t cursor_ = 0;
  std::vector<int> arrival_job_of_event_;  // job table index per external event, -1 otherwise
  std::vector<CompletionEvent> completions_;
  std::vector<GanttSegment> gantt_;
  std::vector<Time> completion_times_;
  long decision_count_ = 0;

  friend ScheduleResult run_episode(const Instance&, const DisturbanceScript&,
                                    const std::function<std::optional<Action>(const SimState&)>&,
                                    const struct EpisodeHooks&);
};

using Policy = std::function<std::optional<Action>(const SimState&)>;

struct EpisodeHooks {
  // Called once per decision epoch (state, chosen action or wait, policy latency in µs).
  std::function<void(const SimState&, const std::optional<Action>&, double)> on_decision;
  std::function<void(const CompletionEvent&, const SimState&)> on_completion;
  // Called after events fired, before the epoch opens; lets adaptive policies
  // observe disturbances as they land.
  std::function<void(const SimState&)> on_clock;
};

// Runs until every operation of every (initial + arrived) job completes.
// The policy is consulted only when feasible actions exist; it may return
// wait, bounded by the livelock guard (2x pending events of consecutive
// no-progress waits).
ScheduleResult run_episode(const Instance& instance, const DisturbanceScript& script,
                           const Policy& policy, const EpisodeHooks& hooks = {});

}  // namespace dsched
