#include "dsched/core/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace dsched {

int SimState::frontier_op(int job_id) const {
  if (!arrived[static_cast<std::size_t>(job_id)]) return -1;
  const auto& ops = progress[static_cast<std::size_t>(job_id)];
  for (std::size_t j = 0; j < ops.size(); ++j) {
    switch (ops[j].phase) {
      case OpPhase::complete:
        continue;
      case OpPhase::ready:
      case OpPhase::suspended:
        return static_cast<int>(j);
      case OpPhase::running:
      case OpPhase::unreleased:
        return -1;
    }
  }
  return -1;
}

bool SimState::all_complete() const {
  for (const auto& ops : progress)
    for (const auto& op : ops)
      if (op.phase != OpPhase::complete) return false;
  return true;
}

std::vector<Action> feasible_actions(const SimState& state) {
  std::vector<Action> actions;
  for (std::size_t i = 0; i < state.jobs.size(); ++i) {
    int j = state.frontier_op(static_cast<int>(i));
    if (j < 0) continue;
    const Operation& op = state.operation(static_cast<int>(i), j);
    for (const auto& [machine, time] : op.alternatives) {
      if (state.machines[static_cast<std::size_t>(machine)].phase == MachinePhase::idle)
        actions.push_back(Action{static_cast<int>(i), j, machine});
    }
  }
  return actions;  // canonical by construction: jobs ascending, alternatives sorted
}

Simulator::Simulator(const Instance& instance, const DisturbanceScript& script) {
  instance.validate();
  script.validate(instance.machine_count);

  state_.machine_count = instance.machine_count;
  state_.machines.resize(static_cast<std::size_t>(instance.machine_count));
  state_.jobs = instance.jobs;

  // Instance jobs arriving later become arrival events alongside the script.
  for (const auto& job : instance.jobs) {
    if (job.arrival_time > 0.0) {
      Disturbance ev;
      ev.kind = Disturbance::Kind::job_arrival;
      ev.time = job.arrival_time;
      external_.push_back(ev);
      arrival_job_of_event_.push_back(job.id);
    }
  }
  std::size_t instance_arrivals = external_.size();
  for (const auto& ev : script.events) {
    external_.push_back(ev);
    if (ev.kind == Disturbance::Kind::job_arrival) {
      Job job = ev.job;
      job.id = static_cast<int>(state_.jobs.size());
      for (auto& op : job.operations) op.job_id = job.id;
      arrival_job_of_event_.push_back(job.id);
      state_.jobs.push_back(std::move(job));
    } else {
      arrival_job_of_event_.push_back(-1);
    }
  }
  // Keep script order among equal times; instance arrivals sort in by time.
  std::vector<std::size_t> order(external_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return external_[a].time < external_[b].time;
  });
  std::vector<Disturbance> sorted_events;
  std::vector<int> sorted_jobs;
  for (std::size_t idx : order) {
    sorted_events.push_back(external_[idx]);
    sorted_jobs.push_back(arrival_job_of_event_[idx]);
  }
  external_ = std::move(sorted_events);
  arrival_job_of_event_ = std::move(sorted_jobs);
  (void)instance_arrivals;

  state_.arrived.assign(state_.jobs.size(), false);
  state_.progress.resize(state_.jobs.size());
  for (std::size_t i = 0; i < state_.jobs.size(); ++i)
    state_.progress[i].resize(state_.jobs[i].operations.size());
  completion_times_.assign(state_.jobs.size(), -1.0);

  for (const auto& job : instance.jobs) {
    if (job.arrival_time <= 0.0) apply_arrival(job.id);
  }
}

bool Simulator::has_pending_event() const {
  return next_event_time() != std::numeric_limits<Time>::infinity();
}

Time Simulator::next_event_time() const {
  Time t = std::numeric_limits<Time>::infinity();
  for (const auto& m : state_.machines) {
    if (m.phase == MachinePhase::busy) t = std::min(t, m.busy_until);
    if (m.phase == MachinePhase::failed) t = std::min(t, m.recover_at);
  }
  if (cursor_ < external_.size()) t = std::min(t, external_[cursor_].time);
  return t;
}

std::size_t Simulator::pending_event_count() const {
  std::size_t n = external_.size() - cursor_;
  for (const auto& m : state_.machines) {
    if (m.phase == MachinePhase::busy) ++n;
    if (m.phase == MachinePhase::failed && std::isfinite(m.recover_at)) ++n;
  }
  return n;
}

void Simulator::start(const Action& action) {
  if (action.job_id < 0 || action.job_id >= static_cast<int>(state_.jobs.size()))
    throw SimError("action references unknown job");
  if (state_.frontier_op(action.job_id) != action.op_index)
    throw SimError("action targets an operation that is not ready");
  auto& machine = state_.machines[static_cast<std::size_t>(action.machine)];
  if (machine.phase != MachinePhase::idle)
    throw SimError("machine " + std::to_string(action.machine) + " is not idle");
  const Operation& op = state_.operation(action);
  if (!op.eligible_on(action.machine))
    throw SimError("machine " + std::to_string(action.machine) + " not eligible for operation");

  auto& prog = state_.progress[static_cast<std::size_t>(action.job_id)]
                              [static_cast<std::size_t>(action.op_index)];
  Time planned;
  if (prog.phase == OpPhase::ready) {
    planned = op.time_on(action.machine);
  } else {  // suspended: remainder transfers at the fraction left
    planned = action.machine == prog.machine
                  ? prog.remaining
                  : prog.remaining * (op.time_on(action.machine) / op.time_on(prog.machine));
  }
  prog.phase = OpPhase::running;
  prog.machine = action.machine;
  prog.remaining = planned;

  machine.phase = MachinePhase::busy;
  machine.job_id = action.job_id;
  machine.op_index = action.op_index;
  machine.segment_start = state_.clock;
  machine.busy_until = state_.clock + planned;
}

Time Simulator::advance() {
  Time t = next_event_time();
  if (t == std::numeric_limits<Time>::infinity())
    throw SimError("advance with no pending event");
  if (t < state_.clock) throw SimError("clock would move backward");
  Time elapsed = t - state_.clock;
  state_.clock = t;

  // Consume every external record due at t, bucketed by kind.
  std::vector<std::pair<int, Time>> failures;
  std::vector<int> recoveries;
  std::vector<int> arrivals;
  while (cursor_ < external_.size() && external_[cursor_].time == t) {
    const Disturbance& ev = external_[cursor_];
    switch (ev.kind) {
      case Disturbance::Kind::machine_recovery:
        recoveries.push_back(ev.machine);
        break;
      case Disturbance::Kind::machine_failure:
        failures.emplace_back(ev.machine, ev.duration);
        break;
      case Disturbance::Kind::job_arrival:
        arrivals.push_back(arrival_job_of_event_[cursor_]);
        break;
    }
    ++cursor_;
  }

  // Fixed simultaneous-event order: recoveries, completions, failures, arrivals.
  for (std::size_t m = 0; m < state_.machines.size(); ++m) {
    if (state_.machines[m].phase == MachinePhase::failed && state_.machines[m].recover_at == t)
      apply_recovery(static_cast<int>(m));
  }
  for (int m : recoveries) apply_recovery(m);
  for (std::size_t m = 0; m < state_.machines.size(); ++m) {
    if (state_.machines[m].phase == MachinePhase::busy && state_.machines[m].busy_until == t)
      apply_completion(static_cast<int>(m));
  }
  for (const auto& [m, duration] : failures) apply_failure(m, duration);
  for (int job : arrivals) apply_arrival(job);

  return elapsed;
}

void Simulator::settle() {
  while (has_pending_event() && next_event_time() == state_.clock) advance();
}

void Simulator::apply_recovery(int machine) {
  auto& m = state_.machines[static_cast<std::size_t>(machine)];
  if (m.phase != MachinePhase::failed) return;  // scripted recover of a healthy machine: no-op
  m.failed_total += state_.clock - m.failed_since;
  m.phase = MachinePhase::idle;
  m.recover_at = std::numeric_limits<Time>::infinity();
}

void Simulator::apply_completion(int machine) {
  auto& m = state_.machines[static_cast<std::size_t>(machine)];
  auto& prog = state_.progress[static_cast<std::size_t>(m.job_id)]
                              [static_cast<std::size_t>(m.op_index)];
  Time duration = state_.clock - m.segment_start;
  gantt_.push_back(GanttSegment{machine, m.job_id, m.op_index, m.segment_start, state_.clock});
  prog.processed += duration;
  prog.phase = OpPhase::complete;
  prog.completion = state_.clock;
  prog.remaining = 0.0;
  completions_.push_back(CompletionEvent{state_.clock, m.job_id, m.op_index});

  const auto& job = state_.jobs[static_cast<std::size_t>(m.job_id)];
  if (m.op_index + 1 < static_cast<int>(job.operations.size())) {
    auto& next = state_.progress[static_cast<std::size_t>(m.job_id)]
                                [static_cast<std::size_t>(m.op_index) + 1];
    next.phase = OpPhase::ready;
    next.ready_since = state_.clock;
  } else {
    completion_times_[static_cast<std::size_t>(m.job_id)] = state_.clock;
  }

  m.busy_total += duration;
  m.phase = MachinePhase::idle;
  m.job_id = m.op_index = -1;
}

void Simulator::apply_failure(int machine, Time duration) {
  auto& m = state_.machines[static_cast<std::size_t>(machine)];
  if (m.phase == MachinePhase::busy) {
    Time elapsed = state_.clock - m.segment_start;
    auto& prog = state_.progress[static_cast<std::size_t>(m.job_id)]
                                [static_cast<std::size_t>(m.op_index)];
    gantt_.push_back(GanttSegment{machine, m.job_id, m.op_index, m.segment_start, state_.clock});
    prog.processed += elapsed;
    prog.remaining -= elapsed;
    prog.phase = OpPhase::suspended;  // back in the ready set, any eligible machine may resume it
    prog.ready_since = state_.clock;
    m.busy_total += elapsed;
    m.job_id = m.op_index = -1;
  }
  if (m.phase == MachinePhase::failed) {
    m.recover_at = std::max(m.recover_at, state_.clock + duration);
  } else {
    m.phase = MachinePhase::failed;
    m.failed_since = state_.clock;
    m.recover_at = state_.clock + duration;
  }
}

void Simulator::apply_arrival(int job_id) {
  auto arrived = state_.arrived[static_cast<std::size_t>(job_id)];
  if (arrived) return;
  arrived = true;
  auto& first = state_.progress[static_cast<std::size_t>(job_id)][0];
  first.phase = OpPhase::ready;
  first.ready_since = state_.clock;
}

DisturbanceScript Simulator::recorded_events() const {
  DisturbanceScript script;
  script.events.assign(external_.begin(), external_.begin() + static_cast<long>(cursor_));
  return script;
}

ScheduleResult Simulator::result() const {
  ScheduleResult r;
  r.completion_times = completion_times_;
  r.makespan = 0.0;
  for (Time c : completion_times_) r.makespan = std::max(r.makespan, c);
  r.gantt = gantt_;
  r.decision_count = decision_count_;
  return r;
}

ScheduleResult run_episode(const Instance& instance, const DisturbanceScript& script,
                           const Policy& policy, const EpisodeHooks& hooks) {
  Simulator sim(instance, script);
  std::size_t completion_seen = 0;
  long consecutive_waits = 0;

  auto flush_completions = [&]() {
    if (!hooks.on_completion) return;
    const auto& log = sim.completions();
    for (; completion_seen < log.size(); ++completion_seen)
      hooks.on_completion(log[completion_seen], sim.state());
  };

  sim.settle();
  flush_completions();
  if (hooks.on_clock) hooks.on_clock(sim.state());

  while (!sim.done()) {
    std::vector<Action> actions = feasible_actions(sim.state());
    if (!actions.empty()) {
      auto t0 = std::chrono::steady_clock::now();
      std::optional<Action> choice = policy(sim.state());
      auto t1 = std::chrono::steady_clock::now();
      double latency_us = std::chrono::duration<double, std::micro>(t1 - t0).count();
      ++sim.decision_count_;
      if (hooks.on_decision) hooks.on_decision(sim.state(), choice, latency_us);

      if (choice) {
        if (std::find(actions.begin(), actions.end(), *choice) == actions.end())
          throw SimError("policy returned infeasible action");
        sim.start(*choice);
        consecutive_waits = 0;
        continue;
      }
      ++consecutive_waits;
      if (!sim.has_pending_event())
        throw SimError("livelock: policy waits but no event is pending");
      if (consecutive_waits > 2 * static_cast<long>(sim.pending_event_count()))
        throw SimError("livelock: policy keeps waiting with dispatchable work");
    } else {
      if (!sim.has_pending_event())
        throw SimError("deadlock: incomplete operations but nothing pending");
      consecutive_waits = 0;  // forced wait, not a policy choice
    }

    sim.advance();
    sim.settle();
    flush_completions();
    if (hooks.on_clock) hooks.on_clock(sim.state());
  }

  return sim.result();
}

}  // namespace dsched
