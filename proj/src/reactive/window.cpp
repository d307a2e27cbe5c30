#include "dsched/reactive/window.hpp"

#include <algorithm>
#include <sstream>

namespace dsched {

std::string format_decision_line(const DecisionRecord& r) {
  std::ostringstream os;
  os << r.epoch << ' ' << r.clock << ' ';
  if (r.wait)
    os << "wait";
  else
    os << 'j' << r.action.job_id << ".o" << r.action.op_index << ".m" << r.action.machine;
  os << ' ' << r.candidate_count << " v" << r.rule_version << ' ' << r.latency_us;
  return os.str();
}

ObservationWindow::ObservationWindow(std::size_t capacity, std::size_t history_capacity)
    : capacity_(std::max<std::size_t>(1, capacity)),
      history_capacity_(std::max<std::size_t>(1, history_capacity)) {}

void ObservationWindow::record_decision(const DecisionRecord& r) {
  std::lock_guard<std::mutex> lock(mu_);
  decisions_.push_back(r);
  if (decisions_.size() > capacity_) decisions_.pop_front();
}

void ObservationWindow::record_completion(const CompletionEvent& e) {
  std::lock_guard<std::mutex> lock(mu_);
  completions_.push_back(e);
  if (completions_.size() > capacity_) {
    reference_time_ = completions_.front().time;
    completions_.pop_front();
  }
}

double ObservationWindow::throughput_locked(Time clock) const {
  Time elapsed = clock - reference_time_;
  if (elapsed <= 0.0) return 0.0;
  return static_cast<double>(completions_.size()) / elapsed;
}

double ObservationWindow::throughput(Time clock) const {
  std::lock_guard<std::mutex> lock(mu_);
  return throughput_locked(clock);
}

void ObservationWindow::sample_metric(Time clock) {
  std::lock_guard<std::mutex> lock(mu_);
  history_.push_back(throughput_locked(clock));
  if (history_.size() > history_capacity_) history_.pop_front();
}

ObservationWindow::Snapshot ObservationWindow::snapshot() const {
  std::lock_guard<std::mutex> lock(mu_);
  Snapshot s;
  s.decisions.assign(decisions_.begin(), decisions_.end());
  s.completions.assign(completions_.begin(), completions_.end());
  s.metric_history.assign(history_.begin(), history_.end());
  s.reference_time = reference_time_;
  return s;
}

SummaryProfile summarize(const ObservationWindow& window, const SimState& state,
                         const std::string& rule_source) {
  auto snap = window.snapshot();
  SummaryProfile p;
  p.window_len = snap.decisions.size();
  p.metric_history = snap.metric_history;
  p.throughput = window.throughput(state.clock);
  p.current_rule = rule_source;

  double util_sum = 0.0;
  double best_share = 0.0;
  for (std::size_t m = 0; m < state.machines.size(); ++m) {
    const MachineState& ms = state.machines[m];
    double load = ms.workload_at(state.clock);
    double util = state.clock > 0.0 ? load / state.clock : 0.0;
    util_sum += util;
    p.max_utilization = std::max(p.max_utilization, util);
    if (load > best_share) {
      best_share = load;
      p.bottleneck_machine = static_cast<int>(m);
    }
    if (ms.phase == MachinePhase::failed) p.active_failures.push_back(static_cast<int>(m));
  }
  if (!state.machines.empty()) p.mean_utilization = util_sum / state.machines.size();

  p.queue_lengths.assign(state.machines.size(), 0);
  double wait_sum = 0.0;
  int waiting = 0;
  for (std::size_t i = 0; i < state.jobs.size(); ++i) {
    int j = state.frontier_op(static_cast<int>(i));
    if (j < 0) continue;
    const Operation& op = state.operation(static_cast<int>(i), j);
    for (const auto& [machine, time] : op.alternatives)
      ++p.queue_lengths[static_cast<std::size_t>(machine)];
    wait_sum += state.clock -
                state.progress[i][static_cast<std::size_t>(j)].ready_since;
    ++waiting;
  }
  if (waiting > 0) p.mean_job_wait = std::max(0.0, wait_sum / waiting);
  return p;
}

}  // namespace dsched
