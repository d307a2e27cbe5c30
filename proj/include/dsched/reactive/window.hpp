#pragma once

#include <cstdint>
#include <deque>
#include <mutex>
#include <string>
#include <vector>

#include "dsched/core/sim.hpp"
#include "dsched/core/types.hpp"

namespace dsched {

struct DecisionRecord {
  long long epoch = 0;  // 1-based decision epoch index
  Time clock = 0.0;
  bool wait = false;
  Action action;  // meaningful when !wait
  std::size_t candidate_count = 0;
  std::uint64_t rule_version = 0;  // deployment id observed by this dispatch
  double latency_us = 0.0;
};

// Line format: epoch clock action candidates version latency_us
std::string format_decision_line(const DecisionRecord& r);

// Ring buffers of the last W decisions and completions, written by the
// simulation thread; the deliberative worker reads via snapshot(). The
// monitored metric m_t is rolling throughput: buffered completions per time
// unit since the window reference instant (episode start until the
// completion buffer first overflows, then the newest evicted completion).
class ObservationWindow {
 public:
  explicit ObservationWindow(std::size_t capacity = 50, std::size_t history_capacity = 64);

  void record_decision(const DecisionRecord& r);
  void record_completion(const CompletionEvent& e);
  double throughput(Time clock) const;  // m_t; 0 before time accrues
  void sample_metric(Time clock);       // appends m_t to the history

  struct Snapshot {
    std::vector<DecisionRecord> decisions;
    std::vector<CompletionEvent> completions;
    std::vector<double> metric_history;  // oldest first
    Time reference_time = 0.0;
  };
  Snapshot snapshot() const;

  std::size_t capacity() const { return capacity_; }

 private:
  double throughput_locked(Time clock) const;

  std::size_t capacity_;
  std::size_t history_capacity_;
  mutable std::mutex mu_;
  std::deque<DecisionRecord> decisions_;
  std::deque<CompletionEvent> completions_;
  std::deque<double> history_;
  Time reference_time_ = 0.0;
};

// Compact profile of the window + shop state consumed by deliberation.
struct SummaryProfile {
  std::size_t window_len = 0;
  double mean_utilization = 0.0;  // busy share of elapsed time, averaged
  double max_utilization = 0.0;
  std::vector<int> queue_lengths;      // per machine: dispatchable ops eligible on it
  int bottleneck_machine = -1;         // argmax workload share; -1 before any work
  double mean_job_wait = 0.0;          // over currently dispatchable frontier ops
  double throughput = 0.0;             // m_t
  std::vector<double> metric_history;  // recent m_t samples, oldest first
  std::string current_rule;
  std::vector<int> active_failures;  // failed machine ids
  std::string objective = "makespan";
};

SummaryProfile summarize(const ObservationWindow& window, const SimState& state,
                         const std::string& rule_source);

}  // namespace dsched
