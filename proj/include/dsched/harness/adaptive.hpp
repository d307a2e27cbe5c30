#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dsched/core/sim.hpp"
#include "dsched/core/types.hpp"
#include "dsched/delib/cycle.hpp"
#include "dsched/delib/proposer.hpp"
#include "dsched/delib/trigger.hpp"
#include "dsched/delib/validator.hpp"
#include "dsched/reactive/window.hpp"
#include "dsched/repo/repository.hpp"
#include "dsched/rules/engine.hpp"

namespace dsched {

// One episode of the full dual-stream engine: every decision epoch dispatches
// through the active-rule handle; the trigger protocol decides when a
// deliberation cycle runs. Asynchronous mode hands the cycle to a worker
// thread and keeps dispatching (triggers arriving while a cycle is in flight
// coalesce); serialized mode runs the cycle inline at the trigger epoch, so
// repeated runs are bit-identical.
struct AdaptiveConfig {
  std::string initial_rule = "job_wait_time";  // FIFO
  TriggerConfig trigger;
  ValidationThresholds thresholds;
  RetrievalConfig retrieval;
  CycleLimits limits;
  bool serialized = false;
  bool retrieval_enabled = true;  // false: cold-start ablation, repository never read
  bool parallel_validation = true;
  std::size_t window_capacity = 50;
  std::uint64_t pool_seed = 1;    // sandbox pools use pool_seed + cycle index
  std::string benchmark = "run";  // provenance label for repository inserts
  bool log_decisions = false;     // keep the full decision log in the result
  bool log_trajectory = false;    // keep concatenated cycle trajectories
  SwapGate swap_gate;             // safety-gate instrumentation, optional
};

struct AdaptiveResult {
  ScheduleResult schedule;
  long long epochs = 0;
  int triggers = 0;   // epochs where the periodic or performance trigger fired
  int coalesced = 0;  // triggers skipped because a cycle was already in flight
  int cycles = 0;
  int accepted = 0;
  int rejected = 0;
  int backend_errors = 0;
  std::uint64_t deployments = 1;  // handle installations, initial rule included
  std::string final_rule;
  std::vector<std::pair<Time, double>> throughput_series;  // (clock, m_t) per completion
  std::vector<double> cycle_latencies_us;                  // wall time per cycle
  std::vector<DecisionRecord> decisions;                   // when log_decisions
  std::vector<TrajectoryStep> trajectory;                  // when log_trajectory
};

AdaptiveResult run_adaptive_episode(const Instance& instance, const DisturbanceScript& script,
                                    ProposerBackend& backend, RuleRepository& repository,
                                    RuleValidator& validator, const AdaptiveConfig& config);

// Static-rule baseline over the same loop and observability (decision log,
// throughput series), with deliberation absent rather than disabled halfway.
AdaptiveResult run_static_episode(const Instance& instance, const DisturbanceScript& script,
                                  const CompiledRule& rule, std::size_t window_capacity = 50,
                                  bool log_decisions = false);

}  // namespace dsched
