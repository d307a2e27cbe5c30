#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "dsched/core/oracle.hpp"
#include "dsched/core/types.hpp"
#include "dsched/delib/proposer.hpp"
#include "dsched/harness/adaptive.hpp"

namespace dsched {

// Relative percent deviation from the best value: 100 * (value - best) / best.
// Throws DomainError unless best > 0.
double rpd(double value, double best);

// Mid-rank convention: ascending order, ties share the mean of the positions
// they span. Lower values rank better (rank 1 is best).
std::vector<double> midranks(const std::vector<double>& values);

// One benchmarked configuration. Static policies dispatch a fixed rule
// (builtin name or rule text); adaptive policies run the dual-stream engine
// seeded from `rule` with `adaptive` as tuning.
struct PolicySpec {
  std::string name;
  std::string rule = "FIFO";
  bool is_adaptive = false;
  AdaptiveConfig adaptive;
  bool cold_start_each_episode = false;  // discard the repository between episodes
};

struct BenchConfig {
  std::vector<std::pair<std::string, Instance>> instances;  // (id, instance)
  std::vector<DisturbanceScript> scripts;  // parallel to instances; empty = none
  std::vector<PolicySpec> policies;
  int episodes = 1;            // per (instance, policy) cell; the cell value is the mean
  std::uint64_t seed = 1;      // backend seed base, shared across policies per instance
  bool serialized = false;
  bool use_oracle = true;      // row best from enumeration when within cap
  OracleLimits oracle;
  // Backend per (instance, policy) cell; defaults to the mock proposer.
  std::function<std::unique_ptr<ProposerBackend>(std::uint64_t seed)> backend_factory;

  void validate() const;  // >= 1 policy, >= 1 instance, episodes >= 1
};

struct MetricsRow {
  std::string instance_id;
  std::vector<double> makespan;  // per policy, mean over episodes; NaN on failure
  std::vector<double> rpd;       // per policy
  std::vector<double> rank;      // per policy, mid-rank
  double best = 0.0;
  bool oracle_best = false;  // best came from enumeration, not the row minimum
  std::string error;         // non-empty: row failed and is excluded from summaries
};

struct BenchReport {
  std::vector<std::string> policies;  // column order
  std::vector<MetricsRow> rows;
  std::vector<double> mean_rpd;   // per policy over non-failed rows
  std::vector<double> mean_rank;  // per policy over non-failed rows
};

BenchReport run_benchmark(const BenchConfig& config);

// The four structural variants, identical seeds and instances: Full,
// w/o Loop (one candidate per trigger), w/o Repo (cold start, retrieval
// disabled), w/o Both. `base` supplies the shared adaptive tuning.
BenchReport run_ablation(const BenchConfig& config, const AdaptiveConfig& base);

struct StressScenario {
  Instance instance;
  Time t_fail = 12.0;
  int failed_machine = 0;
  Time failure_duration = 8.0;
  std::size_t window_capacity = 50;

  void validate() const;  // t_fail >= 0, duration > 0, machine in range
  DisturbanceScript script() const;
};

// Deterministic default: a generated 10x5 shop, failure on the machine that
// carries the most work under the initial rule, struck mid-episode.
StressScenario default_stress_scenario(std::uint64_t seed = 1);

struct StressSeries {
  std::string policy;
  std::vector<std::pair<Time, double>> throughput;  // sampled at completions
  double final_makespan = 0.0;
  std::string final_rule;
  int accepted_cycles = 0;
};

struct StressReport {
  std::vector<StressSeries> runs;
};

StressReport run_stress(const StressScenario& scenario, const BenchConfig& config);

struct LatencyStats {
  double median_us = 0.0;
  double p99_us = 0.0;
  long long samples = 0;
};

struct LatencyReport {
  LatencyStats dispatch;             // asynchronous mode, reactive stream
  LatencyStats dispatch_serialized;  // serialized mode, reactive stream
  LatencyStats cycle;                // deliberation cycles, wall time
  double ratio = 0.0;                // cycle median / dispatch median
};

// Measures both streams on the configured suite (mock backend by default);
// dispatch latency comes from the per-decision records.
LatencyReport run_latency(const BenchConfig& config);

// Plain-text table and machine-readable CSV renderings.
std::string format_metrics_table(const BenchReport& report);
std::string metrics_csv(const BenchReport& report);
std::string stress_csv(const StressReport& report);  // long format: time,throughput,policy
std::string format_latency_report(const LatencyReport& report);
std::string latency_csv(const LatencyReport& report);

// JSON round-trip for the adaptive engine knobs (config files, variant flag
// dumps). The swap gate is runtime-only and not serialized.
std::string adaptive_config_json(const AdaptiveConfig& config);
AdaptiveConfig adaptive_config_from_json(const std::string& text);

}  // namespace dsched
