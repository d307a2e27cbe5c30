#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dsched/delib/proposer.hpp"
#include "dsched/delib/validator.hpp"
#include "dsched/reactive/handle.hpp"
#include "dsched/repo/repository.hpp"

namespace dsched {

struct CycleLimits {
  int max_iters = 3;
};

enum class CycleOutcomeKind { accepted, rejected, backend_error };

// One line per cycle step for the trajectory log.
struct TrajectoryStep {
  std::string phase;          // summarize | retrieve | plan | synthesize |
                              // validate_rule | validate_candidate | reflect | swap
  std::string input_digest;   // hex of the step input
  std::string output_digest;  // hex of the step output
  std::string verdict;        // ok | accepted | rejected:<reason> | backend_error
};

std::string format_trajectory_line(const TrajectoryStep& s);

struct CycleOutcome {
  CycleOutcomeKind kind = CycleOutcomeKind::rejected;
  std::uint64_t deployment = 0;   // handle deployment id after an accepting swap
  std::string accepted_rule;      // source text of the winner
  int iterations = 0;             // proposal iterations executed
  std::vector<TrajectoryStep> trajectory;
};

// Instrumentation for the safety gate: invoked immediately before any swap
// with the winning rule and its report. Tests assert report.accepted here.
using SwapGate = std::function<void(const CompiledRule&, const ValidationReport&)>;

// Everything frozen for one cycle.
struct CycleContext {
  SummaryProfile profile;   // summarize() output at trigger time
  EvalPool pool;            // sandbox replays, refreshed only between cycles
  MetaFeatures meta;        // live instance topology
  std::string benchmark;    // provenance label for repository inserts
  RetrievalConfig retrieval;
  ValidationThresholds thresholds;
  CycleLimits limits;
  bool parallel_validation = true;
  bool retrieval_enabled = true;  // false: cold-start variant, no repository reads
  SwapGate swap_gate;       // optional
};

// plan -> synthesize -> validate_rule -> validate_candidate -> reflect,
// looping while the reflector keeps going and iterations remain. Accepted
// candidates compete on r_t - lambda2*ln(1+C); the winner is swapped into the
// handle and recorded in the repository with v = r_t. Backend exceptions
// leave the incumbent untouched and yield backend_error.
CycleOutcome deliberation_cycle(ActiveRuleHandle& handle, RuleRepository& repository,
                                ProposerBackend& backend, RuleValidator& validator,
                                const CycleContext& ctx);

}  // namespace dsched
