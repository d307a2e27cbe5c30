#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dsched/core/disturbance.hpp"
#include "dsched/core/sim.hpp"
#include "dsched/core/types.hpp"
#include "dsched/rules/engine.hpp"

namespace dsched {

// One sandbox replay: an instance, its disturbance process, and a seed
// (recorded in the pool fingerprint; rule policies are deterministic).
struct EvalCase {
  Instance instance;
  DisturbanceScript script;
  std::uint64_t seed = 0;
  std::uint64_t digest() const;  // content digest of the triple
};

struct EvalPool {
  std::vector<EvalCase> cases;
};

// n seeded replays sharing the live instance's meta features: case 0 is the
// instance itself, the rest are generated lookalikes (same job/machine
// counts, op/flexibility/time ranges). Every case carries `recorded`, the
// disturbances observed so far.
EvalPool build_eval_pool(const Instance& current, const DisturbanceScript& recorded, int n,
                         std::uint64_t seed);

struct ValidationThresholds {
  double epsilon_rel = 0.01;  // minimum relative improvement r_t
  double d_min = 0.2;         // minimum effect size
  double t_alpha = 1.645;     // minimum t statistic (raw threshold constant)
  int n = 5;                  // episodes per policy
  void validate() const;      // n >= 2, all finite
};

struct ValidationReport {
  double mean_old = 0.0, mean_cand = 0.0;  // objective estimates (mean makespan)
  double var_old = 0.0, var_cand = 0.0;    // sample variances, n-1 denominator
  double r_t = 0.0;                        // relative improvement
  double pooled_var = 0.0;                 // s_p^2
  double d_eff = 0.0;                      // effect size
  double t_stat = 0.0;                     // two-sample T
  int episodes = 0;                        // n per arm
  bool accepted = false;
  int feasibility_failures = 0;            // candidate sandbox failures
  bool degenerate_variance = false;        // s_p^2 < 1e-12 convention applied
  std::uint64_t pool_fingerprint_old = 0;  // digests of the cases each arm consumed,
  std::uint64_t pool_fingerprint_cand = 0; // combined in case order; must match
  std::vector<double> y_old, y_cand;       // per-episode objectives (NaN = failed run)
};

// The statistics layer alone (Eqs. of the acceptance test), for fixed arrays.
// Requires equal sizes >= 2; feasibility is assumed clean.
ValidationReport validation_statistics(const std::vector<double>& y_old,
                                       const std::vector<double>& y_cand,
                                       const ValidationThresholds& thresholds);

// Runs both rules over the identical pool (paired replays), then applies the
// acceptance statistics. The candidate failing an episode records a
// feasibility failure and forces rejection; the incumbent failing is a hard
// error. `parallel` selects the OpenMP path over the serial reference; both
// produce identical reports.
ValidationReport validate_candidate(const CompiledRule& rule_old, const CompiledRule& rule_cand,
                                    const EvalPool& pool, const ValidationThresholds& thresholds,
                                    bool parallel = true);

// Generic engine beneath the rule API: arbitrary policy factories, one
// fresh policy per episode. Factories must be callable concurrently.
using PolicyFactory = std::function<Policy()>;
ValidationReport validate_candidate_policies(const PolicyFactory& old_factory,
                                             const PolicyFactory& cand_factory,
                                             const EvalPool& pool,
                                             const ValidationThresholds& thresholds,
                                             bool parallel = true);

// Objective of one sandbox replay under a rule (makespan). Throws on
// episode failure (livelock guard, invalid schedule).
double sandbox_objective(const CompiledRule& rule, const EvalCase& c);

}  // namespace dsched
