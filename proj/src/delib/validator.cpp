#include "dsched/delib/validator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dsched/core/fjs_io.hpp"
#include "dsched/core/generator.hpp"
#include "dsched/core/sim.hpp"
#include "dsched/reactive/dispatch.hpp"
#include "dsched/util/fnv.hpp"

namespace dsched {

namespace {

constexpr double kDegenerateVariance = 1e-12;
constexpr double kMeanGuard = 1e-9;  // relative-improvement denominator guard

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

std::uint64_t EvalCase::digest() const {
  Fnv1a f;
  f.str(write_fjs(instance)).str(write_disturbances(script)).u64(seed);
  return f.hash;
}

EvalPool build_eval_pool(const Instance& current, const DisturbanceScript& recorded, int n,
                         std::uint64_t seed) {
  if (n < 1) throw DomainError("evaluation pool needs at least one case");
  current.validate();

  GeneratorParams params;
  params.n_jobs = static_cast<int>(current.jobs.size());
  params.n_machines = current.machine_count;
  params.min_ops = std::numeric_limits<int>::max();
  params.max_ops = 1;
  params.min_flex = std::numeric_limits<int>::max();
  params.max_flex = 1;
  double min_time = std::numeric_limits<double>::infinity();
  double max_time = 1.0;
  for (const Job& job : current.jobs) {
    int ops = static_cast<int>(job.operations.size());
    params.min_ops = std::min(params.min_ops, ops);
    params.max_ops = std::max(params.max_ops, ops);
    for (const Operation& op : job.operations) {
      int flex = static_cast<int>(op.alternatives.size());
      params.min_flex = std::min(params.min_flex, flex);
      params.max_flex = std::max(params.max_flex, flex);
      for (const auto& [machine, time] : op.alternatives) {
        min_time = std::min(min_time, time);
        max_time = std::max(max_time, time);
      }
    }
  }
  params.min_time = std::max(1, static_cast<int>(std::floor(min_time)));
  params.max_time = std::max(params.min_time, static_cast<int>(std::ceil(max_time)));

  EvalPool pool;
  pool.cases.reserve(static_cast<std::size_t>(n));
  pool.cases.push_back(EvalCase{current, recorded, seed});
  for (int i = 1; i < n; ++i) {
    std::uint64_t case_seed = seed + static_cast<std::uint64_t>(i);
    pool.cases.push_back(EvalCase{generate_instance(params, case_seed), recorded, case_seed});
  }
  return pool;
}

void ValidationThresholds::validate() const {
  if (n < 2) throw DomainError("validation needs n >= 2 episodes per policy");
  if (!std::isfinite(epsilon_rel) || !std::isfinite(d_min) || !std::isfinite(t_alpha))
    throw DomainError("validation thresholds must be finite");
}

double sandbox_objective(const CompiledRule& rule, const EvalCase& c) {
  Policy policy = [&rule](const SimState& state) { return select_action(rule, state); };
  return run_episode(c.instance, c.script, policy).makespan;
}

namespace {

double mean_of(const std::vector<double>& y) {
  double s = 0.0;
  for (double v : y) s += v;
  return s / static_cast<double>(y.size());
}

double sample_variance(const std::vector<double>& y, double mean) {
  double s = 0.0;
  for (double v : y) s += (v - mean) * (v - mean);
  return s / static_cast<double>(y.size() - 1);
}

}  // namespace

ValidationReport validation_statistics(const std::vector<double>& y_old,
                                       const std::vector<double>& y_cand,
                                       const ValidationThresholds& thresholds) {
  thresholds.validate();
  if (y_old.size() != y_cand.size())
    throw DomainError("paired validation requires equal episode counts per arm");
  if (y_old.size() < 2) throw DomainError("validation statistics need n >= 2");

  ValidationReport rep;
  rep.y_old = y_old;
  rep.y_cand = y_cand;
  rep.episodes = static_cast<int>(y_old.size());
  rep.mean_old = mean_of(y_old);
  rep.mean_cand = mean_of(y_cand);
  rep.var_old = sample_variance(y_old, rep.mean_old);
  rep.var_cand = sample_variance(y_cand, rep.mean_cand);

  double delta = rep.mean_old - rep.mean_cand;
  double d_t = std::abs(rep.mean_old) > kMeanGuard ? std::abs(rep.mean_old) : 1.0;
  rep.r_t = delta / d_t;

  double n = static_cast<double>(rep.episodes);
  rep.pooled_var = 0.5 * (rep.var_old + rep.var_cand);  // equal-n pooling

  if (rep.pooled_var < kDegenerateVariance) {
    // Deterministic pools: strict improvement is maximal evidence.
    rep.degenerate_variance = true;
    double forced = delta > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    rep.d_eff = forced;
    rep.t_stat = forced;
  } else {
    rep.d_eff = delta / std::sqrt(rep.pooled_var);
    rep.t_stat = delta / std::sqrt(rep.var_old / n + rep.var_cand / n);
  }

  rep.accepted = rep.r_t >= thresholds.epsilon_rel && rep.d_eff >= thresholds.d_min &&
                 rep.t_stat >= thresholds.t_alpha;
  return rep;
}

ValidationReport validate_candidate(const CompiledRule& rule_old, const CompiledRule& rule_cand,
                                    const EvalPool& pool, const ValidationThresholds& thresholds,
                                    bool parallel) {
  auto rule_factory = [](const CompiledRule& rule) {
    return [&rule]() -> Policy {
      return [&rule](const SimState& state) { return select_action(rule, state); };
    };
  };
  return validate_candidate_policies(rule_factory(rule_old), rule_factory(rule_cand), pool,
                                     thresholds, parallel);
}

ValidationReport validate_candidate_policies(const PolicyFactory& old_factory,
                                             const PolicyFactory& cand_factory,
                                             const EvalPool& pool,
                                             const ValidationThresholds& thresholds,
                                             bool parallel) {
  thresholds.validate();
  int n = static_cast<int>(pool.cases.size());
  if (n != thresholds.n)
    throw DomainError("evaluation pool holds " + std::to_string(n) + " cases, thresholds call for " +
                      std::to_string(thresholds.n));

  std::vector<double> y_old(pool.cases.size(), nan());
  std::vector<double> y_cand(pool.cases.size(), nan());
  std::vector<std::uint64_t> digest_old(pool.cases.size(), 0);
  std::vector<std::uint64_t> digest_cand(pool.cases.size(), 0);
  std::vector<unsigned char> old_failed(pool.cases.size(), 0);
  std::vector<unsigned char> cand_failed(pool.cases.size(), 0);

  int total = 2 * n;
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic) if (parallel)
#else
  (void)parallel;
#endif
  for (int idx = 0; idx < total; ++idx) {
    int case_index = idx / 2;
    bool cand_arm = (idx % 2) != 0;
    const EvalCase& c = pool.cases[static_cast<std::size_t>(case_index)];
    std::uint64_t d = c.digest();
    double y;
    bool failed = false;
    try {
      Policy policy = cand_arm ? cand_factory() : old_factory();
      y = run_episode(c.instance, c.script, policy).makespan;
    } catch (const std::exception&) {
      failed = true;
      y = nan();
    }
    if (cand_arm) {
      digest_cand[static_cast<std::size_t>(case_index)] = d;
      y_cand[static_cast<std::size_t>(case_index)] = y;
      cand_failed[static_cast<std::size_t>(case_index)] = failed;
    } else {
      digest_old[static_cast<std::size_t>(case_index)] = d;
      y_old[static_cast<std::size_t>(case_index)] = y;
      old_failed[static_cast<std::size_t>(case_index)] = failed;
    }
  }

  for (std::size_t i = 0; i < old_failed.size(); ++i)
    if (old_failed[i])
      throw DomainError("incumbent rule failed sandbox case " + std::to_string(i) +
                        "; the deployed rule must be sound");

  int failures = 0;
  std::vector<double> ok_old, ok_cand;
  for (std::size_t i = 0; i < pool.cases.size(); ++i) {
    if (cand_failed[i]) {
      ++failures;
    } else {
      ok_old.push_back(y_old[i]);
      ok_cand.push_back(y_cand[i]);
    }
  }

  ValidationReport rep;
  if (failures == 0) {
    rep = validation_statistics(y_old, y_cand, thresholds);
  } else if (ok_old.size() >= 2) {
    // Stats over the surviving pairs, reported for diagnostics only.
    ValidationThresholds partial = thresholds;
    partial.n = static_cast<int>(ok_old.size());
    rep = validation_statistics(ok_old, ok_cand, partial);
    rep.accepted = false;
    rep.y_old = y_old;
    rep.y_cand = y_cand;
  } else {
    rep.y_old = y_old;
    rep.y_cand = y_cand;
  }
  rep.episodes = n;
  rep.feasibility_failures = failures;
  if (failures > 0) rep.accepted = false;

  Fnv1a f_old, f_cand;
  for (std::size_t i = 0; i < pool.cases.size(); ++i) {
    f_old.u64(digest_old[i]);
    f_cand.u64(digest_cand[i]);
  }
  rep.pool_fingerprint_old = f_old.hash;
  rep.pool_fingerprint_cand = f_cand.hash;
  return rep;
}

}  // namespace dsched
