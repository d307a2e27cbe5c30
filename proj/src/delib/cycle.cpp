#include "dsched/delib/cycle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dsched/util/fnv.hpp"
#include "dsched/util/timestamp.hpp"

namespace dsched {

namespace {

std::string digest_text(const std::string& text) { return hex_digest(digest_of(text)); }

std::string profile_digest(const SummaryProfile& p) {
  Fnv1a f;
  f.u64(p.window_len)
      .f64(p.mean_utilization)
      .f64(p.max_utilization)
      .f64(p.mean_job_wait)
      .f64(p.throughput)
      .str(p.current_rule)
      .str(p.objective);
  for (int q : p.queue_lengths) f.i64(q);
  for (double m : p.metric_history) f.f64(m);
  for (int m : p.active_failures) f.i64(m);
  f.i64(p.bottleneck_machine);
  return hex_digest(f.hash);
}

std::string report_digest(const ValidationReport& r) {
  Fnv1a f;
  f.f64(r.mean_old).f64(r.mean_cand).f64(r.r_t).f64(r.d_eff).f64(r.t_stat);
  f.i64(r.episodes).i64(r.feasibility_failures).i64(r.accepted ? 1 : 0);
  f.u64(r.pool_fingerprint_old).u64(r.pool_fingerprint_cand);
  return hex_digest(f.hash);
}

std::string pool_digest(const EvalPool& pool) {
  Fnv1a f;
  for (const EvalCase& c : pool.cases) f.u64(c.digest());
  return hex_digest(f.hash);
}

}  // namespace

std::string format_trajectory_line(const TrajectoryStep& s) {
  std::ostringstream os;
  os << s.phase << " in=" << s.input_digest << " out=" << s.output_digest
     << " verdict=" << s.verdict;
  return os.str();
}

CycleOutcome deliberation_cycle(ActiveRuleHandle& handle, RuleRepository& repository,
                                ProposerBackend& backend, RuleValidator& validator,
                                const CycleContext& ctx) {
  CycleOutcome outcome;
  auto step = [&](const std::string& phase, const std::string& in, const std::string& out,
                  const std::string& verdict) {
    outcome.trajectory.push_back(TrajectoryStep{phase, in, out, verdict});
  };

  const CompiledRule incumbent = handle.current().rule;  // frozen for the cycle
  step("summarize", profile_digest(ctx.profile), digest_text(incumbent.source), "ok");

  std::vector<RepoEntry> retrieved;
  if (ctx.retrieval_enabled) retrieved = repository.retrieve(ctx.meta, ctx.retrieval);
  {
    Fnv1a f;
    for (const auto& e : retrieved) f.str(e.rule_source).f64(e.value);
    step("retrieve", pool_digest(ctx.pool), hex_digest(f.hash),
         ctx.retrieval_enabled ? "ok:" + std::to_string(retrieved.size()) : "disabled");
  }

  struct AcceptedCandidate {
    CompiledRule rule;
    ValidationReport report;
  };
  std::vector<AcceptedCandidate> accepted;

  try {
    bool keep_going = true;
    for (int iter = 0; iter < ctx.limits.max_iters && keep_going; ++iter) {
      ++outcome.iterations;

      Directive directive = backend.plan(ctx.profile);
      step("plan", profile_digest(ctx.profile), digest_text(directive.strategy), "ok");

      std::string candidate_text =
          backend.synthesize(directive, incumbent.source, retrieved);
      step("synthesize", digest_text(directive.strategy), digest_text(candidate_text), "ok");

      CompiledRule candidate;
      ValidationReport report;
      bool syntactic_ok = false;
      try {
        candidate = validator.validate(candidate_text);
        syntactic_ok = true;
        step("validate_rule", digest_text(candidate_text),
             digest_text(pretty_print(*candidate.expr)), "ok");
      } catch (const RuleError& e) {
        report.accepted = false;
        step("validate_rule", digest_text(candidate_text), "-",
             std::string("rejected:") + std::string(rule_rejection_name(e.reason())));
      }

      if (syntactic_ok) {
        report = validate_candidate(incumbent, candidate, ctx.pool, ctx.thresholds,
                                    ctx.parallel_validation);
        step("validate_candidate", digest_text(candidate_text), report_digest(report),
             report.accepted ? "accepted" : "rejected:stats");
        if (report.accepted) accepted.push_back(AcceptedCandidate{candidate, report});
      }

      ReflectorNote note = backend.reflect(report, candidate_text);
      step("reflect", report_digest(report), digest_text(note.text),
           note.keep_going ? "continue" : "stop");
      keep_going = note.keep_going;
    }
  } catch (const BackendError& e) {
    step("backend", "-", digest_text(e.what()), "backend_error");
    outcome.kind = CycleOutcomeKind::backend_error;
    return outcome;  // incumbent untouched
  }

  if (accepted.empty()) {
    outcome.kind = CycleOutcomeKind::rejected;
    return outcome;
  }

  // Final selection balances sandbox improvement against rule complexity.
  auto quality = [&](const AcceptedCandidate& c) {
    return c.report.r_t -
           ctx.retrieval.lambda2 * std::log(1.0 + static_cast<double>(c.rule.complexity.score()));
  };
  const AcceptedCandidate* winner = &accepted.front();
  for (const auto& c : accepted)
    if (quality(c) > quality(*winner)) winner = &c;

  if (ctx.swap_gate) ctx.swap_gate(winner->rule, winner->report);
  handle.swap(winner->rule);
  outcome.deployment = handle.deployment_count();
  outcome.accepted_rule = winner->rule.source;
  step("swap", digest_text(winner->rule.source), std::to_string(outcome.deployment), "accepted");

  RepoEntry entry;
  entry.meta = ctx.meta;
  entry.rule_source = pretty_print(*winner->rule.expr);
  entry.value = winner->report.r_t;
  entry.complexity = winner->rule.complexity.score();
  entry.benchmark = ctx.benchmark;
  entry.timestamp = iso8601_utc_now();
  entry.version = winner->rule.version;
  repository.insert(std::move(entry));

  outcome.kind = CycleOutcomeKind::accepted;
  return outcome;
}

}  // namespace dsched
