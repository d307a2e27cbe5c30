#include "dsched/harness/adaptive.hpp"

#include <chrono>
#include <condition_variable>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include "dsched/reactive/dispatch.hpp"

namespace dsched {

namespace {

// Shared deliberation plumbing for inline and worker execution.
struct CycleRunner {
  CycleRunner(ActiveRuleHandle& h, RuleRepository& r, ProposerBackend& b, RuleValidator& v,
              const AdaptiveConfig& c)
      : handle(h), repository(r), backend(b), validator(v), config(c) {}

  ActiveRuleHandle& handle;
  RuleRepository& repository;
  ProposerBackend& backend;
  RuleValidator& validator;
  const AdaptiveConfig& config;

  int cycles = 0, accepted = 0, rejected = 0, backend_errors = 0;
  std::vector<double> latencies_us;
  std::vector<TrajectoryStep> trajectory;

  void run(const CycleContext& ctx) {
    auto t0 = std::chrono::steady_clock::now();
    CycleOutcome outcome = deliberation_cycle(handle, repository, backend, validator, ctx);
    auto t1 = std::chrono::steady_clock::now();
    ++cycles;
    latencies_us.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
    switch (outcome.kind) {
      case CycleOutcomeKind::accepted: ++accepted; break;
      case CycleOutcomeKind::rejected: ++rejected; break;
      case CycleOutcomeKind::backend_error: ++backend_errors; break;
    }
    if (config.log_trajectory)
      trajectory.insert(trajectory.end(), outcome.trajectory.begin(), outcome.trajectory.end());
  }
};

// One-slot mailbox worker: at most one cycle in flight, later triggers
// coalesce until it finishes.
class CycleWorker {
 public:
  explicit CycleWorker(CycleRunner& runner) : runner_(runner) {
    thread_ = std::thread([this] { loop(); });
  }

  ~CycleWorker() {
    {
      std::lock_guard<std::mutex> lock(mu_);
      stop_ = true;
    }
    cv_.notify_all();
    thread_.join();
  }

  // True if the cycle was enqueued, false if one is already pending/running.
  bool post(CycleContext ctx) {
    {
      std::lock_guard<std::mutex> lock(mu_);
      if (busy_ || pending_) return false;
      pending_ = std::move(ctx);
    }
    cv_.notify_all();
    return true;
  }

  bool idle() const {
    std::lock_guard<std::mutex> lock(mu_);
    return !busy_ && !pending_;
  }

  // Blocks until the mailbox is empty and the worker idles, then rethrows
  // anything the worker hit.
  void drain() {
    std::unique_lock<std::mutex> lock(mu_);
    cv_.wait(lock, [this] { return !busy_ && !pending_; });
    if (failure_) std::rethrow_exception(failure_);
  }

 private:
  void loop() {
    for (;;) {
      std::optional<CycleContext> job;
      {
        std::unique_lock<std::mutex> lock(mu_);
        cv_.wait(lock, [this] { return stop_ || pending_; });
        if (pending_) {
          job = std::move(pending_);
          pending_.reset();
          busy_ = true;
        } else if (stop_) {
          return;
        }
      }
      if (job) {
        try {
          runner_.run(*job);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu_);
          if (!failure_) failure_ = std::current_exception();
        }
        {
          std::lock_guard<std::mutex> lock(mu_);
          busy_ = false;
        }
        cv_.notify_all();
      }
    }
  }

  CycleRunner& runner_;
  std::thread thread_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::optional<CycleContext> pending_;
  bool busy_ = false;
  bool stop_ = false;
  std::exception_ptr failure_;
};

// Episode loop shared by the static and adaptive runners. `on_epoch` is
// called after each dispatch with the 1-based epoch; null for static runs.
AdaptiveResult run_engine_episode(const Instance& instance, const DisturbanceScript& script,
                                  ActiveRuleHandle& handle, ObservationWindow& window,
                                  bool log_decisions,
                                  const std::function<void(long long, const Simulator&)>& on_epoch) {
  AdaptiveResult out;
  Simulator sim(instance, script);
  std::size_t completion_seen = 0;
  long consecutive_waits = 0;

  auto flush_completions = [&]() {
    const auto& log = sim.completions();
    for (; completion_seen < log.size(); ++completion_seen) {
      const CompletionEvent& e = log[completion_seen];
      window.record_completion(e);
      out.throughput_series.emplace_back(e.time, window.throughput(e.time));
    }
  };

  sim.settle();
  flush_completions();

  while (!sim.done()) {
    std::vector<Action> actions = feasible_actions(sim.state());
    if (!actions.empty()) {
      long long epoch = ++out.epochs;
      window.sample_metric(sim.state().clock);
      std::optional<Action> choice = dispatch(handle, sim.state(), window, epoch);
      if (log_decisions) out.decisions.push_back(window.snapshot().decisions.back());
      if (on_epoch) on_epoch(epoch, sim);

      if (choice) {
        sim.start(*choice);
        consecutive_waits = 0;
        continue;
      }
      ++consecutive_waits;
      if (!sim.has_pending_event())
        throw SimError("livelock: rule waits but no event is pending");
      if (consecutive_waits > 2 * static_cast<long>(sim.pending_event_count()))
        throw SimError("livelock: rule keeps waiting with dispatchable work");
    } else {
      if (!sim.has_pending_event())
        throw SimError("deadlock: incomplete operations but nothing pending");
      consecutive_waits = 0;
    }

    sim.advance();
    sim.settle();
    flush_completions();
  }

  out.schedule = sim.result();
  return out;
}

}  // namespace

AdaptiveResult run_adaptive_episode(const Instance& instance, const DisturbanceScript& script,
                                    ProposerBackend& backend, RuleRepository& repository,
                                    RuleValidator& validator, const AdaptiveConfig& config) {
  config.trigger.validate();
  config.thresholds.validate();
  instance.validate();

  ActiveRuleHandle handle(validator.validate(config.initial_rule));
  ObservationWindow window(config.window_capacity);
  CycleRunner runner(handle, repository, backend, validator, config);

  MetaFeatures meta{static_cast<int>(instance.jobs.size()), instance.machine_count};
  int posted = 0;
  int triggers = 0, coalesced = 0;

  std::optional<CycleWorker> worker;
  if (!config.serialized) worker.emplace(runner);

  auto make_context = [&](const Simulator& sim) {
    CycleContext ctx;
    ctx.profile = summarize(window, sim.state(), handle.current().rule.source);
    ctx.pool = build_eval_pool(instance, sim.recorded_events(), config.thresholds.n,
                               config.pool_seed + static_cast<std::uint64_t>(posted));
    ctx.meta = meta;
    ctx.benchmark = config.benchmark;
    ctx.retrieval = config.retrieval;
    ctx.thresholds = config.thresholds;
    ctx.limits = config.limits;
    ctx.parallel_validation = config.parallel_validation;
    ctx.retrieval_enabled = config.retrieval_enabled;
    ctx.swap_gate = config.swap_gate;
    return ctx;
  };

  auto on_epoch = [&](long long epoch, const Simulator& sim) {
    TriggerResult tr = check_trigger(epoch, window.snapshot().metric_history, config.trigger);
    if (!tr.any()) return;
    ++triggers;
    if (config.serialized) {
      runner.run(make_context(sim));
      ++posted;
    } else if (worker->idle() && worker->post(make_context(sim))) {
      // idle() first: building a context (pool synthesis) is too costly to
      // waste on triggers that would coalesce anyway.
      ++posted;
    } else {
      ++coalesced;
    }
  };

  AdaptiveResult out =
      run_engine_episode(instance, script, handle, window, config.log_decisions, on_epoch);

  if (worker) worker->drain();
  worker.reset();  // joins; all cycle bookkeeping is complete past this point

  out.triggers = triggers;
  out.coalesced = coalesced;
  out.cycles = runner.cycles;
  out.accepted = runner.accepted;
  out.rejected = runner.rejected;
  out.backend_errors = runner.backend_errors;
  out.cycle_latencies_us = std::move(runner.latencies_us);
  out.trajectory = std::move(runner.trajectory);
  out.deployments = handle.deployment_count();
  out.final_rule = handle.current().rule.source;
  return out;
}

AdaptiveResult run_static_episode(const Instance& instance, const DisturbanceScript& script,
                                  const CompiledRule& rule, std::size_t window_capacity,
                                  bool log_decisions) {
  instance.validate();
  ActiveRuleHandle handle(rule);
  ObservationWindow window(window_capacity);
  AdaptiveResult out =
      run_engine_episode(instance, script, handle, window, log_decisions, nullptr);
  out.final_rule = rule.source;
  return out;
}

}  // namespace dsched
