#include "dsched/reactive/dispatch.hpp"

#include <chrono>

namespace dsched {

std::optional<Action> select_action(const CompiledRule& rule, const SimState& state) {
  std::optional<Action> best;
  double best_score = 0.0;
  for (const Action& a : feasible_actions(state)) {
    double score = evaluate(rule, extract_features(state, a));
    if (!best || score > best_score) {
      best = a;
      best_score = score;
    }
  }
  return best;
}

std::optional<Action> dispatch(const ActiveRuleHandle& handle, const SimState& state,
                               ObservationWindow& window, long long epoch) {
  auto t0 = std::chrono::steady_clock::now();
  const InstalledRule& installed = handle.current();  // one acquire; used throughout
  auto actions = feasible_actions(state);

  std::optional<Action> best;
  double best_score = 0.0;
  for (const Action& a : actions) {
    double score = evaluate(installed.rule, extract_features(state, a));
    if (!best || score > best_score) {
      best = a;
      best_score = score;
    }
  }
  auto t1 = std::chrono::steady_clock::now();

  DecisionRecord r;
  r.epoch = epoch;
  r.clock = state.clock;
  r.wait = !best.has_value();
  if (best) r.action = *best;
  r.candidate_count = actions.size();
  r.rule_version = installed.deployment;
  r.latency_us = std::chrono::duration<double, std::micro>(t1 - t0).count();
  window.record_decision(r);
  return best;
}

}  // namespace dsched
