#pragma once

#include <optional>

#include "dsched/core/sim.hpp"
#include "dsched/reactive/handle.hpp"
#include "dsched/reactive/window.hpp"
#include "dsched/rules/engine.hpp"

namespace dsched {

// Argmax of evaluate(rule, features(state, a)) over feasible actions.
// Ties fall to the canonically first action (lowest job, then op, then
// machine) because only a strictly greater score displaces the leader.
std::optional<Action> select_action(const CompiledRule& rule, const SimState& state);

// Hot path: loads the active rule once, selects, and appends a timed
// DecisionRecord to the window. Never blocks on deliberation.
std::optional<Action> dispatch(const ActiveRuleHandle& handle, const SimState& state,
                               ObservationWindow& window, long long epoch);

}  // namespace dsched
