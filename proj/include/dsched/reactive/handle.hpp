#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <vector>

#include "dsched/rules/engine.hpp"

namespace dsched {

// A rule as deployed on the hot path. `deployment` counts installations on
// this handle (1 for the initial rule), so redeploying identical text still
// advances it; `rule.version` remains the validator's compile counter.
struct InstalledRule {
  CompiledRule rule;
  std::uint64_t deployment = 0;
};

// The single cross-thread touchpoint between dispatch and deliberation.
// Readers take one acquire load per dispatch and never block; swaps serialize
// on a mutex. Every installed rule is retained for the handle's lifetime,
// which keeps a loaded pointer valid without reclamation machinery (the
// handle outlives episodes, and deployments number at most a few dozen).
class ActiveRuleHandle {
 public:
  explicit ActiveRuleHandle(CompiledRule initial);

  ActiveRuleHandle(const ActiveRuleHandle&) = delete;
  ActiveRuleHandle& operator=(const ActiveRuleHandle&) = delete;

  // Hot path: a consistent snapshot of rule + deployment id.
  const InstalledRule& current() const {
    return *active_.load(std::memory_order_acquire);
  }

  // Installs `next` as an indivisible update; returns the deployment id it
  // replaced. Callable from any thread.
  std::uint64_t swap(CompiledRule next);

  std::uint64_t deployment_count() const { return deployments_.load(std::memory_order_acquire); }

 private:
  mutable std::mutex swap_mu_;
  std::vector<std::unique_ptr<const InstalledRule>> retained_;
  std::atomic<const InstalledRule*> active_;
  std::atomic<std::uint64_t> deployments_;
};

}  // namespace dsched
