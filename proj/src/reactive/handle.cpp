#include "dsched/reactive/handle.hpp"

namespace dsched {

ActiveRuleHandle::ActiveRuleHandle(CompiledRule initial) : deployments_(1) {
  auto installed = std::make_unique<InstalledRule>();
  installed->rule = std::move(initial);
  installed->deployment = 1;
  active_.store(installed.get(), std::memory_order_release);
  retained_.push_back(std::move(installed));
}

std::uint64_t ActiveRuleHandle::swap(CompiledRule next) {
  std::lock_guard<std::mutex> lock(swap_mu_);
  auto installed = std::make_unique<InstalledRule>();
  installed->rule = std::move(next);
  installed->deployment = deployments_.load(std::memory_order_relaxed) + 1;
  const InstalledRule* previous = active_.load(std::memory_order_relaxed);
  active_.store(installed.get(), std::memory_order_release);
  deployments_.store(installed->deployment, std::memory_order_release);
  retained_.push_back(std::move(installed));
  return previous->deployment;
}

}  // namespace dsched
