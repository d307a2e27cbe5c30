#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <string>

#include "dsched/rules/ast.hpp"
#include "dsched/rules/features.hpp"
#include "dsched/rules/parser.hpp"

namespace dsched {

struct RuleLimits {
  std::size_t max_chars = 2000;
  std::size_t max_nodes = 500;
};

// Immutable after validation; safe to share and evaluate from any thread.
struct CompiledRule {
  std::shared_ptr<const RuleExpr> expr;
  std::string source;
  std::uint64_t version = 0;
  RuleComplexity complexity;
};

// Evaluation clamps that make every rule total over finite features.
inline constexpr double kExpArgMin = -50.0;
inline constexpr double kExpArgMax = 50.0;
inline constexpr double kScoreClamp = 1e300;

double evaluate(const RuleExpr& expr, const FeatureVector& features);
inline double evaluate(const CompiledRule& rule, const FeatureVector& features) {
  return evaluate(*rule.expr, features);
}

// Parse + limit checks + version assignment. Throws RuleError with a
// distinguishable RuleRejection on any failure. Thread-safe.
class RuleValidator {
 public:
  explicit RuleValidator(RuleLimits limits = {}) : limits_(limits) {}

  CompiledRule validate(const std::string& text);
  const RuleLimits& limits() const { return limits_; }

 private:
  RuleLimits limits_;
  std::atomic<std::uint64_t> next_version_{1};
};

// Classical dispatching rules, all deterministic.
// SPT shortest processing time, LPT longest, MWR most work remaining,
// LWR least work remaining, FIFO longest-waiting first.
std::map<std::string, CompiledRule> builtin_rules(RuleValidator& validator);

}  // namespace dsched
