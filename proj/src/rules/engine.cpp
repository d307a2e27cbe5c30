#include "dsched/rules/engine.hpp"

#include <algorithm>
#include <cmath>

namespace dsched {

namespace {

// Every node's result is pulled back to a finite value so no expression can
// leak NaN/inf into the dispatch comparison.
double sanitize(double v) {
  if (std::isnan(v)) return 0.0;
  return std::clamp(v, -kScoreClamp, kScoreClamp);
}

}  // namespace

double evaluate(const RuleExpr& e, const FeatureVector& f) {
  switch (e.kind) {
    case NodeKind::literal: return sanitize(e.value);
    case NodeKind::feature: return sanitize(f.get(e.feature));
    case NodeKind::negate: return -evaluate(*e.kids[0], f);
    case NodeKind::add: return sanitize(evaluate(*e.kids[0], f) + evaluate(*e.kids[1], f));
    case NodeKind::sub: return sanitize(evaluate(*e.kids[0], f) - evaluate(*e.kids[1], f));
    case NodeKind::mul: return sanitize(evaluate(*e.kids[0], f) * evaluate(*e.kids[1], f));
    case NodeKind::div: {
      double den = evaluate(*e.kids[1], f);
      return den == 0.0 ? 0.0 : sanitize(evaluate(*e.kids[0], f) / den);
    }
    case NodeKind::lt: return evaluate(*e.kids[0], f) < evaluate(*e.kids[1], f) ? 1.0 : 0.0;
    case NodeKind::le: return evaluate(*e.kids[0], f) <= evaluate(*e.kids[1], f) ? 1.0 : 0.0;
    case NodeKind::gt: return evaluate(*e.kids[0], f) > evaluate(*e.kids[1], f) ? 1.0 : 0.0;
    case NodeKind::ge: return evaluate(*e.kids[0], f) >= evaluate(*e.kids[1], f) ? 1.0 : 0.0;
    case NodeKind::eq: return evaluate(*e.kids[0], f) == evaluate(*e.kids[1], f) ? 1.0 : 0.0;
    case NodeKind::ne: return evaluate(*e.kids[0], f) != evaluate(*e.kids[1], f) ? 1.0 : 0.0;
    case NodeKind::fn_min:
      return std::min(evaluate(*e.kids[0], f), evaluate(*e.kids[1], f));
    case NodeKind::fn_max:
      return std::max(evaluate(*e.kids[0], f), evaluate(*e.kids[1], f));
    case NodeKind::fn_abs: return std::fabs(evaluate(*e.kids[0], f));
    case NodeKind::fn_sqrt: return std::sqrt(std::max(0.0, evaluate(*e.kids[0], f)));
    case NodeKind::fn_log1p: return std::log1p(std::max(0.0, evaluate(*e.kids[0], f)));
    case NodeKind::fn_exp:
      return sanitize(std::exp(std::clamp(evaluate(*e.kids[0], f), kExpArgMin, kExpArgMax)));
    case NodeKind::conditional:
      return evaluate(*e.kids[0], f) != 0.0 ? evaluate(*e.kids[1], f)
                                            : evaluate(*e.kids[2], f);
  }
  return 0.0;
}

CompiledRule RuleValidator::validate(const std::string& text) {
  if (text.size() > limits_.max_chars)
    throw RuleError(RuleRejection::over_length, limits_.max_chars,
                    "rule text is " + std::to_string(text.size()) + " chars, limit " +
                        std::to_string(limits_.max_chars));
  auto expr = parse_rule(text);
  std::size_t nodes = node_count(*expr);
  if (nodes > limits_.max_nodes)
    throw RuleError(RuleRejection::too_many_nodes, 0,
                    "rule has " + std::to_string(nodes) + " nodes, limit " +
                        std::to_string(limits_.max_nodes));
  CompiledRule rule;
  rule.complexity = complexity_of(*expr);
  rule.expr = std::shared_ptr<const RuleExpr>(std::move(expr));
  rule.source = text;
  rule.version = next_version_.fetch_add(1, std::memory_order_relaxed);
  return rule;
}

std::map<std::string, CompiledRule> builtin_rules(RuleValidator& validator) {
  std::map<std::string, CompiledRule> rules;
  rules.emplace("SPT", validator.validate("-op_proc_time"));
  rules.emplace("LPT", validator.validate("op_proc_time"));
  rules.emplace("MWR", validator.validate("job_remaining_work"));
  rules.emplace("LWR", validator.validate("-job_remaining_work"));
  rules.emplace("FIFO", validator.validate("job_wait_time"));
  return rules;
}

}  // namespace dsched
