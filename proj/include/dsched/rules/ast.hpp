#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dsched {

// The fixed feature vocabulary. Every identifier in a rule names one of these.
enum class Feature {
  op_proc_time,
  job_remaining_work,
  job_remaining_ops,
  op_index,
  num_eligible,
  machine_queue_len,
  machine_workload,
  job_wait_time,
  clock,
  machine_idle_time,
};
inline constexpr std::size_t kFeatureCount = 10;

std::string_view feature_name(Feature f);
std::optional<Feature> feature_from_name(std::string_view name);

enum class NodeKind {
  literal,      // leaf: value
  feature,      // leaf: feature
  negate,       // kids[0]
  add, sub, mul, div,
  lt, le, gt, ge, eq, ne,        // comparisons evaluate to 1.0 / 0.0
  fn_min, fn_max,                // 2 kids
  fn_abs, fn_sqrt, fn_log1p, fn_exp,  // 1 kid
  conditional,  // if(kids[0], kids[1], kids[2])
};

struct RuleExpr {
  NodeKind kind = NodeKind::literal;
  double value = 0.0;                      // literal: finite and >= 0 (negative
                                           // constants are negate(literal))
  Feature feature = Feature::op_proc_time; // feature
  std::vector<std::unique_ptr<RuleExpr>> kids;
};

std::unique_ptr<RuleExpr> clone(const RuleExpr& e);
std::size_t node_count(const RuleExpr& e);
bool structurally_equal(const RuleExpr& a, const RuleExpr& b);

// Canonical text form; re-parsing it yields a structurally identical AST.
std::string pretty_print(const RuleExpr& e);

struct RuleComplexity {
  int operator_count = 0;  // internal nodes other than conditionals
  int branch_count = 0;    // conditional nodes
  int score() const { return operator_count + 2 * branch_count; }
};

RuleComplexity complexity_of(const RuleExpr& e);

}  // namespace dsched
