#include "dsched/rules/ast.hpp"

#include <cmath>
#include <sstream>

namespace dsched {

namespace {

constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "op_proc_time",      "job_remaining_work", "job_remaining_ops", "op_index",
    "num_eligible",      "machine_queue_len",  "machine_workload",  "job_wait_time",
    "clock",             "machine_idle_time",
};

}  // namespace

std::string_view feature_name(Feature f) {
  return kFeatureNames[static_cast<std::size_t>(f)];
}

std::optional<Feature> feature_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kFeatureCount; ++i)
    if (kFeatureNames[i] == name) return static_cast<Feature>(i);
  return std::nullopt;
}

std::unique_ptr<RuleExpr> clone(const RuleExpr& e) {
  auto out = std::make_unique<RuleExpr>();
  out->kind = e.kind;
  out->value = e.value;
  out->feature = e.feature;
  out->kids.reserve(e.kids.size());
  for (const auto& kid : e.kids) out->kids.push_back(clone(*kid));
  return out;
}

std::size_t node_count(const RuleExpr& e) {
  std::size_t n = 1;
  for (const auto& kid : e.kids) n += node_count(*kid);
  return n;
}

bool structurally_equal(const RuleExpr& a, const RuleExpr& b) {
  if (a.kind != b.kind || a.kids.size() != b.kids.size()) return false;
  if (a.kind == NodeKind::literal && a.value != b.value) return false;
  if (a.kind == NodeKind::feature && a.feature != b.feature) return false;
  for (std::size_t i = 0; i < a.kids.size(); ++i)
    if (!structurally_equal(*a.kids[i], *b.kids[i])) return false;
  return true;
}

RuleComplexity complexity_of(const RuleExpr& e) {
  RuleComplexity c;
  if (!e.kids.empty()) {
    if (e.kind == NodeKind::conditional)
      ++c.branch_count;
    else
      ++c.operator_count;
  }
  for (const auto& kid : e.kids) {
    RuleComplexity k = complexity_of(*kid);
    c.operator_count += k.operator_count;
    c.branch_count += k.branch_count;
  }
  return c;
}

namespace {

// Precedence bands for the printer: comparison < additive < multiplicative
// < unary < primary. A child is parenthesized when its own band is below
// what its context requires.
int precedence_of(NodeKind k) {
  switch (k) {
    case NodeKind::lt:
    case NodeKind::le:
    case NodeKind::gt:
    case NodeKind::ge:
    case NodeKind::eq:
    case NodeKind::ne:
      return 1;
    case NodeKind::add:
    case NodeKind::sub:
      return 2;
    case NodeKind::mul:
    case NodeKind::div:
      return 3;
    case NodeKind::negate:
      return 4;
    default:
      return 5;  // leaves, calls, if(...)
  }
}

std::string_view op_token(NodeKind k) {
  switch (k) {
    case NodeKind::add: return "+";
    case NodeKind::sub: return "-";
    case NodeKind::mul: return "*";
    case NodeKind::div: return "/";
    case NodeKind::lt: return "<";
    case NodeKind::le: return "<=";
    case NodeKind::gt: return ">";
    case NodeKind::ge: return ">=";
    case NodeKind::eq: return "==";
    case NodeKind::ne: return "!=";
    default: return "?";
  }
}

std::string_view call_name(NodeKind k) {
  switch (k) {
    case NodeKind::fn_min: return "min";
    case NodeKind::fn_max: return "max";
    case NodeKind::fn_abs: return "abs";
    case NodeKind::fn_sqrt: return "sqrt";
    case NodeKind::fn_log1p: return "log1p";
    case NodeKind::fn_exp: return "exp";
    case NodeKind::conditional: return "if";
    default: return "?";
  }
}

std::string format_literal(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void print(const RuleExpr& e, int min_prec, std::string& out) {
  int prec = precedence_of(e.kind);
  bool parens = prec < min_prec;
  if (parens) out += '(';
  switch (e.kind) {
    case NodeKind::literal:
      out += format_literal(e.value);
      break;
    case NodeKind::feature:
      out += feature_name(e.feature);
      break;
    case NodeKind::negate:
      out += '-';
      print(*e.kids[0], prec, out);
      break;
    case NodeKind::fn_min:
    case NodeKind::fn_max:
    case NodeKind::fn_abs:
    case NodeKind::fn_sqrt:
    case NodeKind::fn_log1p:
    case NodeKind::fn_exp:
    case NodeKind::conditional:
      out += call_name(e.kind);
      out += '(';
      for (std::size_t i = 0; i < e.kids.size(); ++i) {
        if (i) out += ", ";
        print(*e.kids[i], 0, out);
      }
      out += ')';
      break;
    default:  // left-associative binary operator
      print(*e.kids[0], prec, out);
      out += ' ';
      out += op_token(e.kind);
      out += ' ';
      print(*e.kids[1], prec + 1, out);
      break;
  }
  if (parens) out += ')';
}

}  // namespace

std::string pretty_print(const RuleExpr& e) {
  std::string out;
  print(e, 0, out);
  return out;
}

}  // namespace dsched
