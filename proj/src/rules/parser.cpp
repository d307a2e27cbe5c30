#include "dsched/rules/parser.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <utility>

namespace dsched {

std::string_view rule_rejection_name(RuleRejection r) {
  switch (r) {
    case RuleRejection::syntax: return "syntax";
    case RuleRejection::unknown_identifier: return "unknown_identifier";
    case RuleRejection::arity: return "arity";
    case RuleRejection::over_length: return "over_length";
    case RuleRejection::too_many_nodes: return "too_many_nodes";
  }
  return "?";
}

RuleError::RuleError(RuleRejection reason, std::size_t position, const std::string& what)
    : DomainError(what + " (at offset " + std::to_string(position) + ")"),
      reason_(reason),
      position_(position) {}

namespace {

struct Parser {
  const std::string& text;
  std::size_t pos = 0;

  [[noreturn]] void fail(RuleRejection reason, std::size_t at, const std::string& msg) {
    throw RuleError(reason, at, msg);
  }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool eat(std::string_view token) {
    skip_ws();
    if (text.compare(pos, token.size(), token) != 0) return false;
    pos += token.size();
    return true;
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  std::unique_ptr<RuleExpr> make(NodeKind kind, std::unique_ptr<RuleExpr> a,
                                 std::unique_ptr<RuleExpr> b = nullptr,
                                 std::unique_ptr<RuleExpr> c = nullptr) {
    auto node = std::make_unique<RuleExpr>();
    node->kind = kind;
    node->kids.push_back(std::move(a));
    if (b) node->kids.push_back(std::move(b));
    if (c) node->kids.push_back(std::move(c));
    return node;
  }

  std::unique_ptr<RuleExpr> parse_expr() { return parse_cmp(); }

  std::unique_ptr<RuleExpr> parse_cmp() {
    auto lhs = parse_add();
    for (;;) {
      // Two-char tokens first so '<' does not shadow '<='.
      NodeKind kind;
      if (eat("<=")) kind = NodeKind::le;
      else if (eat(">=")) kind = NodeKind::ge;
      else if (eat("==")) kind = NodeKind::eq;
      else if (eat("!=")) kind = NodeKind::ne;
      else if (eat("<")) kind = NodeKind::lt;
      else if (eat(">")) kind = NodeKind::gt;
      else return lhs;
      lhs = make(kind, std::move(lhs), parse_add());
    }
  }

  std::unique_ptr<RuleExpr> parse_add() {
    auto lhs = parse_mul();
    for (;;) {
      if (eat("+")) lhs = make(NodeKind::add, std::move(lhs), parse_mul());
      else if (eat("-")) lhs = make(NodeKind::sub, std::move(lhs), parse_mul());
      else return lhs;
    }
  }

  std::unique_ptr<RuleExpr> parse_mul() {
    auto lhs = parse_unary();
    for (;;) {
      if (eat("*")) lhs = make(NodeKind::mul, std::move(lhs), parse_unary());
      else if (eat("/")) lhs = make(NodeKind::div, std::move(lhs), parse_unary());
      else return lhs;
    }
  }

  std::unique_ptr<RuleExpr> parse_unary() {
    if (eat("-")) return make(NodeKind::negate, parse_unary());
    return parse_primary();
  }

  std::unique_ptr<RuleExpr> parse_primary() {
    skip_ws();
    if (pos >= text.size()) fail(RuleRejection::syntax, pos, "unexpected end of rule");
    char c = text[pos];

    if (c == '(') {
      ++pos;
      auto inner = parse_expr();
      if (!eat(")")) fail(RuleRejection::syntax, pos, "expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    fail(RuleRejection::syntax, pos, std::string("unexpected character '") + c + "'");
  }

  std::unique_ptr<RuleExpr> parse_number() {
    const char* begin = text.c_str() + pos;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin || !std::isfinite(v))
      fail(RuleRejection::syntax, pos, "malformed number");
    pos += static_cast<std::size_t>(end - begin);
    auto node = std::make_unique<RuleExpr>();
    node->kind = NodeKind::literal;
    node->value = v;
    return node;
  }

  std::unique_ptr<RuleExpr> parse_identifier() {
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    std::string name = text.substr(start, pos - start);

    NodeKind fn;
    std::size_t arity;
    if (name == "min") { fn = NodeKind::fn_min; arity = 2; }
    else if (name == "max") { fn = NodeKind::fn_max; arity = 2; }
    else if (name == "abs") { fn = NodeKind::fn_abs; arity = 1; }
    else if (name == "sqrt") { fn = NodeKind::fn_sqrt; arity = 1; }
    else if (name == "log1p") { fn = NodeKind::fn_log1p; arity = 1; }
    else if (name == "exp") { fn = NodeKind::fn_exp; arity = 1; }
    else if (name == "if") { fn = NodeKind::conditional; arity = 3; }
    else {
      if (auto feature = feature_from_name(name)) {
        auto node = std::make_unique<RuleExpr>();
        node->kind = NodeKind::feature;
        node->feature = *feature;
        return node;
      }
      fail(RuleRejection::unknown_identifier, start, "unknown identifier '" + name + "'");
    }

    if (!eat("(")) fail(RuleRejection::syntax, pos, "expected '(' after '" + name + "'");
    auto node = std::make_unique<RuleExpr>();
    node->kind = fn;
    if (peek() != ')') {
      node->kids.push_back(parse_expr());
      while (eat(",")) node->kids.push_back(parse_expr());
    }
    if (!eat(")")) fail(RuleRejection::syntax, pos, "expected ')' closing '" + name + "'");
    if (node->kids.size() != arity)
      fail(RuleRejection::arity, start,
           "'" + name + "' takes " + std::to_string(arity) + " arguments, got " +
               std::to_string(node->kids.size()));
    return node;
  }
};

}  // namespace

std::unique_ptr<RuleExpr> parse_rule(const std::string& text) {
  Parser p{text};
  auto expr = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size())
    p.fail(RuleRejection::syntax, p.pos, "trailing input after expression");
  return expr;
}

}  // namespace dsched
