#pragma once

#include <cstddef>
#include <memory>
#include <string>

#include "dsched/core/types.hpp"
#include "dsched/rules/ast.hpp"

namespace dsched {

// Why a rule was turned away; reflector logs need the reasons distinguishable.
enum class RuleRejection {
  syntax,              // malformed expression
  unknown_identifier,  // identifier outside the feature set / function names
  arity,               // wrong argument count for a function
  over_length,         // source text exceeds max_chars
  too_many_nodes,      // AST exceeds max_nodes
};

std::string_view rule_rejection_name(RuleRejection r);

class RuleError : public DomainError {
 public:
  RuleError(RuleRejection reason, std::size_t position, const std::string& what);
  RuleRejection reason() const { return reason_; }
  std::size_t position() const { return position_; }  // 0-based offset in the source

 private:
  RuleRejection reason_;
  std::size_t position_;
};

// Grammar (whitespace-insensitive):
//   expr   := cmp
//   cmp    := add (('<'|'<='|'>'|'>='|'=='|'!=') add)*
//   add    := mul (('+'|'-') mul)*
//   mul    := unary (('*'|'/') unary)*
//   unary  := '-' unary | primary
//   primary:= NUMBER | FEATURE | FN '(' expr (',' expr)* ')' | '(' expr ')'
//   FN     := min | max | abs | sqrt | log1p | exp | if
// Throws RuleError on malformed input.
std::unique_ptr<RuleExpr> parse_rule(const std::string& text);

}  // namespace dsched
