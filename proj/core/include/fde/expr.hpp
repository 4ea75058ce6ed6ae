#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace fde {

enum class Var { t, x, y };

/// Variable bindings for evaluation; referencing an unbound variable throws.
struct Vars {
  std::optional<double> t;
  std::optional<double> x;
  std::optional<double> y;
};

/// Immutable expression tree over literals, pi, e, the variables t, x, y,
/// + - * / ^, unary minus, comparisons, and/or, and the calls
/// sin cos tan exp log abs sign sqrt min max if.
///
/// Grammar, loosest binding first:
///   or  := and (("or" | "||") and)*
///   and := cmp (("and" | "&&") cmp)*
///   cmp := add (("<" | "<=" | ">" | ">=" | "==") add)*
///   add := mul (("+" | "-") mul)*
///   mul := neg (("*" | "/") neg)*
///   neg := "-" neg | pow
///   pow := atom ("^" neg)?          (right associative)
class Expr {
 public:
  struct Node;

  explicit Expr(std::shared_ptr<const Node> root);

  double eval(const Vars& vars) const;
  double eval(double t, double x, double y) const { return eval(Vars{t, x, y}); }

  /// Fully parenthesised rendering that parses back to the same tree.
  std::string to_string() const;

  bool uses(Var v) const;

  /// Structural equality.
  bool operator==(const Expr& other) const;

  const Node& root() const noexcept { return *root_; }

 private:
  std::shared_ptr<const Node> root_;
};

Expr parse_expr(std::string_view text);

double eval_expr(const Expr& e, double t, double x, double y);

}  // namespace fde
