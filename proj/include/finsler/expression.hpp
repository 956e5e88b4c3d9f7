#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace finsler {

/// Scalar expressions over x1..xn, y1..yn. Grammar, loosest first:
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' integer)?
///   primary := number | x<k> | y<k> | sqrt(expr) | dot(v, v) | norm2(v) | '(' expr ')'
///
/// where v is `x` or `y` and norm2(v) is the squared Euclidean norm.
class Expression {
public:
  enum class Op { literal, variable, add, sub, mul, div, neg, pow, sqrt, dot, norm2 };
  enum class Group { x, y };

  struct Node;

  Expression() = default;

  static Expression literal(double value);
  static Expression variable(Group group, int index);
  static Expression binary(Op op, Expression lhs, Expression rhs);
  static Expression negate(Expression arg);
  static Expression power(Expression base, int exponent);
  static Expression square_root(Expression arg);
  static Expression dot(Group a, Group b);
  static Expression norm2(Group g);

  bool empty() const { return !node_; }
  Op op() const;

  /// Largest 1-based variable index referenced in the group, 0 if none.
  int max_index(Group g) const;
  /// True when any x-variable or x-reducer appears.
  bool depends_on(Group g) const;

  /// Fully parenthesized form; parse(print()) reproduces the tree.
  std::string print() const;

  /// Evaluates with arithmetic of T (double, long double or Jet).
  /// Domain failures are rethrown as DomainError naming the failing sub-expression.
  template <typename T>
  T evaluate(std::span<const T> x, std::span<const T> y) const;

  friend bool operator==(const Expression& a, const Expression& b);

private:
  explicit Expression(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

struct Expression::Node {
  Op op = Op::literal;
  double value = 0.0;
  int exponent = 0;
  Group group = Group::x;
  Group group2 = Group::x;
  int index = 0; // 0-based variable index
  std::vector<Expression> args;
};

Expression parse_expression(std::string_view text);

} // namespace finsler
