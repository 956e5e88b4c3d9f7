#include "finsler/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <system_error>

#include "finsler/errors.hpp"
#include "finsler/jet.hpp"

namespace finsler {

using Op = Expression::Op;
using Group = Expression::Group;

// ---------------------------------------------------------------------------
// construction

namespace {

std::shared_ptr<Expression::Node> make(Op op) {
  auto node = std::make_shared<Expression::Node>();
  node->op = op;
  return node;
}

} // namespace

Expression Expression::literal(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("literal must be finite");
  // The grammar has no negative numerals, so keep the tree in the shape the parser builds.
  if (std::signbit(value)) return negate(literal(-value));
  auto n = make(Op::literal);
  n->value = value;
  return Expression(n);
}

Expression Expression::variable(Group group, int index) {
  if (index < 0) throw std::invalid_argument("negative variable index");
  auto n = make(Op::variable);
  n->group = group;
  n->index = index;
  return Expression(n);
}

Expression Expression::binary(Op op, Expression lhs, Expression rhs) {
  if (op != Op::add && op != Op::sub && op != Op::mul && op != Op::div) throw std::invalid_argument("not a binary operator");
  auto n = make(op);
  n->args = {std::move(lhs), std::move(rhs)};
  return Expression(n);
}

Expression Expression::negate(Expression arg) {
  auto n = make(Op::neg);
  n->args = {std::move(arg)};
  return Expression(n);
}

Expression Expression::power(Expression base, int exponent) {
  auto n = make(Op::pow);
  n->exponent = exponent;
  n->args = {std::move(base)};
  return Expression(n);
}

Expression Expression::square_root(Expression arg) {
  auto n = make(Op::sqrt);
  n->args = {std::move(arg)};
  return Expression(n);
}

Expression Expression::dot(Group a, Group b) {
  auto n = make(Op::dot);
  n->group = a;
  n->group2 = b;
  return Expression(n);
}

Expression Expression::norm2(Group g) {
  auto n = make(Op::norm2);
  n->group = g;
  return Expression(n);
}

Op Expression::op() const {
  if (!node_) throw std::logic_error("empty expression");
  return node_->op;
}

int Expression::max_index(Group g) const {
  if (!node_) return 0;
  int m = node_->op == Op::variable && node_->group == g ? node_->index + 1 : 0;
  for (const auto& a : node_->args) m = std::max(m, a.max_index(g));
  return m;
}

bool Expression::depends_on(Group g) const {
  if (!node_) return false;
  switch (node_->op) {
  case Op::variable:
  case Op::norm2:
    if (node_->group == g) return true;
    break;
  case Op::dot:
    if (node_->group == g || node_->group2 == g) return true;
    break;
  default:
    break;
  }
  for (const auto& a : node_->args)
    if (a.depends_on(g)) return true;
  return false;
}

bool operator==(const Expression& a, const Expression& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  const auto& p = *a.node_;
  const auto& q = *b.node_;
  if (p.op != q.op || p.args.size() != q.args.size()) return false;
  switch (p.op) {
  case Op::literal:
    if (p.value != q.value) return false;
    break;
  case Op::variable:
    if (p.group != q.group || p.index != q.index) return false;
    break;
  case Op::pow:
    if (p.exponent != q.exponent) return false;
    break;
  case Op::dot:
    if (p.group != q.group || p.group2 != q.group2) return false;
    break;
  case Op::norm2:
    if (p.group != q.group) return false;
    break;
  default:
    break;
  }
  for (std::size_t i = 0; i < p.args.size(); ++i)
    if (!(p.args[i] == q.args[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// printing

namespace {

char group_name(Group g) { return g == Group::x ? 'x' : 'y'; }

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("cannot format literal");
  return std::string(buf, end);
}

} // namespace

std::string Expression::print() const {
  const auto& n = *node_;
  switch (n.op) {
  case Op::literal:
    return format_number(n.value);
  case Op::variable:
    return std::string(1, group_name(n.group)) + std::to_string(n.index + 1);
  case Op::add:
    return "(" + n.args[0].print() + " + " + n.args[1].print() + ")";
  case Op::sub:
    return "(" + n.args[0].print() + " - " + n.args[1].print() + ")";
  case Op::mul:
    return "(" + n.args[0].print() + " * " + n.args[1].print() + ")";
  case Op::div:
    return "(" + n.args[0].print() + " / " + n.args[1].print() + ")";
  case Op::neg:
    return "(-" + n.args[0].print() + ")";
  case Op::pow:
    return "(" + n.args[0].print() + "^" + std::to_string(n.exponent) + ")";
  case Op::sqrt:
    return "sqrt(" + n.args[0].print() + ")";
  case Op::dot:
    return std::string("dot(") + group_name(n.group) + ", " + group_name(n.group2) + ")";
  case Op::norm2:
    return std::string("norm2(") + group_name(n.group) + ")";
  }
  return {};
}

// ---------------------------------------------------------------------------
// evaluation

namespace {

template <typename T>
T checked_sqrt(const T& a) {
  if (a < T(0)) throw DomainError("sqrt of a negative value");
  using std::sqrt;
  return sqrt(a);
}

template <>
Jet checked_sqrt(const Jet& a) {
  return sqrt(a);
}

template <typename T>
T checked_div(const T& a, const T& b) {
  if (b == T(0)) throw DomainError("division by zero");
  return a / b;
}

template <>
Jet checked_div(const Jet& a, const Jet& b) {
  return a / b;
}

template <typename T>
T int_pow(const T& a, int e) {
  if (e < 0) return checked_div(T(1), int_pow(a, -e));
  T r(1);
  for (int k = 0; k < e; ++k) r = r * a;
  return r;
}

template <>
Jet int_pow(const Jet& a, int e) {
  return pow(a, e);
}

template <typename T>
std::span<const T> pick(Group g, std::span<const T> x, std::span<const T> y) {
  return g == Group::x ? x : y;
}

} // namespace

template <typename T>
T Expression::evaluate(std::span<const T> x, std::span<const T> y) const {
  const auto& n = *node_;
  switch (n.op) {
  case Op::literal:
    return T(n.value);
  case Op::variable: {
    auto v = pick(n.group, x, y);
    if (n.index >= static_cast<int>(v.size()))
      throw ValidationError("variable " + print() + " exceeds dimension " + std::to_string(v.size()));
    return v[static_cast<std::size_t>(n.index)];
  }
  case Op::add:
    return n.args[0].evaluate(x, y) + n.args[1].evaluate(x, y);
  case Op::sub:
    return n.args[0].evaluate(x, y) - n.args[1].evaluate(x, y);
  case Op::mul:
    return n.args[0].evaluate(x, y) * n.args[1].evaluate(x, y);
  case Op::neg:
    return -n.args[0].evaluate(x, y);
  case Op::dot: {
    auto a = pick(n.group, x, y);
    auto b = pick(n.group2, x, y);
    T s(0);
    for (std::size_t i = 0; i < a.size(); ++i) s = s + a[i] * b[i];
    return s;
  }
  case Op::norm2: {
    auto a = pick(n.group, x, y);
    T s(0);
    for (const auto& v : a) s = s + v * v;
    return s;
  }
  case Op::div:
  case Op::pow:
  case Op::sqrt:
    break;
  }

  const T lhs = n.args[0].evaluate(x, y);
  const T rhs = n.op == Op::div ? n.args[1].evaluate(x, y) : T(0);
  try {
    if (n.op == Op::div) return checked_div(lhs, rhs);
    if (n.op == Op::pow) return int_pow(lhs, n.exponent);
    return checked_sqrt(lhs);
  } catch (const DomainError& e) {
    throw DomainError(std::string(e.what()) + " in sub-expression '" + print() + "'");
  }
}

template double Expression::evaluate(std::span<const double>, std::span<const double>) const;
template long double Expression::evaluate(std::span<const long double>, std::span<const long double>) const;
template Jet Expression::evaluate(std::span<const Jet>, std::span<const Jet>) const;

// ---------------------------------------------------------------------------
// parsing

namespace {

class Parser {
public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expression parse() {
    Expression e = expr();
    skip();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

private:
  [[noreturn]] void fail(const std::string& message) const { throw ParseError("syntax error: " + message, pos_); }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expression expr() {
    Expression lhs = term();
    while (true) {
      if (accept('+'))
        lhs = Expression::binary(Op::add, lhs, term());
      else if (accept('-'))
        lhs = Expression::binary(Op::sub, lhs, term());
      else
        return lhs;
    }
  }

  Expression term() {
    Expression lhs = unary();
    while (true) {
      if (accept('*'))
        lhs = Expression::binary(Op::mul, lhs, unary());
      else if (accept('/'))
        lhs = Expression::binary(Op::div, lhs, unary());
      else
        return lhs;
    }
  }

  Expression unary() {
    if (accept('-')) return Expression::negate(unary());
    return power();
  }

  Expression power() {
    Expression base = primary();
    if (accept('^')) return Expression::power(base, exponent());
    return base;
  }

  int exponent() {
    const bool paren = accept('(');
    const bool negative = accept('-');
    skip();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer exponent");
    int value = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc() || ptr != text_.data() + pos_) fail("exponent out of range");
    if (paren) expect(')');
    return negative ? -value : value;
  }

  Expression primary() {
    skip();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expression e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail("expected operand");
  }

  Expression number() {
    const std::size_t start = pos_;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
    if (ec != std::errc()) fail("malformed number");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    if (pos_ == start) fail("malformed number");
    return Expression::literal(value);
  }

  Group group_argument() {
    skip();
    const std::size_t at = pos_;
    std::string id = word();
    if (id == "x") return Group::x;
    if (id == "y") return Group::y;
    pos_ = at;
    fail("expected 'x' or 'y' as reducer argument");
  }

  std::string word() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  void arity_mismatch(const std::string& name, int expected, std::size_t at) const {
    throw ParseError("arity mismatch: " + name + " takes " + std::to_string(expected) + " argument(s)", at);
  }

  Expression identifier() {
    const std::size_t start = pos_;
    const std::string id = word();
    if (id == "sqrt" || id == "dot" || id == "norm2") {
      expect('(');
      if (id == "sqrt") {
        Expression arg = expr();
        if (accept(',')) arity_mismatch(id, 1, pos_ - 1);
        expect(')');
        return Expression::square_root(arg);
      }
      if (id == "dot") {
        Group a = group_argument();
        if (!accept(',')) arity_mismatch(id, 2, pos_);
        Group b = group_argument();
        if (accept(',')) arity_mismatch(id, 2, pos_ - 1);
        expect(')');
        return Expression::dot(a, b);
      }
      Group g = group_argument();
      if (accept(',')) arity_mismatch(id, 1, pos_ - 1);
      expect(')');
      return Expression::norm2(g);
    }
    if ((id[0] == 'x' || id[0] == 'y') && id.size() > 1) {
      bool digits = true;
      for (std::size_t i = 1; i < id.size(); ++i) digits = digits && std::isdigit(static_cast<unsigned char>(id[i]));
      int index = 0;
      if (digits) {
        auto [ptr, ec] = std::from_chars(id.data() + 1, id.data() + id.size(), index);
        if (ec == std::errc() && index >= 1)
          return Expression::variable(id[0] == 'x' ? Group::x : Group::y, index - 1);
      }
    }
    throw ParseError("unknown identifier '" + id + "'", start);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

} // namespace

Expression parse_expression(std::string_view text) { return Parser(text).parse(); }

} // namespace finsler
