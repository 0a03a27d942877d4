#include "core/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "core/errors.hpp"

namespace fokker {

struct Expr::Node {
  enum class Kind { constant, var_x, var_t, add, sub, mul, div, pow, neg, call };
  Kind kind;
  double value = 0.0;
  double (*fn)(double) = nullptr;
  std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using Node = Expr::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Kind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

struct Parser {
  const std::string& s;
  std::size_t pos = 0;

  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorCode::domain,
         "expression parse error at position " + std::to_string(pos) + ": " + msg + " in \"" + s + "\"");
  }

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }

  bool consume(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    while (true) {
      if (consume('+'))
        lhs = make(Node::Kind::add, lhs, parse_term());
      else if (consume('-'))
        lhs = make(Node::Kind::sub, lhs, parse_term());
      else
        return lhs;
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    while (true) {
      if (consume('*'))
        lhs = make(Node::Kind::mul, lhs, parse_unary());
      else if (consume('/'))
        lhs = make(Node::Kind::div, lhs, parse_unary());
      else
        return lhs;
    }
  }

  NodePtr parse_unary() {
    if (consume('-')) return make(Node::Kind::neg, parse_unary());
    consume('+');
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (consume('^')) return make(Node::Kind::pow, base, parse_unary());  // right-associative
    return base;
  }

  NodePtr parse_primary() {
    const char c = peek();
    if (c == '(') {
      ++pos;
      NodePtr inner = parse_expr();
      if (!consume(')')) error("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
    error("expected a number, variable, function, or '('");
  }

  NodePtr parse_number() {
    skip_ws();
    const char* begin = s.c_str() + pos;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) error("malformed number");
    pos += static_cast<std::size_t>(end - begin);
    auto n = make(Node::Kind::constant);
    const_cast<Node&>(*n).value = v;
    return n;
  }

  NodePtr parse_ident() {
    skip_ws();
    std::size_t start = pos;
    while (pos < s.size() && std::isalpha(static_cast<unsigned char>(s[pos]))) ++pos;
    const std::string name = s.substr(start, pos - start);
    if (name == "x") return make(Node::Kind::var_x);
    if (name == "t") return make(Node::Kind::var_t);
    double (*fn)(double) = nullptr;
    if (name == "exp")
      fn = [](double v) { return std::exp(v); };
    else if (name == "log")
      fn = [](double v) { return std::log(v); };
    else if (name == "sin")
      fn = [](double v) { return std::sin(v); };
    else if (name == "cos")
      fn = [](double v) { return std::cos(v); };
    else if (name == "sqrt")
      fn = [](double v) { return std::sqrt(v); };
    else
      error("unknown identifier '" + name + "'");
    if (!consume('(')) error("function '" + name + "' needs '('");
    NodePtr arg = parse_expr();
    if (!consume(')')) error("expected ')' after function argument");
    auto n = make(Node::Kind::call, arg);
    const_cast<Node&>(*n).fn = fn;
    return n;
  }
};

bool node_uses_time(const Node& n) {
  if (n.kind == Node::Kind::var_t) return true;
  if (n.lhs && node_uses_time(*n.lhs)) return true;
  return n.rhs && node_uses_time(*n.rhs);
}

double eval_node(const Node& n, double x, double t) {
  switch (n.kind) {
    case Node::Kind::constant: return n.value;
    case Node::Kind::var_x: return x;
    case Node::Kind::var_t: return t;
    case Node::Kind::add: return eval_node(*n.lhs, x, t) + eval_node(*n.rhs, x, t);
    case Node::Kind::sub: return eval_node(*n.lhs, x, t) - eval_node(*n.rhs, x, t);
    case Node::Kind::mul: return eval_node(*n.lhs, x, t) * eval_node(*n.rhs, x, t);
    case Node::Kind::div: return eval_node(*n.lhs, x, t) / eval_node(*n.rhs, x, t);
    case Node::Kind::pow: return std::pow(eval_node(*n.lhs, x, t), eval_node(*n.rhs, x, t));
    case Node::Kind::neg: return -eval_node(*n.lhs, x, t);
    case Node::Kind::call: return n.fn(eval_node(*n.lhs, x, t));
  }
  return 0.0;
}

}  // namespace

Expr Expr::parse(const std::string& text) {
  Parser p{text};
  NodePtr root = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size()) p.error("trailing characters");
  return Expr(std::move(root), text);
}

double Expr::eval(double x, double t) const { return eval_node(*root_, x, t); }

bool Expr::uses_time() const { return node_uses_time(*root_); }

}  // namespace fokker
