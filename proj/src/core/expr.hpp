#pragma once

#include <memory>
#include <string>

namespace fokker {

//! Compiled arithmetic expression in the variables x and t.
//!
//! Grammar: + - * / ^ (right-assoc), unary minus, parentheses, numeric
//! literals, and the functions exp, log, sin, cos, sqrt. Parse errors carry
//! the offending position in the message.
class Expr {
public:
  static Expr parse(const std::string& text);

  double eval(double x, double t) const;
  bool uses_time() const;
  const std::string& text() const noexcept { return text_; }

  struct Node;

private:
  Expr(std::shared_ptr<const Node> root, std::string text)
      : root_(std::move(root)), text_(std::move(text)) {}

  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace fokker
