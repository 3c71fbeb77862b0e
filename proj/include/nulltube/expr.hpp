#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace nulltube {

/// Small arithmetic expression language for surface and tube files.
///   numbers, pi, + - * / ^, unary minus, parentheses, sin cos exp sqrt
///   variables th1 th2 (alias theta1 theta2), s, sbar
class Expression {
 public:
  Expression() = default;
  /// Throws ConfigError with the offending position on malformed input.
  explicit Expression(const std::string& text);

  double operator()(double th1, double th2, double s = 0.0, double sbar = 0.0) const;
  const std::string& text() const { return text_; }
  bool uses(const std::string& variable) const;

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace nulltube
