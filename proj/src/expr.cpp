#include "nulltube/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "nulltube/errors.hpp"

namespace nulltube {

struct Expression::Node {
  enum Kind { number, variable, neg, add, sub, mul, div, pow, call } kind = number;
  double value = 0.0;
  int slot = 0;  // variable slot or function id
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

NodePtr make(Node::Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& t) : t_(t) {}

  NodePtr parse() {
    NodePtr e = sum();
    skip();
    if (pos_ != t_.size()) fail("unexpected character");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError("expression '" + t_ + "': " + why + " at position " + std::to_string(pos_));
  }
  void skip() {
    while (pos_ < t_.size() && std::isspace(static_cast<unsigned char>(t_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < t_.size() && t_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr sum() {
    NodePtr lhs = product();
    for (;;) {
      if (eat('+')) lhs = make(Node::add, lhs, product());
      else if (eat('-')) lhs = make(Node::sub, lhs, product());
      else return lhs;
    }
  }
  NodePtr product() {
    NodePtr lhs = unary();
    for (;;) {
      if (eat('*')) lhs = make(Node::mul, lhs, unary());
      else if (eat('/')) lhs = make(Node::div, lhs, unary());
      else return lhs;
    }
  }
  NodePtr unary() {
    if (eat('-')) return make(Node::neg, unary());
    if (eat('+')) return unary();
    NodePtr base = primary();
    if (eat('^')) return make(Node::pow, base, unary());
    return base;
  }
  NodePtr primary() {
    skip();
    if (pos_ >= t_.size()) fail("unexpected end");
    if (eat('(')) {
      NodePtr e = sum();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    const char c = t_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = t_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      auto n = std::make_shared<Node>();
      n->kind = Node::number;
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < t_.size() &&
             (std::isalnum(static_cast<unsigned char>(t_[pos_])) || t_[pos_] == '_'))
        ++pos_;
      const std::string id = t_.substr(start, pos_ - start);
      static const std::map<std::string, int> functions = {
          {"sin", 0}, {"cos", 1}, {"exp", 2}, {"sqrt", 3}};
      static const std::map<std::string, int> variables = {
          {"th1", 0}, {"theta1", 0}, {"th2", 1}, {"theta2", 1}, {"s", 2}, {"sbar", 3}};
      if (auto f = functions.find(id); f != functions.end()) {
        if (!eat('(')) fail("expected '(' after " + id);
        NodePtr arg = sum();
        if (!eat(')')) fail("expected ')'");
        auto n = std::make_shared<Node>();
        n->kind = Node::call;
        n->slot = f->second;
        n->a = arg;
        return n;
      }
      if (id == "pi") {
        auto n = std::make_shared<Node>();
        n->kind = Node::number;
        n->value = std::numbers::pi;
        return n;
      }
      if (auto v = variables.find(id); v != variables.end()) {
        auto n = std::make_shared<Node>();
        n->kind = Node::variable;
        n->slot = v->second;
        return n;
      }
      pos_ = start;
      fail("unknown identifier '" + id + "'");
    }
    fail("unexpected character");
  }

  const std::string& t_;
  std::size_t pos_ = 0;
};

double evaluate(const Node& n, const double* vars) {
  switch (n.kind) {
    case Node::number: return n.value;
    case Node::variable: return vars[n.slot];
    case Node::neg: return -evaluate(*n.a, vars);
    case Node::add: return evaluate(*n.a, vars) + evaluate(*n.b, vars);
    case Node::sub: return evaluate(*n.a, vars) - evaluate(*n.b, vars);
    case Node::mul: return evaluate(*n.a, vars) * evaluate(*n.b, vars);
    case Node::div: return evaluate(*n.a, vars) / evaluate(*n.b, vars);
    case Node::pow: return std::pow(evaluate(*n.a, vars), evaluate(*n.b, vars));
    case Node::call: {
      const double x = evaluate(*n.a, vars);
      switch (n.slot) {
        case 0: return std::sin(x);
        case 1: return std::cos(x);
        case 2: return std::exp(x);
        default: return std::sqrt(x);
      }
    }
  }
  return 0.0;
}

bool mentions(const Node& n, int slot) {
  if (n.kind == Node::variable) return n.slot == slot;
  return (n.a && mentions(*n.a, slot)) || (n.b && mentions(*n.b, slot));
}

}  // namespace

Expression::Expression(const std::string& text) : text_(text) {
  root_ = Parser(text_).parse();
}

double Expression::operator()(double th1, double th2, double s, double sbar) const {
  if (!root_) return 0.0;
  const double vars[4] = {th1, th2, s, sbar};
  return evaluate(*root_, vars);
}

bool Expression::uses(const std::string& variable) const {
  static const std::map<std::string, int> slots = {{"th1", 0}, {"th2", 1}, {"s", 2}, {"sbar", 3}};
  auto it = slots.find(variable);
  return root_ && it != slots.end() && mentions(*root_, it->second);
}

}  // namespace nulltube
