#include "chemolimit/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

#include "chemolimit/error.hpp"

namespace chemolimit {

struct Expression::Node {
  enum class Kind { number, x, y, neg, add, sub, mul, div, pow, call } kind;
  double value = 0.0;
  std::string name;
  std::vector<std::shared_ptr<const Node>> args;

  double eval(double x, double y) const {
    switch (kind) {
      case Kind::number: return value;
      case Kind::x: return x;
      case Kind::y: return y;
      case Kind::neg: return -args[0]->eval(x, y);
      case Kind::add: return args[0]->eval(x, y) + args[1]->eval(x, y);
      case Kind::sub: return args[0]->eval(x, y) - args[1]->eval(x, y);
      case Kind::mul: return args[0]->eval(x, y) * args[1]->eval(x, y);
      case Kind::div: return args[0]->eval(x, y) / args[1]->eval(x, y);
      case Kind::pow: return std::pow(args[0]->eval(x, y), args[1]->eval(x, y));
      case Kind::call: break;
    }
    double a = args[0]->eval(x, y);
    if (args.size() == 2) {
      double b = args[1]->eval(x, y);
      if (name == "min") return std::min(a, b);
      if (name == "max") return std::max(a, b);
      if (name == "pow") return std::pow(a, b);
      return std::hypot(a, b);
    }
    if (name == "sin") return std::sin(a);
    if (name == "cos") return std::cos(a);
    if (name == "tan") return std::tan(a);
    if (name == "exp") return std::exp(a);
    if (name == "log") return std::log(a);
    if (name == "sqrt") return std::sqrt(a);
    if (name == "abs") return std::abs(a);
    if (name == "tanh") return std::tanh(a);
    return std::atanh(a);
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make(Kind kind, std::vector<NodePtr> args = {}, double value = 0.0, std::string name = {}) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = kind;
  n->args = std::move(args);
  n->value = value;
  n->name = std::move(name);
  return n;
}

int arity(const std::string& name) {
  for (const char* f : {"sin", "cos", "tan", "exp", "log", "sqrt", "abs", "tanh", "atanh"})
    if (name == f) return 1;
  for (const char* f : {"min", "max", "pow", "hypot"})
    if (name == f) return 2;
  return -1;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr n = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("expression: " + what + " at column " + std::to_string(pos_ + 1));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr sum() {
    NodePtr left = product();
    while (true) {
      if (accept('+')) left = make(Kind::add, {left, product()});
      else if (accept('-')) left = make(Kind::sub, {left, product()});
      else return left;
    }
  }
  NodePtr product() {
    NodePtr left = unary();
    while (true) {
      if (accept('*')) left = make(Kind::mul, {left, unary()});
      else if (accept('/')) left = make(Kind::div, {left, unary()});
      else return left;
    }
  }
  NodePtr unary() {
    if (accept('-')) return make(Kind::neg, {unary()});
    if (accept('+')) return unary();
    return power();
  }
  NodePtr power() {
    NodePtr base = atom();
    if (accept('^')) return make(Kind::pow, {base, unary()});
    return base;
  }
  NodePtr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    char c = s_[pos_];
    if (accept('(')) {
      NodePtr n = sum();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      return make(Kind::number, {}, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string name = s_.substr(start, pos_ - start);
      if (name == "x") return make(Kind::x);
      if (name == "y") return make(Kind::y);
      if (name == "pi") return make(Kind::number, {}, std::numbers::pi);
      int n = arity(name);
      if (n < 0) {
        pos_ = start;
        fail("unknown name '" + name + "'");
      }
      if (!accept('(')) fail("expected '(' after " + name);
      std::vector<NodePtr> args{sum()};
      for (int k = 1; k < n; ++k) {
        if (!accept(',')) fail("expected ',' in " + name);
        args.push_back(sum());
      }
      if (!accept(')')) fail("expected ')' after arguments of " + name);
      return make(Kind::call, std::move(args), 0.0, name);
    }
    fail("unexpected character");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression(const std::string& text) : text_(text), root_(Parser(text).parse()) {}
Expression::~Expression() = default;
Expression::Expression(const Expression&) = default;
Expression& Expression::operator=(const Expression&) = default;

double Expression::operator()(double x, double y) const { return root_->eval(x, y); }

}  // namespace chemolimit
