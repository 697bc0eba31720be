#pragma once

#include <memory>
#include <string>

namespace chemolimit {

/// Arithmetic expression in x and y: numbers, pi, + - * / ^, parentheses and the functions
/// sin cos tan exp log sqrt abs tanh atanh min max pow hypot.
class Expression {
 public:
  /// Throws ConfigError with the column of the first problem.
  explicit Expression(const std::string& text);
  ~Expression();
  Expression(const Expression&);
  Expression& operator=(const Expression&);

  double operator()(double x, double y) const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace chemolimit
