#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chainscape {

// Arithmetic expression over x0..x{n-1}.
//
// Grammar, loosest binding first:
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?          right associative
//   primary := number | pi | e | x<k> | fn '(' args ')' | '(' sum ')'
class Expression {
 public:
  enum class Op : unsigned char {
    constant, variable, neg, add, sub, mul, div, pow,
    sin, cos, exp, abs, sqrt, min, max
  };
  struct Node {
    Op op;
    int lhs = -1;
    int rhs = -1;
    double value = 0.0;  // constant value or variable index
  };

  Expression() = default;

  // Throws EvalError on division by zero, sqrt of a negative number, or
  // any non-finite intermediate result.
  double eval(std::span<const double> x) const;

  // Highest variable index referenced, -1 when none.
  int max_variable() const { return max_var_; }
  const std::string& source() const { return source_; }
  bool empty() const { return nodes_.empty(); }

 private:
  friend class ExprParser;
  double eval_node(int i, std::span<const double> x) const;

  std::vector<Node> nodes_;
  int root_ = -1;
  int max_var_ = -1;
  std::string source_;
};

// Throws ParseError carrying the byte offset of the failure. When
// `dimension` is nonnegative, variables must have index < dimension.
Expression parse_expr(std::string_view text, int dimension = -1);

}  // namespace chainscape
