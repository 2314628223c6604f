#include "chainscape/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "chainscape/error.hpp"

namespace chainscape {

class ExprParser {
 public:
  ExprParser(std::string_view text, int dimension) : s_(text), dim_(dimension) {}

  Expression run() {
    out_.source_ = std::string(s_);
    skip();
    if (pos_ == s_.size()) fail("empty expression");
    out_.root_ = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return std::move(out_);
  }

 private:
  using Op = Expression::Op;

  [[noreturn]] void fail(const std::string& msg) const { fail_at(msg, pos_); }
  [[noreturn]] void fail_at(const std::string& msg, std::size_t at) const {
    throw ParseError("syntax error at offset " + std::to_string(at) + ": " + msg, at);
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
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  int add(Op op, int lhs = -1, int rhs = -1, double value = 0.0) {
    out_.nodes_.push_back({op, lhs, rhs, value});
    return static_cast<int>(out_.nodes_.size()) - 1;
  }

  int sum() {
    int lhs = product();
    while (true) {
      if (accept('+')) lhs = add(Op::add, lhs, product());
      else if (accept('-')) lhs = add(Op::sub, lhs, product());
      else return lhs;
    }
  }

  int product() {
    int lhs = unary();
    while (true) {
      if (accept('*')) lhs = add(Op::mul, lhs, unary());
      else if (accept('/')) lhs = add(Op::div, lhs, unary());
      else return lhs;
    }
  }

  int unary() {
    if (accept('-')) return add(Op::neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  int power() {
    int base = primary();
    if (accept('^')) return add(Op::pow, base, unary());
    return base;
  }

  int primary() {
    skip();
    if (pos_ >= s_.size()) fail("expected operand");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    if (accept('(')) {
      int inner = sum();
      expect(')');
      return inner;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  int number() {
    const std::size_t start = pos_;
    std::string buf(s_.substr(pos_));
    char* end = nullptr;
    const double v = std::strtod(buf.c_str(), &end);
    const std::size_t used = static_cast<std::size_t>(end - buf.c_str());
    if (used == 0) fail_at("malformed number", start);
    pos_ += used;
    return add(Op::constant, -1, -1, v);
  }

  int identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name(s_.substr(start, pos_ - start));
    if (name == "pi") return add(Op::constant, -1, -1, std::numbers::pi);
    if (name == "e") return add(Op::constant, -1, -1, std::numbers::e);
    if (name.size() >= 2 && name[0] == 'x' &&
        name.find_first_not_of("0123456789", 1) == std::string::npos) {
      if (name.size() > 6) fail_at("variable index too large", start);
      const int k = std::stoi(name.substr(1));
      if (dim_ >= 0 && k >= dim_) {
        fail_at("unknown identifier '" + name + "' (dimension is " + std::to_string(dim_) + ")",
                start);
      }
      if (k > out_.max_var_) out_.max_var_ = k;
      return add(Op::variable, -1, -1, k);
    }
    struct Fn {
      const char* name;
      Op op;
      int arity;
    };
    static constexpr Fn fns[] = {{"sin", Op::sin, 1},   {"cos", Op::cos, 1}, {"exp", Op::exp, 1},
                                 {"abs", Op::abs, 1},   {"sqrt", Op::sqrt, 1},
                                 {"min", Op::min, 2},   {"max", Op::max, 2}};
    for (const Fn& f : fns) {
      if (name != f.name) continue;
      skip();
      if (!accept('(')) fail("expected '(' after function " + name);
      std::vector<int> args;
      if (!accept(')')) {
        args.push_back(sum());
        while (accept(',')) args.push_back(sum());
        expect(')');
      }
      if (static_cast<int>(args.size()) != f.arity) {
        fail_at("function " + name + " takes " + std::to_string(f.arity) + " argument(s), got " +
                    std::to_string(args.size()),
                start);
      }
      return add(f.op, args[0], f.arity == 2 ? args[1] : -1);
    }
    fail_at("unknown identifier '" + name + "'", start);
  }

  std::string_view s_;
  int dim_;
  std::size_t pos_ = 0;
  Expression out_;
};

Expression parse_expr(std::string_view text, int dimension) {
  return ExprParser(text, dimension).run();
}

double Expression::eval(std::span<const double> x) const {
  if (root_ < 0) throw EvalError("empty expression");
  return eval_node(root_, x);
}

namespace {
double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw EvalError(std::string("non-finite value in ") + what);
  return v;
}
}  // namespace

double Expression::eval_node(int i, std::span<const double> x) const {
  const Node& n = nodes_[static_cast<std::size_t>(i)];
  switch (n.op) {
    case Op::constant:
      return n.value;
    case Op::variable: {
      const auto k = static_cast<std::size_t>(n.value);
      if (k >= x.size()) throw EvalError("variable x" + std::to_string(k) + " out of range");
      return x[k];
    }
    case Op::neg:
      return -eval_node(n.lhs, x);
    case Op::add:
      return checked(eval_node(n.lhs, x) + eval_node(n.rhs, x), "addition");
    case Op::sub:
      return checked(eval_node(n.lhs, x) - eval_node(n.rhs, x), "subtraction");
    case Op::mul:
      return checked(eval_node(n.lhs, x) * eval_node(n.rhs, x), "multiplication");
    case Op::div: {
      const double a = eval_node(n.lhs, x);
      const double b = eval_node(n.rhs, x);
      if (b == 0.0) throw EvalError("division by zero");
      return checked(a / b, "division");
    }
    case Op::pow: {
      const double a = eval_node(n.lhs, x);
      const double b = eval_node(n.rhs, x);
      if (b == 2.0) return checked(a * a, "power");
      return checked(std::pow(a, b), "power");
    }
    case Op::sin:
      return std::sin(eval_node(n.lhs, x));
    case Op::cos:
      return std::cos(eval_node(n.lhs, x));
    case Op::exp:
      return checked(std::exp(eval_node(n.lhs, x)), "exp");
    case Op::abs:
      return std::abs(eval_node(n.lhs, x));
    case Op::sqrt: {
      const double a = eval_node(n.lhs, x);
      if (a < 0.0) throw EvalError("sqrt of negative value");
      return std::sqrt(a);
    }
    case Op::min:
      return std::min(eval_node(n.lhs, x), eval_node(n.rhs, x));
    case Op::max:
      return std::max(eval_node(n.lhs, x), eval_node(n.rhs, x));
  }
  throw EvalError("corrupt expression");
}

}  // namespace chainscape
