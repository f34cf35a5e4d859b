#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "numeric.hpp"
#include "rng.hpp"

// A small expression language in one variable x, used to write the
// coefficients sigma, b and gamma in configuration files.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?            right-associative
//   primary := number | 'x' | name '(' expr (',' expr)* ')' | '(' expr ')'
//
// Functions: abs, sign, min, max, clamp(v, lo, hi), exp, log, pow.

namespace stable_sde {

enum class Op { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Abs, Sign, Min, Max, Clamp, Exp, Log };

struct ExprNode {
  Op op = Op::Number;
  double number = 0.0;
  std::uint32_t args[3] = {0, 0, 0};
  std::uint8_t arity = 0;
  /// Byte offset of the token that produced this node.
  std::size_t offset = 0;
};

/// Evaluation failure, pointing at the sub-expression that failed.
class EvalFailure : public Error {
 public:
  EvalFailure(std::size_t offset, const std::string& reason)
      : Error(ErrorKind::EvalError, reason + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Immutable parsed expression. Copies share the node storage.
class Expr {
 public:
  Expr() = default;
  Expr(std::vector<ExprNode> nodes, std::uint32_t root, std::string source)
      : nodes_(std::make_shared<const std::vector<ExprNode>>(std::move(nodes))),
        root_(root),
        source_(std::make_shared<const std::string>(std::move(source))) {}

  bool empty() const noexcept { return !nodes_; }
  const ExprNode& node(std::uint32_t i) const { return (*nodes_)[i]; }
  std::uint32_t root() const noexcept { return root_; }
  const std::string& source() const { return *source_; }

 private:
  std::shared_ptr<const std::vector<ExprNode>> nodes_;
  std::uint32_t root_ = 0;
  std::shared_ptr<const std::string> source_;
};

namespace lang_detail {

struct FunctionInfo {
  std::string_view name;
  Op op;
  int arity;
};

inline constexpr FunctionInfo kFunctions[] = {
    {"abs", Op::Abs, 1}, {"sign", Op::Sign, 1}, {"min", Op::Min, 2},  {"max", Op::Max, 2},
    {"clamp", Op::Clamp, 3}, {"exp", Op::Exp, 1}, {"log", Op::Log, 1}, {"pow", Op::Pow, 2},
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr run() {
    skip_ws();
    const std::uint32_t root = expr();
    skip_ws();
    if (pos_ != text_.size()) syntax("operator or end of input");
    return Expr(std::move(nodes_), root, std::string(text_));
  }

 private:
  [[noreturn]] void syntax(std::string expected) {
    const std::string found = pos_ < text_.size() ? "'" + std::string(1, text_[pos_]) + "'" : "end of input";
    throw ParseError(ErrorKind::SyntaxError, pos_, std::move(expected), "unexpected " + found);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::uint32_t push(ExprNode n) {
    nodes_.push_back(n);
    return static_cast<std::uint32_t>(nodes_.size() - 1);
  }

  std::uint32_t binary(Op op, std::uint32_t a, std::uint32_t b, std::size_t at) {
    ExprNode n;
    n.op = op;
    n.args[0] = a;
    n.args[1] = b;
    n.arity = 2;
    n.offset = at;
    return push(n);
  }

  std::uint32_t expr() {
    std::uint32_t lhs = term();
    for (;;) {
      skip_ws();
      const std::size_t at = pos_;
      if (accept('+'))
        lhs = binary(Op::Add, lhs, term(), at);
      else if (accept('-'))
        lhs = binary(Op::Sub, lhs, term(), at);
      else
        return lhs;
    }
  }

  std::uint32_t term() {
    std::uint32_t lhs = unary();
    for (;;) {
      skip_ws();
      const std::size_t at = pos_;
      if (accept('*'))
        lhs = binary(Op::Mul, lhs, unary(), at);
      else if (accept('/'))
        lhs = binary(Op::Div, lhs, unary(), at);
      else
        return lhs;
    }
  }

  std::uint32_t unary() {
    skip_ws();
    const std::size_t at = pos_;
    if (accept('-')) {
      ExprNode n;
      n.op = Op::Neg;
      n.args[0] = unary();
      n.arity = 1;
      n.offset = at;
      return push(n);
    }
    return power();
  }

  std::uint32_t power() {
    const std::uint32_t base = primary();
    skip_ws();
    const std::size_t at = pos_;
    if (accept('^')) return binary(Op::Pow, base, unary(), at);
    return base;
  }

  std::uint32_t primary() {
    skip_ws();
    const std::size_t at = pos_;
    if (pos_ >= text_.size()) syntax("number, 'x', function or '('");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      const std::uint32_t inner = expr();
      if (!accept(')')) syntax("')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) ++end;
      const std::string_view name = text_.substr(pos_, end - pos_);
      pos_ = end;
      if (name == "x") {
        ExprNode n;
        n.op = Op::Var;
        n.offset = at;
        return push(n);
      }
      const FunctionInfo* fn = nullptr;
      for (const auto& f : kFunctions)
        if (f.name == name) fn = &f;
      if (!fn)
        throw ParseError(ErrorKind::UnknownIdentifier, at, "x or one of abs, sign, min, max, clamp, exp, log, pow",
                         "unknown identifier '" + std::string(name) + "'");
      if (!accept('(')) syntax("'(' after " + std::string(name));
      ExprNode n;
      n.op = fn->op;
      n.offset = at;
      for (int i = 0; i < fn->arity; ++i) {
        if (i > 0 && !accept(',')) syntax("',' (" + std::string(name) + " takes " + std::to_string(fn->arity) +
                                          " arguments)");
        n.args[i] = expr();
      }
      if (!accept(')')) syntax("')' (" + std::string(name) + " takes " + std::to_string(fn->arity) + " arguments)");
      n.arity = static_cast<std::uint8_t>(fn->arity);
      return push(n);
    }
    syntax("number, 'x', function or '('");
  }

  std::uint32_t number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        digits();
      else
        pos_ = save;
    }
    const auto value = parse_double(text_.substr(start, pos_ - start));
    if (!value) {
      pos_ = start;
      syntax("number");
    }
    ExprNode n;
    n.op = Op::Number;
    n.number = *value;
    n.offset = start;
    return push(n);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<ExprNode> nodes_;
};

inline double checked(double v, const ExprNode& n, const char* what) {
  if (!std::isfinite(v)) throw EvalFailure(n.offset, std::string("non-finite result of ") + what);
  return v;
}

inline double eval_node(const Expr& e, std::uint32_t i, double x) {
  const ExprNode& n = e.node(i);
  auto arg = [&](int k) { return eval_node(e, n.args[k], x); };
  switch (n.op) {
    case Op::Number: return n.number;
    case Op::Var: return x;
    case Op::Neg: return -arg(0);
    case Op::Add: return checked(arg(0) + arg(1), n, "'+'");
    case Op::Sub: return checked(arg(0) - arg(1), n, "'-'");
    case Op::Mul: return checked(arg(0) * arg(1), n, "'*'");
    case Op::Div: {
      const double num = arg(0), den = arg(1);
      if (den == 0.0) throw EvalFailure(n.offset, "division by zero");
      return checked(num / den, n, "'/'");
    }
    case Op::Pow: {
      const double base = arg(0), ex = arg(1);
      if (base < 0.0 && ex != std::trunc(ex))
        throw EvalFailure(n.offset, "negative base with non-integer exponent (write sign(x)*abs(x)^p)");
      if (base == 0.0 && ex < 0.0) throw EvalFailure(n.offset, "zero raised to a negative power");
      return checked(std::pow(base, ex), n, "power");
    }
    case Op::Abs: return std::abs(arg(0));
    case Op::Sign: return sign_of(arg(0));
    case Op::Min: return std::min(arg(0), arg(1));
    case Op::Max: return std::max(arg(0), arg(1));
    case Op::Clamp: {
      const double v = arg(0), lo = arg(1), hi = arg(2);
      if (lo > hi) throw EvalFailure(n.offset, "clamp with lower bound above upper bound");
      return std::clamp(v, lo, hi);
    }
    case Op::Exp: return checked(std::exp(arg(0)), n, "exp");
    case Op::Log: {
      const double v = arg(0);
      if (!(v > 0.0)) throw EvalFailure(n.offset, "log of a non-positive value");
      return std::log(v);
    }
  }
  throw EvalFailure(n.offset, "corrupt expression node");
}

inline std::string_view op_name(Op op) {
  for (const auto& f : kFunctions)
    if (f.op == op) return f.name;
  return "";
}

inline void print_node(const Expr& e, std::uint32_t i, std::string& out) {
  const ExprNode& n = e.node(i);
  auto infix = [&](char sym) {
    out += '(';
    print_node(e, n.args[0], out);
    out += sym;
    print_node(e, n.args[1], out);
    out += ')';
  };
  switch (n.op) {
    case Op::Number: out += format_double(n.number); return;
    case Op::Var: out += 'x'; return;
    case Op::Neg:
      out += "(-";
      print_node(e, n.args[0], out);
      out += ')';
      return;
    case Op::Add: infix('+'); return;
    case Op::Sub: infix('-'); return;
    case Op::Mul: infix('*'); return;
    case Op::Div: infix('/'); return;
    case Op::Pow: infix('^'); return;
    default:
      out += op_name(n.op);
      out += '(';
      for (int k = 0; k < n.arity; ++k) {
        if (k) out += ',';
        print_node(e, n.args[k], out);
      }
      out += ')';
      return;
  }
}

inline bool same_tree(const Expr& a, std::uint32_t i, const Expr& b, std::uint32_t j) {
  const ExprNode& x = a.node(i);
  const ExprNode& y = b.node(j);
  if (x.op != y.op || x.arity != y.arity) return false;
  if (x.op == Op::Number) return x.number == y.number;
  for (int k = 0; k < x.arity; ++k)
    if (!same_tree(a, x.args[k], b, y.args[k])) return false;
  return true;
}

}  // namespace lang_detail

inline Expr parse(std::string_view text) { return lang_detail::Parser(text).run(); }

/// Evaluates at x. Throws EvalFailure instead of ever returning NaN or inf.
inline double evaluate(const Expr& e, double x) {
  if (e.empty()) fail(ErrorKind::EvalError, "empty expression");
  if (!std::isfinite(x)) throw EvalFailure(0, "non-finite argument");
  return lang_detail::eval_node(e, e.root(), x);
}

/// Fully parenthesised text that parses back to the same tree.
inline std::string print(const Expr& e) {
  std::string out;
  lang_detail::print_node(e, e.root(), out);
  return out;
}

/// Structural equality, ignoring source offsets.
inline bool structurally_equal(const Expr& a, const Expr& b) {
  return lang_detail::same_tree(a, a.root(), b, b.root());
}

using Evaluator = std::function<double(double)>;

inline Evaluator evaluator(Expr e) {
  return [e = std::move(e)](double x) { return evaluate(e, x); };
}

/// gamma(x) = sign(sigma(x)) |sigma(x)|^alpha, exactly zero where sigma is.
inline double gamma_from_sigma(double sigma, double alpha) {
  if (sigma == 0.0) return 0.0;
  return sign_of(sigma) * std::pow(std::abs(sigma), alpha);
}

inline Evaluator derive_gamma(Evaluator sigma, double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0) || alpha == 1.0)
    fail(ErrorKind::AlphaOutOfRange, "alpha must lie in (0,2) minus {1}");
  return [sigma = std::move(sigma), alpha](double x) { return gamma_from_sigma(sigma(x), alpha); };
}

inline Evaluator derive_gamma(const Expr& sigma, double alpha) { return derive_gamma(evaluator(sigma), alpha); }

struct HolderEstimate {
  /// Fitted exponent; +infinity when the sample is degenerate.
  double index = 0.0;
  /// max |f(x)-f(y)| / |x-y|^index over all evaluated pairs.
  double constant = 0.0;
  bool degenerate = false;
  /// Set when a declared index exceeds the fit by more than 0.1.
  bool contradicts_declared = false;
};

/// Multi-scale Hoelder diagnostic. For step sizes h = (hi-lo) 2^{-j-1} it
/// records the largest |f(x+h) - f(x)| over random pairs, half of them drawn
/// near the worst point of the previous scale, and regresses the log of that
/// maximum on log h. The slope estimates the worst-case local exponent,
/// which uniform random pairs alone tend to miss.
inline HolderEstimate empirical_holder_estimate(const Evaluator& f, double lo, double hi, int n_pairs,
                                                std::uint64_t seed, std::optional<double> declared = std::nullopt) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    fail(ErrorKind::InvalidArgument, "Hoelder estimate needs a finite interval with lo < hi");
  if (n_pairs < 1000) fail(ErrorKind::InvalidArgument, "Hoelder estimate needs at least 1000 pairs");

  constexpr int kLevels = 16;
  const int per_level = std::max(2, n_pairs / kLevels);
  const double width = hi - lo;
  Rng rng(seed);

  std::vector<double> log_h, log_m;
  std::vector<std::pair<double, double>> maxima;
  double worst_x = lo + 0.5 * width;
  for (int j = 0; j < kLevels; ++j) {
    const double h = width * std::ldexp(1.0, -j - 1);
    double best = 0.0;
    double best_x = worst_x;
    for (int i = 0; i < per_level; ++i) {
      double x;
      if (j > 0 && i % 2 == 1)
        x = std::clamp(worst_x + (2.0 * rng.uniform_open() - 1.0) * 2.0 * h, lo, hi - h);
      else
        x = lo + rng.uniform_open() * (width - h);
      const double diff = std::abs(f(x + h) - f(x));
      if (diff > best) {
        best = diff;
        best_x = x;
      }
    }
    worst_x = best_x;
    maxima.emplace_back(h, best);
    if (best > 0.0) {
      log_h.push_back(std::log(h));
      log_m.push_back(std::log(best));
    }
  }

  HolderEstimate out;
  if (log_h.size() < 2) {
    out.degenerate = true;
    out.index = std::numeric_limits<double>::infinity();
    return out;
  }
  out.index = least_squares(log_h, log_m).slope;
  for (auto [h, m] : maxima) out.constant = std::max(out.constant, m / std::pow(h, out.index));
  if (declared && out.index < *declared - 0.1) out.contradicts_declared = true;
  return out;
}

}  // namespace stable_sde
