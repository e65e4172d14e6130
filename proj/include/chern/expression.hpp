#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>

namespace chern {

/// Raised for malformed expression sources. `offset` is the byte position of
/// the offending token.
class ParseError : public std::runtime_error {
 public:
  enum class Kind { Syntax, UnknownIdentifier, IndexOutOfRange };

  ParseError(Kind kind, const std::string& message, std::size_t offset)
      : std::runtime_error(message + " (byte " + std::to_string(offset) + ")"),
        kind_(kind),
        offset_(offset) {}

  Kind kind() const { return kind_; }
  std::size_t offset() const { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

/// Raised for singular evaluations (division by zero, log of zero); carries
/// the offending subtree in serialized form.
class EvalError : public std::runtime_error {
 public:
  EvalError(const std::string& message, std::string subtree)
      : std::runtime_error(message + " in subexpression " + subtree),
        subtree_(std::move(subtree)) {}

  const std::string& subtree() const { return subtree_; }

 private:
  std::string subtree_;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable AST over the holomorphic coordinates z1..zn and their formal
/// conjugates w1..wn. Subtrees are shared; all operations are pure.
struct Expr {
  enum class Kind { Constant, Variable, Add, Sub, Mul, Div, Pow, Neg, Exp, Log };

  Kind kind = Kind::Constant;
  std::complex<double> value{};  // Constant
  bool is_conjugate = false;     // Variable: true selects w_k
  int index = 0;                 // Variable: 1-based coordinate index
  int exponent = 0;              // Pow
  ExprPtr a, b;
};

// Folding constructors (constant folding and 0/1 eliminations only).
ExprPtr make_const(std::complex<double> v);
ExprPtr make_var(bool is_conjugate, int index);
ExprPtr make_add(ExprPtr a, ExprPtr b);
ExprPtr make_sub(ExprPtr a, ExprPtr b);
ExprPtr make_mul(ExprPtr a, ExprPtr b);
ExprPtr make_div(ExprPtr a, ExprPtr b);
ExprPtr make_pow(ExprPtr a, int exponent);
ExprPtr make_neg(ExprPtr a);
ExprPtr make_exp(ExprPtr a);
ExprPtr make_log(ExprPtr a);

/// Parses `src` against the metric-entry grammar with coordinate dimension n.
ExprPtr parse_expression(std::string_view src, int n);

/// A Wirtinger differentiation direction: d/dz_k or d/dw_k (1-based k).
struct WirtingerVar {
  bool is_conjugate = false;
  int index = 1;
};

/// Exact symbolic derivative treating every z_k and w_k as independent.
ExprPtr differentiate(const ExprPtr& e, WirtingerVar var);

/// Serializes with full parenthesization; parsing the result reproduces a
/// structurally identical tree.
std::string to_string(const ExprPtr& e);
std::string to_string(const Expr& e);

bool structurally_equal(const ExprPtr& a, const ExprPtr& b);

/// Largest coordinate index appearing in the tree (0 for constant trees).
int max_var_index(const ExprPtr& e);

namespace detail {

template <typename C>
C ipow_checked(C base, int k, const Expr& node) {
  if (k < 0) {
    if (base == C(0)) throw EvalError("zero raised to a negative power", to_string(node));
    return C(1) / ipow_checked(base, -k, node);
  }
  C r(1);
  while (k > 0) {
    if (k & 1) r *= base;
    base *= base;
    k >>= 1;
  }
  return r;
}

template <typename C>
C evaluate_node(const Expr* e, std::span<const C> z, std::span<const C> w,
                std::unordered_map<const Expr*, C>& memo) {
  auto it = memo.find(e);
  if (it != memo.end()) return it->second;
  C result{};
  switch (e->kind) {
    case Expr::Kind::Constant:
      result = C(e->value.real(), e->value.imag());
      break;
    case Expr::Kind::Variable:
      result = e->is_conjugate ? w[static_cast<std::size_t>(e->index - 1)]
                               : z[static_cast<std::size_t>(e->index - 1)];
      break;
    case Expr::Kind::Add:
      result = evaluate_node(e->a.get(), z, w, memo) + evaluate_node(e->b.get(), z, w, memo);
      break;
    case Expr::Kind::Sub:
      result = evaluate_node(e->a.get(), z, w, memo) - evaluate_node(e->b.get(), z, w, memo);
      break;
    case Expr::Kind::Mul:
      result = evaluate_node(e->a.get(), z, w, memo) * evaluate_node(e->b.get(), z, w, memo);
      break;
    case Expr::Kind::Div: {
      const C num = evaluate_node(e->a.get(), z, w, memo);
      const C den = evaluate_node(e->b.get(), z, w, memo);
      if (den == C(0)) throw EvalError("division by zero", to_string(*e->b));
      result = num / den;
      break;
    }
    case Expr::Kind::Pow:
      result = ipow_checked(evaluate_node(e->a.get(), z, w, memo), e->exponent, *e->a);
      break;
    case Expr::Kind::Neg:
      result = -evaluate_node(e->a.get(), z, w, memo);
      break;
    case Expr::Kind::Exp: {
      using std::exp;
      result = exp(evaluate_node(e->a.get(), z, w, memo));
      break;
    }
    case Expr::Kind::Log: {
      const C arg = evaluate_node(e->a.get(), z, w, memo);
      if (arg == C(0)) throw EvalError("log of zero", to_string(*e->a));
      using std::log;
      result = log(arg);
      break;
    }
  }
  memo.emplace(e, result);
  return result;
}

}  // namespace detail

/// Evaluates with independent bindings for z and w. The scalar type C must be
/// a complex type supporting arithmetic, exp, and log (std::complex<double>
/// or a higher-precision complex type).
template <typename C>
C evaluate_unbound(const ExprPtr& e, std::span<const C> z, std::span<const C> w) {
  std::unordered_map<const Expr*, C> memo;
  return detail::evaluate_node(e.get(), z, w, memo);
}

/// Evaluates at a chart point with w_k bound to conj(z_k).
std::complex<double> evaluate(const ExprPtr& e, std::span<const std::complex<double>> z);

}  // namespace chern
