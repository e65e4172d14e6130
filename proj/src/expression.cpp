#include "chern/expression.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <vector>

namespace chern {

namespace {

using Complex = std::complex<double>;

bool is_const(const ExprPtr& e, Complex v) {
  return e->kind == Expr::Kind::Constant && e->value == v;
}

ExprPtr node(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

}  // namespace

ExprPtr make_const(Complex v) {
  Expr e;
  e.kind = Expr::Kind::Constant;
  e.value = v;
  return node(std::move(e));
}

ExprPtr make_var(bool is_conjugate, int index) {
  Expr e;
  e.kind = Expr::Kind::Variable;
  e.is_conjugate = is_conjugate;
  e.index = index;
  return node(std::move(e));
}

ExprPtr make_add(ExprPtr a, ExprPtr b) {
  if (a->kind == Expr::Kind::Constant && b->kind == Expr::Kind::Constant)
    return make_const(a->value + b->value);
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  Expr e;
  e.kind = Expr::Kind::Add;
  e.a = std::move(a);
  e.b = std::move(b);
  return node(std::move(e));
}

ExprPtr make_sub(ExprPtr a, ExprPtr b) {
  if (a->kind == Expr::Kind::Constant && b->kind == Expr::Kind::Constant)
    return make_const(a->value - b->value);
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return make_neg(std::move(b));
  Expr e;
  e.kind = Expr::Kind::Sub;
  e.a = std::move(a);
  e.b = std::move(b);
  return node(std::move(e));
}

ExprPtr make_mul(ExprPtr a, ExprPtr b) {
  if (a->kind == Expr::Kind::Constant && b->kind == Expr::Kind::Constant)
    return make_const(a->value * b->value);
  if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  Expr e;
  e.kind = Expr::Kind::Mul;
  e.a = std::move(a);
  e.b = std::move(b);
  return node(std::move(e));
}

ExprPtr make_div(ExprPtr a, ExprPtr b) {
  // Never fold a zero denominator: evaluation must report the singularity.
  if (a->kind == Expr::Kind::Constant && b->kind == Expr::Kind::Constant &&
      b->value != Complex(0.0))
    return make_const(a->value / b->value);
  if (is_const(b, 1.0)) return a;
  Expr e;
  e.kind = Expr::Kind::Div;
  e.a = std::move(a);
  e.b = std::move(b);
  return node(std::move(e));
}

ExprPtr make_pow(ExprPtr a, int exponent) {
  if (exponent == 0) return make_const(1.0);
  if (exponent == 1) return a;
  if (a->kind == Expr::Kind::Constant && !(a->value == Complex(0.0) && exponent < 0)) {
    Expr probe;  // reuse the checked integer power on the folded constant
    probe.kind = Expr::Kind::Constant;
    probe.value = a->value;
    return make_const(detail::ipow_checked(a->value, exponent, probe));
  }
  if (a->kind == Expr::Kind::Pow) {
    const long long combined = static_cast<long long>(a->exponent) * exponent;
    if (combined >= -512 && combined <= 512)
      return make_pow(a->a, static_cast<int>(combined));
  }
  Expr e;
  e.kind = Expr::Kind::Pow;
  e.exponent = exponent;
  e.a = std::move(a);
  return node(std::move(e));
}

ExprPtr make_neg(ExprPtr a) {
  if (a->kind == Expr::Kind::Constant) return make_const(-a->value);
  if (a->kind == Expr::Kind::Neg) return a->a;
  Expr e;
  e.kind = Expr::Kind::Neg;
  e.a = std::move(a);
  return node(std::move(e));
}

ExprPtr make_exp(ExprPtr a) {
  Expr e;
  e.kind = Expr::Kind::Exp;
  e.a = std::move(a);
  return node(std::move(e));
}

ExprPtr make_log(ExprPtr a) {
  Expr e;
  e.kind = Expr::Kind::Log;
  e.a = std::move(a);
  return node(std::move(e));
}

namespace {

class Parser {
 public:
  Parser(std::string_view src, int n) : src_(src), n_(n) {}

  ExprPtr run() {
    ExprPtr e = parse_expr();
    skip_ws();
    if (pos_ != src_.size())
      throw ParseError(ParseError::Kind::Syntax, "unexpected input", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool peek_is(char c) {
    skip_ws();
    return pos_ < src_.size() && src_[pos_] == c;
  }

  bool consume(char c) {
    if (peek_is(c)) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c, const char* what) {
    if (!consume(c))
      throw ParseError(ParseError::Kind::Syntax, std::string("expected ") + what, pos_);
  }

  ExprPtr parse_expr() {
    ExprPtr e = parse_term();
    for (;;) {
      if (consume('+'))
        e = make_add(std::move(e), parse_term());
      else if (consume('-'))
        e = make_sub(std::move(e), parse_term());
      else
        return e;
    }
  }

  ExprPtr parse_term() {
    ExprPtr e = parse_factor();
    for (;;) {
      if (consume('*'))
        e = make_mul(std::move(e), parse_factor());
      else if (consume('/'))
        e = make_div(std::move(e), parse_factor());
      else
        return e;
    }
  }

  ExprPtr parse_factor() {
    if (consume('-')) return make_neg(parse_factor());
    ExprPtr e = parse_atom();
    if (consume('^')) return make_pow(std::move(e), parse_integer());
    return e;
  }

  int parse_integer() {
    skip_ws();
    const std::size_t start = pos_;
    bool negative = false;
    if (pos_ < src_.size() && src_[pos_] == '-') {
      negative = true;
      ++pos_;
    }
    if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_])))
      throw ParseError(ParseError::Kind::Syntax, "expected integer exponent", pos_);
    long long v = 0;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
      v = v * 10 + (src_[pos_] - '0');
      if (v > 512)
        throw ParseError(ParseError::Kind::Syntax, "exponent out of range", start);
      ++pos_;
    }
    return static_cast<int>(negative ? -v : v);
  }

  ExprPtr parse_atom() {
    skip_ws();
    if (pos_ >= src_.size())
      throw ParseError(ParseError::Kind::Syntax, "unexpected end of input", pos_);
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_word();
    if (c == '(') {
      ++pos_;
      ExprPtr e = parse_expr();
      expect(')', "')'");
      return e;
    }
    throw ParseError(ParseError::Kind::Syntax, "unexpected character", pos_);
  }

  ExprPtr parse_number() {
    const std::size_t start = pos_;
    std::size_t end = pos_;
    bool digits = false;
    while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) {
      ++end;
      digits = true;
    }
    if (end < src_.size() && src_[end] == '.') {
      ++end;
      while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) {
        ++end;
        digits = true;
      }
    }
    if (!digits) throw ParseError(ParseError::Kind::Syntax, "malformed number", start);
    if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
      std::size_t e = end + 1;
      if (e < src_.size() && (src_[e] == '+' || src_[e] == '-')) ++e;
      std::size_t d = e;
      while (d < src_.size() && std::isdigit(static_cast<unsigned char>(src_[d]))) ++d;
      if (d > e) end = d;  // exponent part only if it has digits
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + end, value);
    if (ec != std::errc() || ptr != src_.data() + end)
      throw ParseError(ParseError::Kind::Syntax, "malformed number", start);
    pos_ = end;
    return make_const(value);
  }

  ExprPtr parse_word() {
    const std::size_t start = pos_;
    std::size_t end = pos_;
    while (end < src_.size() && std::isalpha(static_cast<unsigned char>(src_[end]))) ++end;
    const std::string_view word = src_.substr(start, end - start);
    if (word == "i" && (end >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[end])))) {
      pos_ = end;
      return make_const(Complex(0.0, 1.0));
    }
    if (word == "exp" || word == "log") {
      pos_ = end;
      expect('(', "'(' after function name");
      ExprPtr arg = parse_expr();
      expect(')', "')'");
      return word == "exp" ? make_exp(std::move(arg)) : make_log(std::move(arg));
    }
    if (word == "z" || word == "w") {
      pos_ = end;
      if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_])))
        throw ParseError(ParseError::Kind::Syntax, "expected variable index", pos_);
      long long idx = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        idx = idx * 10 + (src_[pos_] - '0');
        if (idx > 1000000) throw ParseError(ParseError::Kind::IndexOutOfRange,
                                            "variable index out of range", start);
        ++pos_;
      }
      if (idx < 1 || idx > n_)
        throw ParseError(ParseError::Kind::IndexOutOfRange, "variable index out of range", start);
      return make_var(word == "w", static_cast<int>(idx));
    }
    throw ParseError(ParseError::Kind::UnknownIdentifier,
                     "unknown identifier '" + std::string(word) + "'", start);
  }

  std::string_view src_;
  int n_;
  std::size_t pos_ = 0;
};

}  // namespace

ExprPtr parse_expression(std::string_view src, int n) { return Parser(src, n).run(); }

ExprPtr differentiate(const ExprPtr& e, WirtingerVar var) {
  switch (e->kind) {
    case Expr::Kind::Constant:
      return make_const(0.0);
    case Expr::Kind::Variable:
      return make_const(e->is_conjugate == var.is_conjugate && e->index == var.index ? 1.0 : 0.0);
    case Expr::Kind::Add:
      return make_add(differentiate(e->a, var), differentiate(e->b, var));
    case Expr::Kind::Sub:
      return make_sub(differentiate(e->a, var), differentiate(e->b, var));
    case Expr::Kind::Mul:
      return make_add(make_mul(differentiate(e->a, var), e->b),
                      make_mul(e->a, differentiate(e->b, var)));
    case Expr::Kind::Div:
      return make_div(make_sub(make_mul(differentiate(e->a, var), e->b),
                               make_mul(e->a, differentiate(e->b, var))),
                      make_pow(e->b, 2));
    case Expr::Kind::Pow:
      return make_mul(make_const(static_cast<double>(e->exponent)),
                      make_mul(make_pow(e->a, e->exponent - 1), differentiate(e->a, var)));
    case Expr::Kind::Neg:
      return make_neg(differentiate(e->a, var));
    case Expr::Kind::Exp:
      return make_mul(e, differentiate(e->a, var));
    case Expr::Kind::Log:
      return make_div(differentiate(e->a, var), e->a);
  }
  return make_const(0.0);
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void print(const Expr& e, std::string& out) {
  switch (e.kind) {
    case Expr::Kind::Constant: {
      const double re = e.value.real();
      const double im = e.value.imag();
      if (im == 0.0) {
        out += format_double(re);
      } else if (re == 0.0) {
        out += "(";
        out += format_double(im);
        out += "*i)";
      } else {
        out += "(";
        out += format_double(re);
        out += "+";
        out += format_double(im);
        out += "*i)";
      }
      return;
    }
    case Expr::Kind::Variable:
      out += e.is_conjugate ? 'w' : 'z';
      out += std::to_string(e.index);
      return;
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
    case Expr::Kind::Mul:
    case Expr::Kind::Div: {
      const char op = e.kind == Expr::Kind::Add   ? '+'
                      : e.kind == Expr::Kind::Sub ? '-'
                      : e.kind == Expr::Kind::Mul ? '*'
                                                  : '/';
      out += '(';
      print(*e.a, out);
      out += op;
      print(*e.b, out);
      out += ')';
      return;
    }
    case Expr::Kind::Pow:
      print(*e.a, out);
      out += '^';
      out += std::to_string(e.exponent);
      return;
    case Expr::Kind::Neg:
      out += "(-";
      print(*e.a, out);
      out += ')';
      return;
    case Expr::Kind::Exp:
    case Expr::Kind::Log:
      out += e.kind == Expr::Kind::Exp ? "exp(" : "log(";
      print(*e.a, out);
      out += ')';
      return;
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

std::string to_string(const ExprPtr& e) { return to_string(*e); }

bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Expr::Kind::Constant:
      return a->value == b->value;
    case Expr::Kind::Variable:
      return a->is_conjugate == b->is_conjugate && a->index == b->index;
    case Expr::Kind::Pow:
      return a->exponent == b->exponent && structurally_equal(a->a, b->a);
    case Expr::Kind::Neg:
    case Expr::Kind::Exp:
    case Expr::Kind::Log:
      return structurally_equal(a->a, b->a);
    default:
      return structurally_equal(a->a, b->a) && structurally_equal(a->b, b->b);
  }
}

int max_var_index(const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::Constant:
      return 0;
    case Expr::Kind::Variable:
      return e->index;
    case Expr::Kind::Pow:
    case Expr::Kind::Neg:
    case Expr::Kind::Exp:
    case Expr::Kind::Log:
      return max_var_index(e->a);
    default:
      return std::max(max_var_index(e->a), max_var_index(e->b));
  }
}

std::complex<double> evaluate(const ExprPtr& e, std::span<const std::complex<double>> z) {
  std::vector<std::complex<double>> w(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) w[k] = std::conj(z[k]);
  return evaluate_unbound<std::complex<double>>(e, z, std::span<const std::complex<double>>(w));
}

}  // namespace chern
