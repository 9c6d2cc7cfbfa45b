#include "subriem/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <utility>
#include <vector>

namespace subriem::expr {

namespace detail {

enum class Kind { Constant, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp };

struct Node {
  Kind kind;
  double value = 0.0;  // Constant
  int var = 0;         // Var
  int exponent = 0;    // Pow
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Kind kind, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

bool is_const(const NodePtr& n, double v) {
  return n->kind == Kind::Constant && n->value == v;
}

// Integer power by repeated squaring; pow(x, 0) == 1 by convention.
double ipow(double x, int n) {
  if (n < 0) return 1.0 / ipow(x, -n);
  double r = 1.0, base = x;
  while (n > 0) {
    if (n & 1) r *= base;
    base *= base;
    n >>= 1;
  }
  return r;
}

}  // namespace
}  // namespace detail

using detail::Kind;
using detail::Node;
using detail::NodePtr;

Expr::Expr() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->value = 0.0;
  node_ = n;
}
Expr::Expr(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}

Expr constant(double c) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->value = c;
  return Expr(n);
}

Expr variable(int index) {
  if (index < 0) throw std::invalid_argument("variable: negative index");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  n->var = index;
  return Expr(n);
}

// The constructors fold constant operands and drop additive/multiplicative
// identities so that symbolic derivatives come out in readable form; no
// further algebraic rewriting is attempted.

Expr add(const Expr& a, const Expr& b) {
  const NodePtr &x = a.node(), &y = b.node();
  if (x->kind == Kind::Constant && y->kind == Kind::Constant)
    return constant(x->value + y->value);
  if (detail::is_const(x, 0.0)) return b;
  if (detail::is_const(y, 0.0)) return a;
  return Expr(detail::make(Kind::Add, x, y));
}

Expr sub(const Expr& a, const Expr& b) {
  const NodePtr &x = a.node(), &y = b.node();
  if (x->kind == Kind::Constant && y->kind == Kind::Constant)
    return constant(x->value - y->value);
  if (detail::is_const(y, 0.0)) return a;
  if (detail::is_const(x, 0.0)) return neg(b);
  return Expr(detail::make(Kind::Sub, x, y));
}

Expr mul(const Expr& a, const Expr& b) {
  const NodePtr &x = a.node(), &y = b.node();
  if (x->kind == Kind::Constant && y->kind == Kind::Constant)
    return constant(x->value * y->value);
  if (detail::is_const(x, 0.0) || detail::is_const(y, 0.0)) return constant(0.0);
  if (detail::is_const(x, 1.0)) return b;
  if (detail::is_const(y, 1.0)) return a;
  return Expr(detail::make(Kind::Mul, x, y));
}

Expr div(const Expr& a, const Expr& b) {
  const NodePtr &x = a.node(), &y = b.node();
  if (x->kind == Kind::Constant && y->kind == Kind::Constant && y->value != 0.0)
    return constant(x->value / y->value);
  if (detail::is_const(y, 1.0)) return a;
  return Expr(detail::make(Kind::Div, x, y));
}

Expr pow(const Expr& a, int n) {
  const NodePtr& x = a.node();
  if (n == 0) return constant(1.0);
  if (n == 1) return a;
  if (x->kind == Kind::Constant) return constant(detail::ipow(x->value, n));
  auto p = std::make_shared<Node>();
  p->kind = Kind::Pow;
  p->a = x;
  p->exponent = n;
  return Expr(p);
}

Expr neg(const Expr& a) {
  const NodePtr& x = a.node();
  if (x->kind == Kind::Constant) return constant(-x->value);
  if (x->kind == Kind::Neg) return Expr(x->a);
  return Expr(detail::make(Kind::Neg, x));
}

Expr sin(const Expr& a) {
  if (a.node()->kind == Kind::Constant) return constant(std::sin(a.node()->value));
  return Expr(detail::make(Kind::Sin, a.node()));
}

Expr cos(const Expr& a) {
  if (a.node()->kind == Kind::Constant) return constant(std::cos(a.node()->value));
  return Expr(detail::make(Kind::Cos, a.node()));
}

Expr exp(const Expr& a) {
  if (a.node()->kind == Kind::Constant) return constant(std::exp(a.node()->value));
  return Expr(detail::make(Kind::Exp, a.node()));
}

namespace {

double eval_node(const Node& n, std::span<const double> x) {
  switch (n.kind) {
    case Kind::Constant:
      return n.value;
    case Kind::Var:
      if (n.var >= static_cast<int>(x.size()))
        throw std::invalid_argument("Expr::eval: point has too few coordinates");
      return x[static_cast<std::size_t>(n.var)];
    case Kind::Add:
      return eval_node(*n.a, x) + eval_node(*n.b, x);
    case Kind::Sub:
      return eval_node(*n.a, x) - eval_node(*n.b, x);
    case Kind::Mul:
      return eval_node(*n.a, x) * eval_node(*n.b, x);
    case Kind::Div:
      return eval_node(*n.a, x) / eval_node(*n.b, x);
    case Kind::Pow:
      return detail::ipow(eval_node(*n.a, x), n.exponent);
    case Kind::Neg:
      return -eval_node(*n.a, x);
    case Kind::Sin:
      return std::sin(eval_node(*n.a, x));
    case Kind::Cos:
      return std::cos(eval_node(*n.a, x));
    case Kind::Exp:
      return std::exp(eval_node(*n.a, x));
  }
  throw std::logic_error("Expr::eval: corrupt node");
}

Expr diff_node(const NodePtr& n, int var) {
  const Expr a(n->a), b(n->b);
  switch (n->kind) {
    case Kind::Constant:
      return constant(0.0);
    case Kind::Var:
      return constant(n->var == var ? 1.0 : 0.0);
    case Kind::Add:
      return add(a.diff(var), b.diff(var));
    case Kind::Sub:
      return sub(a.diff(var), b.diff(var));
    case Kind::Mul:
      return add(mul(a.diff(var), b), mul(a, b.diff(var)));
    case Kind::Div:
      // (a/b)' = (a' b - a b') / b^2
      return div(sub(mul(a.diff(var), b), mul(a, b.diff(var))), mul(b, b));
    case Kind::Pow:
      // (a^n)' = n a^(n-1) a'
      return mul(constant(static_cast<double>(n->exponent)),
                 mul(pow(a, n->exponent - 1), a.diff(var)));
    case Kind::Neg:
      return neg(a.diff(var));
    case Kind::Sin:
      return mul(cos(a), a.diff(var));
    case Kind::Cos:
      return neg(mul(sin(a), a.diff(var)));
    case Kind::Exp:
      return mul(exp(a), a.diff(var));
  }
  throw std::logic_error("Expr::diff: corrupt node");
}

int min_dim_node(const Node& n) {
  switch (n.kind) {
    case Kind::Constant:
      return 0;
    case Kind::Var:
      return n.var + 1;
    default: {
      int m = n.a ? min_dim_node(*n.a) : 0;
      if (n.b) m = std::max(m, min_dim_node(*n.b));
      return m;
    }
  }
}

// Precedence levels for printing: higher binds tighter.
int precedence(Kind k) {
  switch (k) {
    case Kind::Add:
    case Kind::Sub:
      return 1;
    case Kind::Mul:
    case Kind::Div:
      return 2;
    case Kind::Neg:
      return 3;
    case Kind::Pow:
      return 4;
    default:
      return 5;
  }
}

std::string fmt_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

void print_node(const Node& n, int parent_prec, std::string& out) {
  const int prec = precedence(n.kind);
  const bool need_parens = prec < parent_prec;
  if (need_parens) out += '(';
  switch (n.kind) {
    case Kind::Constant:
      if (n.value < 0.0 || std::signbit(n.value)) {
        // Negative literals print through unary minus to stay re-parseable
        // with the documented precedence.
        out += '-';
        out += fmt_double(-n.value);
      } else {
        out += fmt_double(n.value);
      }
      break;
    case Kind::Var:
      out += 'x';
      out += std::to_string(n.var + 1);
      break;
    case Kind::Add:
      print_node(*n.a, 1, out);
      out += " + ";
      print_node(*n.b, 2, out);
      break;
    case Kind::Sub:
      print_node(*n.a, 1, out);
      out += " - ";
      print_node(*n.b, 2, out);
      break;
    case Kind::Mul:
      print_node(*n.a, 2, out);
      out += "*";
      print_node(*n.b, 3, out);
      break;
    case Kind::Div:
      print_node(*n.a, 2, out);
      out += "/";
      print_node(*n.b, 3, out);
      break;
    case Kind::Neg:
      out += '-';
      print_node(*n.a, 3, out);
      break;
    case Kind::Pow:
      print_node(*n.a, 5, out);
      out += '^';
      out += std::to_string(n.exponent);
      break;
    case Kind::Sin:
      out += "sin(";
      print_node(*n.a, 0, out);
      out += ')';
      break;
    case Kind::Cos:
      out += "cos(";
      print_node(*n.a, 0, out);
      out += ')';
      break;
    case Kind::Exp:
      out += "exp(";
      print_node(*n.a, 0, out);
      out += ')';
      break;
  }
  if (need_parens) out += ')';
}

// ---------------------------------------------------------------------------
// Recursive-descent parser.

struct Token {
  enum class Type { Number, Ident, Op, End };
  Type type;
  double number = 0.0;
  std::string ident;
  char op = 0;
  std::size_t pos = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_])))
      ++i_;
    tok_.pos = i_;
    if (i_ >= text_.size()) {
      tok_.type = Token::Type::End;
      return;
    }
    const char c = text_[i_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t j = i_;
      while (j < text_.size() &&
             (std::isdigit(static_cast<unsigned char>(text_[j])) || text_[j] == '.'))
        ++j;
      if (j < text_.size() && (text_[j] == 'e' || text_[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < text_.size() && (text_[k] == '+' || text_[k] == '-')) ++k;
        if (k < text_.size() && std::isdigit(static_cast<unsigned char>(text_[k]))) {
          ++k;
          while (k < text_.size() && std::isdigit(static_cast<unsigned char>(text_[k])))
            ++k;
          j = k;
        }
      }
      const std::string slice(text_.substr(i_, j - i_));
      try {
        tok_.number = std::stod(slice);
      } catch (const std::exception&) {
        throw ParseError("malformed number '" + slice + "'", i_);
      }
      tok_.type = Token::Type::Number;
      i_ = j;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i_;
      while (j < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[j])) || text_[j] == '_'))
        ++j;
      tok_.type = Token::Type::Ident;
      tok_.ident = std::string(text_.substr(i_, j - i_));
      i_ = j;
      return;
    }
    if (std::string_view("+-*/^()").find(c) != std::string_view::npos) {
      tok_.type = Token::Type::Op;
      tok_.op = c;
      ++i_;
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", i_);
  }

  std::string_view text_;
  std::size_t i_ = 0;
  Token tok_;
};

class Parser {
 public:
  Parser(std::string_view text, int dim) : lex_(text), dim_(dim) {}

  Expr run() {
    Expr e = parse_sum();
    const Token& t = lex_.peek();
    if (t.type != Token::Type::End)
      throw ParseError("unexpected trailing input", t.pos);
    return e;
  }

 private:
  bool peek_op(char c) const {
    const Token& t = lex_.peek();
    return t.type == Token::Type::Op && t.op == c;
  }

  Expr parse_sum() {
    Expr e = parse_term();
    while (peek_op('+') || peek_op('-')) {
      const char op = lex_.take().op;
      Expr rhs = parse_term();
      e = (op == '+') ? add(e, rhs) : sub(e, rhs);
    }
    return e;
  }

  Expr parse_term() {
    Expr e = parse_factor();
    while (peek_op('*') || peek_op('/')) {
      const char op = lex_.take().op;
      Expr rhs = parse_factor();
      e = (op == '*') ? mul(e, rhs) : div(e, rhs);
    }
    return e;
  }

  // Unary minus binds looser than '^': -x1^2 is -(x1^2).
  Expr parse_factor() {
    if (peek_op('-')) {
      lex_.take();
      return neg(parse_factor());
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr e = parse_atom();
    while (peek_op('^')) {
      lex_.take();
      e = pow(e, parse_int_exponent());
    }
    return e;
  }

  int parse_int_exponent() {
    int sign = 1;
    if (peek_op('-')) {
      lex_.take();
      sign = -1;
    }
    const Token t = lex_.take();
    if (t.type != Token::Type::Number)
      throw ParseError("expected integer exponent after '^'", t.pos);
    const double v = t.number;
    if (v != std::floor(v) || std::abs(v) > 1024.0)
      throw ParseError("exponent must be an integer with |n| <= 1024", t.pos);
    return sign * static_cast<int>(v);
  }

  Expr parse_atom() {
    const Token t = lex_.take();
    if (t.type == Token::Type::Number) return constant(t.number);
    if (t.type == Token::Type::Ident) {
      if (t.ident == "sin" || t.ident == "cos" || t.ident == "exp") {
        if (!peek_op('('))
          throw ParseError("expected '(' after " + t.ident, lex_.peek().pos);
        lex_.take();
        Expr arg = parse_sum();
        if (!peek_op(')'))
          throw ParseError("expected ')'", lex_.peek().pos);
        lex_.take();
        if (t.ident == "sin") return sin(arg);
        if (t.ident == "cos") return cos(arg);
        return exp(arg);
      }
      if (t.ident.size() >= 2 && t.ident[0] == 'x') {
        int k = 0;
        const char* begin = t.ident.data() + 1;
        const char* end = t.ident.data() + t.ident.size();
        auto [ptr, ec] = std::from_chars(begin, end, k);
        if (ec == std::errc() && ptr == end && k >= 1) {
          if (k > dim_)
            throw ParseError("variable x" + std::to_string(k) +
                                 " exceeds model dimension " + std::to_string(dim_),
                             t.pos);
          return variable(k - 1);
        }
      }
      throw ParseError("unknown identifier '" + t.ident + "'", t.pos);
    }
    if (t.type == Token::Type::Op && t.op == '(') {
      Expr e = parse_sum();
      if (!peek_op(')'))
        throw ParseError("expected ')'", lex_.peek().pos);
      lex_.take();
      return e;
    }
    throw ParseError("expected a number, variable, function or '('", t.pos);
  }

  Lexer lex_;
  int dim_;
};

}  // namespace

double Expr::eval(std::span<const double> x) const {
  return eval_node(*node_, x);
}

Expr Expr::diff(int var) const { return diff_node(node_, var); }

std::string Expr::str() const {
  std::string out;
  print_node(*node_, 0, out);
  return out;
}

int Expr::min_dim() const { return min_dim_node(*node_); }

Expr parse(std::string_view text, int dim) {
  if (dim < 1) throw std::invalid_argument("parse: dim must be >= 1");
  bool blank = true;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
  if (blank) throw ParseError("empty expression", 0);
  return Parser(text, dim).run();
}

}  // namespace subriem::expr
