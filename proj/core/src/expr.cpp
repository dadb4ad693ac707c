#include "crosscycle/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <vector>

#include "crosscycle/error.hpp"

namespace crosscycle {

namespace detail {

struct Node {
  enum class Kind { Literal, Variable, Parameter, Unary, Binary, Power };

  Kind kind = Kind::Literal;
  double value = 0.0;
  std::string name;
  UnaryFn fn = UnaryFn::Neg;
  BinaryOp op = BinaryOp::Add;
  int exponent = 0;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

}  // namespace detail

using detail::Node;
using NodePtr = std::shared_ptr<const Node>;

namespace {

NodePtr make_literal(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Literal;
  n->value = v;
  return n;
}

const NodePtr& zero_node() {
  static const NodePtr z = make_literal(0.0);
  return z;
}

double apply(UnaryFn fn, double a) {
  switch (fn) {
    case UnaryFn::Neg: return -a;
    case UnaryFn::Exp: return std::exp(a);
    case UnaryFn::Sin: return std::sin(a);
    case UnaryFn::Cos: return std::cos(a);
    case UnaryFn::Sqrt:
      if (a < 0.0) throw DomainError("sqrt of negative argument");
      return std::sqrt(a);
    case UnaryFn::Abs: return std::fabs(a);
  }
  return a;
}

double apply(BinaryOp op, double a, double b) {
  switch (op) {
    case BinaryOp::Add: return a + b;
    case BinaryOp::Sub: return a - b;
    case BinaryOp::Mul: return a * b;
    case BinaryOp::Div:
      if (b == 0.0) throw DivisionByZero();
      return a / b;
  }
  return a;
}

double ipow(double base, int n) {
  if (n < 0) {
    if (base == 0.0) throw DivisionByZero();
    return 1.0 / ipow(base, -n);
  }
  double result = 1.0;
  double b = base;
  unsigned e = static_cast<unsigned>(n);
  while (e) {
    if (e & 1u) result *= b;
    b *= b;
    e >>= 1u;
  }
  return result;
}

double eval_node(const Node& n, double x, const ParamMap& params) {
  switch (n.kind) {
    case Node::Kind::Literal: return n.value;
    case Node::Kind::Variable: return x;
    case Node::Kind::Parameter: {
      auto it = params.find(n.name);
      if (it == params.end()) throw UnboundParameter(n.name);
      return it->second;
    }
    case Node::Kind::Unary: return apply(n.fn, eval_node(*n.lhs, x, params));
    case Node::Kind::Binary:
      return apply(n.op, eval_node(*n.lhs, x, params), eval_node(*n.rhs, x, params));
    case Node::Kind::Power: return ipow(eval_node(*n.lhs, x, params), n.exponent);
  }
  return 0.0;
}

bool same_node(const Node& a, const Node& b) {
  if (&a == &b) return true;
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Node::Kind::Literal: return a.value == b.value;
    case Node::Kind::Variable: return true;
    case Node::Kind::Parameter: return a.name == b.name;
    case Node::Kind::Unary: return a.fn == b.fn && same_node(*a.lhs, *b.lhs);
    case Node::Kind::Binary:
      return a.op == b.op && same_node(*a.lhs, *b.lhs) && same_node(*a.rhs, *b.rhs);
    case Node::Kind::Power: return a.exponent == b.exponent && same_node(*a.lhs, *b.lhs);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Printing

constexpr int kPrecAdd = 1;
constexpr int kPrecMul = 2;
constexpr int kPrecNeg = 3;
constexpr int kPrecPow = 4;
constexpr int kPrecAtom = 5;

int precedence(const Node& n) {
  switch (n.kind) {
    case Node::Kind::Literal: return n.value < 0.0 || std::signbit(n.value) ? kPrecNeg : kPrecAtom;
    case Node::Kind::Variable:
    case Node::Kind::Parameter: return kPrecAtom;
    case Node::Kind::Unary: return n.fn == UnaryFn::Neg ? kPrecNeg : kPrecAtom;
    case Node::Kind::Binary:
      return (n.op == BinaryOp::Add || n.op == BinaryOp::Sub) ? kPrecAdd : kPrecMul;
    case Node::Kind::Power: return kPrecPow;
  }
  return kPrecAtom;
}

std::string format_number(double v) {
  char buf[64];
  for (int digits : {15, 16, 17}) {
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

const char* fn_name(UnaryFn fn) {
  switch (fn) {
    case UnaryFn::Neg: return "-";
    case UnaryFn::Exp: return "exp";
    case UnaryFn::Sin: return "sin";
    case UnaryFn::Cos: return "cos";
    case UnaryFn::Sqrt: return "sqrt";
    case UnaryFn::Abs: return "abs";
  }
  return "?";
}

void print_node(const Node& n, std::string& out);

void print_wrapped(const Node& n, bool wrap, std::string& out) {
  if (wrap) out += '(';
  print_node(n, out);
  if (wrap) out += ')';
}

void print_node(const Node& n, std::string& out) {
  switch (n.kind) {
    case Node::Kind::Literal: out += format_number(n.value); return;
    case Node::Kind::Variable: out += 'x'; return;
    case Node::Kind::Parameter: out += n.name; return;
    case Node::Kind::Unary:
      if (n.fn == UnaryFn::Neg) {
        out += '-';
        print_wrapped(*n.lhs, precedence(*n.lhs) < kPrecPow, out);
      } else {
        out += fn_name(n.fn);
        out += '(';
        print_node(*n.lhs, out);
        out += ')';
      }
      return;
    case Node::Kind::Binary: {
      const int p = precedence(n);
      print_wrapped(*n.lhs, precedence(*n.lhs) < p, out);
      switch (n.op) {
        case BinaryOp::Add: out += " + "; break;
        case BinaryOp::Sub: out += " - "; break;
        case BinaryOp::Mul: out += '*'; break;
        case BinaryOp::Div: out += '/'; break;
      }
      const int pr = precedence(*n.rhs);
      print_wrapped(*n.rhs, pr < p || (pr == p && n.rhs->kind == Node::Kind::Binary), out);
      return;
    }
    case Node::Kind::Power:
      print_wrapped(*n.lhs, precedence(*n.lhs) < kPrecAtom, out);
      out += '^';
      out += std::to_string(n.exponent);
      return;
  }
}

// ---------------------------------------------------------------------------
// Parsing

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok kind = Tok::End;
  std::size_t offset = 0;
  std::string_view text;
  double number = 0.0;
};

class Parser {
 public:
  Parser(std::string_view src, const std::set<std::string>* known) : src_(src), known_(known) {
    advance();
  }

  Expr parse_all() {
    if (cur_.kind == Tok::End) throw SyntaxError(cur_.offset, {"expression"}, "empty input");
    Expr e = parse_expr();
    if (cur_.kind != Tok::End) {
      throw SyntaxError(cur_.offset, {"operator", "end of input"},
                        "unexpected '" + std::string(cur_.text) + "'");
    }
    return e;
  }

 private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    cur_ = Token{};
    cur_.offset = pos_;
    if (pos_ >= src_.size()) {
      cur_.kind = Tok::End;
      return;
    }
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      lex_number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_ + 1;
      while (end < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_')) {
        ++end;
      }
      cur_.kind = Tok::Ident;
      cur_.text = src_.substr(pos_, end - pos_);
      pos_ = end;
      return;
    }
    cur_.text = src_.substr(pos_, 1);
    ++pos_;
    switch (c) {
      case '+': cur_.kind = Tok::Plus; return;
      case '-': cur_.kind = Tok::Minus; return;
      case '*': cur_.kind = Tok::Star; return;
      case '/': cur_.kind = Tok::Slash; return;
      case '^': cur_.kind = Tok::Caret; return;
      case '(': cur_.kind = Tok::LParen; return;
      case ')': cur_.kind = Tok::RParen; return;
      default:
        throw SyntaxError(cur_.offset, {"number", "identifier", "operator", "parenthesis"},
                          "invalid character '" + std::string(1, c) + "'");
    }
  }

  void lex_number() {
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
    if (!digits) throw SyntaxError(pos_, {"digit"}, "malformed number");
    if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
      std::size_t e = end + 1;
      if (e < src_.size() && (src_[e] == '+' || src_[e] == '-')) ++e;
      if (e < src_.size() && std::isdigit(static_cast<unsigned char>(src_[e]))) {
        while (e < src_.size() && std::isdigit(static_cast<unsigned char>(src_[e]))) ++e;
        end = e;
      } else {
        throw SyntaxError(e, {"exponent digits"}, "malformed number");
      }
    }
    cur_.kind = Tok::Number;
    cur_.text = src_.substr(pos_, end - pos_);
    cur_.number = std::strtod(std::string(cur_.text).c_str(), nullptr);
    pos_ = end;
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
      const BinaryOp op = cur_.kind == Tok::Plus ? BinaryOp::Add : BinaryOp::Sub;
      advance();
      lhs = Expr::binary(op, lhs, parse_term());
    }
    return lhs;
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    while (cur_.kind == Tok::Star || cur_.kind == Tok::Slash) {
      const BinaryOp op = cur_.kind == Tok::Star ? BinaryOp::Mul : BinaryOp::Div;
      advance();
      lhs = Expr::binary(op, lhs, parse_unary());
    }
    return lhs;
  }

  Expr parse_unary() {
    if (cur_.kind == Tok::Minus) {
      advance();
      return Expr::unary(UnaryFn::Neg, parse_unary());
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (cur_.kind != Tok::Caret) return base;
    advance();
    bool negative = false;
    if (cur_.kind == Tok::Minus) {
      negative = true;
      advance();
    }
    if (cur_.kind != Tok::Number || cur_.text.find_first_of(".eE") != std::string_view::npos) {
      throw SyntaxError(cur_.offset, {"integer exponent"}, "only integer powers are supported");
    }
    const double v = cur_.number;
    if (v > 1e6) throw SyntaxError(cur_.offset, {"integer exponent"}, "exponent too large");
    advance();
    const int n = static_cast<int>(v);
    return Expr::power(base, negative ? -n : n);
  }

  Expr parse_primary() {
    switch (cur_.kind) {
      case Tok::Number: {
        const double v = cur_.number;
        advance();
        return Expr::literal(v);
      }
      case Tok::LParen: {
        advance();
        Expr e = parse_expr();
        expect_rparen();
        return e;
      }
      case Tok::Ident: return parse_identifier();
      default:
        throw SyntaxError(cur_.offset, {"number", "x", "identifier", "'('"},
                          cur_.kind == Tok::End ? "unexpected end of input"
                                                : "unexpected '" + std::string(cur_.text) + "'");
    }
  }

  Expr parse_identifier() {
    const std::string name(cur_.text);
    const std::size_t offset = cur_.offset;
    advance();
    if (cur_.kind == Tok::LParen) {
      std::optional<UnaryFn> fn;
      if (name == "exp") fn = UnaryFn::Exp;
      else if (name == "sin") fn = UnaryFn::Sin;
      else if (name == "cos") fn = UnaryFn::Cos;
      else if (name == "sqrt") fn = UnaryFn::Sqrt;
      else if (name == "abs") fn = UnaryFn::Abs;
      if (!fn) throw UnknownIdentifier(name, offset);
      advance();
      Expr arg = parse_expr();
      expect_rparen();
      return Expr::unary(*fn, arg);
    }
    if (name == "x") return Expr::variable();
    if (name == "exp" || name == "sin" || name == "cos" || name == "sqrt" || name == "abs") {
      throw SyntaxError(cur_.offset, {"'('"}, "function '" + name + "' needs an argument");
    }
    if (known_ && !known_->contains(name)) throw UnknownIdentifier(name, offset);
    return Expr::parameter(name);
  }

  void expect_rparen() {
    if (cur_.kind != Tok::RParen) {
      throw SyntaxError(cur_.offset, {"')'"},
                        cur_.kind == Tok::End ? "unexpected end of input"
                                              : "unexpected '" + std::string(cur_.text) + "'");
    }
    advance();
  }

  std::string_view src_;
  const std::set<std::string>* known_;
  std::size_t pos_ = 0;
  Token cur_;
};

void collect_params(const Node& n, std::set<std::string>& out) {
  if (n.kind == Node::Kind::Parameter) out.insert(n.name);
  if (n.lhs) collect_params(*n.lhs, out);
  if (n.rhs) collect_params(*n.rhs, out);
}

bool node_depends_on_x(const Node& n) {
  if (n.kind == Node::Kind::Variable) return true;
  return (n.lhs && node_depends_on_x(*n.lhs)) || (n.rhs && node_depends_on_x(*n.rhs));
}

}  // namespace

// ---------------------------------------------------------------------------
// Construction with constant folding

Expr::Expr() : node_(zero_node()) {}

Expr Expr::literal(double v) { return Expr(make_literal(v)); }

Expr Expr::variable() {
  static const NodePtr var = [] {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Variable;
    return n;
  }();
  return Expr(var);
}

Expr Expr::parameter(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Parameter;
  n->name = std::move(name);
  return Expr(n);
}

Expr Expr::unary(UnaryFn fn, Expr arg) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Unary;
  n->fn = fn;
  n->lhs = arg.node_;
  return Expr(n);
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Binary;
  n->op = op;
  n->lhs = lhs.node_;
  n->rhs = rhs.node_;
  return Expr(n);
}

Expr Expr::power(Expr base, int exponent) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Power;
  n->exponent = exponent;
  n->lhs = base.node_;
  return Expr(n);
}

double Expr::eval(double x, const ParamMap& params) const { return eval_node(*node_, x, params); }

bool Expr::is_literal() const noexcept { return node_->kind == Node::Kind::Literal; }

bool Expr::is_literal(double v) const noexcept { return is_literal() && node_->value == v; }

double Expr::literal_value() const {
  if (!is_literal()) throw Error("expression is not a literal");
  return node_->value;
}

bool Expr::depends_on_x() const noexcept { return node_depends_on_x(*node_); }

std::set<std::string> Expr::parameters() const {
  std::set<std::string> out;
  collect_params(*node_, out);
  return out;
}

std::string Expr::to_string() const { return print(*this); }

bool operator==(const Expr& a, const Expr& b) noexcept { return same_node(*a.node_, *b.node_); }

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_literal() && b.is_literal()) return Expr::literal(a.literal_value() + b.literal_value());
  if (a.is_literal(0.0)) return b;
  if (b.is_literal(0.0)) return a;
  return Expr::binary(BinaryOp::Add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (a.is_literal() && b.is_literal()) return Expr::literal(a.literal_value() - b.literal_value());
  if (b.is_literal(0.0)) return a;
  if (a.is_literal(0.0)) return -b;
  return Expr::binary(BinaryOp::Sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_literal() && b.is_literal()) return Expr::literal(a.literal_value() * b.literal_value());
  if (a.is_literal(0.0) || b.is_literal(0.0)) return Expr::literal(0.0);
  if (a.is_literal(1.0)) return b;
  if (b.is_literal(1.0)) return a;
  return Expr::binary(BinaryOp::Mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_literal(1.0)) return a;
  if (a.is_literal(0.0) && !b.is_literal(0.0)) return Expr::literal(0.0);
  if (a.is_literal() && b.is_literal() && b.literal_value() != 0.0) {
    return Expr::literal(a.literal_value() / b.literal_value());
  }
  return Expr::binary(BinaryOp::Div, a, b);
}

Expr operator-(const Expr& a) {
  if (a.is_literal()) return Expr::literal(-a.literal_value());
  const Node& n = a.node();
  if (n.kind == Node::Kind::Unary && n.fn == UnaryFn::Neg) return Expr(n.lhs);
  return Expr::unary(UnaryFn::Neg, a);
}

namespace {

Expr fold_unary(UnaryFn fn, const Expr& arg) {
  if (fn == UnaryFn::Neg) return -arg;
  if (arg.is_literal()) {
    const double v = arg.literal_value();
    if (fn != UnaryFn::Sqrt || v >= 0.0) return Expr::literal(apply(fn, v));
  }
  return Expr::unary(fn, arg);
}

Expr fold_power(const Expr& base, int n) {
  if (n == 0) return Expr::literal(1.0);
  if (n == 1) return base;
  if (base.is_literal() && (n > 0 || base.literal_value() != 0.0)) {
    return Expr::literal(ipow(base.literal_value(), n));
  }
  return Expr::power(base, n);
}

Expr fold_binary(BinaryOp op, const Expr& a, const Expr& b) {
  switch (op) {
    case BinaryOp::Add: return a + b;
    case BinaryOp::Sub: return a - b;
    case BinaryOp::Mul: return a * b;
    case BinaryOp::Div: return a / b;
  }
  return a;
}

Expr derive(const Expr& e) {
  const Node& n = e.node();
  switch (n.kind) {
    case Node::Kind::Literal:
    case Node::Kind::Parameter: return Expr::literal(0.0);
    case Node::Kind::Variable: return Expr::literal(1.0);
    case Node::Kind::Unary: {
      const Expr u(n.lhs);
      const Expr du = derive(u);
      switch (n.fn) {
        case UnaryFn::Neg: return -du;
        case UnaryFn::Exp: return fold_unary(UnaryFn::Exp, u) * du;
        case UnaryFn::Sin: return fold_unary(UnaryFn::Cos, u) * du;
        case UnaryFn::Cos: return -(fold_unary(UnaryFn::Sin, u) * du);
        case UnaryFn::Sqrt: return du / (Expr::literal(2.0) * fold_unary(UnaryFn::Sqrt, u));
        case UnaryFn::Abs: return du * u / fold_unary(UnaryFn::Abs, u);
      }
      return du;
    }
    case Node::Kind::Binary: {
      const Expr u(n.lhs);
      const Expr v(n.rhs);
      switch (n.op) {
        case BinaryOp::Add: return derive(u) + derive(v);
        case BinaryOp::Sub: return derive(u) - derive(v);
        case BinaryOp::Mul: return derive(u) * v + u * derive(v);
        case BinaryOp::Div: return (derive(u) * v - u * derive(v)) / fold_power(v, 2);
      }
      return u;
    }
    case Node::Kind::Power: {
      const Expr u(n.lhs);
      const int k = n.exponent;
      return Expr::literal(static_cast<double>(k)) * fold_power(u, k - 1) * derive(u);
    }
  }
  return Expr::literal(0.0);
}

Expr bind_node(const Expr& e, const ParamMap& params) {
  const Node& n = e.node();
  switch (n.kind) {
    case Node::Kind::Literal:
    case Node::Kind::Variable: return e;
    case Node::Kind::Parameter: {
      auto it = params.find(n.name);
      return it == params.end() ? e : Expr::literal(it->second);
    }
    case Node::Kind::Unary: return fold_unary(n.fn, bind_node(Expr(n.lhs), params));
    case Node::Kind::Binary:
      return fold_binary(n.op, bind_node(Expr(n.lhs), params), bind_node(Expr(n.rhs), params));
    case Node::Kind::Power: return fold_power(bind_node(Expr(n.lhs), params), n.exponent);
  }
  return e;
}

}  // namespace

Expr differentiate(const Expr& e) { return derive(e); }

Expr bind(const Expr& e, const ParamMap& params) { return bind_node(e, params); }

// ---------------------------------------------------------------------------

Expr parse(std::string_view source) { return Parser(source, nullptr).parse_all(); }

Expr parse(std::string_view source, const std::set<std::string>& known_params) {
  return Parser(source, &known_params).parse_all();
}

double eval(const Expr& e, double x, const ParamMap& params) { return e.eval(x, params); }

std::string print(const Expr& e) {
  std::string out;
  print_node(e.node(), out);
  return out;
}

}  // namespace crosscycle
