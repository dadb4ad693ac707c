#pragma once

// Scalar expression language for the user-supplied branch functions f+, f-,
// g+, g- of a nonsmooth Lienard system.
//
// Grammar (left-associative, usual precedence):
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' ['-'] integer)?
//   primary := number | 'x' | identifier | func '(' expr ')' | '(' expr ')'
//   func    := exp | sin | cos | sqrt | abs
//
// Any identifier other than `x` and the function names is a named parameter.
// An unknown name used as a function (e.g. `sgn(x)`) is rejected:
// piecewise inputs are entered as separate right/left branches.

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>

namespace crosscycle {

using ParamMap = std::map<std::string, double, std::less<>>;

enum class UnaryFn { Neg, Exp, Sin, Cos, Sqrt, Abs };
enum class BinaryOp { Add, Sub, Mul, Div };

namespace detail {
struct Node;
}

/// Immutable expression tree. Copies share structure.
class Expr {
 public:
  /// The literal 0.
  Expr();

  static Expr literal(double v);
  static Expr variable();
  static Expr parameter(std::string name);
  static Expr unary(UnaryFn fn, Expr arg);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs);
  static Expr power(Expr base, int exponent);

  /// Evaluate at `x`. Parameters must be bound in `params`.
  [[nodiscard]] double eval(double x, const ParamMap& params = {}) const;

  [[nodiscard]] bool is_literal() const noexcept;
  [[nodiscard]] bool is_literal(double v) const noexcept;
  [[nodiscard]] double literal_value() const;
  [[nodiscard]] bool depends_on_x() const noexcept;
  [[nodiscard]] std::set<std::string> parameters() const;

  [[nodiscard]] std::string to_string() const;

  [[nodiscard]] const detail::Node& node() const noexcept { return *node_; }

  friend bool operator==(const Expr& a, const Expr& b) noexcept;

  explicit Expr(std::shared_ptr<const detail::Node> n) : node_(std::move(n)) {}

 private:
  std::shared_ptr<const detail::Node> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

/// Parse `source`. Throws SyntaxError (with byte offset and expected tokens)
/// or UnknownIdentifier.
[[nodiscard]] Expr parse(std::string_view source);

/// As parse(), but bare identifiers must belong to `known_params`.
[[nodiscard]] Expr parse(std::string_view source, const std::set<std::string>& known_params);

[[nodiscard]] double eval(const Expr& e, double x, const ParamMap& params = {});

/// Exact symbolic derivative d/dx with light constant folding.
[[nodiscard]] Expr differentiate(const Expr& e);

/// Replace bound parameters by literals and fold constants.
[[nodiscard]] Expr bind(const Expr& e, const ParamMap& params);

[[nodiscard]] std::string print(const Expr& e);

}  // namespace crosscycle
