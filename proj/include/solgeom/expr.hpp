#pragma once

// A small expression language for metric entries, vector-field components
// and scalar functions on a chart.
//
//   expr    := sum
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := atom ('^' unary)?            (right associative)
//   atom    := number | identifier | identifier '(' expr ')' | '(' expr ')'
//
// Identifiers resolve, in order, to: a function call (when followed by '('),
// a coordinate alias, a coordinate x1..xn, a user constant, or the builtin
// constants pi and e. "2x" is rejected by the lexer.

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "solgeom/jet.hpp"

namespace solgeom {

enum class Func { Sin, Cos, Tan, Exp, Log, Sqrt, Sinh, Cosh, Tanh };

struct ExprNode {
  enum class Kind { Number, Constant, Coordinate, Neg, Add, Sub, Mul, Div, Pow, Call };

  Kind kind = Kind::Number;
  double value = 0.0;    // Number, Constant
  std::string name;      // Constant, Coordinate (as spelled), Call
  int index = -1;        // Coordinate (0-based)
  Func func = Func::Sin; // Call
  std::size_t offset = 0;
  std::shared_ptr<const ExprNode> lhs, rhs;  // rhs unused for unary nodes
};

/// Names in scope while parsing.
struct ExprScope {
  int dim = 1;
  std::vector<std::string> aliases;  // optional per-coordinate names (size dim or empty)
  std::map<std::string, double> constants;
};

class Expr {
 public:
  Expr() = default;
  explicit Expr(std::shared_ptr<const ExprNode> root, std::string source = {})
      : root_(std::move(root)), source_(std::move(source)) {}

  bool empty() const { return root_ == nullptr; }
  const ExprNode& root() const { return *root_; }
  const std::string& source() const { return source_; }

  double evaluate(std::span<const double> point) const;
  Jet evaluate(std::span<const Jet> point) const;

  /// Canonical text; parse(to_string()) reproduces the same tree.
  std::string to_string() const;
  /// Structural dump, e.g. Add(Pow(Call(sin,x1),2),Mul(3,x2)).
  std::string tree() const;

  /// Largest referenced coordinate index plus one (0 for coordinate-free).
  int coordinate_span() const;
  bool uses_coordinate(int index) const;

  /// Rewrites coordinate i to coordinate map[i], renamed to names[map[i]].
  Expr remap(std::span<const int> map, std::span<const std::string> names) const;

  static Expr number(double v);
  static Expr coordinate(int index, std::string name);

 private:
  std::shared_ptr<const ExprNode> root_;
  std::string source_;
};

Expr parse_expression(std::string_view src, const ExprScope& scope);
Expr parse_expression(std::string_view src, int dim,
                      const std::map<std::string, double>& constants = {});

std::string_view func_name(Func f);

}  // namespace solgeom
