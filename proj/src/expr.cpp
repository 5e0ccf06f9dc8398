#include "solgeom/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>
#include <utility>

#include "solgeom/error.hpp"

namespace solgeom {
namespace {

using Node = ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;
using Kind = ExprNode::Kind;

constexpr std::array<std::pair<std::string_view, Func>, 9> kFuncs{{
    {"sin", Func::Sin},
    {"cos", Func::Cos},
    {"tan", Func::Tan},
    {"exp", Func::Exp},
    {"log", Func::Log},
    {"sqrt", Func::Sqrt},
    {"sinh", Func::Sinh},
    {"cosh", Func::Cosh},
    {"tanh", Func::Tanh},
}};

std::optional<Func> lookup_func(std::string_view name) {
  for (const auto& [n, f] : kFuncs)
    if (n == name) return f;
  return std::nullopt;
}

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
  Tok kind = Tok::End;
  std::size_t offset = 0;
  std::string_view text;
  double number = 0.0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    Token t;
    t.offset = pos_;
    if (pos_ >= src_.size()) return t;
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return lex_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      t.kind = Tok::Ident;
      t.text = src_.substr(start, pos_ - start);
      return t;
    }
    ++pos_;
    switch (c) {
      case '+': t.kind = Tok::Plus; break;
      case '-': t.kind = Tok::Minus; break;
      case '*': t.kind = Tok::Star; break;
      case '/': t.kind = Tok::Slash; break;
      case '^': t.kind = Tok::Caret; break;
      case '(': t.kind = Tok::LParen; break;
      case ')': t.kind = Tok::RParen; break;
      case ',': t.kind = Tok::Comma; break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", t.offset);
    }
    t.text = src_.substr(t.offset, 1);
    return t;
  }

 private:
  Token lex_number() {
    Token t;
    t.offset = pos_;
    std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_, ++n;
      return n;
    };
    std::size_t count = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      count += digits();
    }
    if (count == 0) throw ParseError("malformed number", start);
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) {
        pos_ = save;
        throw ParseError("malformed exponent in number", save);
      }
    }
    if (pos_ < src_.size() &&
        (std::isalpha(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' || src_[pos_] == '.'))
      throw ParseError("number followed by identifier (implicit multiplication is not allowed)", pos_);
    t.kind = Tok::Number;
    t.text = src_.substr(start, pos_ - start);
    auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
    if (res.ec != std::errc()) throw ParseError("number out of range", start);
    return t;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

NodePtr make(Kind kind, std::size_t offset, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->offset = offset;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

class Parser {
 public:
  Parser(std::string_view src, const ExprScope& scope) : lexer_(src), scope_(scope) {
    advance();
  }

  NodePtr parse() {
    NodePtr root = parse_sum();
    if (cur_.kind != Tok::End) unexpected();
    return root;
  }

 private:
  void advance() { cur_ = lexer_.next(); }

  [[noreturn]] void unexpected() const {
    if (cur_.kind == Tok::End) throw ParseError("unexpected end of input", cur_.offset);
    throw ParseError("unexpected token '" + std::string(cur_.text) + "'", cur_.offset);
  }

  NodePtr parse_sum() {
    NodePtr lhs = parse_product();
    while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
      Kind k = cur_.kind == Tok::Plus ? Kind::Add : Kind::Sub;
      advance();
      NodePtr rhs = parse_product();
      std::size_t off = lhs->offset;
      lhs = make(k, off, lhs, rhs);
    }
    return lhs;
  }

  NodePtr parse_product() {
    NodePtr lhs = parse_unary();
    while (cur_.kind == Tok::Star || cur_.kind == Tok::Slash) {
      Kind k = cur_.kind == Tok::Star ? Kind::Mul : Kind::Div;
      advance();
      NodePtr rhs = parse_unary();
      std::size_t off = lhs->offset;
      lhs = make(k, off, lhs, rhs);
    }
    return lhs;
  }

  NodePtr parse_unary() {
    if (cur_.kind == Tok::Minus) {
      std::size_t off = cur_.offset;
      advance();
      return make(Kind::Neg, off, parse_unary());
    }
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_atom();
    if (cur_.kind == Tok::Caret) {
      advance();
      NodePtr exponent = parse_unary();
      std::size_t off = base->offset;
      return make(Kind::Pow, off, base, exponent);
    }
    return base;
  }

  NodePtr parse_atom() {
    switch (cur_.kind) {
      case Tok::Number: {
        auto n = make(Kind::Number, cur_.offset);
        std::const_pointer_cast<Node>(n)->value = cur_.number;
        advance();
        return n;
      }
      case Tok::LParen: {
        advance();
        NodePtr inner = parse_sum();
        if (cur_.kind != Tok::RParen) {
          if (cur_.kind == Tok::End) throw ParseError("unexpected end of input", cur_.offset);
          throw ParseError("expected ')'", cur_.offset);
        }
        advance();
        return inner;
      }
      case Tok::Ident:
        return parse_identifier();
      default:
        unexpected();
    }
  }

  NodePtr parse_identifier() {
    const Token id = cur_;
    advance();
    const std::string name(id.text);
    if (cur_.kind == Tok::LParen) {
      auto f = lookup_func(name);
      if (!f) throw ParseError("unknown function '" + name + "'", id.offset);
      advance();
      if (cur_.kind == Tok::RParen)
        throw ParseError("arity error: " + name + " expects 1 argument, got 0", id.offset);
      NodePtr arg = parse_sum();
      if (cur_.kind == Tok::Comma)
        throw ParseError("arity error: " + name + " expects 1 argument", id.offset);
      if (cur_.kind != Tok::RParen) {
        if (cur_.kind == Tok::End) throw ParseError("unexpected end of input", cur_.offset);
        throw ParseError("expected ')'", cur_.offset);
      }
      advance();
      auto n = std::const_pointer_cast<Node>(make(Kind::Call, id.offset, arg));
      n->func = *f;
      n->name = name;
      return n;
    }
    if (lookup_func(name))
      throw ParseError("function '" + name + "' requires an argument list", id.offset);

    for (int i = 0; i < static_cast<int>(scope_.aliases.size()); ++i) {
      if (!scope_.aliases[static_cast<std::size_t>(i)].empty() &&
          scope_.aliases[static_cast<std::size_t>(i)] == name)
        return coordinate(i, name, id.offset);
    }
    if (name.size() >= 2 && name[0] == 'x' &&
        std::all_of(name.begin() + 1, name.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      int idx = 0;
      std::from_chars(name.data() + 1, name.data() + name.size(), idx);
      if (idx < 1 || idx > scope_.dim)
        throw ParseError("unknown identifier '" + name + "' (chart dimension is " +
                             std::to_string(scope_.dim) + ")",
                         id.offset);
      return coordinate(idx - 1, name, id.offset);
    }
    auto constant = [&](double v) {
      auto n = std::const_pointer_cast<Node>(make(Kind::Constant, id.offset));
      n->value = v;
      n->name = name;
      return NodePtr(n);
    };
    if (auto it = scope_.constants.find(name); it != scope_.constants.end()) return constant(it->second);
    if (name == "pi") return constant(std::numbers::pi);
    if (name == "e") return constant(std::numbers::e);
    throw ParseError("unknown identifier '" + name + "'", id.offset);
  }

  NodePtr coordinate(int index, const std::string& name, std::size_t offset) {
    auto n = std::const_pointer_cast<Node>(make(Kind::Coordinate, offset));
    n->index = index;
    n->name = name;
    return n;
  }

  Lexer lexer_;
  const ExprScope& scope_;
  Token cur_;
};

// ---- evaluation ------------------------------------------------------------

bool coordinate_free(const Node& n) {
  if (n.kind == Kind::Coordinate) return false;
  if (n.lhs && !coordinate_free(*n.lhs)) return false;
  if (n.rhs && !coordinate_free(*n.rhs)) return false;
  return true;
}

double eval_real(const Node& n, std::span<const double> p);

std::optional<int> integer_exponent(const Node& exponent) {
  if (!coordinate_free(exponent)) return std::nullopt;
  const double v = eval_real(exponent, {});
  if (std::isfinite(v) && v == std::round(v) && std::abs(v) <= 1024) return static_cast<int>(v);
  return std::nullopt;
}

double apply_real(Func f, double x, std::size_t offset) {
  switch (f) {
    case Func::Sin: return std::sin(x);
    case Func::Cos: return std::cos(x);
    case Func::Tan:
      if (std::cos(x) == 0.0) throw DomainError("tan at a pole", offset);
      return std::tan(x);
    case Func::Exp: return std::exp(x);
    case Func::Log:
      if (!(x > 0.0)) throw DomainError("log of nonpositive value", offset);
      return std::log(x);
    case Func::Sqrt:
      if (x < 0.0) throw DomainError("sqrt of negative value", offset);
      return std::sqrt(x);
    case Func::Sinh: return std::sinh(x);
    case Func::Cosh: return std::cosh(x);
    case Func::Tanh: return std::tanh(x);
  }
  return 0.0;
}

double checked(double v, std::size_t offset) {
  if (!std::isfinite(v)) throw DomainError("non-finite value", offset);
  return v;
}

double eval_real(const Node& n, std::span<const double> p) {
  switch (n.kind) {
    case Kind::Number:
    case Kind::Constant: return n.value;
    case Kind::Coordinate: return p[static_cast<std::size_t>(n.index)];
    case Kind::Neg: return -eval_real(*n.lhs, p);
    case Kind::Add: return eval_real(*n.lhs, p) + eval_real(*n.rhs, p);
    case Kind::Sub: return eval_real(*n.lhs, p) - eval_real(*n.rhs, p);
    case Kind::Mul: return eval_real(*n.lhs, p) * eval_real(*n.rhs, p);
    case Kind::Div: {
      double d = eval_real(*n.rhs, p);
      if (d == 0.0) throw DomainError("division by zero", n.offset);
      return checked(eval_real(*n.lhs, p) / d, n.offset);
    }
    case Kind::Pow: {
      double base = eval_real(*n.lhs, p);
      if (auto k = integer_exponent(*n.rhs)) {
        if (*k < 0 && base == 0.0) throw DomainError("division by zero", n.offset);
        return checked(std::pow(base, *k), n.offset);
      }
      if (!(base > 0.0)) throw DomainError("real power of nonpositive base", n.offset);
      return checked(std::exp(eval_real(*n.rhs, p) * std::log(base)), n.offset);
    }
    case Kind::Call: return checked(apply_real(n.func, eval_real(*n.lhs, p), n.offset), n.offset);
  }
  return 0.0;
}

Jet apply_jet(Func f, const Jet& x) {
  switch (f) {
    case Func::Sin: return sin(x);
    case Func::Cos: return cos(x);
    case Func::Tan: return tan(x);
    case Func::Exp: return exp(x);
    case Func::Log: return log(x);
    case Func::Sqrt: return sqrt(x);
    case Func::Sinh: return sinh(x);
    case Func::Cosh: return cosh(x);
    case Func::Tanh: return tanh(x);
  }
  return x;
}

Jet eval_jet(const Node& n, std::span<const Jet> p) {
  const Jet& like = p.front();
  try {
    switch (n.kind) {
      case Kind::Number:
      case Kind::Constant: return Jet::constant_like(like, n.value);
      case Kind::Coordinate: return p[static_cast<std::size_t>(n.index)];
      case Kind::Neg: return -eval_jet(*n.lhs, p);
      case Kind::Add: return eval_jet(*n.lhs, p) + eval_jet(*n.rhs, p);
      case Kind::Sub: return eval_jet(*n.lhs, p) - eval_jet(*n.rhs, p);
      case Kind::Mul: return eval_jet(*n.lhs, p) * eval_jet(*n.rhs, p);
      case Kind::Div: return eval_jet(*n.lhs, p) / eval_jet(*n.rhs, p);
      case Kind::Pow: {
        Jet base = eval_jet(*n.lhs, p);
        if (auto k = integer_exponent(*n.rhs)) return ipow(base, *k);
        return pow(base, eval_jet(*n.rhs, p));
      }
      case Kind::Call: return apply_jet(n.func, eval_jet(*n.lhs, p));
    }
  } catch (const DomainError& e) {
    if (e.offset() != DomainError::kNoOffset) throw;
    throw DomainError(e.what(), n.offset);
  }
  return like;
}

// ---- printing ----------------------------------------------------------------

int precedence(const Node& n) {
  switch (n.kind) {
    case Kind::Add:
    case Kind::Sub: return 1;
    case Kind::Mul:
    case Kind::Div: return 2;
    case Kind::Neg: return 3;
    case Kind::Pow: return 4;
    default: return 5;
  }
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void print(const Node& n, std::string& out);

void print_child(const Node& child, bool parens, std::string& out) {
  if (parens) out += '(';
  print(child, out);
  if (parens) out += ')';
}

void print(const Node& n, std::string& out) {
  const int prec = precedence(n);
  switch (n.kind) {
    case Kind::Number: out += format_number(n.value); return;
    case Kind::Constant:
    case Kind::Coordinate: out += n.name; return;
    case Kind::Neg:
      out += '-';
      print_child(*n.lhs, precedence(*n.lhs) < 3, out);
      return;
    case Kind::Pow:
      print_child(*n.lhs, precedence(*n.lhs) <= 4, out);
      out += '^';
      print_child(*n.rhs, precedence(*n.rhs) < 3, out);
      return;
    case Kind::Call:
      out += n.name;
      out += '(';
      print(*n.lhs, out);
      out += ')';
      return;
    default: {
      const char* op = n.kind == Kind::Add ? " + " : n.kind == Kind::Sub ? " - "
                       : n.kind == Kind::Mul ? "*" : "/";
      print_child(*n.lhs, precedence(*n.lhs) < prec, out);
      out += op;
      print_child(*n.rhs, precedence(*n.rhs) <= prec, out);
      return;
    }
  }
}

void dump(const Node& n, std::string& out) {
  auto binary = [&](const char* tag) {
    out += tag;
    out += '(';
    dump(*n.lhs, out);
    out += ',';
    dump(*n.rhs, out);
    out += ')';
  };
  switch (n.kind) {
    case Kind::Number:
    case Kind::Constant: out += format_number(n.value); return;
    case Kind::Coordinate: out += "x" + std::to_string(n.index + 1); return;
    case Kind::Neg:
      out += "Neg(";
      dump(*n.lhs, out);
      out += ')';
      return;
    case Kind::Add: binary("Add"); return;
    case Kind::Sub: binary("Sub"); return;
    case Kind::Mul: binary("Mul"); return;
    case Kind::Div: binary("Div"); return;
    case Kind::Pow: binary("Pow"); return;
    case Kind::Call:
      out += "Call(" + n.name + ",";
      dump(*n.lhs, out);
      out += ')';
      return;
  }
}

int span_of(const Node& n) {
  int s = n.kind == Kind::Coordinate ? n.index + 1 : 0;
  if (n.lhs) s = std::max(s, span_of(*n.lhs));
  if (n.rhs) s = std::max(s, span_of(*n.rhs));
  return s;
}

bool uses(const Node& n, int index) {
  if (n.kind == Kind::Coordinate && n.index == index) return true;
  return (n.lhs && uses(*n.lhs, index)) || (n.rhs && uses(*n.rhs, index));
}

NodePtr remap_node(const NodePtr& n, std::span<const int> map, std::span<const std::string> names) {
  auto copy = std::make_shared<Node>(*n);
  if (copy->kind == Kind::Coordinate) {
    copy->index = map[static_cast<std::size_t>(n->index)];
    copy->name = names[static_cast<std::size_t>(copy->index)];
  }
  if (n->lhs) copy->lhs = remap_node(n->lhs, map, names);
  if (n->rhs) copy->rhs = remap_node(n->rhs, map, names);
  return copy;
}

}  // namespace

std::string_view func_name(Func f) {
  for (const auto& [n, g] : kFuncs)
    if (g == f) return n;
  return "?";
}

Expr parse_expression(std::string_view src, const ExprScope& scope) {
  if (scope.dim < 1) throw InvalidInput("chart dimension must be >= 1");
  Parser parser(src, scope);
  return Expr(parser.parse(), std::string(src));
}

Expr parse_expression(std::string_view src, int dim, const std::map<std::string, double>& constants) {
  ExprScope scope;
  scope.dim = dim;
  scope.constants = constants;
  return parse_expression(src, scope);
}

double Expr::evaluate(std::span<const double> point) const {
  if (static_cast<int>(point.size()) < coordinate_span())
    throw Error("evaluation point has too few coordinates");
  return eval_real(*root_, point);
}

Jet Expr::evaluate(std::span<const Jet> point) const {
  if (point.empty()) throw Error("jet evaluation needs at least one seeded coordinate");
  if (static_cast<int>(point.size()) < coordinate_span())
    throw Error("evaluation point has too few coordinates");
  return eval_jet(*root_, point);
}

std::string Expr::to_string() const {
  std::string out;
  print(*root_, out);
  return out;
}

std::string Expr::tree() const {
  std::string out;
  dump(*root_, out);
  return out;
}

int Expr::coordinate_span() const { return root_ ? span_of(*root_) : 0; }

bool Expr::uses_coordinate(int index) const { return root_ && uses(*root_, index); }

Expr Expr::remap(std::span<const int> map, std::span<const std::string> names) const {
  Expr out(remap_node(root_, map, names));
  out.source_ = out.to_string();
  return out;
}

Expr Expr::number(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Number;
  n->value = v;
  return Expr(n, format_number(v));
}

Expr Expr::coordinate(int index, std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Coordinate;
  n->index = index;
  n->name = std::move(name);
  return Expr(n, n->name);
}

}  // namespace solgeom
