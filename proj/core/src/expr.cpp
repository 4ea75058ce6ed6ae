#include "fde/expr.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <vector>

#include "fde/csv.hpp"
#include "fde/error.hpp"

namespace fde {

enum class Op {
  number, constant, variable, neg,
  add, sub, mul, div, pow,
  lt, le, gt, ge, eq, and_, or_,
  call,
};

enum class Fn { sin, cos, tan, exp, log, abs, sign, sqrt, min, max, if_ };

struct Expr::Node {
  Op op = Op::number;
  double value = 0.0;
  std::string name;  // constant or function name
  Var var = Var::t;
  Fn fn = Fn::sin;
  std::vector<std::shared_ptr<const Node>> kids;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

struct FnInfo {
  std::string_view name;
  Fn fn;
  std::size_t arity;
};

constexpr FnInfo kFunctions[] = {
    {"sin", Fn::sin, 1},   {"cos", Fn::cos, 1},   {"tan", Fn::tan, 1},
    {"exp", Fn::exp, 1},   {"log", Fn::log, 1},   {"abs", Fn::abs, 1},
    {"sign", Fn::sign, 1}, {"sqrt", Fn::sqrt, 1}, {"min", Fn::min, 2},
    {"max", Fn::max, 2},   {"if", Fn::if_, 3},
};

const FnInfo* find_function(std::string_view name) {
  for (const auto& f : kFunctions)
    if (f.name == name) return &f;
  return nullptr;
}

NodePtr make_binary(Op op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->kids = {std::move(a), std::move(b)};
  return n;
}

enum class Tok { number, ident, op, lparen, rparen, comma, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  double value = 0.0;
  std::size_t pos = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view s) : s_(s) {}

  Token next() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    Token tok;
    tok.pos = i_;
    if (i_ >= s_.size()) return tok;
    const char c = s_[i_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number(tok);
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i_;
      while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) ++j;
      tok.kind = Tok::ident;
      tok.text = std::string(s_.substr(i_, j - i_));
      i_ = j;
      return tok;
    }
    if (c == '(') return single(tok, Tok::lparen);
    if (c == ')') return single(tok, Tok::rparen);
    if (c == ',') return single(tok, Tok::comma);
    for (std::string_view two : {"<=", ">=", "==", "&&", "||"}) {
      if (s_.substr(i_, 2) == two) {
        tok.kind = Tok::op;
        tok.text = std::string(two);
        i_ += 2;
        return tok;
      }
    }
    if (std::string_view("+-*/^<>").find(c) != std::string_view::npos) {
      tok.kind = Tok::op;
      tok.text = std::string(1, c);
      ++i_;
      return tok;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", i_);
  }

 private:
  Token single(Token& tok, Tok kind) {
    tok.kind = kind;
    tok.text = std::string(1, s_[i_]);
    ++i_;
    return tok;
  }

  Token number(Token& tok) {
    std::size_t j = i_;
    auto digits = [&] {
      std::size_t start = j;
      while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
      return j > start;
    };
    bool any = digits();
    if (j < s_.size() && s_[j] == '.') {
      ++j;
      any = digits() || any;
    }
    if (!any) throw ParseError("malformed number", i_);
    if (j < s_.size() && (s_[j] == 'e' || s_[j] == 'E')) {
      std::size_t k = j + 1;
      if (k < s_.size() && (s_[k] == '+' || s_[k] == '-')) ++k;
      if (k < s_.size() && std::isdigit(static_cast<unsigned char>(s_[k]))) {
        j = k;
        digits();
      }
    }
    double v = 0.0;
    auto res = std::from_chars(s_.data() + i_, s_.data() + j, v);
    if (res.ec != std::errc() || !std::isfinite(v))
      throw ParseError("number out of range", i_);
    tok.kind = Tok::number;
    tok.text = std::string(s_.substr(i_, j - i_));
    tok.value = v;
    i_ = j;
    return tok;
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view s) : lex_(s) { advance(); }

  NodePtr parse() {
    NodePtr e = parse_or();
    if (cur_.kind != Tok::end) fail("unexpected '" + cur_.text + "'");
    return e;
  }

 private:
  void advance() { cur_ = lex_.next(); }

  [[noreturn]] void fail(const std::string& msg) const {
    if (cur_.kind == Tok::end) throw ParseError("unexpected end of input", cur_.pos);
    throw ParseError(msg, cur_.pos);
  }

  bool at_op(std::string_view op) const { return cur_.kind == Tok::op && cur_.text == op; }
  bool at_word(std::string_view w) const { return cur_.kind == Tok::ident && cur_.text == w; }

  NodePtr parse_or() {
    NodePtr lhs = parse_and();
    while (at_op("||") || at_word("or")) {
      advance();
      lhs = make_binary(Op::or_, lhs, parse_and());
    }
    return lhs;
  }

  NodePtr parse_and() {
    NodePtr lhs = parse_cmp();
    while (at_op("&&") || at_word("and")) {
      advance();
      lhs = make_binary(Op::and_, lhs, parse_cmp());
    }
    return lhs;
  }

  NodePtr parse_cmp() {
    NodePtr lhs = parse_add();
    for (;;) {
      Op op;
      if (at_op("<")) op = Op::lt;
      else if (at_op("<=")) op = Op::le;
      else if (at_op(">")) op = Op::gt;
      else if (at_op(">=")) op = Op::ge;
      else if (at_op("==")) op = Op::eq;
      else return lhs;
      advance();
      lhs = make_binary(op, lhs, parse_add());
    }
  }

  NodePtr parse_add() {
    NodePtr lhs = parse_mul();
    while (at_op("+") || at_op("-")) {
      Op op = cur_.text == "+" ? Op::add : Op::sub;
      advance();
      lhs = make_binary(op, lhs, parse_mul());
    }
    return lhs;
  }

  NodePtr parse_mul() {
    NodePtr lhs = parse_neg();
    while (at_op("*") || at_op("/")) {
      Op op = cur_.text == "*" ? Op::mul : Op::div;
      advance();
      lhs = make_binary(op, lhs, parse_neg());
    }
    return lhs;
  }

  NodePtr parse_neg() {
    if (at_op("-")) {
      advance();
      auto n = std::make_shared<Expr::Node>();
      n->op = Op::neg;
      n->kids = {parse_neg()};
      return n;
    }
    return parse_pow();
  }

  NodePtr parse_pow() {
    NodePtr base = parse_atom();
    if (at_op("^")) {
      advance();
      return make_binary(Op::pow, base, parse_neg());
    }
    return base;
  }

  NodePtr parse_atom() {
    auto n = std::make_shared<Expr::Node>();
    switch (cur_.kind) {
      case Tok::number:
        n->op = Op::number;
        n->value = cur_.value;
        advance();
        return n;
      case Tok::lparen: {
        advance();
        NodePtr inner = parse_or();
        if (cur_.kind != Tok::rparen) fail("expected ')'");
        advance();
        return inner;
      }
      case Tok::ident:
        return parse_ident();
      default:
        fail("expected an operand, got '" + cur_.text + "'");
    }
  }

  NodePtr parse_ident() {
    const Token id = cur_;
    advance();
    auto n = std::make_shared<Expr::Node>();
    if (id.text == "t" || id.text == "x" || id.text == "y") {
      n->op = Op::variable;
      n->var = id.text == "t" ? Var::t : id.text == "x" ? Var::x : Var::y;
      return n;
    }
    if (id.text == "pi" || id.text == "e") {
      n->op = Op::constant;
      n->name = id.text;
      n->value = id.text == "pi" ? std::numbers::pi : std::numbers::e;
      return n;
    }
    const FnInfo* info = find_function(id.text);
    if (info == nullptr) throw ParseError("unknown identifier '" + id.text + "'", id.pos);
    if (cur_.kind != Tok::lparen) fail("expected '(' after " + id.text);
    advance();
    n->op = Op::call;
    n->fn = info->fn;
    n->name = id.text;
    if (cur_.kind != Tok::rparen) {
      n->kids.push_back(parse_or());
      while (cur_.kind == Tok::comma) {
        advance();
        n->kids.push_back(parse_or());
      }
    }
    if (cur_.kind != Tok::rparen) fail("expected ')' or ','");
    if (n->kids.size() != info->arity) {
      throw ParseError(id.text + " expects " + std::to_string(info->arity) +
                           " argument(s), got " + std::to_string(n->kids.size()),
                       id.pos);
    }
    advance();
    return n;
  }

  Lexer lex_;
  Token cur_;
};

double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string("non-finite result in ") + what);
  return v;
}

double eval_node(const Expr::Node& n, const Vars& vars) {
  auto kid = [&](std::size_t i) { return eval_node(*n.kids[i], vars); };
  switch (n.op) {
    case Op::number:
    case Op::constant:
      return n.value;
    case Op::variable: {
      const std::optional<double>& v =
          n.var == Var::t ? vars.t : n.var == Var::x ? vars.x : vars.y;
      if (!v) {
        const char* name = n.var == Var::t ? "t" : n.var == Var::x ? "x" : "y";
        throw Error(ErrorKind::invalid_argument,
                    std::string("unbound variable '") + name + "'");
      }
      return *v;
    }
    case Op::neg: return -kid(0);
    case Op::add: return checked(kid(0) + kid(1), "+");
    case Op::sub: return checked(kid(0) - kid(1), "-");
    case Op::mul: return checked(kid(0) * kid(1), "*");
    case Op::div: {
      double a = kid(0), b = kid(1);
      if (b == 0.0) throw DomainError("division by zero");
      return checked(a / b, "/");
    }
    case Op::pow: {
      double a = kid(0), b = kid(1);
      if (a == 0.0 && b < 0.0) throw DomainError("0 raised to a negative power");
      return checked(std::pow(a, b), "^");
    }
    case Op::lt: return kid(0) < kid(1) ? 1.0 : 0.0;
    case Op::le: return kid(0) <= kid(1) ? 1.0 : 0.0;
    case Op::gt: return kid(0) > kid(1) ? 1.0 : 0.0;
    case Op::ge: return kid(0) >= kid(1) ? 1.0 : 0.0;
    case Op::eq: return kid(0) == kid(1) ? 1.0 : 0.0;
    case Op::and_: return (kid(0) != 0.0 && kid(1) != 0.0) ? 1.0 : 0.0;
    case Op::or_: return (kid(0) != 0.0 || kid(1) != 0.0) ? 1.0 : 0.0;
    case Op::call:
      break;
  }
  switch (n.fn) {
    case Fn::sin: return std::sin(kid(0));
    case Fn::cos: return std::cos(kid(0));
    case Fn::tan: return checked(std::tan(kid(0)), "tan");
    case Fn::exp: return checked(std::exp(kid(0)), "exp");
    case Fn::log: {
      double a = kid(0);
      if (!(a > 0.0)) throw DomainError("log of nonpositive argument");
      return std::log(a);
    }
    case Fn::abs: return std::abs(kid(0));
    case Fn::sign: {
      double a = kid(0);
      return a > 0.0 ? 1.0 : a < 0.0 ? -1.0 : 0.0;
    }
    case Fn::sqrt: {
      double a = kid(0);
      if (a < 0.0) throw DomainError("sqrt of negative argument");
      return std::sqrt(a);
    }
    case Fn::min: return std::min(kid(0), kid(1));
    case Fn::max: return std::max(kid(0), kid(1));
    case Fn::if_: return kid(0) != 0.0 ? kid(1) : kid(2);
  }
  return 0.0;
}

const char* op_symbol(Op op) {
  switch (op) {
    case Op::add: return "+";
    case Op::sub: return "-";
    case Op::mul: return "*";
    case Op::div: return "/";
    case Op::pow: return "^";
    case Op::lt: return "<";
    case Op::le: return "<=";
    case Op::gt: return ">";
    case Op::ge: return ">=";
    case Op::eq: return "==";
    case Op::and_: return "and";
    case Op::or_: return "or";
    default: return "?";
  }
}

void render(const Expr::Node& n, std::string& out) {
  switch (n.op) {
    case Op::number: out += format_real(n.value); return;
    case Op::constant: out += n.name; return;
    case Op::variable: out += n.var == Var::t ? "t" : n.var == Var::x ? "x" : "y"; return;
    case Op::neg:
      out += "(-";
      render(*n.kids[0], out);
      out += ")";
      return;
    case Op::call:
      out += n.name;
      out += "(";
      for (std::size_t i = 0; i < n.kids.size(); ++i) {
        if (i) out += ", ";
        render(*n.kids[i], out);
      }
      out += ")";
      return;
    default:
      out += "(";
      render(*n.kids[0], out);
      out += " ";
      out += op_symbol(n.op);
      out += " ";
      render(*n.kids[1], out);
      out += ")";
  }
}

bool node_uses(const Expr::Node& n, Var v) {
  if (n.op == Op::variable) return n.var == v;
  for (const auto& k : n.kids)
    if (node_uses(*k, v)) return true;
  return false;
}

bool node_equal(const Expr::Node& a, const Expr::Node& b) {
  if (a.op != b.op || a.kids.size() != b.kids.size()) return false;
  switch (a.op) {
    case Op::number: if (a.value != b.value) return false; break;
    case Op::constant: if (a.name != b.name) return false; break;
    case Op::variable: if (a.var != b.var) return false; break;
    case Op::call: if (a.fn != b.fn) return false; break;
    default: break;
  }
  for (std::size_t i = 0; i < a.kids.size(); ++i)
    if (!node_equal(*a.kids[i], *b.kids[i])) return false;
  return true;
}

}  // namespace

Expr::Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

double Expr::eval(const Vars& vars) const {
  return checked(eval_node(*root_, vars), "expression");
}

std::string Expr::to_string() const {
  std::string out;
  render(*root_, out);
  return out;
}

bool Expr::uses(Var v) const { return node_uses(*root_, v); }

bool Expr::operator==(const Expr& other) const { return node_equal(*root_, *other.root_); }

Expr parse_expr(std::string_view text) { return Expr(Parser(text).parse()); }

double eval_expr(const Expr& e, double t, double x, double y) { return e.eval(t, x, y); }

}  // namespace fde
