#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>

#include "hadinv/expr.hpp"

namespace hadinv {

ExprPtr ExprNode::make_constant(double v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::Constant;
  n->constant = v;
  return n;
}

ExprPtr ExprNode::make_variable(int index) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::Variable;
  n->var_index = index;
  return n;
}

ExprPtr ExprNode::make_unary(UnaryOp op, ExprPtr operand) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::Unary;
  n->uop = op;
  n->a = std::move(operand);
  return n;
}

ExprPtr ExprNode::make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::Binary;
  n->bop = op;
  n->a = std::move(lhs);
  n->b = std::move(rhs);
  return n;
}

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, Equals, LParen, RParen, Newline, End };

struct Token {
  Tok kind;
  std::string text;
  double number = 0.0;
  int line = 1;
  int column = 1;
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Number: return "number";
    case Tok::Ident: return "identifier";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Caret: return "'^'";
    case Tok::Equals: return "'='";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Newline: return "newline";
    case Tok::End: return "end of input";
  }
  return "?";
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_blanks();
    Token tok;
    tok.line = line_;
    tok.column = column_;
    if (pos_ >= text_.size()) {
      tok.kind = Tok::End;
      return tok;
    }
    const char c = text_[pos_];
    if (c == '\n') {
      advance();
      tok.kind = Tok::Newline;
      return tok;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      tok.kind = Tok::Number;
      tok.text = lex_number();
      char* end = nullptr;
      tok.number = std::strtod(tok.text.c_str(), &end);
      if (end != tok.text.c_str() + tok.text.size())
        throw ParseError(tok.line, tok.column, "malformed number '" + tok.text + "'");
      return tok;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      tok.kind = Tok::Ident;
      while (pos_ < text_.size() &&
             std::isalnum(static_cast<unsigned char>(text_[pos_]))) {
        tok.text += text_[pos_];
        advance();
      }
      return tok;
    }
    advance();
    switch (c) {
      case '+': tok.kind = Tok::Plus; return tok;
      case '-': tok.kind = Tok::Minus; return tok;
      case '*': tok.kind = Tok::Star; return tok;
      case '/': tok.kind = Tok::Slash; return tok;
      case '^': tok.kind = Tok::Caret; return tok;
      case '=': tok.kind = Tok::Equals; return tok;
      case '(': tok.kind = Tok::LParen; return tok;
      case ')': tok.kind = Tok::RParen; return tok;
      default:
        throw ParseError(tok.line, tok.column, std::string("unexpected character '") + c + "'");
    }
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_blanks() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\r') {
        advance();
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string lex_number() {
    std::string s;
    auto take_digits = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        s += text_[pos_];
        advance();
      }
    };
    take_digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      s += '.';
      advance();
      take_digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      // exponent only if followed by digits (optionally signed)
      std::size_t probe = pos_ + 1;
      if (probe < text_.size() && (text_[probe] == '+' || text_[probe] == '-')) ++probe;
      if (probe < text_.size() && std::isdigit(static_cast<unsigned char>(text_[probe]))) {
        while (pos_ < probe) {
          s += text_[pos_];
          advance();
        }
        take_digits();
      }
    }
    return s;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

const std::map<std::string, UnaryOp, std::less<>>& function_table() {
  static const std::map<std::string, UnaryOp, std::less<>> table = {
      {"sin", UnaryOp::Sin},   {"cos", UnaryOp::Cos},   {"tan", UnaryOp::Tan},
      {"exp", UnaryOp::Exp},   {"log", UnaryOp::Log},   {"sqrt", UnaryOp::Sqrt},
      {"tanh", UnaryOp::Tanh}, {"sinh", UnaryOp::Sinh}, {"cosh", UnaryOp::Cosh},
      {"atan", UnaryOp::Atan},
  };
  return table;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : lexer_(text) { shift(); }

  MapAst parse_file() {
    MapAst ast;
    skip_newlines();
    expect_keyword("dim");
    ast.dim = expect_positive_int("dimension");
    dim_ = ast.dim;
    if (cur_.kind != Tok::Newline && cur_.kind != Tok::End) unexpected("newline");
    skip_newlines();

    ast.components.assign(ast.dim, nullptr);
    int defined = 0;
    while (cur_.kind != Tok::End) {
      parse_component(ast);
      ++defined;
      if (cur_.kind != Tok::Newline && cur_.kind != Tok::End) unexpected("newline");
      skip_newlines();
    }
    if (defined < ast.dim) {
      for (int i = 0; i < ast.dim; ++i)
        if (!ast.components[i])
          throw ParseError(cur_.line, cur_.column,
                           "component f" + std::to_string(i + 1) + " missing");
    }
    return ast;
  }

 private:
  void shift() { cur_ = lexer_.next(); }

  void skip_newlines() {
    while (cur_.kind == Tok::Newline) shift();
  }

  [[noreturn]] void unexpected(const std::string& wanted) {
    const std::string got =
        cur_.kind == Tok::Ident || cur_.kind == Tok::Number
            ? std::string(tok_name(cur_.kind)) + " '" + cur_.text + "'"
            : tok_name(cur_.kind);
    throw ParseError(cur_.line, cur_.column, "expected " + wanted + ", found " + got);
  }

  void expect_keyword(const std::string& kw) {
    if (cur_.kind != Tok::Ident || cur_.text != kw) unexpected("'" + kw + "'");
    shift();
  }

  int expect_positive_int(const std::string& what) {
    if (cur_.kind != Tok::Number) unexpected(what);
    const double v = cur_.number;
    if (!(v >= 1.0) || v > 1e6 || v != std::floor(v))
      throw ParseError(cur_.line, cur_.column, what + " must be a positive integer (<= 1e6)");
    shift();
    return static_cast<int>(v);
  }

  void parse_component(MapAst& ast) {
    if (cur_.kind != Tok::Ident || cur_.text.size() < 2 || cur_.text[0] != 'f')
      unexpected("component declaration f<index>");
    const int index = parse_index_suffix(cur_.text, "component");
    if (index < 1 || index > ast.dim)
      throw ParseError(cur_.line, cur_.column,
                       "component index f" + std::to_string(index) + " outside 1.." +
                           std::to_string(ast.dim));
    if (ast.components[index - 1])
      throw ParseError(cur_.line, cur_.column,
                       "component f" + std::to_string(index) + " defined twice");
    shift();
    if (cur_.kind != Tok::Equals) unexpected("'='");
    shift();
    ast.components[index - 1] = parse_expr();
  }

  int parse_index_suffix(const std::string& text, const std::string& what) {
    if (text.size() > 8)
      throw ParseError(cur_.line, cur_.column, what + " index too large in '" + text + "'");
    for (std::size_t i = 1; i < text.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(text[i])))
        throw ParseError(cur_.line, cur_.column, "malformed " + what + " '" + text + "'");
    return std::atoi(text.c_str() + 1);
  }

  ExprPtr parse_expr() {
    ExprPtr lhs = parse_term();
    while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
      const BinaryOp op = cur_.kind == Tok::Plus ? BinaryOp::Add : BinaryOp::Sub;
      shift();
      lhs = ExprNode::make_binary(op, std::move(lhs), parse_term());
    }
    return lhs;
  }

  ExprPtr parse_term() {
    ExprPtr lhs = parse_factor();
    while (cur_.kind == Tok::Star || cur_.kind == Tok::Slash) {
      const BinaryOp op = cur_.kind == Tok::Star ? BinaryOp::Mul : BinaryOp::Div;
      shift();
      lhs = ExprNode::make_binary(op, std::move(lhs), parse_factor());
    }
    return lhs;
  }

  // factor := ("-")? base ("^" factor)?   with -x^2 == -(x^2)
  ExprPtr parse_factor() {
    bool negated = false;
    if (cur_.kind == Tok::Minus) {
      negated = true;
      shift();
    }
    ExprPtr e = parse_base();
    if (cur_.kind == Tok::Caret) {
      shift();
      e = ExprNode::make_binary(BinaryOp::Pow, std::move(e), parse_factor());
    }
    return negated ? ExprNode::make_unary(UnaryOp::Neg, std::move(e)) : e;
  }

  ExprPtr parse_base() {
    if (cur_.kind == Tok::Number) {
      ExprPtr e = ExprNode::make_constant(cur_.number);
      shift();
      return e;
    }
    if (cur_.kind == Tok::LParen) {
      shift();
      ExprPtr e = parse_expr();
      if (cur_.kind != Tok::RParen) unexpected("')'");
      shift();
      return e;
    }
    if (cur_.kind == Tok::Ident) {
      const std::string name = cur_.text;
      if (name == "pi") {
        shift();
        return ExprNode::make_constant(3.14159265358979323846);
      }
      if (name == "e") {
        shift();
        return ExprNode::make_constant(2.71828182845904523536);
      }
      if (auto it = function_table().find(name); it != function_table().end()) {
        shift();
        if (cur_.kind != Tok::LParen) unexpected("'('");
        shift();
        ExprPtr arg = parse_expr();
        if (cur_.kind != Tok::RParen) unexpected("')'");
        shift();
        return ExprNode::make_unary(it->second, std::move(arg));
      }
      if (name.size() >= 2 && name[0] == 'x') {
        const int index = parse_index_suffix(name, "variable");
        if (index < 1 || index > dim_)
          throw ParseError(cur_.line, cur_.column,
                           "variable x" + std::to_string(index) + " outside 1.." +
                               std::to_string(dim_));
        shift();
        return ExprNode::make_variable(index);
      }
      unexpected("number, constant, variable, function call, or '('");
    }
    unexpected("number, constant, variable, function call, or '('");
  }

  Lexer lexer_;
  Token cur_;
  int dim_ = 0;
};

const char* unary_name(UnaryOp op) {
  switch (op) {
    case UnaryOp::Neg: return "-";
    case UnaryOp::Sin: return "sin";
    case UnaryOp::Cos: return "cos";
    case UnaryOp::Tan: return "tan";
    case UnaryOp::Exp: return "exp";
    case UnaryOp::Log: return "log";
    case UnaryOp::Sqrt: return "sqrt";
    case UnaryOp::Tanh: return "tanh";
    case UnaryOp::Sinh: return "sinh";
    case UnaryOp::Cosh: return "cosh";
    case UnaryOp::Atan: return "atan";
  }
  return "?";
}

void print_expr(std::string& out, const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::Constant:
      out += format_double(e->constant);
      return;
    case ExprKind::Variable:
      out += "x" + std::to_string(e->var_index);
      return;
    case ExprKind::Unary:
      if (e->uop == UnaryOp::Neg) {
        out += "(-";
        print_expr(out, e->a);
        out += ")";
      } else {
        out += unary_name(e->uop);
        out += "(";
        print_expr(out, e->a);
        out += ")";
      }
      return;
    case ExprKind::Binary: {
      const char* op = nullptr;
      switch (e->bop) {
        case BinaryOp::Add: op = " + "; break;
        case BinaryOp::Sub: op = " - "; break;
        case BinaryOp::Mul: op = " * "; break;
        case BinaryOp::Div: op = " / "; break;
        case BinaryOp::Pow: op = " ^ "; break;
      }
      out += "(";
      print_expr(out, e->a);
      out += op;
      print_expr(out, e->b);
      out += ")";
      return;
    }
  }
}

}  // namespace

MapAst parse_map_file(std::string_view text) {
  return Parser(text).parse_file();
}

std::string print_map_file(const MapAst& ast) {
  std::string out = "dim " + std::to_string(ast.dim) + "\n";
  for (int i = 0; i < ast.dim; ++i) {
    out += "f" + std::to_string(i + 1) + " = ";
    print_expr(out, ast.components[i]);
    out += "\n";
  }
  return out;
}

bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case ExprKind::Constant:
      return a->constant == b->constant;
    case ExprKind::Variable:
      return a->var_index == b->var_index;
    case ExprKind::Unary:
      return a->uop == b->uop && structurally_equal(a->a, b->a);
    case ExprKind::Binary:
      return a->bop == b->bop && structurally_equal(a->a, b->a) &&
             structurally_equal(a->b, b->b);
  }
  return false;
}

bool structurally_equal(const MapAst& a, const MapAst& b) {
  if (a.dim != b.dim) return false;
  for (int i = 0; i < a.dim; ++i)
    if (!structurally_equal(a.components[i], b.components[i])) return false;
  return true;
}

}  // namespace hadinv
