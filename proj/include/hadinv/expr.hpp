#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "hadinv/smooth_map.hpp"

namespace hadinv {

enum class UnaryOp { Neg, Sin, Cos, Tan, Exp, Log, Sqrt, Tanh, Sinh, Cosh, Atan };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

enum class ExprKind { Constant, Variable, Unary, Binary };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  ExprKind kind;
  double constant = 0.0;  // Constant
  int var_index = 0;      // Variable, 1-based
  UnaryOp uop{};
  BinaryOp bop{};
  ExprPtr a;  // unary operand / binary lhs
  ExprPtr b;  // binary rhs

  static ExprPtr make_constant(double v);
  static ExprPtr make_variable(int index);
  static ExprPtr make_unary(UnaryOp op, ExprPtr operand);
  static ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs);
};

/// n expression trees, one per component, variables x1..xn.
struct MapAst {
  int dim = 0;
  std::vector<ExprPtr> components;
};

/// Map-file grammar:
///
///   mapfile    := dim_decl NEWLINE component (NEWLINE component)*
///   dim_decl   := "dim" WS INT
///   component  := "f" INT WS? "=" WS? expr
///   expr       := term (("+" | "-") term)*
///   term       := factor (("*" | "/") factor)*
///   factor     := ("-")? base ("^" factor)?
///   base       := NUMBER | "pi" | "e" | "x" INT | FUNC "(" expr ")" | "(" expr ")"
///   FUNC       := sin|cos|tan|exp|log|sqrt|tanh|sinh|cosh|atan
///
/// `#` starts a comment running to end of line. Blank lines are tolerated.
/// `-x1^2` parses as `-(x1^2)`. Throws ParseError with line/column.
MapAst parse_map_file(std::string_view text);

/// Canonical fully-parenthesized form; parse(print(ast)) reproduces the tree
/// node for node. Numeric literals use the shortest round-trip form, so
/// constant values survive exactly (literals in printed output are
/// nonnegative; negation is a node).
std::string print_map_file(const MapAst& ast);

bool structurally_equal(const ExprPtr& a, const ExprPtr& b);
bool structurally_equal(const MapAst& a, const MapAst& b);

/// Compiles the AST into a SmoothMap evaluated on hyper-dual numbers: the
/// Jacobian needs n passes, the second-derivative tensor n(n+1)/2 seed pairs
/// (j <= k), symmetry filled by construction. Evaluation raises DomainError
/// (with the offending point) for log/sqrt outside their domain, division by
/// zero, invalid powers, or non-finite intermediates.
SmoothMap to_smooth_map(const MapAst& ast);

/// Loads and compiles a map file from disk.
SmoothMap load_map_file(const std::string& path);

}  // namespace hadinv

#include "hadinv/hyperdual.hpp"

namespace hadinv {

/// Evaluates component `comp` (1-based) at x with unit seeds on variables j
/// and k (1-based): the result's d12 is the exact mixed partial wrt (x_j,
/// x_k). Exposed for diagnostics; the SmoothMap path uses the same engine.
HyperDual<double> eval_component_hyperdual(const MapAst& ast, int comp, const VecX& x, int j,
                                           int k);

}  // namespace hadinv
