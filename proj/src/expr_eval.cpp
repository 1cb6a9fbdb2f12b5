#include <cmath>
#include <fstream>
#include <sstream>

#include "hadinv/expr.hpp"
#include "hadinv/hyperdual.hpp"

namespace hadinv {

namespace {

using HD = HyperDual<double>;

double value_of(double v) { return v; }
double value_of(const HD& h) { return h.v; }

bool all_finite(double v) { return std::isfinite(v); }
bool all_finite(const HD& h) {
  return std::isfinite(h.v) && std::isfinite(h.d1) && std::isfinite(h.d2) &&
         std::isfinite(h.d12);
}

template <typename T>
T apply_unary(UnaryOp op, const T& a, const VecX& x) {
  using std::atan;
  using std::cos;
  using std::cosh;
  using std::exp;
  using std::log;
  using std::sin;
  using std::sinh;
  using std::sqrt;
  using std::tan;
  using std::tanh;
  switch (op) {
    case UnaryOp::Neg: return -a;
    case UnaryOp::Sin: return sin(a);
    case UnaryOp::Cos: return cos(a);
    case UnaryOp::Tan: return tan(a);
    case UnaryOp::Exp: return exp(a);
    case UnaryOp::Log:
      if (value_of(a) <= 0.0) throw DomainError("log of non-positive argument", x);
      return log(a);
    case UnaryOp::Sqrt:
      if (value_of(a) < 0.0) throw DomainError("sqrt of negative argument", x);
      return sqrt(a);
    case UnaryOp::Tanh: return tanh(a);
    case UnaryOp::Sinh: return sinh(a);
    case UnaryOp::Cosh: return cosh(a);
    case UnaryOp::Atan: return atan(a);
  }
  throw std::logic_error("unhandled unary op");
}

double pow_by_const(double base, double c, const VecX&) { return std::pow(base, c); }
HD pow_by_const(const HD& base, double c, const VecX&) { return pow_const(base, c); }

// A literal exponent, possibly behind unary minus: x^-2 stays a constant
// power rather than falling into the exp/log rewrite.
inline std::optional<double> literal_exponent(const ExprPtr& e) {
  if (e->kind == ExprKind::Constant) return e->constant;
  if (e->kind == ExprKind::Unary && e->uop == UnaryOp::Neg &&
      e->a->kind == ExprKind::Constant)
    return -e->a->constant;
  return std::nullopt;
}

template <typename T>
T apply_pow(const T& base, const ExprPtr& exponent, const T& exp_value, const VecX& x) {
  using std::exp;
  using std::log;
  if (const auto literal = literal_exponent(exponent)) {
    const double c = *literal;
    const double bv = value_of(base);
    const bool integer_exp = c == std::floor(c) && std::abs(c) < 1e15;
    if (integer_exp) {
      if (bv == 0.0 && c < 0.0) throw DomainError("zero raised to a negative power", x);
      return pow_by_const(base, c, x);
    }
    if (bv < 0.0) throw DomainError("negative base with non-integer exponent", x);
    if (bv == 0.0 && c < 0.0) throw DomainError("zero raised to a negative power", x);
    return pow_by_const(base, c, x);
  }
  if (value_of(base) <= 0.0)
    throw DomainError("non-positive base with non-constant exponent", x);
  return exp(exp_value * log(base));
}

template <typename T>
T eval_node(const ExprNode& e, const std::vector<T>& vars, const VecX& x) {
  T result{};
  switch (e.kind) {
    case ExprKind::Constant:
      result = T(e.constant);
      break;
    case ExprKind::Variable:
      result = vars[e.var_index - 1];
      break;
    case ExprKind::Unary:
      result = apply_unary(e.uop, eval_node(*e.a, vars, x), x);
      break;
    case ExprKind::Binary: {
      const T lhs = eval_node(*e.a, vars, x);
      const T rhs = eval_node(*e.b, vars, x);
      switch (e.bop) {
        case BinaryOp::Add: result = lhs + rhs; break;
        case BinaryOp::Sub: result = lhs - rhs; break;
        case BinaryOp::Mul: result = lhs * rhs; break;
        case BinaryOp::Div:
          if (value_of(rhs) == 0.0) throw DomainError("division by zero", x);
          result = lhs / rhs;
          break;
        case BinaryOp::Pow: result = apply_pow(lhs, e.b, rhs, x); break;
      }
      break;
    }
  }
  if (!all_finite(result)) throw DomainError("non-finite value in expression", x);
  return result;
}

void validate_ast(const MapAst& ast) {
  if (ast.dim < 1 || static_cast<int>(ast.components.size()) != ast.dim)
    throw std::invalid_argument("MapAst: component count must equal dim");
  for (const auto& c : ast.components)
    if (!c) throw std::invalid_argument("MapAst: null component");
}

}  // namespace

SmoothMap to_smooth_map(const MapAst& ast) {
  validate_ast(ast);
  const int n = ast.dim;
  const auto components = ast.components;  // shared ownership

  auto eval = [components, n](const VecX& x) {
    std::vector<double> vars(x.data(), x.data() + n);
    VecX f(n);
    for (int a = 0; a < n; ++a) f[a] = eval_node(*components[a], vars, x);
    return f;
  };

  auto jacobian = [components, n](const VecX& x) {
    MatX j(n, n);
    std::vector<HD> vars(n);
    for (int i = 0; i < n; ++i) vars[i] = HD(x[i]);
    for (int col = 0; col < n; ++col) {
      vars[col].d1 = 1.0;
      for (int a = 0; a < n; ++a) j(a, col) = eval_node(*components[a], vars, x).d1;
      vars[col].d1 = 0.0;
    }
    return j;
  };

  auto second_derivative = [components, n](const VecX& x) {
    Tensor3 h(n, MatX::Zero(n, n));
    std::vector<HD> vars(n);
    for (int i = 0; i < n; ++i) vars[i] = HD(x[i]);
    for (int j = 0; j < n; ++j) {
      for (int k = j; k < n; ++k) {
        vars[j].d1 = 1.0;
        vars[k].d2 = 1.0;
        for (int a = 0; a < n; ++a) {
          const double mixed = eval_node(*components[a], vars, x).d12;
          h[a](j, k) = mixed;
          h[a](k, j) = mixed;
        }
        vars[j].d1 = 0.0;
        vars[k].d2 = 0.0;
      }
    }
    return h;
  };

  return SmoothMap(n, std::move(eval), std::move(jacobian), std::move(second_derivative));
}

HyperDual<double> eval_component_hyperdual(const MapAst& ast, int comp, const VecX& x, int j,
                                           int k) {
  validate_ast(ast);
  if (comp < 1 || comp > ast.dim || j < 1 || j > ast.dim || k < 1 || k > ast.dim)
    throw DimensionMismatch("eval_component_hyperdual: index out of range");
  std::vector<HD> vars(ast.dim);
  for (int i = 0; i < ast.dim; ++i) vars[i] = HD(x[i]);
  vars[j - 1].d1 = 1.0;
  vars[k - 1].d2 = 1.0;
  return eval_node(*ast.components[comp - 1], vars, x);
}

SmoothMap load_map_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open map file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return to_smooth_map(parse_map_file(buf.str()));
}

}  // namespace hadinv
