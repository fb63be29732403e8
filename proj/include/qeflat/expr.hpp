#pragma once

// Scalar expression language for metric components and potentials.
//
// Grammar (lowest to highest precedence):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right associative
//   primary := number | name | name '(' expr ')' | '(' expr ')'
//
// Names resolve to chart coordinates, the constants `pi` and `e`, or one of
// the smooth functions exp log sin cos tan sinh cosh tanh sqrt. `^` binds
// tighter than unary minus, so -x^2 is -(x^2) and sin(t)^2 is (sin t)^2.

#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qeflat/errors.hpp"
#include "qeflat/jet.hpp"

namespace qeflat {

enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class Function { Exp, Log, Sin, Cos, Tan, Sinh, Cosh, Tanh, Sqrt };

struct ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;

struct LiteralNode {
  double value;
};
struct VariableNode {
  std::string name;
  int index;  // position in the owning coordinate list
};
struct ConstantNode {
  std::string name;  // "pi" or "e"
  double value;
};
struct NegateNode {
  NodePtr operand;
};
struct BinaryNode {
  BinaryOp op;
  NodePtr lhs;
  NodePtr rhs;
};
struct CallNode {
  Function fn;
  NodePtr arg;
};

struct ExprNode {
  std::variant<LiteralNode, VariableNode, ConstantNode, NegateNode, BinaryNode, CallNode> data;
};

class ParseError : public std::invalid_argument {
 public:
  ParseError(std::size_t position, const std::string& message);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Immutable expression tree bound to an ordered coordinate list.
class Expression {
 public:
  Expression() = default;
  Expression(NodePtr root, std::vector<std::string> coordinates);

  const NodePtr& root() const { return root_; }
  const std::vector<std::string>& coordinates() const { return coordinates_; }
  bool empty() const { return root_ == nullptr; }

  /// True if no variable occurs in the tree.
  bool is_constant() const;
  /// Fully parenthesized text that reparses to the same tree.
  std::string to_string() const;

  /// Node builders used to assemble expressions programmatically.
  static Expression literal(double value, std::vector<std::string> coordinates);
  static Expression variable(int index, std::vector<std::string> coordinates);
  Expression operator+(const Expression& rhs) const;
  Expression operator-(const Expression& rhs) const;
  Expression operator*(const Expression& rhs) const;
  Expression operator/(const Expression& rhs) const;
  Expression operator-() const;
  Expression apply(Function fn) const;

 private:
  Expression combine(BinaryOp op, const Expression& rhs) const;

  NodePtr root_;
  std::vector<std::string> coordinates_;
};

/// Parses `source` against the given coordinate names.
/// Throws ParseError on syntax errors, unknown identifiers, non-smooth
/// functions, empty input, or coordinate names that shadow reserved names.
Expression parse(std::string_view source, const std::vector<std::string>& coordinate_names);

/// Evaluation with values bound by coordinate index.
double evaluate(const Expression& expr, std::span<const double> values);
Jet3 evaluate(const Expression& expr, std::span<const Jet3> values);

/// Evaluation with values bound by coordinate name.
double evaluate(const Expression& expr, const std::map<std::string, double>& bindings);
Jet3 evaluate(const Expression& expr, const std::map<std::string, Jet3>& bindings);

/// Structural equality of two trees (literal values compared exactly).
bool structurally_equal(const NodePtr& a, const NodePtr& b);

std::string node_to_string(const ExprNode& node);
std::string_view function_name(Function fn);

}  // namespace qeflat
