#include "qeflat/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

namespace qeflat {

namespace {

struct FunctionEntry {
  std::string_view name;
  Function fn;
};

constexpr std::array<FunctionEntry, 9> kFunctions{{
    {"exp", Function::Exp},
    {"log", Function::Log},
    {"sin", Function::Sin},
    {"cos", Function::Cos},
    {"tan", Function::Tan},
    {"sinh", Function::Sinh},
    {"cosh", Function::Cosh},
    {"tanh", Function::Tanh},
    {"sqrt", Function::Sqrt},
}};

// Recognised but refused: they are not smooth, so third-order jets would be wrong.
constexpr std::array<std::string_view, 8> kNonSmooth{
    {"abs", "sign", "min", "max", "floor", "ceil", "round", "step"}};

std::optional<Function> lookup_function(std::string_view name) {
  for (const auto& f : kFunctions) {
    if (f.name == name) return f.fn;
  }
  return std::nullopt;
}

std::optional<double> lookup_constant(std::string_view name) {
  if (name == "pi") return std::numbers::pi;
  if (name == "e") return std::numbers::e;
  return std::nullopt;
}

bool is_reserved(std::string_view name) {
  return lookup_function(name) || lookup_constant(name) ||
         std::find(kNonSmooth.begin(), kNonSmooth.end(), name) != kNonSmooth.end();
}

NodePtr make(auto node) { return std::make_shared<const ExprNode>(ExprNode{std::move(node)}); }

class Parser {
 public:
  Parser(std::string_view src, const std::vector<std::string>& coords)
      : src_(src), coords_(coords) {}

  NodePtr run() {
    skip_space();
    if (pos_ == src_.size()) throw ParseError(pos_, "empty expression");
    NodePtr e = expression();
    skip_space();
    if (pos_ != src_.size()) {
      throw ParseError(pos_, std::string("unexpected '") + src_[pos_] +
                                 "', expected operator or end of input");
    }
    return e;
  }

 private:
  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail_expected(std::string_view what) {
    if (pos_ >= src_.size()) {
      throw ParseError(pos_, "unexpected end of input, expected " + std::string(what));
    }
    throw ParseError(pos_, std::string("unexpected '") + src_[pos_] + "', expected " +
                               std::string(what));
  }

  NodePtr expression() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(BinaryNode{BinaryOp::Add, lhs, term()});
      } else if (accept('-')) {
        lhs = make(BinaryNode{BinaryOp::Sub, lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(BinaryNode{BinaryOp::Mul, lhs, unary()});
      } else if (accept('/')) {
        lhs = make(BinaryNode{BinaryOp::Div, lhs, unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(NegateNode{unary()});
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(BinaryNode{BinaryOp::Pow, base, unary()});
    return base;
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= src_.size()) fail_expected("number, name or '('");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = expression();
      if (!accept(')')) fail_expected("')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
    fail_expected("number, name or '('");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t count = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
        ++count;
      }
      return count;
    };
    std::size_t mantissa = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) throw ParseError(start, "malformed number");
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
        pos_ = look;
        digits();
      }
    }
    double value = 0.0;
    const auto text = src_.substr(start, pos_ - start);
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
      throw ParseError(start, "malformed number '" + std::string(text) + "'");
    }
    return make(LiteralNode{value});
  }

  NodePtr name() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      ++pos_;
    }
    const std::string id(src_.substr(start, pos_ - start));
    skip_space();
    const bool call = pos_ < src_.size() && src_[pos_] == '(';

    if (auto fn = lookup_function(id)) {
      if (!call) throw ParseError(pos_, "expected '(' after function '" + id + "'");
      ++pos_;
      NodePtr arg = expression();
      if (!accept(')')) fail_expected("')'");
      return make(CallNode{*fn, arg});
    }
    if (std::find(kNonSmooth.begin(), kNonSmooth.end(), id) != kNonSmooth.end()) {
      throw ParseError(start, "function '" + id +
                                  "' is not smooth and is not supported (metrics must be "
                                  "smooth to third order)");
    }
    if (call) throw ParseError(start, "unknown function '" + id + "'");
    if (auto k = lookup_constant(id)) return make(ConstantNode{id, *k});
    const auto it = std::find(coords_.begin(), coords_.end(), id);
    if (it == coords_.end()) {
      std::string known;
      for (const auto& c : coords_) known += (known.empty() ? "" : ", ") + c;
      throw ParseError(start, "unknown identifier '" + id + "' (coordinates: " + known + ")");
    }
    return make(VariableNode{id, static_cast<int>(it - coords_.begin())});
  }

  std::string_view src_;
  const std::vector<std::string>& coords_;
  std::size_t pos_ = 0;
};

bool node_is_constant(const ExprNode& node) {
  return std::visit(
      [](const auto& n) -> bool {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, VariableNode>) {
          return false;
        } else if constexpr (std::is_same_v<N, NegateNode>) {
          return node_is_constant(*n.operand);
        } else if constexpr (std::is_same_v<N, BinaryNode>) {
          return node_is_constant(*n.lhs) && node_is_constant(*n.rhs);
        } else if constexpr (std::is_same_v<N, CallNode>) {
          return node_is_constant(*n.arg);
        } else {
          return true;
        }
      },
      node.data);
}

double value_of(double x) { return x; }
double value_of(const Jet3& x) { return x.value(); }

double apply_function(Function fn, double x) {
  switch (fn) {
    case Function::Exp: return std::exp(x);
    case Function::Log:
      if (!(x > 0.0)) throw DomainError("log of non-positive value " + std::to_string(x));
      return std::log(x);
    case Function::Sin: return std::sin(x);
    case Function::Cos: return std::cos(x);
    case Function::Tan: return std::tan(x);
    case Function::Sinh: return std::sinh(x);
    case Function::Cosh: return std::cosh(x);
    case Function::Tanh: return std::tanh(x);
    case Function::Sqrt:
      if (x < 0.0) throw DomainError("sqrt of negative value " + std::to_string(x));
      return std::sqrt(x);
  }
  throw std::logic_error("unhandled function");
}

Jet3 apply_function(Function fn, const Jet3& x) {
  switch (fn) {
    case Function::Exp: return exp(x);
    case Function::Log: return log(x);
    case Function::Sin: return sin(x);
    case Function::Cos: return cos(x);
    case Function::Tan: return tan(x);
    case Function::Sinh: return sinh(x);
    case Function::Cosh: return cosh(x);
    case Function::Tanh: return tanh(x);
    case Function::Sqrt: return sqrt(x);
  }
  throw std::logic_error("unhandled function");
}

double integer_power(double base, int k) {
  if (k < 0) {
    if (base == 0.0) throw DomainError("zero raised to a negative power");
    return 1.0 / integer_power(base, -k);
  }
  double result = 1.0;
  double b = base;
  unsigned e = static_cast<unsigned>(k);
  while (e != 0) {
    if (e & 1U) result *= b;
    e >>= 1U;
    if (e != 0) b *= b;
  }
  return result;
}

Jet3 integer_power(const Jet3& base, int k) {
  if (k < 0 && base.value() == 0.0) throw DomainError("zero raised to a negative power");
  return pow(base, k);
}

template <class T>
class Evaluator {
 public:
  Evaluator(std::span<const T> values, T zero) : values_(values), zero_(std::move(zero)) {}

  T eval(const ExprNode& node) const {
    return std::visit([&](const auto& n) { return eval_node(n, node); }, node.data);
  }

 private:
  T constant(double c) const {
    T out = zero_;
    out += c;
    return out;
  }

  [[noreturn]] static void rethrow(const ExprNode& node, const DomainError& e) {
    throw DomainError(std::string(e.what()) + " in '" + node_to_string(node) + "'");
  }

  T eval_node(const LiteralNode& n, const ExprNode&) const { return constant(n.value); }
  T eval_node(const ConstantNode& n, const ExprNode&) const { return constant(n.value); }
  T eval_node(const VariableNode& n, const ExprNode&) const {
    if (n.index < 0 || static_cast<std::size_t>(n.index) >= values_.size()) {
      throw std::invalid_argument("no binding for coordinate '" + n.name + "'");
    }
    return values_[n.index];
  }
  T eval_node(const NegateNode& n, const ExprNode&) const { return -eval(*n.operand); }

  T eval_node(const CallNode& n, const ExprNode& self) const {
    const T arg = eval(*n.arg);
    try {
      return apply_function(n.fn, arg);
    } catch (const DomainError& e) {
      rethrow(self, e);
    }
  }

  T eval_node(const BinaryNode& n, const ExprNode& self) const {
    if (n.op == BinaryOp::Pow) return power(n, self);
    const T lhs = eval(*n.lhs);
    const T rhs = eval(*n.rhs);
    switch (n.op) {
      case BinaryOp::Add: return lhs + rhs;
      case BinaryOp::Sub: return lhs - rhs;
      case BinaryOp::Mul: return lhs * rhs;
      case BinaryOp::Div:
        if (value_of(rhs) == 0.0) rethrow(self, DomainError("division by zero"));
        return lhs / rhs;
      case BinaryOp::Pow: break;
    }
    throw std::logic_error("unhandled operator");
  }

  T power(const BinaryNode& n, const ExprNode& self) const {
    try {
      if (node_is_constant(*n.rhs)) {
        const double k = Evaluator<double>({}, 0.0).eval(*n.rhs);
        if (std::isfinite(k) && k == std::round(k) && std::abs(k) <= 1024.0) {
          return integer_power(eval(*n.lhs), static_cast<int>(k));
        }
      }
      const T exponent = eval(*n.rhs);
      if (const auto* c = std::get_if<ConstantNode>(&n.lhs->data); c && c->name == "e") {
        return apply_function(Function::Exp, exponent);
      }
      const T base = eval(*n.lhs);
      if (!(value_of(base) > 0.0)) {
        throw DomainError("non-integer power of non-positive base " +
                          std::to_string(value_of(base)));
      }
      return apply_function(Function::Exp, exponent * apply_function(Function::Log, base));
    } catch (const DomainError& e) {
      rethrow(self, e);
    }
  }

  std::span<const T> values_;
  T zero_;
};

template <class T>
std::vector<T> bind_by_name(const Expression& expr, const std::map<std::string, T>& bindings) {
  std::vector<T> values;
  for (const auto& name : expr.coordinates()) {
    const auto it = bindings.find(name);
    if (it == bindings.end()) {
      throw std::invalid_argument("no binding for coordinate '" + name + "'");
    }
    values.push_back(it->second);
  }
  return values;
}

std::string format_literal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (v < 0) return "(" + s + ")";
  return s;
}

char op_char(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return '+';
    case BinaryOp::Sub: return '-';
    case BinaryOp::Mul: return '*';
    case BinaryOp::Div: return '/';
    case BinaryOp::Pow: return '^';
  }
  return '?';
}

}  // namespace

ParseError::ParseError(std::size_t position, const std::string& message)
    : std::invalid_argument("at position " + std::to_string(position) + ": " + message),
      position_(position) {}

Expression::Expression(NodePtr root, std::vector<std::string> coordinates)
    : root_(std::move(root)), coordinates_(std::move(coordinates)) {}

bool Expression::is_constant() const { return root_ == nullptr || node_is_constant(*root_); }

std::string Expression::to_string() const { return root_ ? node_to_string(*root_) : ""; }

Expression Expression::literal(double value, std::vector<std::string> coordinates) {
  return Expression(make(LiteralNode{value}), std::move(coordinates));
}

Expression Expression::variable(int index, std::vector<std::string> coordinates) {
  if (index < 0 || static_cast<std::size_t>(index) >= coordinates.size()) {
    throw std::out_of_range("variable index out of range");
  }
  auto name = coordinates[index];
  return Expression(make(VariableNode{name, index}), std::move(coordinates));
}

Expression Expression::combine(BinaryOp op, const Expression& rhs) const {
  if (coordinates_ != rhs.coordinates_) {
    throw std::invalid_argument("cannot combine expressions over different coordinates");
  }
  return Expression(make(BinaryNode{op, root_, rhs.root_}), coordinates_);
}

Expression Expression::operator+(const Expression& rhs) const { return combine(BinaryOp::Add, rhs); }
Expression Expression::operator-(const Expression& rhs) const { return combine(BinaryOp::Sub, rhs); }
Expression Expression::operator*(const Expression& rhs) const { return combine(BinaryOp::Mul, rhs); }
Expression Expression::operator/(const Expression& rhs) const { return combine(BinaryOp::Div, rhs); }
Expression Expression::operator-() const { return Expression(make(NegateNode{root_}), coordinates_); }
Expression Expression::apply(Function fn) const {
  return Expression(make(CallNode{fn, root_}), coordinates_);
}

Expression parse(std::string_view source, const std::vector<std::string>& coordinate_names) {
  for (std::size_t i = 0; i < coordinate_names.size(); ++i) {
    const auto& name = coordinate_names[i];
    if (name.empty() || !(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_') ||
        !std::all_of(name.begin(), name.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; })) {
      throw ParseError(0, "invalid coordinate name '" + name + "'");
    }
    if (is_reserved(name)) {
      throw ParseError(0, "coordinate name '" + name + "' shadows a reserved name");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (coordinate_names[j] == name) {
        throw ParseError(0, "duplicate coordinate name '" + name + "'");
      }
    }
  }
  Parser parser(source, coordinate_names);
  return Expression(parser.run(), coordinate_names);
}

double evaluate(const Expression& expr, std::span<const double> values) {
  if (expr.empty()) throw std::invalid_argument("evaluating an empty expression");
  return Evaluator<double>(values, 0.0).eval(*expr.root());
}

Jet3 evaluate(const Expression& expr, std::span<const Jet3> values) {
  if (expr.empty()) throw std::invalid_argument("evaluating an empty expression");
  if (values.empty()) throw std::invalid_argument("jet evaluation needs at least one binding");
  const int n = values.front().dimension();
  for (const auto& v : values) {
    if (v.dimension() != n) throw JetDimensionError("bindings mix jet dimensions");
  }
  return Evaluator<Jet3>(values, Jet3(n, 0.0)).eval(*expr.root());
}

double evaluate(const Expression& expr, const std::map<std::string, double>& bindings) {
  const auto values = bind_by_name(expr, bindings);
  return evaluate(expr, std::span<const double>(values));
}

Jet3 evaluate(const Expression& expr, const std::map<std::string, Jet3>& bindings) {
  const auto values = bind_by_name(expr, bindings);
  return evaluate(expr, std::span<const Jet3>(values));
}

bool structurally_equal(const NodePtr& a, const NodePtr& b) {
  if (!a || !b) return a == b;
  if (a->data.index() != b->data.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using N = std::decay_t<decltype(x)>;
        const auto& y = std::get<N>(b->data);
        if constexpr (std::is_same_v<N, LiteralNode>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<N, VariableNode>) {
          return x.name == y.name && x.index == y.index;
        } else if constexpr (std::is_same_v<N, ConstantNode>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<N, NegateNode>) {
          return structurally_equal(x.operand, y.operand);
        } else if constexpr (std::is_same_v<N, BinaryNode>) {
          return x.op == y.op && structurally_equal(x.lhs, y.lhs) &&
                 structurally_equal(x.rhs, y.rhs);
        } else {
          return x.fn == y.fn && structurally_equal(x.arg, y.arg);
        }
      },
      a->data);
}

std::string node_to_string(const ExprNode& node) {
  return std::visit(
      [](const auto& n) -> std::string {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, LiteralNode>) {
          return format_literal(n.value);
        } else if constexpr (std::is_same_v<N, VariableNode> ||
                             std::is_same_v<N, ConstantNode>) {
          return n.name;
        } else if constexpr (std::is_same_v<N, NegateNode>) {
          return "(-" + node_to_string(*n.operand) + ")";
        } else if constexpr (std::is_same_v<N, BinaryNode>) {
          return "(" + node_to_string(*n.lhs) + " " + op_char(n.op) + " " +
                 node_to_string(*n.rhs) + ")";
        } else {
          return std::string(function_name(n.fn)) + "(" + node_to_string(*n.arg) + ")";
        }
      },
      node.data);
}

std::string_view function_name(Function fn) {
  for (const auto& f : kFunctions) {
    if (f.fn == fn) return f.name;
  }
  return "?";
}

}  // namespace qeflat
