#include <cmath>

#include "doctest.h"
#include "qeflat/chart.hpp"
#include "qeflat/expr.hpp"
#include "qeflat/finite_difference.hpp"

using namespace qeflat;

TEST_CASE("power binds tighter than function application result") {
  const Expression e = parse("sin(t)^2", {"t"});
  const auto* bin = std::get_if<BinaryNode>(&e.root()->data);
  REQUIRE(bin != nullptr);
  CHECK(bin->op == BinaryOp::Pow);
  CHECK(std::holds_alternative<CallNode>(bin->lhs->data));
  const double t[] = {1.0};
  CHECK(evaluate(e, t) == doctest::Approx(0.708073418273571));
  CHECK(evaluate(e, std::map<std::string, double>{{"t", 1.0}}) ==
        doctest::Approx(std::sin(1.0) * std::sin(1.0)));
}

TEST_CASE("constants, precedence and associativity") {
  const std::vector<std::string> c{"t", "x", "y"};
  const double p0[] = {0.0, 5.0, 7.0};
  CHECK(evaluate(parse("e^(2*t)", c), p0) == doctest::Approx(1.0));
  const double r[] = {2.0, 0.1};
  CHECK(evaluate(parse("1/(r^2)", {"r", "th"}), r) == doctest::Approx(0.25));
  const double p1[] = {3.0, 2.0, 0.0};
  CHECK(evaluate(parse("-t^2", c), p1) == -9.0);
  CHECK(evaluate(parse("x^t^x", c), p1) == doctest::Approx(512.0));
  CHECK(evaluate(parse("t - x - 1", c), p1) == 0.0);
  CHECK(evaluate(parse("t / x / 2", c), p1) == 0.75);
  CHECK(evaluate(parse("2*pi", c), p1) == doctest::Approx(2 * M_PI));
  CHECK(evaluate(parse("1.5e-1 + .5", c), p1) == doctest::Approx(0.65));
}

TEST_CASE("jet evaluation of a product") {
  const Expression e = parse("x*y", {"x", "y"});
  const double p[] = {0.3, -2.0};
  const auto s = seed(p);
  const Jet3 j = evaluate(e, std::map<std::string, Jet3>{{"x", s[0]}, {"y", s[1]}});
  CHECK(j.partial({0, 1}) == 1.0);
  CHECK(j.value() == doctest::Approx(-0.6));
}

TEST_CASE("domain errors name the subexpression") {
  const Expression inv = parse("1/r", {"r"});
  const double zero[] = {0.0};
  CHECK_THROWS_AS(evaluate(inv, zero), DomainError);
  const Jet3 r0[] = {Jet3::variable(1, 0, 0.0)};
  CHECK_THROWS_AS(evaluate(inv, std::span<const Jet3>(r0)), DomainError);
  const double neg[] = {-1.0};
  try {
    evaluate(parse("log(r) + 1", {"r"}), neg);
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("log") != std::string::npos);
  }
  CHECK_THROWS_AS(evaluate(parse("sqrt(r)", {"r"}), neg), DomainError);
}

TEST_CASE("parse errors") {
  const std::vector<std::string> c{"x", "y"};
  CHECK_THROWS_AS(parse("", c), ParseError);
  CHECK_THROWS_AS(parse("x +", c), ParseError);
  CHECK_THROWS_AS(parse("z", c), ParseError);
  CHECK_THROWS_AS(parse("abs(x)", c), ParseError);
  CHECK_THROWS_AS(parse("sin x", c), ParseError);
  CHECK_THROWS_AS(parse("(x", c), ParseError);
  CHECK_THROWS_AS(parse("x $ y", c), ParseError);
  CHECK_THROWS_AS(parse("x", {"pi"}), ParseError);
  CHECK_THROWS_AS(parse("x", {"sin"}), ParseError);
  try {
    parse("x + foo", c);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 4);
  }
}

namespace {

std::string random_source(SplitMix64& rng, int depth, const std::vector<std::string>& vars) {
  const double u = rng.uniform();
  if (depth == 0 || u < 0.2) {
    if (rng.uniform() < 0.6) return vars[static_cast<std::size_t>(rng.uniform() * vars.size())];
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", rng.uniform(0.1, 2.0));
    return buf;
  }
  const auto sub = [&] { return random_source(rng, depth - 1, vars); };
  switch (static_cast<int>(rng.uniform() * 12)) {
    case 0: return "(" + sub() + " + " + sub() + ")";
    case 1: return "(" + sub() + " - " + sub() + ")";
    case 2: return "(" + sub() + " * " + sub() + ")";
    case 3: return "(" + sub() + " / (1.5 + (" + sub() + ")^2))";
    case 4: return "sin(" + sub() + ")";
    case 5: return "cos(" + sub() + ")";
    case 6: return "tanh(" + sub() + ")";
    case 7: return "exp(0.5 * sin(" + sub() + "))";
    case 8: return "sqrt(1 + (" + sub() + ")^2)";
    case 9: return "log(2 + cos(" + sub() + "))";
    case 10: return "-" + sub();
    default: return "(" + sub() + ")^3";
  }
}

}  // namespace

TEST_CASE("200 random expressions: jets match finite differences and text round-trips") {
  const std::vector<std::string> vars{"u", "v", "w"};
  SplitMix64 rng(20240917);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::string src = random_source(rng, 4, vars);
    CAPTURE(src);
    const Expression e = parse(src, vars);
    const Expression again = parse(e.to_string(), vars);
    CHECK(structurally_equal(e.root(), again.root()));
    CHECK(again.to_string() == e.to_string());

    const double p[] = {rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8)};
    const Jet3 j = evaluate(e, std::span<const Jet3>(seed(p)));
    CHECK(j.value() == doctest::Approx(evaluate(e, p)).epsilon(1e-14));
    const auto& layout = j.layout();
    for (std::size_t k = 1; k < layout.size(); ++k) {
      const MultiIndex& alpha = layout.multi_index(k);
      const double fd = fd_partials(e, p, alpha);
      const double jet = j.partial(alpha);
      const bool ok = std::abs(jet - fd) <= 1e-4 * (1.0 + std::abs(fd));
      CAPTURE(k);
      CHECK(ok);
    }
    ++checked;
  }
  CHECK(checked == 200);
}
