#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fde/error.hpp"
#include "fde/expr.hpp"
#include "fde/problem.hpp"

using namespace fde;

namespace {
const double pi = std::numbers::pi;

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no exception";
  return ErrorKind::invalid_argument;
}
}  // namespace

TEST(ParseExpr, DelaySolution) {
  Expr e = parse_expr("t^2/2 - t");
  EXPECT_DOUBLE_EQ(e.eval(Vars{1.0, {}, {}}), -0.5);
}

TEST(ParseExpr, PiecewiseF) {
  Expr e = parse_expr("if(y < -1, 1, if(y <= 1, -y, -1))");
  EXPECT_EQ(e.eval(0, 0, 2.0), -1.0);
  EXPECT_EQ(e.eval(0, 0, -3.0), 1.0);
  EXPECT_EQ(e.eval(0, 0, 0.25), -0.25);
}

TEST(ParseExpr, SyntaxErrorPosition) {
  try {
    parse_expr("sin(");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 4u);
  }
  EXPECT_THROW(parse_expr("foo(1)"), ParseError);
  EXPECT_THROW(parse_expr("sin(1, 2)"), ParseError);
  EXPECT_THROW(parse_expr("z + 1"), ParseError);
}

TEST(ParseExpr, Precedence) {
  EXPECT_DOUBLE_EQ(parse_expr("2^3^2").eval(Vars{}), 512.0);
  EXPECT_DOUBLE_EQ(parse_expr("-2^2").eval(Vars{}), -4.0);
  EXPECT_DOUBLE_EQ(parse_expr("1 + 2 * 3").eval(Vars{}), 7.0);
  EXPECT_DOUBLE_EQ(parse_expr("(1 + 2) * 3").eval(Vars{}), 9.0);
  EXPECT_DOUBLE_EQ(parse_expr("2^-1").eval(Vars{}), 0.5);
  EXPECT_EQ(parse_expr("1 < 2 and 3 < 2 or 1 == 1").eval(Vars{}), 1.0);
}

TEST(EvalExpr, Values) {
  EXPECT_NEAR(eval_expr(parse_expr("-t*cos(t)"), -pi, 0, 0), -pi, 1e-15);
  EXPECT_EQ(kind_of([] { eval_expr(parse_expr("-t/y"), 0.5, 0, 0.0); }), ErrorKind::domain_error);
  EXPECT_EQ(kind_of([] { eval_expr(parse_expr("log(x)"), 0, -1, 0); }), ErrorKind::domain_error);
  EXPECT_EQ(kind_of([] { eval_expr(parse_expr("0^(-1)"), 0, 0, 0); }), ErrorKind::domain_error);
  EXPECT_THROW(parse_expr("x + 1").eval(Vars{1.0, {}, {}}), Error);
}

TEST(ParseExpr, RoundTrip) {
  for (const char* text : {"t^2/2 - t", "if(y < -1, 1, if(y <= 1, -y, -1))",
                           "-(x + pi)*abs(x + pi)^(1)*(1) + sin(pi*y)", "min(t, max(x, -y))"}) {
    Expr e = parse_expr(text);
    Expr back = parse_expr(e.to_string());
    EXPECT_TRUE(e == back) << text << " -> " << e.to_string();
  }
}

TEST(LoadProblem, BuiltinReflection) {
  ProblemSpec p = load_problem("builtin = example2_8, L = 1");
  EXPECT_EQ(p.t0, 0.0);
  EXPECT_EQ(p.r, 1.0);
  EXPECT_EQ(p.L, 1.0);
  EXPECT_EQ(p.deviation.kind(), DeviationKind::reflection);
  EXPECT_DOUBLE_EQ(p.deviation.at(0.3), -0.3);
  EXPECT_DOUBLE_EQ(p.rhs(0.5, 0.0, -2.0), 0.25);
  EXPECT_NEAR(p.history_k(-0.5), -0.5 * std::cos(-0.5) + 1.5, 1e-15);
  EXPECT_EQ(p.rhs.monotone_in_y, Monotonicity::nondecreasing);
}

TEST(LoadProblem, InlineDelayConfig) {
  ProblemSpec p = load_problem(
      "# delay example\n"
      "t0 = 0\nL = 1\n"
      "f = -y\n"
      "f_monotone = nonincreasing\n"
      "tau = delay:1\n"
      "lambda = constant:0\n"
      "k = -t\n");
  EXPECT_EQ(p.deviation.kind(), DeviationKind::pure_delay);
  EXPECT_EQ(p.deviation.delay(), 1.0);
  EXPECT_EQ(p.r, 1.0);
  EXPECT_EQ(p.boundary.kind, FunctionalKind::constant);
  EXPECT_EQ(p.boundary.c, 0.0);
  EXPECT_EQ(p.history_k(-0.25), 0.25);
  EXPECT_DOUBLE_EQ(p.deviation.at(0.5), -0.5);
}

TEST(LoadProblem, Errors) {
  try {
    load_problem("tau = delay:1\nk = -t\nL = 1\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::config_error);
    EXPECT_NE(std::string(e.what()).find("missing field f"), std::string::npos);
  }
  EXPECT_THROW(load_problem("f = -y\nf = y\ntau = delay:1\nk = -t\nL = 1\n"), Error);
  EXPECT_THROW(load_problem("f = -y +\ntau = delay:1\nk = -t\nL = 1\n"), Error);
  EXPECT_THROW(load_problem("f = -y\ntau = t + 5\nk = -t\nL = 1\nr = 1\n"), Error);
  EXPECT_THROW(load_problem("f = -y\ntau = delay:1\nk = -t\nL = 1\ncolour = red\n"), Error);
  EXPECT_THROW(load_problem("builtin = nope\n"), Error);
  EXPECT_THROW(load_problem("builtin = example2_4, bogus = 1\n"), Error);
}

TEST(LoadProblem, LambdaKinds) {
  const std::string base = "f = -y\ntau = delay:1\nk = -t\nL = 1\n";
  EXPECT_EQ(load_problem(base + "lambda = eval_at:-1\n").boundary.kind, FunctionalKind::eval_at);
  EXPECT_EQ(load_problem(base + "lambda = mean\n").boundary.kind, FunctionalKind::mean);
  EXPECT_EQ(load_problem(base + "lambda = sup:-1:0\n").boundary.kind, FunctionalKind::sup_on);
  EXPECT_EQ(load_problem(base + "lambda = inf:-1:0\n").boundary.kind, FunctionalKind::inf_on);
  EXPECT_THROW(load_problem(base + "lambda = eval_at:3\n"), Error);
}

TEST(Registry, ContainsPaperExamples) {
  auto names = builtin_names();
  for (const char* n : {"example2_4", "example2_6", "example2_8", "example3_2", "example3_4"})
    EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
  EXPECT_NO_THROW(make_builtin("example3_2", {{"L", "5"}}));
  EXPECT_NO_THROW(make_builtin("example3_4", {{"gamma", "2"}, {"g", "damped"}, {"tau", "state"}}));
}

TEST(Registry, Example26FBounded) {
  ProblemSpec p = make_builtin("example2_6", {});
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int i = 0; i < 1000; ++i) EXPECT_LE(std::abs(p.rhs(u(rng), u(rng), u(rng))), 1.0);
}

TEST(Registry, DeviationsRespectBounds) {
  std::mt19937_64 rng(11);
  for (const auto& name : builtin_names()) {
    std::vector<std::vector<std::pair<std::string, std::string>>> variants{{}};
    if (name == "example3_4") variants.push_back({{"tau", "state"}});
    for (const auto& params : variants) {
      ProblemSpec p = make_builtin(name, params);
      GridPtr g = p.grid(100);
      std::uniform_real_distribution<double> ut(p.t0, p.hi());
      std::normal_distribution<double> nv(0.0, 3.0);
      for (int s = 0; s < 1000; ++s) {
        std::vector<double> v(g->size());
        for (auto& x : v) x = nv(rng);
        GridFun gamma(g, v);
        const double t = ut(rng);
        const double tau = p.deviation(t, gamma);
        EXPECT_GE(tau, p.lo() - 1e-9);
        EXPECT_LE(tau, p.hi() + 1e-9);
        if (p.deviation.has_declared_bounds()) {
          auto [lo, hi] = p.deviation.declared_bounds()(t);
          EXPECT_GE(tau, lo - 1e-9);
          EXPECT_LE(tau, hi + 1e-9);
        }
      }
    }
  }
}

TEST(Functional, BuiltinKindsMonotone) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0), w(0.0, 1.0);
  auto g = make_grid(0.0, 1.0, 1.0, 20, 20);
  std::vector<FunctionalSpec> kinds{FunctionalSpec::constant_value(1.5), FunctionalSpec::eval_at(-0.3),
                                    FunctionalSpec::mean(), FunctionalSpec::sup_on(-1.0, 0.2),
                                    FunctionalSpec::inf_on(-0.5, 1.0)};
  for (int s = 0; s < 200; ++s) {
    std::vector<double> a(g->size()), b(g->size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = u(rng);
      b[i] = a[i] + w(rng);
    }
    GridFun ga(g, a), gb(g, b);
    for (const auto& lam : kinds) EXPECT_LE(lam(ga), lam(gb)) << lam.describe();
  }
}
