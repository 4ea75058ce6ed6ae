#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "fde/bracket.hpp"
#include "fde/construct.hpp"
#include "fde/error.hpp"
#include "fde/problem.hpp"

using namespace fde;

namespace {
const double pi = std::numbers::pi;

BracketPair unit_bracket(const ProblemSpec& p, std::size_t n = 100) {
  return make_bracket(p.grid(n), [](double) { return 0.0; }, [](double) { return 1.0; },
                      p.boundary);
}

BracketPair example26_bracket(const ProblemSpec& p, std::size_t n = 400) {
  return make_bracket(p.grid(n), [](double t) { return -t - pi / 2; },
                      [](double t) { return t + pi / 2; }, p.boundary);
}
}  // namespace

TEST(Truncate, ClampsIntoBracket) {
  ProblemSpec p = make_builtin("example2_4", {});
  BracketPair b = unit_bracket(p);
  EXPECT_EQ(truncate(0.3, -0.5, b), 0.0);
  EXPECT_EQ(truncate(0.3, 0.5, b), 0.5);
  EXPECT_EQ(truncate(0.3, 1.5, b), 1.0);
  EXPECT_EQ(truncate(0.3, truncate(0.3, 7.0, b), b), truncate(0.3, 7.0, b));
}

TEST(MakeBracket, RejectsCrossing) {
  ProblemSpec p = make_builtin("example2_6", {});
  EXPECT_THROW(make_bracket(p.grid(100), [](double t) { return -t - pi / 2 + 10; },
                            [](double t) { return t + pi / 2; }, p.boundary),
               Error);
}

TEST(DeviationEnvelope, Cases) {
  ProblemSpec p = make_builtin("example2_6", {});
  auto [lo, hi] = deviation_envelope(p.deviation, 0.4);
  EXPECT_DOUBLE_EQ(lo, pi / 2 - 0.4);
  EXPECT_DOUBLE_EQ(hi, pi / 2 - 0.4);

  DeviationSpec d = DeviationSpec::native_dependent(
      [](double t, const GridFun& g) { return t - std::abs(g.eval(t)); }, "state");
  d.set_domain(-1.0, 1.0);
  auto [l2, h2] = deviation_envelope(d, 0.5);
  EXPECT_EQ(l2, -1.0);
  EXPECT_EQ(h2, 1.0);

  d.set_bounds([](double) { return std::make_pair(0.0, 2.0); });
  EXPECT_THROW(deviation_envelope(d, 0.5), Error);
  d.set_bounds([](double) { return std::make_pair(0.5, 0.0); });
  EXPECT_THROW(deviation_envelope(d, 0.5), Error);
}

TEST(ValueEnvelope, Example26) {
  ProblemSpec p = make_builtin("example2_6", {});
  BracketPair b = example26_bracket(p);
  for (double t : {-pi / 2, -0.3, 0.0, 1.1, pi}) {
    auto [e0, e1] = value_envelope_E(b, p.deviation, t);
    EXPECT_NEAR(e0, t - pi, 1e-12) << t;
    EXPECT_NEAR(e1, pi - t, 1e-12) << t;
  }
}

TEST(ValueEnvelope, ConstantPair) {
  ProblemSpec p = make_builtin("example2_4", {});
  BracketPair b = make_bracket(p.grid(10), [](double) { return 2.0; }, [](double) { return 2.0; },
                               p.boundary);
  auto [e0, e1] = value_envelope_E(b, p.deviation, 0.5);
  EXPECT_EQ(e0, 2.0);
  EXPECT_EQ(e1, 2.0);
}

TEST(LambdaBounds, Kinds) {
  auto g = make_grid(0.0, 1.0, 1.0, 10, 10);
  GridFun a = GridFun::sample(g, [](double t) { return t - 1.0; });
  GridFun b = GridFun::sample(g, [](double t) { return t + 1.0; });
  LambdaBounds c = lambda_bounds(FunctionalSpec::constant_value(0.0), a, b);
  EXPECT_EQ(c.inf, 0.0);
  EXPECT_EQ(c.sup, 0.0);
  EXPECT_TRUE(c.exact);
  LambdaBounds e = lambda_bounds(FunctionalSpec::eval_at(-0.5), a, b);
  EXPECT_DOUBLE_EQ(e.inf, -1.5);
  EXPECT_DOUBLE_EQ(e.sup, 0.5);
  EXPECT_TRUE(e.exact);
}

TEST(LambdaBounds, NativeSquareSampled) {
  auto g = make_grid(0.0, 1.0, 1.0, 10, 10);
  GridFun a = GridFun::constant(g, -1.0);
  GridFun b = GridFun::constant(g, 1.0);
  auto lam = FunctionalSpec::from_native([](const GridFun& x) {
    const double v = x.eval(0.3);
    return v * v;
  });
  LambdaBounds lb = lambda_bounds(lam, a, b, 10000);
  EXPECT_FALSE(lb.exact);
  EXPECT_GE(lb.inf, 0.0);
  EXPECT_LE(lb.inf, 0.05);
  EXPECT_LE(lb.sup, 1.0);
}

TEST(VerifyDefinition21, Example26Passes) {
  ProblemSpec p = make_builtin("example2_6", {});
  VerificationReport rep = verify_definition21(p, example26_bracket(p));
  EXPECT_TRUE(rep.pass) << rep.summary();
  EXPECT_GE(rep.worst_lower_differential, 0.0);
  EXPECT_GE(rep.worst_upper_differential, 0.0);
  EXPECT_NEAR(rep.boundary_margins.front().lower, 0.0, 1e-12);
}

TEST(VerifyDefinition21, Example24FailsWithMarginMinusOne) {
  ProblemSpec p = make_builtin("example2_4", {});
  VerificationReport rep = verify_definition21(p, unit_bracket(p));
  EXPECT_FALSE(rep.pass);
  EXPECT_EQ(rep.verdict, Verdict::fail);
  EXPECT_NEAR(rep.worst_lower_differential, -1.0, 1e-6);
}

TEST(VerifyClassical, Example24Passes) {
  ProblemSpec p = make_builtin("example2_4", {});
  VerificationReport rep = verify_classical(p, unit_bracket(p));
  EXPECT_TRUE(rep.pass) << rep.summary();
}

TEST(VerifyClassical, Example26Passes) {
  ProblemSpec p = make_builtin("example2_6", {});
  EXPECT_TRUE(verify_classical(p, example26_bracket(p)).pass);
}

TEST(VerifyDefinition21, AffineInXiUsesEndpoints) {
  // f = 2 y - x: the min over E(t) sits at the left end exactly.
  ProblemSpec p = make_builtin("example2_6", {});
  p.rhs = RhsSpec::from_expr(parse_expr("2*y - x"));
  BracketPair b = example26_bracket(p, 50);
  VerificationReport rep = verify_definition21(p, b);
  const TimeGrid& g = b.grid();
  for (std::size_t j = 0; j < rep.node_margins.size(); ++j) {
    const std::size_t cell = g.t0_index() + j;
    const double t = rep.node_margins[j].t;
    auto [e0, e1] = value_envelope_E(b, p.deviation, t);
    const double a = b.alpha.eval(t), be = b.beta.eval(t);
    EXPECT_DOUBLE_EQ(rep.node_margins[j].lower, (2 * e0 - a) - b.alpha.slope(cell));
    EXPECT_DOUBLE_EQ(rep.node_margins[j].upper, b.beta.slope(cell) - (2 * e1 - be));
  }
}

TEST(VerifyDefinition21, DomainErrorIsIndeterminate) {
  ProblemSpec p = make_builtin("example2_4", {});
  p.rhs = RhsSpec::from_expr(parse_expr("log(y)"));
  BracketPair b = make_bracket(p.grid(20), [](double) { return -1.0; },
                               [](double) { return 1.0; }, p.boundary);
  VerificationReport rep = verify_definition21(p, b);
  EXPECT_FALSE(rep.pass);
  ASSERT_TRUE(rep.error_t.has_value());
}

TEST(VerificationReportCsv, RowsAndSummary) {
  ProblemSpec p = make_builtin("example2_4", {});
  VerificationReport rep = verify_definition21(p, unit_bracket(p, 10));
  std::ostringstream os;
  rep.write_csv(os);
  const std::string s = os.str();
  EXPECT_EQ(s.rfind("t,kind,margin\n", 0), 0u);
  EXPECT_NE(s.find("lower_differential"), std::string::npos);
  EXPECT_NE(s.find("\n# "), std::string::npos);
}
