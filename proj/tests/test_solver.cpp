#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "fde/bracket.hpp"
#include "fde/construct.hpp"
#include "fde/error.hpp"
#include "fde/problem.hpp"
#include "fde/solver.hpp"
#include "oracles.hpp"

using namespace fde;

namespace {
const double pi = std::numbers::pi;

double max_error(const GridFun& x, const std::function<double(double)>& exact, double a,
                 double b) {
  double e = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = x.grid()[i];
    if (t >= a && t <= b) e = std::max(e, std::abs(x[i] - exact(t)));
  }
  return e;
}

BracketPair wide(const ProblemSpec& p, std::size_t n) {
  return make_bracket(p.grid(n), [](double) { return -10.0; }, [](double) { return 10.0; },
                      p.boundary);
}

SolveOptions with(Method m) {
  SolveOptions o;
  o.method = m;
  return o;
}
}  // namespace

TEST(ApplyT, Example24) {
  ProblemSpec p = make_builtin("example2_4", {});
  BracketPair b = wide(p, 1000);
  GridFun gamma = GridFun::sample(b.alpha.grid_ptr(), [&](double t) {
    return t <= 0.0 ? p.history_k(t) : 0.0;
  });
  GridFun tg = apply_T(p, b, gamma);
  EXPECT_NEAR(tg.eval(1.0), -0.5, 1e-8);
  const TimeGrid& g = tg.grid();
  for (std::size_t i = 0; i <= g.t0_index(); ++i)
    EXPECT_EQ(tg[i], p.boundary(truncate(gamma, b)) + p.history_k(g[i]));
  EXPECT_EQ(tg.eval(0.0), tg[g.t0_index()]);
}

TEST(PicardSolve, Example28) {
  ProblemSpec p = make_builtin("example2_8", {});
  GridPtr g = p.grid(2000);
  BracketPair b = default_bracket(p, g);
  SolveReport rep = picard_solve(p, b, with(Method::picard));
  ASSERT_TRUE(rep.converged) << rep.message;
  EXPECT_LE(max_error(rep.solution, oracle::reflection_solution, 0.0, 1.0), 1e-6);
  EXPECT_GE(rep.lower_bracket_margin, -1e-9);
  EXPECT_GE(rep.upper_bracket_margin, -1e-9);
}

TEST(PicardSolve, Example24WideBracketTwoIterations) {
  ProblemSpec p = make_builtin("example2_4", {});
  SolveReport rep = picard_solve(p, wide(p, 1000), with(Method::picard));
  ASSERT_TRUE(rep.converged);
  EXPECT_LE(rep.iterations, 2u);
  EXPECT_LE(max_error(rep.solution, oracle::delay_solution, 0.0, 1.0), 1e-10);
}

TEST(PicardSolve, IterationLimitReported) {
  ProblemSpec p = make_builtin("example2_8", {});
  BracketPair b = default_bracket(p, p.grid(200));
  SolveOptions o = with(Method::picard);
  o.max_iter = 1;
  o.start = StartIterate::beta;
  SolveReport rep = picard_solve(p, b, o);
  EXPECT_FALSE(rep.converged);
  EXPECT_TRUE(std::isfinite(rep.residual.ode_resid_sup));
}

TEST(StepsSolve, Example24) {
  ProblemSpec p = make_builtin("example2_4", {});
  SolveOptions o = with(Method::steps);
  o.grid = p.grid(1000);
  SolveReport rep = steps_solve(p, o);
  ASSERT_TRUE(rep.converged);
  EXPECT_LE(max_error(rep.solution, oracle::delay_solution, 0.0, 1.0), 1e-10);
  EXPECT_NEAR(rep.solution.eval(1.0), -0.5, 1e-10);
}

TEST(StepsSolve, MultipleSteps) {
  // x' = -y with delay 1 on [0, 3], history -t: piecewise polynomial solution.
  ProblemSpec p = make_builtin("example2_4", {});
  p.L = 3.0;
  p.deviation.set_domain(p.lo(), p.hi());
  SolveOptions o = with(Method::steps);
  o.grid = p.grid(3000);
  SolveReport rep = steps_solve(p, o);
  ASSERT_TRUE(rep.converged);
  // Second step: x'(t) = -(t-1)^2/2 + (t-1), x(1) = -1/2.
  auto exact = [](double t) {
    const double u = t - 1.0;
    return -0.5 - u * u * u / 6.0 + u * u / 2.0;
  };
  EXPECT_LE(max_error(rep.solution, exact, 1.0, 2.0), 1e-9);
  EXPECT_LE(rep.residual.ode_resid_sup, 1e-5);
}

TEST(StepsSolve, RejectsZeroDelay) {
  ProblemSpec p = make_builtin("example2_4", {});
  p.deviation = DeviationSpec::from_expr(parse_expr("t"));
  p.deviation.set_domain(p.lo(), p.hi());
  SolveOptions o = with(Method::steps);
  o.grid = p.grid(100);
  try {
    steps_solve(p, o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::not_retarded);
    EXPECT_NE(std::string(e.what()).find("not strictly retarded"), std::string::npos);
  }
}

TEST(MonotoneSolve, Example28BothSides) {
  ProblemSpec p = make_builtin("example2_8", {});
  BracketPair b = default_bracket(p, p.grid(2000));
  SolveReport lo = monotone_solve(p, b, with(Method::monotone_from_lower));
  SolveReport hi = monotone_solve(p, b, with(Method::monotone_from_upper));
  ASSERT_TRUE(lo.converged);
  ASSERT_TRUE(hi.converged);
  EXPECT_LE(max_error(lo.solution, oracle::reflection_solution, 0.0, 1.0), 1e-6);
  EXPECT_LE(max_error(hi.solution, oracle::reflection_solution, 0.0, 1.0), 1e-6);
  EXPECT_LE(sup_distance(lo.solution, hi.solution), 1e-6);
  for (std::size_t n = 1; n < lo.iterate_trace.size(); ++n)
    for (std::size_t i = 0; i < lo.solution.size(); ++i)
      EXPECT_LE(lo.iterate_trace[n - 1][i], lo.iterate_trace[n][i] + 1e-12);
  for (std::size_t n = 1; n < hi.iterate_trace.size(); ++n)
    for (std::size_t i = 0; i < hi.solution.size(); ++i)
      EXPECT_GE(hi.iterate_trace[n - 1][i], hi.iterate_trace[n][i] - 1e-12);
}

TEST(MonotoneSolve, RejectsUnflaggedRhs) {
  ProblemSpec p = make_builtin("example2_6", {});
  BracketPair b = default_bracket(p, p.grid(100));
  try {
    monotone_solve(p, b, with(Method::monotone_from_lower));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::precondition);
  }
}

TEST(MonotoneSolve, SpotCheckCatchesFalseAssertion) {
  ProblemSpec p = make_builtin("example2_8", {});
  p.rhs = RhsSpec::from_expr(parse_expr("-y"), Monotonicity::nondecreasing);
  BracketPair b = default_bracket(p, p.grid(100));
  EXPECT_THROW(monotone_solve(p, b, with(Method::monotone_from_lower)), Error);
}

TEST(ScalarStep, Cases) {
  EXPECT_NEAR(scalar_step([](double, double x) { return -x; }, 0.0, 1.0, 1.0, 1000),
              std::exp(-1.0), 1e-10);
  EXPECT_DOUBLE_EQ(scalar_step([](double, double) { return 2.5; }, 1.0, 3.0, 0.5, 7), 5.5);
  try {
    scalar_step([](double, double x) { return 1.0 / x; }, 0.0, 1.0, 1e-310, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::non_finite);
  }
}

TEST(Residual, Example26Family) {
  ProblemSpec p = make_builtin("example2_6", {});
  GridPtr g = p.grid(2000);
  GridFun x = GridFun::sample(g, [](double t) { return 0.5 * std::cos(t); });
  ResidualReport r = residual(p, x);
  EXPECT_LE(r.ode_resid_sup, 1e-5);
  EXPECT_LE(r.boundary_resid_sup, 1e-10);

  ResidualReport z = residual(p, GridFun::constant(g, 0.0));
  EXPECT_EQ(z.ode_resid_sup, 0.0);
  EXPECT_EQ(z.boundary_resid_sup, 0.0);

  GridFun shifted = GridFun::sample(g, [](double t) { return 0.5 * std::cos(t) + 0.1; });
  EXPECT_NEAR(residual(p, shifted).boundary_resid_sup, 0.1, 1e-12);
}

TEST(Solve, Dispatch) {
  ProblemSpec p = make_builtin("example2_4", {});
  EXPECT_THROW(solve(p, std::nullopt, with(Method::picard)), Error);
  SolveOptions o = with(Method::steps);
  o.grid = p.grid(100);
  EXPECT_TRUE(solve(p, std::nullopt, o).converged);
}

TEST(SolveOptionsTest, Validation) {
  SolveOptions o;
  o.fp_tol = 0.0;
  EXPECT_THROW(o.validate(), Error);
  o = SolveOptions{};
  o.max_iter = 0;
  EXPECT_THROW(o.validate(), Error);
  o = SolveOptions{};
  o.damping = 1.5;
  EXPECT_THROW(o.validate(), Error);
}

TEST(WriteTrace, NumberedFiles) {
  ProblemSpec p = make_builtin("example2_8", {});
  BracketPair b = default_bracket(p, p.grid(50));
  SolveReport rep = monotone_solve(p, b, with(Method::monotone_from_lower));
  auto dir = std::filesystem::temp_directory_path() / "fde_trace_test";
  std::filesystem::remove_all(dir);
  const std::size_t n = write_trace(dir, "it", rep.iterate_trace);
  EXPECT_EQ(n, rep.iterate_trace.size());
  EXPECT_TRUE(std::filesystem::exists(dir / "it_0000.csv"));
  std::filesystem::remove_all(dir);
}

TEST(StepsSolve, SolutionDependentLambda) {
  // x(t) = Lambda(x) - t on [-1, 0] with Lambda(x) = x(1): c = x(1) gives
  // c = -1/2 and x(t) = t^2/2 - t/2 - 1/2 on [0, 1].
  ProblemSpec p = make_builtin("example2_4", {});
  p.boundary = FunctionalSpec::eval_at(1.0);
  SolveOptions o = with(Method::steps);
  o.grid = p.grid(1000);
  SolveReport rep = steps_solve(p, o);
  ASSERT_TRUE(rep.converged) << rep.message;
  EXPECT_LE(max_error(rep.solution, [](double t) { return 0.5 * t * t - 0.5 * t - 0.5; }, 0.0,
                      1.0),
            1e-9);
  EXPECT_LE(rep.residual.boundary_resid_sup, 1e-9);
}
