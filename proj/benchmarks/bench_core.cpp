#include <benchmark/benchmark.h>

#include <numbers>

#include "fde/bracket.hpp"
#include "fde/construct.hpp"
#include "fde/explore.hpp"
#include "fde/problem.hpp"
#include "fde/solver.hpp"

using namespace fde;

namespace {

void BM_ApplyT_Reflection(benchmark::State& state) {
  ProblemSpec p = make_builtin("example2_8", {});
  BracketPair b = default_bracket(p, p.grid(static_cast<std::size_t>(state.range(0))));
  GridFun gamma = b.alpha;
  for (auto _ : state) benchmark::DoNotOptimize(apply_T(p, b, gamma));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ApplyT_Reflection)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

void BM_VerifyDefinition21_Cosine(benchmark::State& state) {
  ProblemSpec p = make_builtin("example2_6", {});
  BracketPair b = default_bracket(p, p.grid(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(verify_definition21(p, b));
}
BENCHMARK(BM_VerifyDefinition21_Cosine)->Arg(500)->Arg(2000);

void BM_Picard_Reflection(benchmark::State& state) {
  ProblemSpec p = make_builtin("example2_8", {});
  BracketPair b = default_bracket(p, p.grid(static_cast<std::size_t>(state.range(0))));
  SolveOptions o;
  for (auto _ : state) benchmark::DoNotOptimize(picard_solve(p, b, o));
}
BENCHMARK(BM_Picard_Reflection)->Arg(500)->Arg(2000)->Arg(8000);

void BM_Monotone_Reflection(benchmark::State& state) {
  ProblemSpec p = make_builtin("example2_8", {});
  BracketPair b = default_bracket(p, p.grid(2000));
  SolveOptions o;
  o.method = Method::monotone_from_lower;
  for (auto _ : state) benchmark::DoNotOptimize(monotone_solve(p, b, o));
}
BENCHMARK(BM_Monotone_Reflection);

void BM_Steps_Delay(benchmark::State& state) {
  ProblemSpec p = make_builtin("example2_4", {});
  SolveOptions o;
  o.method = Method::steps;
  o.grid = p.grid(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(steps_solve(p, o));
}
BENCHMARK(BM_Steps_Delay)->Arg(1000)->Arg(10000);

void BM_ConstructP32(benchmark::State& state) {
  ProblemSpec p = make_builtin("example3_4", {});
  GridPtr g = p.grid(1000);
  for (auto _ : state) benchmark::DoNotOptimize(construct_p32(p, g));
}
BENCHMARK(BM_ConstructP32);

void BM_ExtremalSearch_Cosine(benchmark::State& state) {
  ProblemSpec p = make_builtin("example2_6", {});
  BracketPair b = default_bracket(p, p.grid(1600));
  ExploreOptions o;
  o.solve.damping = 0.4;
  o.solve.fp_tol = 1e-7;
  o.threads = static_cast<std::size_t>(state.range(0));
  auto seeds = default_seeds(b, 9);
  for (auto _ : state) benchmark::DoNotOptimize(extremal_search(p, b, seeds, o));
}
BENCHMARK(BM_ExtremalSearch_Cosine)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace
BENCHMARK_MAIN();
