#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fde/bracket.hpp"
#include "fde/gridfun.hpp"
#include "fde/problem.hpp"

namespace fde {

enum class Method { picard, steps, monotone_from_lower, monotone_from_upper };

const char* to_string(Method m) noexcept;
/// Accepts the names printed by to_string; throws invalid_argument otherwise.
Method parse_method(const std::string& name);

enum class StartIterate { alpha, beta, average };

struct SolveOptions {
  Method method = Method::picard;
  std::size_t max_iter = 200;
  double fp_tol = 1e-10;
  /// Grid for steps_solve; the other methods use the bracket's grid.
  GridPtr grid;
  double damping = 1.0;
  StartIterate start = StartIterate::average;
  std::optional<GridFun> initial;
  /// RK4 substeps per grid cell (steps and monotone methods).
  std::size_t substeps = 4;
  /// Keep every iterate in the report (always on for monotone methods).
  bool keep_trace = false;
  std::size_t monotone_samples = 1000;

  void validate() const;
};

struct ResidualReport {
  double ode_resid_sup = 0.0;
  double boundary_resid_sup = 0.0;
  std::size_t failed_nodes = 0;
  std::optional<double> error_t;
  std::string error;
};

struct SolveReport {
  explicit SolveReport(GridFun x) : solution(std::move(x)) {}

  GridFun solution;
  bool converged = false;
  std::size_t iterations = 0;
  double sup_step = 0.0;
  ResidualReport residual;
  std::vector<GridFun> iterate_trace;
  /// min over nodes of x - alpha and beta - x (NaN without a bracket).
  double lower_bracket_margin = 0.0;
  double upper_bracket_margin = 0.0;
  /// sup |T x - x| for the Picard path (NaN otherwise).
  double fixed_point_defect = 0.0;
  std::string message;
};

/// (T gamma)(t) = Lambda(p(gamma)) + k(t) on I_-, and on I_0
/// Lambda(p(gamma)) + k(t0) + int_{t0}^t f(s, p(s, gamma(s)), p(tau, gamma(tau))) ds,
/// with tau = tau(s, gamma) and the integrand sampled at cell midpoints.
GridFun apply_T(const ProblemSpec& p, const BracketPair& b, const GridFun& gamma);

/// Damped fixed-point iteration gamma <- (1 - d) gamma + d T gamma. The history
/// part of the starting iterate is replaced by the start condition. Running
/// out of iterations is reported, not thrown.
SolveReport picard_solve(const ProblemSpec& p, const BracketPair& b, const SolveOptions& opts);

/// Method of steps for strictly retarded state-independent deviations.
/// A non-constant Lambda is handled by an outer fixed-point loop on its value.
SolveReport steps_solve(const ProblemSpec& p, const SolveOptions& opts);

/// Monotone iteration: x_{n+1}' = f(t, x_{n+1}, x_n(tau(t))) from alpha or beta.
SolveReport monotone_solve(const ProblemSpec& p, const BracketPair& b, const SolveOptions& opts);

/// Dispatches on opts.method.
SolveReport solve(const ProblemSpec& p, const std::optional<BracketPair>& b,
                  const SolveOptions& opts);

/// Classical RK4 for x' = f(t, x) from (t_a, x_a) to t_b in `substeps` steps.
/// A domain error exactly at t_a or t_b is retried at t_a + 1e-9 h or
/// t_b - 1e-9 h (one-sided limit).
double scalar_step(const std::function<double(double, double)>& f_frozen, double t_a,
                   double t_b, double x_a, std::size_t substeps);

/// Defects of x in the equation (cell midpoints, slope as derivative) and in
/// the start condition (I_- nodes).
ResidualReport residual(const ProblemSpec& p, const GridFun& x);

/// Writes iterate_trace as <dir>/<prefix>_0000.csv, ... Returns the count.
std::size_t write_trace(const std::filesystem::path& dir, const std::string& prefix,
                        const std::vector<GridFun>& trace);

}  // namespace fde
