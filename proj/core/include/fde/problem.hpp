#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fde/expr.hpp"
#include "fde/gridfun.hpp"

namespace fde {

enum class Monotonicity { nondecreasing, nonincreasing, unknown };

const char* to_string(Monotonicity m) noexcept;

/// Right-hand side f(t, x, y) where y is the state at the deviated time.
struct RhsSpec {
  std::function<double(double, double, double)> f;
  Monotonicity monotone_in_y = Monotonicity::unknown;
  /// Optional integrable bound psi(t) >= |f| on the bracket region.
  std::function<double(double)> l1_bound;
  /// Present when f came from an expression.
  std::optional<Expr> expr;

  double operator()(double t, double x, double y) const { return f(t, x, y); }

  /// f written purely in terms of the deviated state y.
  bool depends_only_on_y() const;

  static RhsSpec from_expr(const Expr& e, Monotonicity m = Monotonicity::unknown);
};

enum class DeviationKind { pure_delay, reflection, expr, weighted_eval, native };

/// Deviated time tau(t, gamma) together with its envelope bounds.
class DeviationSpec {
 public:
  using Fixed = std::function<double(double)>;
  using Dependent = std::function<double(double, const GridFun&)>;
  using Bounds = std::function<std::pair<double, double>(double)>;

  static DeviationSpec pure_delay(double delay);
  static DeviationSpec reflection();
  static DeviationSpec from_expr(const Expr& tau_of_t);
  /// tau(t, gamma) = clamp(e(t, x = gamma(t))) into I.
  static DeviationSpec weighted_eval(const Expr& e);
  static DeviationSpec native_fixed(Fixed tau, std::string description);
  static DeviationSpec native_dependent(Dependent tau, std::string description);

  DeviationKind kind() const noexcept { return kind_; }
  bool state_dependent() const noexcept { return static_cast<bool>(dependent_); }
  bool empty() const noexcept { return !fixed_ && !dependent_; }
  double delay() const noexcept { return delay_; }
  const std::string& description() const noexcept { return description_; }

  /// Interval I into which every deviation value is clamped; set by the problem.
  void set_domain(double lo, double hi);
  double domain_lo() const noexcept { return lo_; }
  double domain_hi() const noexcept { return hi_; }

  void set_bounds(Bounds b) { bounds_ = std::move(b); }
  bool has_declared_bounds() const noexcept { return static_cast<bool>(bounds_); }
  const Bounds& declared_bounds() const noexcept { return bounds_; }

  /// tau(t, gamma), snapped into the domain.
  double operator()(double t, const GridFun& gamma) const;

  /// tau(t) for a state-independent deviation; throws otherwise.
  double at(double t) const;

 private:
  double clamp_into_domain(double v) const;
  void rebuild_weighted();

  DeviationKind kind_ = DeviationKind::native;
  Fixed fixed_;
  Dependent dependent_;
  Bounds bounds_;
  std::optional<Expr> weighted_;
  double delay_ = 0.0;
  double lo_ = -1e300;
  double hi_ = 1e300;
  std::string description_;
};

enum class FunctionalKind { constant, eval_at, mean, sup_on, inf_on, native };

/// Boundary functional Lambda: C(I) -> R.
struct FunctionalSpec {
  FunctionalKind kind = FunctionalKind::constant;
  double c = 0.0;  // constant value
  double a = 0.0;  // eval_at point / sup_on, inf_on left end
  double b = 0.0;  // sup_on, inf_on right end
  std::function<double(const GridFun&)> native;
  bool monotone = true;

  static FunctionalSpec constant_value(double c);
  static FunctionalSpec eval_at(double a);
  static FunctionalSpec mean();
  static FunctionalSpec sup_on(double a, double b);
  static FunctionalSpec inf_on(double a, double b);
  static FunctionalSpec from_native(std::function<double(const GridFun&)> fn,
                                    bool monotone = false);

  double operator()(const GridFun& g) const;
  std::string describe() const;
};

/// Comparison functions F_alpha <= f (for x <= phi_*) and f <= F_beta
/// (for x >= phi^*) used to build linear brackets.
struct EnvelopePair {
  std::function<double(double)> F_alpha;
  std::function<double(double)> F_beta;
};

/// Bracket supplied with a problem: explicit functions of t, or "auto"
/// (construct linear lower/upper solutions).
struct BracketHint {
  std::function<double(double)> alpha;
  std::function<double(double)> beta;
  bool automatic = false;
};

/// x'(t) = f(t, x(t), x(tau(t, x))) on [t0, t0+L],
/// x(t) = Lambda(x) + k(t) on [t0-r, t0].
struct ProblemSpec {
  std::string name;
  double t0 = 0.0;
  double r = 0.0;
  double L = 1.0;
  RhsSpec rhs;
  DeviationSpec deviation;
  FunctionalSpec boundary;
  std::function<double(double)> history_k;

  std::optional<BracketHint> bracket_hint;
  std::optional<EnvelopePair> envelopes;
  std::string notes;

  double lo() const noexcept { return t0 - r; }
  double hi() const noexcept { return t0 + L; }

  /// Uniform grid with n_plus forward cells and matching history spacing.
  GridPtr grid(std::size_t n_plus) const;

  /// Checks history finiteness and that tau stays inside I (and inside its
  /// declared bounds) on a deterministic sample. Throws config_error.
  void validate(std::size_t samples = 1000) const;
};

/// Parses the line-oriented `key = value` format, or `builtin = <name>` with
/// parameters. Validates the result.
ProblemSpec load_problem(const std::string& config);

/// Reads a config file from disk and loads it.
ProblemSpec load_problem_file(const std::string& path);

/// Names accepted by `builtin = <name>`.
std::vector<std::string> builtin_names();

/// Builds a registry problem; params are the remaining config keys.
ProblemSpec make_builtin(const std::string& name,
                         const std::vector<std::pair<std::string, std::string>>& params);

/// Right-hand side of the sign-log/sine example function used by the
/// bracket construction examples.
double example_signlog_sine(double y);

}  // namespace fde
