#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fde/gridfun.hpp"
#include "fde/problem.hpp"

namespace fde {

struct LambdaBounds {
  double inf = 0.0;
  double sup = 0.0;
  bool exact = true;
};

/// Candidate lower/upper pair alpha <= beta on a common grid, with the bounds
/// of the boundary functional over the order interval [alpha, beta].
struct BracketPair {
  GridFun alpha;
  GridFun beta;
  double lambda_inf = 0.0;
  double lambda_sup = 0.0;
  bool lambda_bounds_exact = true;

  const TimeGrid& grid() const noexcept { return alpha.grid(); }
};

/// Bounds of Lambda over [alpha, beta]: exact (Lambda(alpha), Lambda(beta)) for
/// the monotone catalog kinds, sampled over random pointwise convex
/// combinations otherwise.
LambdaBounds lambda_bounds(const FunctionalSpec& lam, const GridFun& alpha,
                           const GridFun& beta, std::size_t samples = 1000,
                           std::uint64_t seed = 0x5eed);

/// Checks alpha <= beta at every node (no tolerance) and computes Lambda
/// bounds. Throws invalid_argument on a crossing or grid mismatch.
BracketPair make_bracket(GridFun alpha, GridFun beta, const FunctionalSpec& lam,
                         std::size_t samples = 1000);

/// Samples functions of t on grid and builds the pair.
BracketPair make_bracket(const GridPtr& grid, const std::function<double(double)>& alpha,
                         const std::function<double(double)>& beta,
                         const FunctionalSpec& lam);

/// The truncation p(t, v): v clamped into [alpha(t), beta(t)].
double truncate(double t, double v, const BracketPair& b);

/// Pointwise truncation of a whole function.
GridFun truncate(const GridFun& g, const BracketPair& b);

/// (tau_*(t), tau^*(t)): declared bounds if any, tau(t) itself when the
/// deviation ignores the state, the whole of I otherwise.
std::pair<double, double> deviation_envelope(const DeviationSpec& d, double t);

/// E(t) = [min alpha, max beta] over the deviation envelope at t.
std::pair<double, double> value_envelope_E(const BracketPair& b, const DeviationSpec& d,
                                           double t);

enum class Definition { envelope, classical };
enum class Verdict { pass, fail, indeterminate };

const char* to_string(Definition d) noexcept;
const char* to_string(Verdict v) noexcept;

struct VerifyOptions {
  std::size_t quad_nodes = 64;  // inner scan points over E(t)
  int golden_iters = 40;
  double tol = 1e-9;
  /// Use the whole of I as deviation envelope, whatever tau is.
  bool conservative_envelope = false;
};

struct MarginRecord {
  double t = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct VerificationReport {
  Definition definition = Definition::envelope;
  std::vector<MarginRecord> node_margins;      // midpoints of I_0 cells
  std::vector<MarginRecord> boundary_margins;  // nodes of I_-
  double worst_lower = 0.0;  // over differential and boundary margins
  double worst_upper = 0.0;
  double worst_lower_differential = 0.0;
  double worst_upper_differential = 0.0;
  double worst_boundary = 0.0;
  double tol = 1e-9;
  bool pass = false;
  bool marginal = false;   // some margin lies in [-tol, 0)
  bool empirical = false;  // Lambda bounds were sampled, not exact
  Verdict verdict = Verdict::indeterminate;
  std::optional<double> error_t;
  std::string error;

  /// `t,kind,margin` rows and a trailing `#` summary line.
  void write_csv(std::ostream& os) const;
  std::string summary() const;
};

/// Checks the envelope inequalities alpha' <= min_E f(t, alpha, .),
/// beta' >= max_E f(t, beta, .) at cell midpoints of I_0 and the start
/// inequalities against Lambda bounds on I_-.
VerificationReport verify_definition21(const ProblemSpec& p, const BracketPair& b,
                                       const VerifyOptions& opts = {});

/// Checks the classical inequalities with f evaluated along alpha and beta.
VerificationReport verify_classical(const ProblemSpec& p, const BracketPair& b,
                                    const VerifyOptions& opts = {});

}  // namespace fde
