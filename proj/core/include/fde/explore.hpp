#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fde/bracket.hpp"
#include "fde/solver.hpp"

namespace fde {

enum class Order { leq, geq, equal, incomparable };

const char* to_string(Order o) noexcept;

/// Integral of x over [t0, t0 + L].
double functional_I(const GridFun& x, double t0, double L);

/// Pointwise order up to tol: equal if sup|x1 - x2| <= tol.
Order compare(const GridFun& x1, const GridFun& x2, double tol);

struct ExploreOptions {
  SolveOptions solve;
  /// Solutions with a larger ode or boundary residual are discarded.
  double residual_threshold = 1e-5;
  /// Deduplication tolerance; 0 selects 10 * fp_tol.
  double dedup_tol = 0.0;
  std::size_t threads = 1;
};

/// What happened to one seed.
struct SeedOutcome {
  std::size_t seed = 0;
  bool converged = false;
  std::size_t iterations = 0;
  double sup_step = 0.0;
  double ode_resid_sup = 0.0;
  double boundary_resid_sup = 0.0;
  double i_value = 0.0;
  bool accepted = false;
  /// Index into ExploreReport::solutions when accepted.
  std::optional<std::size_t> solution;
  std::string error;
};

struct ExploreReport {
  std::vector<SolveReport> solutions;  // deduplicated, ascending in I
  std::vector<std::size_t> first_seed; // seed that produced each solution
  std::vector<double> i_values;
  std::vector<std::vector<Order>> comparability;
  std::size_t argmax_i = 0;
  std::size_t argmin_i = 0;
  bool has_incomparable_pair = false;
  std::vector<SeedOutcome> seeds;

  /// Indices of solutions no other computed solution lies strictly above
  /// (maximal among computed solutions).
  std::vector<std::size_t> maximal() const;
  std::vector<std::size_t> minimal() const;

  /// One row per seed.
  void write_csv(std::ostream& os) const;
  /// Comparability matrix with solution indices as headers.
  void write_matrix(std::ostream& os) const;
};

/// alpha + s (beta - alpha) for s = 0, 1/(count-1), ..., 1.
std::vector<GridFun> default_seeds(const BracketPair& b, std::size_t count);

/// Indices of the first representative of each equivalence class under
/// compare(., ., tol) == equal, in input order.
std::vector<std::size_t> deduplicate(const std::vector<GridFun>& xs, double tol);

/// Runs picard_solve from every seed (truncated into the bracket), keeps the
/// converged solutions with small residuals, deduplicates them and records
/// their order structure.
ExploreReport extremal_search(const ProblemSpec& p, const BracketPair& b,
                              const std::vector<GridFun>& seeds, const ExploreOptions& opts);

}  // namespace fde
