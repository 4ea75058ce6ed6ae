#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>

#include "fde/bracket.hpp"
#include "fde/error.hpp"
#include "fde/problem.hpp"

namespace fde {

using ScalarFn = std::function<double(double)>;

struct SearchDomain {
  double lo = -1e6;
  double hi = 1e6;
};

enum class ConstructionMode { p31, p32 };

const char* to_string(ConstructionMode m) noexcept;

struct ConstructOptions {
  SearchDomain domain;
  /// Samples per search region (below, between and above the history range).
  std::size_t grid = 2000;
  double tol = 1e-9;
  std::size_t history_samples = 2000;
  /// Random points for the envelope domination check of the general case.
  std::size_t domination_samples = 1000;
  VerifyOptions verify{64, 40, 1e-9, true};
};

/// Thresholds and slopes of a linear lower/upper pair. Upper-side values are
/// obtained by mirroring: the search runs on -F(-z) with -phi^* and is mapped
/// back.
struct ConstructionTrace {
  ConstructionMode mode = ConstructionMode::p31;
  double phi_star = 0.0;
  double phi_upper = 0.0;
  double L = 1.0;
  double y1 = 0.0, y2 = 0.0, lambda_min = 0.0, y3 = 0.0;
  double y1_bar = 0.0, y2_bar = 0.0, lambda_max = 0.0, y3_bar = 0.0;
  double m = 0.0;
  double m_bar = 0.0;
  /// (phi^* - y3_bar) / L, the value of the source's formula; not used.
  double m_bar_paper = 0.0;
  SearchDomain search_domain;
  std::size_t grid = 0;

  /// `key=value` lines.
  std::string serialize() const;
};

/// Thrown when a constructed pair fails its post-validation.
class ConstructionUnsound : public Error {
 public:
  ConstructionUnsound(const std::string& what, VerificationReport report,
                      ConstructionTrace trace)
      : Error(ErrorKind::construction_unsound, what),
        report_(std::move(report)),
        trace_(std::move(trace)) {}

  const VerificationReport& report() const noexcept { return report_; }
  const ConstructionTrace& trace() const noexcept { return trace_; }

 private:
  VerificationReport report_;
  ConstructionTrace trace_;
};

struct Construction {
  BracketPair bracket;
  ConstructionTrace trace;
  VerificationReport report;
};

/// (min, max) of k over [t0 - r, t0]: uniform sample refined by golden
/// section around the best sample.
std::pair<double, double> history_extrema(const ScalarFn& k, double t0, double r,
                                          std::size_t samples = 2000);

/// Threshold search for the one-variable case. Throws hypotheses_violated
/// when a growth condition fails and domain_exhausted when a threshold runs
/// into the end of the search domain while the conditions look satisfied.
ConstructionTrace find_thresholds(const ScalarFn& F, double phi_star, double phi_upper,
                                  double L, SearchDomain domain, std::size_t grid,
                                  double tol = 1e-9);

/// Threshold search with separate envelopes: F_alpha must be bounded below
/// on [0, +inf) and F_beta bounded above on (-inf, 0].
ConstructionTrace find_thresholds(const EnvelopePair& env, double phi_star, double phi_upper,
                                  double L, SearchDomain domain, std::size_t grid,
                                  double tol = 1e-9);

/// Linear pair for x' = F(x(tau)), x = k on [t0 - r, t0]. Validated against
/// the envelope inequalities with the whole interval as deviation envelope.
Construction construct_p31(const ScalarFn& F, const ScalarFn& k, double t0, double r,
                           double L, const GridPtr& grid, const ConstructOptions& opts = {});

/// Same for a problem whose f depends only on the deviated state.
Construction construct_p31(const ProblemSpec& p, const GridPtr& grid,
                           const ConstructOptions& opts = {});

/// Linear pair from the envelopes F_alpha <= f (x <= phi_*), f <= F_beta
/// (x >= phi^*), validated against p itself.
Construction construct_p32(const ProblemSpec& p, const GridPtr& grid,
                           const ConstructOptions& opts = {});

/// Bracket attached to a problem: sampled explicit hint, or a constructed
/// pair for `auto`.
BracketPair default_bracket(const ProblemSpec& p, const GridPtr& grid,
                            const ConstructOptions& opts = {});

}  // namespace fde
