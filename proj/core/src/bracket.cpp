#include "fde/bracket.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "fde/csv.hpp"
#include "fde/error.hpp"
#include "fde/search.hpp"

namespace fde {

LambdaBounds lambda_bounds(const FunctionalSpec& lam, const GridFun& alpha,
                           const GridFun& beta, std::size_t samples, std::uint64_t seed) {
  if (lam.kind != FunctionalKind::native || lam.monotone) {
    double lo = lam(alpha);
    double hi = lam(beta);
    if (lo > hi) std::swap(lo, hi);
    return {lo, hi, lam.kind != FunctionalKind::native};
  }
  if (samples == 0)
    throw Error(ErrorKind::invalid_argument, "lambda_bounds: need at least one sample");
  LambdaBounds out{std::numeric_limits<double>::infinity(),
                   -std::numeric_limits<double>::infinity(), false};
  auto record = [&](double v) {
    out.inf = std::min(out.inf, v);
    out.sup = std::max(out.sup, v);
  };
  record(lam(alpha));
  record(lam(beta));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> vals(alpha.size());
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t i = 0; i < vals.size(); ++i)
      vals[i] = alpha[i] + unit(rng) * (beta[i] - alpha[i]);
    record(lam(GridFun(alpha.grid_ptr(), vals)));
  }
  return out;
}

BracketPair make_bracket(GridFun alpha, GridFun beta, const FunctionalSpec& lam,
                         std::size_t samples) {
  if (!alpha.same_grid(beta))
    throw Error(ErrorKind::invalid_argument, "alpha and beta live on different grids");
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] > beta[i]) {
      std::ostringstream msg;
      msg << "alpha > beta at t = " << alpha.grid()[i] << " (" << alpha[i] << " > " << beta[i]
          << ")";
      throw Error(ErrorKind::invalid_argument, msg.str());
    }
  }
  LambdaBounds lb = lambda_bounds(lam, alpha, beta, samples);
  return BracketPair{std::move(alpha), std::move(beta), lb.inf, lb.sup, lb.exact};
}

BracketPair make_bracket(const GridPtr& grid, const std::function<double(double)>& alpha,
                         const std::function<double(double)>& beta,
                         const FunctionalSpec& lam) {
  return make_bracket(GridFun::sample(grid, alpha), GridFun::sample(grid, beta), lam);
}

double truncate(double t, double v, const BracketPair& b) {
  const double lo = b.alpha.eval(t);
  const double hi = b.beta.eval(t);
  if (v < lo) return lo;
  if (v > hi) return hi;
  return v;
}

GridFun truncate(const GridFun& g, const BracketPair& b) {
  if (!g.same_grid(b.alpha))
    throw Error(ErrorKind::invalid_argument, "truncate: grid mismatch");
  std::vector<double> vals(g.size());
  for (std::size_t i = 0; i < vals.size(); ++i)
    vals[i] = std::clamp(g[i], b.alpha[i], b.beta[i]);
  return GridFun(g.grid_ptr(), std::move(vals));
}

std::pair<double, double> deviation_envelope(const DeviationSpec& d, double t) {
  const double lo = d.domain_lo();
  const double hi = d.domain_hi();
  if (d.has_declared_bounds()) {
    auto [blo, bhi] = d.declared_bounds()(t);
    const double snap = 1e-9 * std::max(1.0, std::abs(lo) + std::abs(hi));
    if (!(blo >= lo - snap) || !(bhi <= hi + snap)) {
      std::ostringstream msg;
      msg << "declared deviation bounds [" << blo << ", " << bhi << "] escape I at t = " << t;
      throw Error(ErrorKind::out_of_domain, msg.str());
    }
    if (blo > bhi) {
      std::ostringstream msg;
      msg << "tau_lo > tau_hi at t = " << t;
      throw Error(ErrorKind::invalid_argument, msg.str());
    }
    return {std::clamp(blo, lo, hi), std::clamp(bhi, lo, hi)};
  }
  if (!d.state_dependent()) {
    double v = d.at(t);
    return {v, v};
  }
  return {lo, hi};
}

namespace {

std::pair<double, double> envelope_between(const BracketPair& b, double lo, double hi) {
  return {extremum_on(b.alpha, lo, hi, Extremum::min), extremum_on(b.beta, lo, hi, Extremum::max)};
}

void check_compatible(const ProblemSpec& p, const BracketPair& b) {
  const TimeGrid& g = b.grid();
  const double snap = g.snap_tolerance();
  if (std::abs(g.lo() - p.lo()) > snap || std::abs(g.hi() - p.hi()) > snap ||
      std::abs(g.t0() - p.t0) > snap)
    throw Error(ErrorKind::invalid_argument, "bracket grid does not cover the problem interval");
  if (!b.alpha.same_grid(b.beta))
    throw Error(ErrorKind::invalid_argument, "alpha and beta live on different grids");
  for (std::size_t i = 0; i < b.alpha.size(); ++i)
    if (b.alpha[i] > b.beta[i])
      throw Error(ErrorKind::invalid_argument,
                  "alpha > beta at t = " + format_real(g[i]));
}

void finish(VerificationReport& rep) {
  const double inf = std::numeric_limits<double>::infinity();
  double wl = inf, wu = inf, wld = inf, wud = inf, wb = inf;
  for (const auto& m : rep.node_margins) {
    wld = std::min(wld, m.lower);
    wud = std::min(wud, m.upper);
  }
  for (const auto& m : rep.boundary_margins) wb = std::min({wb, m.lower, m.upper});
  wl = wld;
  wu = wud;
  for (const auto& m : rep.boundary_margins) {
    wl = std::min(wl, m.lower);
    wu = std::min(wu, m.upper);
  }
  rep.worst_lower = wl;
  rep.worst_upper = wu;
  rep.worst_lower_differential = wld;
  rep.worst_upper_differential = wud;
  rep.worst_boundary = wb;
  const double worst = std::min(wl, wu);
  rep.marginal = worst < 0.0 && worst >= -rep.tol;
  if (worst < -rep.tol) {
    rep.verdict = Verdict::fail;
  } else if (rep.error_t) {
    rep.verdict = Verdict::indeterminate;
  } else {
    rep.verdict = Verdict::pass;
  }
  rep.pass = rep.verdict == Verdict::pass;
}

template <class NodeCheck>
void differential_pass(const BracketPair& b, VerificationReport& rep,
                       NodeCheck&& check) {
  const TimeGrid& g = b.grid();
  for (std::size_t i = g.t0_index(); i < g.cells(); ++i) {
    const double tm = 0.5 * (g[i] + g[i + 1]);
    try {
      rep.node_margins.push_back(check(i, tm));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::domain_error && e.kind() != ErrorKind::out_of_domain) throw;
      if (!rep.error_t) {
        rep.error_t = tm;
        rep.error = e.what();
      }
    }
  }
}

void boundary_pass(const ProblemSpec& p, const BracketPair& b, double lam_lo, double lam_hi,
                   VerificationReport& rep) {
  const TimeGrid& g = b.grid();
  for (std::size_t i = 0; i <= g.t0_index(); ++i) {
    const double t = g[i];
    const double k = p.history_k(t);
    rep.boundary_margins.push_back({t, lam_lo + k - b.alpha[i], b.beta[i] - (lam_hi + k)});
  }
}

}  // namespace

std::pair<double, double> value_envelope_E(const BracketPair& b, const DeviationSpec& d,
                                           double t) {
  auto [lo, hi] = deviation_envelope(d, t);
  return envelope_between(b, lo, hi);
}

const char* to_string(Definition d) noexcept {
  return d == Definition::envelope ? "new" : "classical";
}

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

VerificationReport verify_definition21(const ProblemSpec& p, const BracketPair& b,
                                       const VerifyOptions& opts) {
  check_compatible(p, b);
  VerificationReport rep;
  rep.definition = Definition::envelope;
  rep.tol = opts.tol;
  rep.empirical = !b.lambda_bounds_exact;

  differential_pass(b, rep, [&](std::size_t i, double tm) {
    auto [lo, hi] = opts.conservative_envelope ? std::pair{p.lo(), p.hi()}
                                               : deviation_envelope(p.deviation, tm);
    auto [e_min, e_max] = envelope_between(b, lo, hi);
    const double a = 0.5 * (b.alpha[i] + b.alpha[i + 1]);
    const double bt = 0.5 * (b.beta[i] + b.beta[i + 1]);
    auto f_lo = [&](double xi) { return p.rhs(tm, a, xi); };
    auto f_hi = [&](double xi) { return p.rhs(tm, bt, xi); };
    double min_f = scan_refine(f_lo, e_min, e_max, opts.quad_nodes, opts.golden_iters,
                               Extremum::min).value;
    double max_f = scan_refine(f_hi, e_min, e_max, opts.quad_nodes, opts.golden_iters,
                               Extremum::max).value;
    return MarginRecord{tm, min_f - b.alpha.slope(i), b.beta.slope(i) - max_f};
  });
  boundary_pass(p, b, b.lambda_inf, b.lambda_sup, rep);
  finish(rep);
  return rep;
}

VerificationReport verify_classical(const ProblemSpec& p, const BracketPair& b,
                                    const VerifyOptions& opts) {
  check_compatible(p, b);
  VerificationReport rep;
  rep.definition = Definition::classical;
  rep.tol = opts.tol;

  differential_pass(b, rep, [&](std::size_t i, double tm) {
    const double a = 0.5 * (b.alpha[i] + b.alpha[i + 1]);
    const double bt = 0.5 * (b.beta[i] + b.beta[i + 1]);
    const double fa = p.rhs(tm, a, b.alpha.eval(p.deviation(tm, b.alpha)));
    const double fb = p.rhs(tm, bt, b.beta.eval(p.deviation(tm, b.beta)));
    return MarginRecord{tm, fa - b.alpha.slope(i), b.beta.slope(i) - fb};
  });
  boundary_pass(p, b, p.boundary(b.alpha), p.boundary(b.beta), rep);
  finish(rep);
  return rep;
}

std::string VerificationReport::summary() const {
  std::ostringstream os;
  os << "definition=" << to_string(definition) << " verdict=" << to_string(verdict)
     << " worst_lower=" << format_real(worst_lower) << " worst_upper=" << format_real(worst_upper)
     << " worst_lower_differential=" << format_real(worst_lower_differential)
     << " worst_upper_differential=" << format_real(worst_upper_differential)
     << " worst_boundary=" << format_real(worst_boundary) << " tol=" << format_real(tol);
  if (marginal) os << " marginal";
  if (empirical) os << " empirical";
  if (error_t) os << " error_t=" << format_real(*error_t) << " error=\"" << error << "\"";
  return os.str();
}

void VerificationReport::write_csv(std::ostream& os) const {
  os << "t,kind,margin\n";
  for (const auto& m : boundary_margins) {
    os << format_real(m.t) << ",lower_boundary," << format_real(m.lower) << '\n';
    os << format_real(m.t) << ",upper_boundary," << format_real(m.upper) << '\n';
  }
  for (const auto& m : node_margins) {
    os << format_real(m.t) << ",lower_differential," << format_real(m.lower) << '\n';
    os << format_real(m.t) << ",upper_differential," << format_real(m.upper) << '\n';
  }
  os << "# " << summary() << '\n';
}

}  // namespace fde
