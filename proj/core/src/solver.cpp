#include "fde/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "fde/csv.hpp"
#include "fde/error.hpp"

namespace fde {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_eval_failure(const Error& e) {
  return e.kind() == ErrorKind::domain_error || e.kind() == ErrorKind::out_of_domain ||
         e.kind() == ErrorKind::non_finite;
}

[[noreturn]] void rethrow_at(const Error& e, double s) {
  std::ostringstream msg;
  msg << e.what() << " (at s = " << format_real(s) << ")";
  if (e.kind() == ErrorKind::domain_error) throw DomainError(msg.str());
  throw Error(e.kind(), msg.str());
}

void bracket_margins(const BracketPair& b, const GridFun& x, SolveReport& rep) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = lo;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lo = std::min(lo, x[i] - b.alpha[i]);
    hi = std::min(hi, b.beta[i] - x[i]);
  }
  rep.lower_bracket_margin = lo;
  rep.upper_bracket_margin = hi;
}

void require_bracket_grid(const BracketPair& b, const SolveOptions& opts) {
  if (opts.grid && !(*opts.grid == b.grid()))
    throw Error(ErrorKind::invalid_argument, "options grid differs from the bracket grid");
}

GridFun starting_iterate(const BracketPair& b, const SolveOptions& opts) {
  if (opts.initial) {
    if (!opts.initial->same_grid(b.alpha))
      throw Error(ErrorKind::invalid_argument, "initial iterate lives on a different grid");
    return *opts.initial;
  }
  switch (opts.start) {
    case StartIterate::alpha: return b.alpha;
    case StartIterate::beta: return b.beta;
    case StartIterate::average: break;
  }
  std::vector<double> vals(b.alpha.size());
  for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = 0.5 * (b.alpha[i] + b.beta[i]);
  return GridFun(b.alpha.grid_ptr(), std::move(vals));
}

// Piecewise cubic Hermite history for the method of steps: c + k(s) on I_-,
// Hermite interpolation of completed forward nodes beyond t0.
class StepsHistory {
 public:
  StepsHistory(const ProblemSpec& p, const TimeGrid& grid, double c)
      : p_(p), grid_(grid), c_(c) {}

  void push(double x, double dx) {
    x_.push_back(x);
    d_.push_back(dx);
  }

  double operator()(double s) const {
    const double snap = grid_.snap_tolerance();
    const std::size_t i0 = grid_.t0_index();
    if (s <= grid_.t0()) return c_ + p_.history_k(std::max(s, grid_.lo()));
    const std::size_t done = i0 + x_.size() - 1;  // index of last completed node
    if (s > grid_[done] + snap)
      throw Error(ErrorKind::not_retarded,
                  "deviated time " + format_real(s) + " is ahead of the computed solution");
    if (done == i0) return x_[0];
    s = std::min(s, grid_[done]);
    std::size_t j = std::min(grid_.cell_of(s), done - 1);
    const std::size_t a = j - i0;
    const double h = grid_[j + 1] - grid_[j];
    const double u = (s - grid_[j]) / h;
    const double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
    const double h10 = u * (1 - u) * (1 - u);
    const double h01 = u * u * (3 - 2 * u);
    const double h11 = u * u * (u - 1);
    return h00 * x_[a] + h10 * h * d_[a] + h01 * x_[a + 1] + h11 * h * d_[a + 1];
  }

 private:
  const ProblemSpec& p_;
  const TimeGrid& grid_;
  double c_;
  std::vector<double> x_;
  std::vector<double> d_;
};

double retardation_gap(const ProblemSpec& p) {
  const DeviationSpec& d = p.deviation;
  if (d.state_dependent())
    throw Error(ErrorKind::not_retarded, "not strictly retarded: deviation depends on the state");
  if (d.kind() == DeviationKind::pure_delay) return d.delay();
  double gap = std::numeric_limits<double>::infinity();
  constexpr int kSamples = 1000;
  for (int i = 0; i <= kSamples; ++i) {
    double t = p.t0 + p.L * i / kSamples;
    gap = std::min(gap, t - d.at(t));
  }
  return gap;
}

GridFun steps_pass(const ProblemSpec& p, const GridPtr& grid, double c, std::size_t substeps) {
  const TimeGrid& g = *grid;
  const std::size_t i0 = g.t0_index();
  std::vector<double> vals(g.size());
  for (std::size_t i = 0; i <= i0; ++i) vals[i] = c + p.history_k(g[i]);

  StepsHistory hist(p, g, c);
  // one-sided retry on a singular node, as in scalar_step
  auto node_derivative = [&](double t, double x, double nudge) {
    try {
      return p.rhs(t, x, hist(p.deviation.at(t)));
    } catch (const DomainError&) {
      return p.rhs(t + nudge, x, hist(p.deviation.at(t + nudge)));
    }
  };

  const double h0 = g.forward_cells() ? g[i0 + 1] - g[i0] : 1.0;
  hist.push(vals[i0], node_derivative(g[i0], vals[i0], 1e-9 * h0));
  for (std::size_t i = i0; i < g.cells(); ++i) {
    auto frozen = [&](double t, double x) { return p.rhs(t, x, hist(p.deviation.at(t))); };
    try {
      vals[i + 1] = scalar_step(frozen, g[i], g[i + 1], vals[i], substeps);
      hist.push(vals[i + 1], node_derivative(g[i + 1], vals[i + 1], -1e-9 * (g[i + 1] - g[i])));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::not_retarded) throw;
      rethrow_at(e, g[i]);
    }
  }
  return GridFun(grid, std::move(vals));
}

}  // namespace

const char* to_string(Method m) noexcept {
  switch (m) {
    case Method::picard: return "picard";
    case Method::steps: return "steps";
    case Method::monotone_from_lower: return "monotone_from_lower";
    case Method::monotone_from_upper: return "monotone_from_upper";
  }
  return "picard";
}

Method parse_method(const std::string& name) {
  for (Method m : {Method::picard, Method::steps, Method::monotone_from_lower,
                   Method::monotone_from_upper})
    if (name == to_string(m)) return m;
  throw Error(ErrorKind::invalid_argument, "unknown method " + name);
}

void SolveOptions::validate() const {
  if (!(fp_tol > 0.0)) throw Error(ErrorKind::invalid_argument, "fp_tol must be positive");
  if (max_iter < 1) throw Error(ErrorKind::invalid_argument, "max_iter must be at least 1");
  if (!(damping > 0.0 && damping <= 1.0))
    throw Error(ErrorKind::invalid_argument, "damping must lie in (0, 1]");
  if (substeps < 1) throw Error(ErrorKind::invalid_argument, "substeps must be at least 1");
}

double scalar_step(const std::function<double(double, double)>& f_frozen, double t_a,
                   double t_b, double x_a, std::size_t substeps) {
  if (!(t_b > t_a)) throw Error(ErrorKind::invalid_argument, "scalar_step: need t_a < t_b");
  if (substeps < 1) throw Error(ErrorKind::invalid_argument, "scalar_step: substeps >= 1");
  const double h = (t_b - t_a) / static_cast<double>(substeps);
  auto eval = [&](double t, double x) {
    double v;
    try {
      v = f_frozen(t, x);
    } catch (const DomainError&) {
      if (t == t_a) v = f_frozen(t_a + 1e-9 * h, x);
      else if (t == t_b) v = f_frozen(t_b - 1e-9 * h, x);
      else throw;
    }
    if (!std::isfinite(v))
      throw Error(ErrorKind::non_finite, "non-finite derivative at t = " + format_real(t));
    return v;
  };
  double x = x_a;
  for (std::size_t i = 0; i < substeps; ++i) {
    const double t = i == 0 ? t_a : t_a + h * static_cast<double>(i);
    const double tn = i + 1 == substeps ? t_b : t_a + h * static_cast<double>(i + 1);
    const double hh = tn - t;
    const double k1 = eval(t, x);
    const double k2 = eval(t + hh / 2, x + hh / 2 * k1);
    const double k3 = eval(t + hh / 2, x + hh / 2 * k2);
    const double k4 = eval(tn, x + hh * k3);
    x += hh / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    if (!std::isfinite(x))
      throw Error(ErrorKind::non_finite, "non-finite state at t = " + format_real(tn));
  }
  return x;
}

GridFun apply_T(const ProblemSpec& p, const BracketPair& b, const GridFun& gamma) {
  if (!gamma.same_grid(b.alpha))
    throw Error(ErrorKind::invalid_argument, "apply_T: gamma and bracket grids differ");
  const TimeGrid& g = gamma.grid();
  const std::size_t i0 = g.t0_index();
  const double lam = p.boundary(truncate(gamma, b));

  std::vector<double> out(g.size());
  for (std::size_t i = 0; i <= i0; ++i) out[i] = lam + p.history_k(g[i]);
  for (std::size_t i = i0; i < g.cells(); ++i) {
    const double s = 0.5 * (g[i] + g[i + 1]);
    double fs;
    try {
      const double x = truncate(s, 0.5 * (gamma[i] + gamma[i + 1]), b);
      const double tau = p.deviation(s, gamma);
      const double y = truncate(tau, gamma.eval(tau), b);
      fs = p.rhs(s, x, y);
      if (!std::isfinite(fs)) throw DomainError("non-finite right-hand side");
    } catch (const Error& e) {
      if (!is_eval_failure(e)) throw;
      rethrow_at(e, s);
    }
    out[i + 1] = out[i] + (g[i + 1] - g[i]) * fs;
  }
  return GridFun(gamma.grid_ptr(), std::move(out));
}

SolveReport picard_solve(const ProblemSpec& p, const BracketPair& b, const SolveOptions& opts) {
  opts.validate();
  require_bracket_grid(b, opts);
  GridFun gamma = starting_iterate(b, opts);
  {
    const TimeGrid& g = gamma.grid();
    std::vector<double> vals(gamma.values().begin(), gamma.values().end());
    const double lam = p.boundary(truncate(gamma, b));
    for (std::size_t i = 0; i <= g.t0_index(); ++i) vals[i] = lam + p.history_k(g[i]);
    gamma = GridFun(gamma.grid_ptr(), std::move(vals));
  }

  SolveReport rep{gamma};
  if (opts.keep_trace) rep.iterate_trace.push_back(gamma);
  const double d = opts.damping;
  for (std::size_t n = 1; n <= opts.max_iter; ++n) {
    GridFun tg = apply_T(p, b, gamma);
    std::vector<double> next(tg.size());
    for (std::size_t i = 0; i < next.size(); ++i) next[i] = (1.0 - d) * gamma[i] + d * tg[i];
    GridFun nxt(gamma.grid_ptr(), std::move(next));
    rep.sup_step = sup_distance(nxt, gamma);
    rep.iterations = n;
    gamma = std::move(nxt);
    if (opts.keep_trace) rep.iterate_trace.push_back(gamma);
    if (rep.sup_step <= opts.fp_tol) {
      rep.converged = true;
      break;
    }
  }
  rep.solution = gamma;
  rep.message = rep.converged ? "converged" : "iteration limit reached";
  rep.residual = residual(p, gamma);
  bracket_margins(b, gamma, rep);
  try {
    rep.fixed_point_defect = sup_distance(apply_T(p, b, gamma), gamma);
  } catch (const Error& e) {
    if (!is_eval_failure(e)) throw;
    rep.fixed_point_defect = kNaN;
  }
  return rep;
}

SolveReport steps_solve(const ProblemSpec& p, const SolveOptions& opts) {
  opts.validate();
  const GridPtr grid = opts.grid ? opts.grid : p.grid(1000);
  const double gap = retardation_gap(p);
  if (!(gap > 0.0))
    throw Error(ErrorKind::not_retarded, "not strictly retarded: tau(t) >= t somewhere");
  double widest = 0.0;
  for (std::size_t i = grid->t0_index(); i < grid->cells(); ++i)
    widest = std::max(widest, (*grid)[i + 1] - (*grid)[i]);
  if (gap < widest - grid->snap_tolerance())
    throw Error(ErrorKind::not_retarded,
                "delay " + format_real(gap) + " is shorter than a grid cell; refine the grid");

  if (p.boundary.kind == FunctionalKind::constant) {
    SolveReport rep{steps_pass(p, grid, p.boundary.c, opts.substeps)};
    rep.converged = true;
    rep.iterations = 1;
    rep.message = "converged";
    rep.residual = residual(p, rep.solution);
    rep.lower_bracket_margin = rep.upper_bracket_margin = kNaN;
    rep.fixed_point_defect = kNaN;
    return rep;
  }

  // Lambda depends on the solution: iterate on its value c.
  double c = 0.0;
  SolveReport rep{steps_pass(p, grid, c, opts.substeps)};
  for (std::size_t n = 1; n <= opts.max_iter; ++n) {
    const double c_next = p.boundary(rep.solution);
    rep.iterations = n;
    rep.sup_step = std::abs(c_next - c);
    if (rep.sup_step <= opts.fp_tol) {
      rep.converged = true;
      break;
    }
    c = c_next;
    rep.solution = steps_pass(p, grid, c, opts.substeps);
    if (opts.keep_trace) rep.iterate_trace.push_back(rep.solution);
  }
  rep.message = rep.converged ? "converged" : "iteration limit reached on Lambda";
  rep.residual = residual(p, rep.solution);
  rep.lower_bracket_margin = rep.upper_bracket_margin = kNaN;
  rep.fixed_point_defect = kNaN;
  return rep;
}

SolveReport monotone_solve(const ProblemSpec& p, const BracketPair& b, const SolveOptions& opts) {
  opts.validate();
  require_bracket_grid(b, opts);
  if (p.rhs.monotone_in_y != Monotonicity::nondecreasing)
    throw Error(ErrorKind::precondition,
                "monotone iteration needs f flagged nondecreasing in the deviated state");
  if (p.boundary.kind == FunctionalKind::native && !p.boundary.monotone)
    throw Error(ErrorKind::precondition, "monotone iteration needs a nondecreasing Lambda");
  if (p.deviation.state_dependent())
    throw Error(ErrorKind::precondition, "monotone iteration needs a state-independent tau");

  // spot-check the monotonicity claim on the bracket region
  {
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t s = 0; s < opts.monotone_samples; ++s) {
      const double t = p.t0 + p.L * (1.0 - unit(rng));  // (t0, t0 + L]
      const double x = b.alpha.eval(t) + unit(rng) * (b.beta.eval(t) - b.alpha.eval(t));
      auto [e_lo, e_hi] = value_envelope_E(b, p.deviation, t);
      double y1 = e_lo + unit(rng) * (e_hi - e_lo);
      double y2 = e_lo + unit(rng) * (e_hi - e_lo);
      if (y1 > y2) std::swap(y1, y2);
      double f1, f2;
      try {
        f1 = p.rhs(t, x, y1);
        f2 = p.rhs(t, x, y2);
      } catch (const DomainError&) {
        continue;
      }
      if (f1 > f2 + 1e-12) {
        std::ostringstream msg;
        msg << "monotonicity spot-check failed: f(" << t << ", " << x << ", " << y1 << ") = " << f1
            << " > f(..., " << y2 << ") = " << f2;
        throw Error(ErrorKind::precondition, msg.str());
      }
    }
  }

  const bool from_lower = opts.method != Method::monotone_from_upper;
  const GridPtr& grid = b.alpha.grid_ptr();
  const TimeGrid& g = *grid;
  const std::size_t i0 = g.t0_index();
  GridFun x = from_lower ? b.alpha : b.beta;
  SolveReport rep{x};
  rep.iterate_trace.push_back(x);
  for (std::size_t n = 1; n <= opts.max_iter; ++n) {
    const double lam = p.boundary(x);
    std::vector<double> vals(g.size());
    for (std::size_t i = 0; i <= i0; ++i) vals[i] = lam + p.history_k(g[i]);
    auto frozen = [&](double t, double v) { return p.rhs(t, v, x.eval(p.deviation.at(t))); };
    for (std::size_t i = i0; i < g.cells(); ++i) {
      try {
        vals[i + 1] = scalar_step(frozen, g[i], g[i + 1], vals[i], opts.substeps);
      } catch (const Error& e) {
        if (!is_eval_failure(e)) throw;
        rethrow_at(e, g[i]);
      }
    }
    GridFun next(grid, std::move(vals));
    rep.sup_step = sup_distance(next, x);
    rep.iterations = n;
    x = std::move(next);
    rep.iterate_trace.push_back(x);
    if (rep.sup_step <= opts.fp_tol) {
      rep.converged = true;
      break;
    }
  }
  rep.solution = x;
  rep.message = rep.converged ? "converged" : "iteration limit reached";
  rep.residual = residual(p, x);
  bracket_margins(b, x, rep);
  rep.fixed_point_defect = kNaN;
  return rep;
}

SolveReport solve(const ProblemSpec& p, const std::optional<BracketPair>& b,
                  const SolveOptions& opts) {
  if (opts.method == Method::steps) return steps_solve(p, opts);
  if (!b) throw Error(ErrorKind::precondition, std::string(to_string(opts.method)) +
                                                   " needs a lower/upper pair");
  if (opts.method == Method::picard) return picard_solve(p, *b, opts);
  return monotone_solve(p, *b, opts);
}

ResidualReport residual(const ProblemSpec& p, const GridFun& x) {
  const TimeGrid& g = x.grid();
  ResidualReport rep;
  auto note = [&](double t, const Error& e) {
    ++rep.failed_nodes;
    if (!rep.error_t) {
      rep.error_t = t;
      rep.error = e.what();
    }
  };
  for (std::size_t i = g.t0_index(); i < g.cells(); ++i) {
    const double tm = 0.5 * (g[i] + g[i + 1]);
    try {
      const double xm = 0.5 * (x[i] + x[i + 1]);
      const double y = x.eval(p.deviation(tm, x));
      const double d = std::abs(x.slope(i) - p.rhs(tm, xm, y));
      if (!std::isfinite(d)) throw DomainError("non-finite residual");
      rep.ode_resid_sup = std::max(rep.ode_resid_sup, d);
    } catch (const Error& e) {
      if (!is_eval_failure(e)) throw;
      note(tm, e);
    }
  }
  try {
    const double lam = p.boundary(x);
    for (std::size_t i = 0; i <= g.t0_index(); ++i)
      rep.boundary_resid_sup =
          std::max(rep.boundary_resid_sup, std::abs(x[i] - lam - p.history_k(g[i])));
  } catch (const Error& e) {
    if (!is_eval_failure(e)) throw;
    note(g.t0(), e);
  }
  return rep;
}

std::size_t write_trace(const std::filesystem::path& dir, const std::string& prefix,
                        const std::vector<GridFun>& trace) {
  std::filesystem::create_directories(dir);
  for (std::size_t n = 0; n < trace.size(); ++n) {
    char name[64];
    std::snprintf(name, sizeof name, "_%04zu.csv", n);
    std::ofstream os(dir / (prefix + name), std::ios::binary);
    if (!os) throw Error(ErrorKind::invalid_argument, "cannot write trace in " + dir.string());
    write_csv(os, trace[n]);
  }
  return trace.size();
}

}  // namespace fde
