#include "fde/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "fde/csv.hpp"
#include "fde/error.hpp"

namespace fde {

const char* to_string(Monotonicity m) noexcept {
  switch (m) {
    case Monotonicity::nondecreasing: return "nondecreasing";
    case Monotonicity::nonincreasing: return "nonincreasing";
    case Monotonicity::unknown: return "unknown";
  }
  return "unknown";
}

bool RhsSpec::depends_only_on_y() const {
  return expr && !expr->uses(Var::t) && !expr->uses(Var::x);
}

RhsSpec RhsSpec::from_expr(const Expr& e, Monotonicity m) {
  RhsSpec rhs;
  rhs.f = [e](double t, double x, double y) { return e.eval(t, x, y); };
  rhs.monotone_in_y = m;
  rhs.expr = e;
  return rhs;
}

DeviationSpec DeviationSpec::pure_delay(double delay) {
  DeviationSpec d;
  d.kind_ = DeviationKind::pure_delay;
  d.delay_ = delay;
  d.fixed_ = [delay](double t) { return t - delay; };
  d.description_ = "delay:" + format_real(delay);
  return d;
}

DeviationSpec DeviationSpec::reflection() {
  DeviationSpec d;
  d.kind_ = DeviationKind::reflection;
  d.fixed_ = [](double t) { return -t; };
  d.description_ = "reflection";
  return d;
}

DeviationSpec DeviationSpec::from_expr(const Expr& tau_of_t) {
  if (tau_of_t.uses(Var::x) || tau_of_t.uses(Var::y))
    throw Error(ErrorKind::config_error,
                "tau expression may only use t; use weighted_eval:<expr> for state dependence");
  DeviationSpec d;
  d.kind_ = DeviationKind::expr;
  d.fixed_ = [tau_of_t](double t) { return tau_of_t.eval(Vars{t, {}, {}}); };
  d.description_ = tau_of_t.to_string();
  return d;
}

DeviationSpec DeviationSpec::weighted_eval(const Expr& e) {
  if (e.uses(Var::y))
    throw Error(ErrorKind::config_error, "weighted_eval expression uses t and x only");
  DeviationSpec d;
  d.kind_ = DeviationKind::weighted_eval;
  d.description_ = "weighted_eval:" + e.to_string();
  d.weighted_ = e;
  d.rebuild_weighted();
  return d;
}

void DeviationSpec::rebuild_weighted() {
  if (!weighted_) return;
  const Expr e = *weighted_;
  const double lo = lo_, hi = hi_;
  dependent_ = [e, lo, hi](double t, const GridFun& gamma) {
    double v = e.eval(Vars{t, gamma.eval(t), {}});
    return std::clamp(v, lo, hi);
  };
}

DeviationSpec DeviationSpec::native_fixed(Fixed tau, std::string description) {
  DeviationSpec d;
  d.kind_ = DeviationKind::native;
  d.fixed_ = std::move(tau);
  d.description_ = std::move(description);
  return d;
}

DeviationSpec DeviationSpec::native_dependent(Dependent tau, std::string description) {
  DeviationSpec d;
  d.kind_ = DeviationKind::native;
  d.dependent_ = std::move(tau);
  d.description_ = std::move(description);
  return d;
}

void DeviationSpec::set_domain(double lo, double hi) {
  lo_ = lo;
  hi_ = hi;
  rebuild_weighted();
}

double DeviationSpec::clamp_into_domain(double v) const {
  const double snap = 1e-9 * std::max(1.0, std::abs(lo_) + std::abs(hi_));
  if (!(v >= lo_ - snap && v <= hi_ + snap)) {
    std::ostringstream msg;
    msg << "deviated time " << v << " escapes [" << lo_ << ", " << hi_ << "]";
    throw Error(ErrorKind::out_of_domain, msg.str());
  }
  return std::clamp(v, lo_, hi_);
}

double DeviationSpec::operator()(double t, const GridFun& gamma) const {
  if (dependent_) return clamp_into_domain(dependent_(t, gamma));
  return clamp_into_domain(fixed_(t));
}

double DeviationSpec::at(double t) const {
  if (dependent_)
    throw Error(ErrorKind::precondition, "deviation depends on the state");
  return clamp_into_domain(fixed_(t));
}

FunctionalSpec FunctionalSpec::constant_value(double c) {
  FunctionalSpec f;
  f.kind = FunctionalKind::constant;
  f.c = c;
  return f;
}

FunctionalSpec FunctionalSpec::eval_at(double a) {
  FunctionalSpec f;
  f.kind = FunctionalKind::eval_at;
  f.a = a;
  return f;
}

FunctionalSpec FunctionalSpec::mean() {
  FunctionalSpec f;
  f.kind = FunctionalKind::mean;
  return f;
}

FunctionalSpec FunctionalSpec::sup_on(double a, double b) {
  FunctionalSpec f;
  f.kind = FunctionalKind::sup_on;
  f.a = a;
  f.b = b;
  return f;
}

FunctionalSpec FunctionalSpec::inf_on(double a, double b) {
  FunctionalSpec f;
  f.kind = FunctionalKind::inf_on;
  f.a = a;
  f.b = b;
  return f;
}

FunctionalSpec FunctionalSpec::from_native(std::function<double(const GridFun&)> fn,
                                           bool monotone) {
  FunctionalSpec f;
  f.kind = FunctionalKind::native;
  f.native = std::move(fn);
  f.monotone = monotone;
  return f;
}

double FunctionalSpec::operator()(const GridFun& g) const {
  double v = 0.0;
  switch (kind) {
    case FunctionalKind::constant: v = c; break;
    case FunctionalKind::eval_at: v = g.eval(a); break;
    case FunctionalKind::mean: {
      const TimeGrid& grid = g.grid();
      v = integrate(g, grid.lo(), grid.hi()) / (grid.hi() - grid.lo());
      break;
    }
    case FunctionalKind::sup_on: v = extremum_on(g, a, b, Extremum::max); break;
    case FunctionalKind::inf_on: v = extremum_on(g, a, b, Extremum::min); break;
    case FunctionalKind::native: v = native(g); break;
  }
  if (!std::isfinite(v)) throw DomainError("boundary functional is not finite");
  return v;
}

std::string FunctionalSpec::describe() const {
  switch (kind) {
    case FunctionalKind::constant: return "constant:" + format_real(c);
    case FunctionalKind::eval_at: return "eval_at:" + format_real(a);
    case FunctionalKind::mean: return "mean";
    case FunctionalKind::sup_on: return "sup:" + format_real(a) + ":" + format_real(b);
    case FunctionalKind::inf_on: return "inf:" + format_real(a) + ":" + format_real(b);
    case FunctionalKind::native: return "native";
  }
  return "native";
}

GridPtr ProblemSpec::grid(std::size_t n_plus) const {
  return make_matched_grid(t0, r, L, n_plus);
}

void ProblemSpec::validate(std::size_t samples) const {
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorKind::config_error, name.empty() ? msg : name + ": " + msg);
  };
  if (!(L > 0.0)) fail("L must be positive");
  if (!(r >= 0.0)) fail("r must be nonnegative");
  if (!rhs.f) fail("missing field f");
  if (!history_k) fail("missing field k");
  if (deviation.empty()) fail("missing field tau");
  samples = std::max<std::size_t>(samples, 2);

  for (std::size_t i = 0; i < samples; ++i) {
    double t = r > 0.0 ? lo() + r * static_cast<double>(i) / static_cast<double>(samples - 1) : t0;
    double v = 0.0;
    try {
      v = history_k(t);
    } catch (const DomainError& e) {
      fail(std::string("history k not evaluable: ") + e.what());
    }
    if (!std::isfinite(v)) fail("history k is not finite at t = " + format_real(t));
  }

  const double snap = 1e-9 * std::max(1.0, std::abs(t0) + r + L);
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto probe = make_matched_grid(t0, r, L, 16);
  std::vector<GridFun> states;
  states.push_back(GridFun::constant(probe, 0.0));
  for (int j = 0; j < 4; ++j) {
    std::vector<double> vals(probe->size());
    for (auto& v : vals) v = 20.0 * unit(rng) - 10.0;
    states.emplace_back(probe, std::move(vals));
  }

  for (std::size_t i = 0; i < samples; ++i) {
    double t = t0 + L * static_cast<double>(i) / static_cast<double>(samples - 1);
    const GridFun& gamma = states[i % states.size()];
    try {
      double tau = deviation(t, gamma);
      if (deviation.has_declared_bounds()) {
        auto [blo, bhi] = deviation.declared_bounds()(t);
        if (blo > bhi + snap) fail("tau_lo > tau_hi at t = " + format_real(t));
        if (blo < lo() - snap || bhi > hi() + snap)
          fail("declared tau bounds escape I at t = " + format_real(t));
        if (tau < blo - snap || tau > bhi + snap)
          fail("tau leaves its declared bounds at t = " + format_real(t));
      }
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::config_error) throw;
      fail(std::string("tau values escaping I: ") + e.what());
    }
  }
}

double example_signlog_sine(double y) {
  if (y < -1.0) return -std::log(-y);
  if (y > 1.0) return std::log(y);
  return std::sin(std::numbers::pi * y);
}

}  // namespace fde
