#include "fde/construct.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include "fde/csv.hpp"
#include "fde/search.hpp"

namespace fde {

namespace {

struct Side {
  double y1 = 0.0;
  double y2 = 0.0;
  double lambda = 0.0;
  double y3 = 0.0;
};

[[noreturn]] void violated(const std::string& what) {
  throw Error(ErrorKind::hypotheses_violated, what);
}

[[noreturn]] void exhausted(const std::string& what) {
  throw Error(ErrorKind::domain_exhausted,
              what + "; enlarge the search domain");
}

std::vector<double> logspaced(double dmin, double dmax, std::size_t n) {
  std::vector<double> d(n);
  const double l0 = std::log10(dmin);
  const double l1 = std::log10(dmax);
  for (std::size_t i = 0; i < n; ++i)
    d[i] = std::pow(10.0, l0 + (l1 - l0) * static_cast<double>(i) / static_cast<double>(n - 1));
  d.back() = dmax;
  return d;
}

// Sorted samples: log-spaced below a, uniform on [a, b], log-spaced above b.
std::vector<double> search_samples(double a, double b, double lo, double hi, std::size_t n) {
  std::vector<double> s;
  s.reserve(3 * n);
  if (a - lo > 0.0) {
    const double dmin = std::min(1e-6 * std::max(1.0, std::abs(a)), 0.5 * (a - lo));
    for (double d : logspaced(dmin, a - lo, n)) s.push_back(a - d);
  }
  for (std::size_t i = 0; i < n; ++i)
    s.push_back(b > a ? a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1) : a);
  if (hi - b > 0.0) {
    const double dmin = std::min(1e-6 * std::max(1.0, std::abs(b)), 0.5 * (hi - b));
    for (double d : logspaced(dmin, hi - b, n)) s.push_back(b + d);
  }
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  s.front() = lo;
  s.back() = hi;
  return s;
}

// Three points approaching an end of the domain by decades: end, then
// 1/10 and 1/100 of the way back toward the anchor.
std::array<double, 3> decades(double anchor, double end) {
  return {end, anchor + (end - anchor) * 0.1, anchor + (end - anchor) * 0.01};
}

// F moves away (down if `down`) steadily toward the end of the domain:
// strictly monotone over the last decades with decrements that do not decay.
bool diverges(const ScalarFn& F, double anchor, double end, bool down) {
  auto [e0, e1, e2] = decades(anchor, end);
  const double sign = down ? 1.0 : -1.0;
  const double d_outer = sign * (F(e1) - F(e0));
  const double d_inner = sign * (F(e2) - F(e1));
  return d_outer > 0.0 && d_inner > 0.0 && d_outer >= 0.5 * d_inner;
}

// sup of F(y)/y over the last decade toward the (negative) lower end.
double tail_slope(const ScalarFn& F, double anchor, double lo) {
  auto [e0, e1, e2] = decades(anchor, lo);
  (void)e2;
  double sup = -std::numeric_limits<double>::infinity();
  constexpr int kPoints = 200;
  for (int i = 0; i <= kPoints; ++i) {
    double y = e0 + (e1 - e0) * i / kPoints;
    if (y < 0.0) sup = std::max(sup, F(y) / y);
  }
  return sup;
}

void check_lower_tail(const ScalarFn& F, double anchor, double lo, double L,
                      const std::string& name, const std::string& context) {
  if (!diverges(F, anchor, lo, true))
    violated(context + ": " + name + "(y) does not tend to -inf as y -> -inf on the domain");
  const double slope = tail_slope(F, anchor, lo);
  if (!(slope < 1.0 / L))
    violated(context + ": limsup " + name + "(y)/y = " + format_real(slope) +
             " is not below 1/L = " + format_real(1.0 / L) + " as y -> -inf");
}

Side lower_side(const ScalarFn& F, double phi, double L, double lo, double hi,
                std::size_t n, double tol, ConstructionMode mode, const std::string& name) {
  const double a = std::min(0.0, phi);
  const std::vector<double> s = search_samples(a, std::max(0.0, a), lo, hi, n);
  std::vector<double> fs(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) fs[i] = F(s[i]);

  if (mode == ConstructionMode::p32 && diverges(F, 0.0, hi, true))
    violated(name + " is not bounded below on [0, +inf)");

  // y1: (20) 0 > F(y) > (y - phi)/L for every sample y <= y1 < min(0, phi)
  const std::size_t below = static_cast<std::size_t>(
      std::lower_bound(s.begin(), s.end(), a) - s.begin());  // samples [0, below) lie under a
  if (below == 0) exhausted("no search samples below min(0, phi_*)");
  auto cond20 = [&](std::size_t i) { return fs[i] < 0.0 && fs[i] > (s[i] - phi) / L; };
  std::size_t y1_idx = below - 1;
  for (std::size_t i = 0; i < below; ++i) {
    if (!cond20(i)) {  // lowest violation; y1 sits just under it
      if (i == 0) {
        check_lower_tail(F, a, lo, L, name, "no threshold y1");
        exhausted("threshold y1 reaches the lower end of the domain");
      }
      y1_idx = i - 1;
      break;
    }
  }

  Side side;
  side.y1 = s[y1_idx];

  // y2: F(y) > 0 for every sample y >= y2 > 0
  const std::size_t first_pos =
      static_cast<std::size_t>(std::upper_bound(s.begin(), s.end(), 0.0) - s.begin());
  std::size_t y2_idx = first_pos;
  for (std::size_t i = s.size(); i-- > first_pos;) {
    if (!(fs[i] > 0.0)) {
      y2_idx = i + 1;
      break;
    }
  }
  if (y2_idx >= s.size()) {
    if (mode == ConstructionMode::p31) {
      if (!diverges(F, 0.0, hi, false))
        violated("no threshold y2: " + name + "(y) does not tend to +inf as y -> +inf");
      exhausted("threshold y2 reaches the upper end of the domain");
    }
    y2_idx = s.size() - 1;
  }
  side.y2 = s[y2_idx];

  // lambda: min of F on [y1, y2] (p31) or [y1, hi] (p32), golden-refined
  const std::size_t top = mode == ConstructionMode::p31 ? y2_idx : s.size() - 1;
  std::size_t arg = y1_idx;
  for (std::size_t i = y1_idx; i <= top; ++i)
    if (fs[i] < fs[arg]) arg = i;
  side.lambda = fs[arg];
  {
    const double a_ref = s[arg > y1_idx ? arg - 1 : arg];
    const double b_ref = s[arg < top ? arg + 1 : arg];
    if (b_ref > a_ref)
      side.lambda = std::min(side.lambda, golden_section(F, a_ref, b_ref, 60, Extremum::min).value);
  }

  // y3: the largest y <= y1 with F(y) <= lambda (ties toward larger y)
  std::size_t j = y1_idx + 1;
  bool found = false;
  for (std::size_t i = y1_idx + 1; i-- > 0;) {
    if (fs[i] <= side.lambda + tol) {
      j = i;
      found = true;
      break;
    }
  }
  if (!found) {
    check_lower_tail(F, a, lo, L, name, "no threshold y3");
    exhausted("threshold y3 reaches the lower end of the domain");
  }
  if (j == y1_idx) {
    side.y3 = s[j];
  } else {
    double lo_y = s[j], hi_y = s[j + 1];  // F(lo_y) <= lambda + tol < F(hi_y)
    for (int it = 0; it < 200 && hi_y - lo_y > 4 * std::numeric_limits<double>::epsilon() *
                                                   std::max(1.0, std::abs(lo_y));
         ++it) {
      const double mid = 0.5 * (lo_y + hi_y);
      if (F(mid) <= side.lambda + tol) lo_y = mid;
      else hi_y = mid;
    }
    side.y3 = lo_y;
  }
  return side;
}

void check_domain(double phi_star, double phi_upper, double L, SearchDomain d,
                  std::size_t grid) {
  if (!(L > 0.0)) throw Error(ErrorKind::invalid_argument, "L must be positive");
  if (grid < 100) throw Error(ErrorKind::invalid_argument, "search grid must be at least 100");
  if (!(phi_star <= phi_upper))
    throw Error(ErrorKind::invalid_argument, "phi_* must not exceed phi^*");
  if (!(d.lo < std::min(0.0, phi_star)) || !(d.hi > std::max(0.0, phi_upper)))
    throw Error(ErrorKind::invalid_argument,
                "search domain must contain min(0, phi_*) and max(0, phi^*) in its interior");
}

ConstructionTrace thresholds(const ScalarFn& F_lo, const ScalarFn& F_hi, double phi_star,
                             double phi_upper, double L, SearchDomain domain, std::size_t grid,
                             double tol, ConstructionMode mode) {
  check_domain(phi_star, phi_upper, L, domain, grid);
  ConstructionTrace tr;
  tr.mode = mode;
  tr.phi_star = phi_star;
  tr.phi_upper = phi_upper;
  tr.L = L;
  tr.search_domain = domain;
  tr.grid = grid;

  const std::string lo_name = mode == ConstructionMode::p31 ? "F" : "F_alpha";
  const std::string hi_name = mode == ConstructionMode::p31 ? "F" : "F_beta";
  const Side lower = lower_side(F_lo, phi_star, L, domain.lo, domain.hi, grid, tol, mode, lo_name);

  // mirror: z = -y, F~(z) = -F(-z), phi~ = -phi^*
  ScalarFn mirrored = [&F_hi](double z) { return -F_hi(-z); };
  Side upper;
  try {
    upper = lower_side(mirrored, -phi_upper, L, -domain.hi, -domain.lo, grid, tol, mode,
                       "-" + hi_name + "(-y)");
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("upper side: ") + e.what());
  }

  tr.y1 = lower.y1;
  tr.y2 = lower.y2;
  tr.lambda_min = lower.lambda;
  tr.y3 = lower.y3;
  tr.y1_bar = -upper.y1;
  tr.y2_bar = -upper.y2;
  tr.lambda_max = -upper.lambda;
  tr.y3_bar = -upper.y3;
  tr.m = (phi_star - tr.y3) / L;
  tr.m_bar = (tr.y3_bar - phi_upper) / L;
  tr.m_bar_paper = (phi_upper - tr.y3_bar) / L;
  return tr;
}

BracketPair linear_pair(const ConstructionTrace& tr, const GridPtr& grid,
                        const FunctionalSpec& lam) {
  const TimeGrid& g = *grid;
  const double t0 = g.t0();
  std::vector<double> a(g.size()), b(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double dt = std::max(0.0, g[i] - t0);
    a[i] = tr.phi_star - tr.m * dt;
    b[i] = tr.phi_upper + tr.m_bar * dt;
  }
  a.back() = tr.y3;
  b.back() = tr.y3_bar;
  return make_bracket(GridFun(grid, std::move(a)), GridFun(grid, std::move(b)), lam);
}

Construction validated(const ProblemSpec& p, BracketPair bracket, ConstructionTrace trace,
                       const ConstructOptions& opts) {
  VerificationReport rep = verify_definition21(p, bracket, opts.verify);
  if (!rep.pass)
    throw ConstructionUnsound("constructed pair fails verification: " + rep.summary(), rep,
                              trace);
  return Construction{std::move(bracket), std::move(trace), std::move(rep)};
}

void check_grid(const GridPtr& grid, double t0, double r, double L) {
  const double snap = grid->snap_tolerance();
  if (std::abs(grid->t0() - t0) > snap || std::abs(grid->lo() - (t0 - r)) > snap ||
      std::abs(grid->hi() - (t0 + L)) > snap)
    throw Error(ErrorKind::invalid_argument, "grid does not match the problem interval");
}

}  // namespace

const char* to_string(ConstructionMode m) noexcept {
  return m == ConstructionMode::p31 ? "p31" : "p32";
}

std::string ConstructionTrace::serialize() const {
  std::ostringstream os;
  auto kv = [&](const char* key, double v) { os << key << '=' << format_real(v) << '\n'; };
  os << "mode=" << to_string(mode) << '\n';
  kv("phi_star", phi_star);
  kv("phi_upper", phi_upper);
  kv("L", L);
  kv("y1", y1);
  kv("y2", y2);
  kv("lambda_min", lambda_min);
  kv("y3", y3);
  kv("y1_bar", y1_bar);
  kv("y2_bar", y2_bar);
  kv("lambda_max", lambda_max);
  kv("y3_bar", y3_bar);
  kv("m", m);
  kv("m_bar", m_bar);
  kv("m_bar_paper", m_bar_paper);
  kv("domain_lo", search_domain.lo);
  kv("domain_hi", search_domain.hi);
  os << "grid=" << grid << '\n';
  return os.str();
}

std::pair<double, double> history_extrema(const ScalarFn& k, double t0, double r,
                                          std::size_t samples) {
  if (!(r >= 0.0)) throw Error(ErrorKind::invalid_argument, "r must be nonnegative");
  if (r == 0.0) {
    const double v = k(t0);
    return {v, v};
  }
  if (samples < 2) throw Error(ErrorKind::invalid_argument, "need at least 2 history samples");
  const double lo = t0 - r;
  Optimum mn = scan_refine(k, lo, t0, samples, 60, Extremum::min);
  Optimum mx = scan_refine(k, lo, t0, samples, 60, Extremum::max);
  return {mn.value, mx.value};
}

ConstructionTrace find_thresholds(const ScalarFn& F, double phi_star, double phi_upper,
                                  double L, SearchDomain domain, std::size_t grid, double tol) {
  return thresholds(F, F, phi_star, phi_upper, L, domain, grid, tol, ConstructionMode::p31);
}

ConstructionTrace find_thresholds(const EnvelopePair& env, double phi_star, double phi_upper,
                                  double L, SearchDomain domain, std::size_t grid, double tol) {
  if (!env.F_alpha || !env.F_beta)
    throw Error(ErrorKind::invalid_argument, "both envelopes are required");
  return thresholds(env.F_alpha, env.F_beta, phi_star, phi_upper, L, domain, grid, tol,
                    ConstructionMode::p32);
}

Construction construct_p31(const ScalarFn& F, const ScalarFn& k, double t0, double r,
                           double L, const GridPtr& grid, const ConstructOptions& opts) {
  check_grid(grid, t0, r, L);
  auto [phi_star, phi_upper] = history_extrema(k, t0, r, opts.history_samples);
  ConstructionTrace tr =
      find_thresholds(F, phi_star, phi_upper, L, opts.domain, opts.grid, opts.tol);

  ProblemSpec q;
  q.name = "p31";
  q.t0 = t0;
  q.r = r;
  q.L = L;
  q.rhs.f = [F](double, double, double y) { return F(y); };
  q.deviation = DeviationSpec::native_fixed([t0](double) { return t0; }, "unused");
  q.deviation.set_domain(q.lo(), q.hi());
  q.boundary = FunctionalSpec::constant_value(0.0);
  q.history_k = k;

  ConstructOptions o = opts;
  o.verify.conservative_envelope = true;
  return validated(q, linear_pair(tr, grid, q.boundary), tr, o);
}

Construction construct_p31(const ProblemSpec& p, const GridPtr& grid,
                           const ConstructOptions& opts) {
  if (!p.rhs.depends_only_on_y())
    throw Error(ErrorKind::precondition, "construct_p31 needs f written in y alone");
  const Expr e = *p.rhs.expr;
  ScalarFn F = [e](double y) { return e.eval(Vars{{}, {}, y}); };
  check_grid(grid, p.t0, p.r, p.L);
  auto [phi_star, phi_upper] = history_extrema(p.history_k, p.t0, p.r, opts.history_samples);
  ConstructionTrace tr =
      find_thresholds(F, phi_star, phi_upper, p.L, opts.domain, opts.grid, opts.tol);
  ConstructOptions o = opts;
  o.verify.conservative_envelope = true;
  return validated(p, linear_pair(tr, grid, p.boundary), tr, o);
}

Construction construct_p32(const ProblemSpec& p, const GridPtr& grid,
                           const ConstructOptions& opts) {
  if (!p.envelopes) throw Error(ErrorKind::precondition, "problem carries no envelopes");
  const EnvelopePair& env = *p.envelopes;
  check_grid(grid, p.t0, p.r, p.L);
  auto [phi_star, phi_upper] = history_extrema(p.history_k, p.t0, p.r, opts.history_samples);

  // spot-check f >= F_alpha(y) for x <= phi_*, f <= F_beta(y) for x >= phi^*
  {
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double w = 10.0 * std::max({1.0, std::abs(phi_star), std::abs(phi_upper)});
    for (std::size_t s = 0; s < opts.domination_samples; ++s) {
      const double t = p.t0 + p.L * unit(rng);
      const double y = -w + 2.0 * w * unit(rng);
      const double xl = phi_star - w * unit(rng);
      const double xu = phi_upper + w * unit(rng);
      double fl, fu, el, eu;
      try {
        fl = p.rhs(t, xl, y);
        fu = p.rhs(t, xu, y);
        el = env.F_alpha(y);
        eu = env.F_beta(y);
      } catch (const DomainError&) {
        continue;
      }
      if (fl < el - 1e-9 || fu > eu + 1e-9) {
        std::ostringstream msg;
        msg << "envelope domination fails at t = " << t << ", y = " << y
            << (fl < el - 1e-9 ? " (f < F_alpha)" : " (f > F_beta)");
        throw Error(ErrorKind::hypotheses_violated, msg.str());
      }
    }
  }

  ConstructionTrace tr =
      find_thresholds(env, phi_star, phi_upper, p.L, opts.domain, opts.grid, opts.tol);
  ConstructOptions o = opts;
  o.verify.conservative_envelope = true;
  return validated(p, linear_pair(tr, grid, p.boundary), tr, o);
}

BracketPair default_bracket(const ProblemSpec& p, const GridPtr& grid,
                            const ConstructOptions& opts) {
  if (!p.bracket_hint)
    throw Error(ErrorKind::precondition, p.name + ": no lower/upper pair given");
  const BracketHint& h = *p.bracket_hint;
  if (!h.automatic) return make_bracket(grid, h.alpha, h.beta, p.boundary);
  if (p.rhs.depends_only_on_y()) return construct_p31(p, grid, opts).bracket;
  if (p.envelopes) return construct_p32(p, grid, opts).bracket;
  throw Error(ErrorKind::precondition,
              p.name + ": automatic pair needs f in y alone or envelope functions");
}

}  // namespace fde
