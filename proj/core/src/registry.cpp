#include <cmath>
#include <map>
#include <numbers>

#include "config_parse.hpp"
#include "fde/csv.hpp"
#include "fde/error.hpp"
#include "fde/problem.hpp"

namespace fde {

namespace {

using Params = std::vector<std::pair<std::string, std::string>>;

// sgn(y) log|y| outside [-1, 1], sin(pi y) inside.
constexpr const char* kSignLogSine =
    "if(y < -1, -log(-y), if(y <= 1, sin(pi*y), log(y)))";

class ParamReader {
 public:
  ParamReader(std::string problem, const Params& params) : problem_(std::move(problem)) {
    for (const auto& [k, v] : params) values_[k] = v;
  }

  std::string text(const std::string& key, const std::string& fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::string v = it->second;
    values_.erase(it);
    return v;
  }

  double number(const std::string& key, double fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    double v = parse_number(key, it->second);
    values_.erase(it);
    return v;
  }

  void finish() const {
    if (!values_.empty())
      throw Error(ErrorKind::config_error,
                  problem_ + ": unknown parameter " + values_.begin()->first);
  }

 private:
  std::string problem_;
  std::map<std::string, std::string> values_;
};

std::function<double(double)> expr_of_t(const std::string& text) {
  Expr e = parse_expr(text);
  return [e](double t) { return e.eval(Vars{t, {}, {}}); };
}

BracketHint explicit_hint(const std::string& alpha, const std::string& beta) {
  BracketHint h;
  h.alpha = expr_of_t(alpha);
  h.beta = expr_of_t(beta);
  return h;
}

void finalize_domain(ProblemSpec& p) { p.deviation.set_domain(p.lo(), p.hi()); }

// x' = -x(t-1) on [0,1], x = -t on [-1,0]. Exact solution t^2/2 - t.
ProblemSpec example2_4(const Params& params) {
  ParamReader("example2_4", params).finish();
  ProblemSpec p;
  p.name = "example2_4";
  p.t0 = 0.0;
  p.r = 1.0;
  p.L = 1.0;
  p.rhs = RhsSpec::from_expr(parse_expr("-y"), Monotonicity::nonincreasing);
  p.deviation = DeviationSpec::pure_delay(1.0);
  p.boundary = FunctionalSpec::constant_value(0.0);
  p.history_k = [](double t) { return -t; };
  // classical pair; it is not a bracket in the sense of the envelope test
  p.bracket_hint = explicit_hint("0", "1");
  p.notes = "classical lower/upper pair 0 <= 1 encloses no solution";
  finalize_domain(p);
  return p;
}

// x' = f(x(pi/2 - t)) on [-pi/2, pi], x(-pi/2) = 0; x = lambda cos t solves it
// for every |lambda| <= 1.
ProblemSpec example2_6(const Params& params) {
  ParamReader("example2_6", params).finish();
  ProblemSpec p;
  p.name = "example2_6";
  p.t0 = -std::numbers::pi / 2;
  p.r = 0.0;
  p.L = 1.5 * std::numbers::pi;
  p.rhs = RhsSpec::from_expr(parse_expr("if(y < -1, 1, if(y <= 1, -y, -1))"),
                             Monotonicity::nonincreasing);
  p.rhs.l1_bound = [](double) { return 1.0; };
  p.deviation = DeviationSpec::from_expr(parse_expr("pi/2 - t"));
  p.boundary = FunctionalSpec::constant_value(0.0);
  p.history_k = [](double) { return 0.0; };
  p.bracket_hint = explicit_hint("-t - pi/2", "t + pi/2");
  finalize_domain(p);
  return p;
}

// x' = -t / x(-t) on [0, L], x = t cos t - 3t on [-L, 0].
ProblemSpec example2_8(const Params& params) {
  ParamReader rd("example2_8", params);
  const double L = rd.number("L", 1.0);
  rd.finish();
  if (!(L > 0.0)) throw Error(ErrorKind::config_error, "example2_8: L must be positive");
  ProblemSpec p;
  p.name = "example2_8";
  p.t0 = 0.0;
  p.r = L;
  p.L = L;
  p.rhs = RhsSpec::from_expr(parse_expr("-t/y"), Monotonicity::nondecreasing);
  p.deviation = DeviationSpec::reflection();
  p.boundary = FunctionalSpec::constant_value(0.0);
  p.history_k = [](double t) { return t * std::cos(t) - 3.0 * t; };
  p.bracket_hint = explicit_hint("if(t < 0, -2*t, -t/2)", "if(t < 0, -4*t, 0)");
  finalize_domain(p);
  return p;
}

// x' = F(x(tau)) with the sign-log/sine F; brackets built automatically.
ProblemSpec example3_2(const Params& params) {
  ParamReader rd("example3_2", params);
  const double L = rd.number("L", 1.0);
  const double r = rd.number("r", 1.0);
  const std::string k_text = rd.text("k", "0");
  const std::string tau_text = rd.text("tau", "");
  rd.finish();
  if (!(L > 0.0) || !(r >= 0.0))
    throw Error(ErrorKind::config_error, "example3_2: need L > 0 and r >= 0");
  ProblemSpec p;
  p.name = "example3_2";
  p.t0 = 0.0;
  p.r = r;
  p.L = L;
  p.rhs = RhsSpec::from_expr(parse_expr(kSignLogSine));
  p.deviation = tau_text.empty() ? DeviationSpec::pure_delay(r) : parse_deviation(tau_text);
  p.boundary = FunctionalSpec::constant_value(0.0);
  p.history_k = parse_function_of_t("k", k_text);
  p.bracket_hint = BracketHint{{}, {}, true};
  p.envelopes = EnvelopePair{example_signlog_sine, example_signlog_sine};
  finalize_domain(p);
  return p;
}

// x' = -(x+pi)|x+pi|^gamma g(t,x) + F(x(tau)) on [0, L], x = -t cos t on
// [-pi, 0]. The source writes F(tau(t,x)); the deviated state is used here.
ProblemSpec example3_4(const Params& params) {
  ParamReader rd("example3_4", params);
  const double gamma = rd.number("gamma", 1.0);
  const double L = rd.number("L", 1.0);
  const std::string g = rd.text("g", "one");
  const std::string tau = rd.text("tau", "delay");
  rd.finish();
  if (!(gamma >= 0.0) || !(L > 0.0))
    throw Error(ErrorKind::config_error, "example3_4: need gamma >= 0 and L > 0");

  std::string g_text;
  if (g == "one") g_text = "1";
  else if (g == "t") g_text = "t";
  else if (g == "damped") g_text = "1/(1 + x^2)";
  else throw Error(ErrorKind::config_error, "example3_4: g must be one, t or damped");

  ProblemSpec p;
  p.name = "example3_4";
  p.t0 = 0.0;
  p.r = std::numbers::pi;
  p.L = L;
  const std::string f_text = "-(x + pi)*abs(x + pi)^(" + format_real(gamma) +
                             ")*(" + g_text + ") + " + kSignLogSine;
  p.rhs = RhsSpec::from_expr(parse_expr(f_text));
  if (tau == "delay") {
    p.deviation = DeviationSpec::pure_delay(std::numbers::pi);
  } else if (tau == "state") {
    p.deviation = DeviationSpec::weighted_eval(parse_expr("t - pi/(1 + x^2)"));
    p.deviation.set_bounds([](double t) { return std::pair{t - std::numbers::pi, t}; });
  } else {
    throw Error(ErrorKind::config_error, "example3_4: tau must be delay or state");
  }
  p.boundary = FunctionalSpec::constant_value(0.0);
  p.history_k = [](double t) { return -t * std::cos(t); };
  p.bracket_hint = BracketHint{{}, {}, true};
  p.envelopes = EnvelopePair{example_signlog_sine, example_signlog_sine};
  p.notes = "F is applied to the deviated state x(tau), not to tau itself";
  finalize_domain(p);
  return p;
}

}  // namespace

std::vector<std::string> builtin_names() {
  return {"example2_4", "example2_6", "example2_8", "example3_2", "example3_4"};
}

ProblemSpec make_builtin(const std::string& name, const Params& params) {
  if (name == "example2_4") return example2_4(params);
  if (name == "example2_6") return example2_6(params);
  if (name == "example2_8") return example2_8(params);
  if (name == "example3_2") return example3_2(params);
  if (name == "example3_4") return example3_4(params);
  throw Error(ErrorKind::config_error, "unknown builtin " + name);
}

}  // namespace fde
