#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "fde/error.hpp"
#include "fde/problem.hpp"
#include "config_parse.hpp"

namespace fde {

namespace {

[[noreturn]] void config_fail(const std::string& msg) {
  throw Error(ErrorKind::config_error, msg);
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

Expr parse_field(const std::string& key, const std::string& text) {
  try {
    return parse_expr(text);
  } catch (const ParseError& e) {
    config_fail("field " + key + ": " + e.what());
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

}  // namespace

double parse_number(const std::string& key, const std::string& text) {
  Expr e = parse_field(key, text);
  if (e.uses(Var::t) || e.uses(Var::x) || e.uses(Var::y))
    config_fail("field " + key + " must be a constant");
  try {
    return e.eval(Vars{});
  } catch (const Error& err) {
    config_fail("field " + key + ": " + err.what());
  }
}

std::function<double(double)> parse_function_of_t(const std::string& key,
                                                  const std::string& text) {
  Expr e = parse_field(key, text);
  if (e.uses(Var::x) || e.uses(Var::y))
    config_fail("field " + key + " may only use the variable t");
  return [e](double t) { return e.eval(Vars{t, {}, {}}); };
}

DeviationSpec parse_deviation(const std::string& text) {
  if (text == "reflection") return DeviationSpec::reflection();
  if (text.rfind("delay:", 0) == 0) {
    double d = parse_number("tau", text.substr(6));
    if (!(d >= 0.0)) config_fail("field tau: delay must be nonnegative");
    return DeviationSpec::pure_delay(d);
  }
  if (text.rfind("weighted_eval:", 0) == 0)
    return DeviationSpec::weighted_eval(parse_field("tau", text.substr(14)));
  return DeviationSpec::from_expr(parse_field("tau", text));
}

FunctionalSpec parse_functional(const std::string& text) {
  auto parts = split(text, ':');
  const std::string& kind = parts[0];
  auto want = [&](std::size_t n) {
    if (parts.size() != n) config_fail("field lambda: malformed '" + text + "'");
  };
  if (kind == "constant") {
    want(2);
    return FunctionalSpec::constant_value(parse_number("lambda", parts[1]));
  }
  if (kind == "eval_at") {
    want(2);
    return FunctionalSpec::eval_at(parse_number("lambda", parts[1]));
  }
  if (kind == "mean") {
    want(1);
    return FunctionalSpec::mean();
  }
  if (kind == "sup" || kind == "inf") {
    want(3);
    double a = parse_number("lambda", parts[1]);
    double b = parse_number("lambda", parts[2]);
    if (a > b) config_fail("field lambda: empty interval");
    return kind == "sup" ? FunctionalSpec::sup_on(a, b) : FunctionalSpec::inf_on(a, b);
  }
  config_fail("field lambda: unknown kind '" + kind + "'");
}

Monotonicity parse_monotonicity(const std::string& text) {
  if (text == "nondecreasing") return Monotonicity::nondecreasing;
  if (text == "nonincreasing") return Monotonicity::nonincreasing;
  if (text == "unknown") return Monotonicity::unknown;
  config_fail("field f_monotone: expected nondecreasing, nonincreasing or unknown");
}

namespace {

void check_functional_domain(const FunctionalSpec& lam, const ProblemSpec& p) {
  const double snap = 1e-9 * std::max(1.0, std::abs(p.t0) + p.r + p.L);
  auto inside = [&](double v) { return v >= p.lo() - snap && v <= p.hi() + snap; };
  switch (lam.kind) {
    case FunctionalKind::eval_at:
      if (!inside(lam.a)) config_fail("lambda point outside I");
      break;
    case FunctionalKind::sup_on:
    case FunctionalKind::inf_on:
      if (!inside(lam.a) || !inside(lam.b)) config_fail("lambda interval outside I");
      break;
    default:
      break;
  }
}

}  // namespace

ProblemSpec load_problem(const std::string& config) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::istringstream in(config);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    // several assignments may share a line when separated by commas only
    // for the builtin shorthand "builtin = example2_8, L = 1"
    std::string line = trim(raw);
    if (line.empty()) continue;
    std::vector<std::string> pieces{line};
    if (line.rfind("builtin", 0) == 0) pieces = split(line, ',');
    for (const auto& piece : pieces) {
      auto eq = piece.find('=');
      if (eq == std::string::npos)
        config_fail("line " + std::to_string(lineno) + ": expected key = value");
      std::string key = trim(piece.substr(0, eq));
      std::string value = trim(piece.substr(eq + 1));
      if (key.empty() || value.empty())
        config_fail("line " + std::to_string(lineno) + ": empty key or value");
      for (const auto& [k, v] : entries)
        if (k == key) config_fail("duplicate field " + key);
      entries.emplace_back(key, value);
    }
  }

  auto builtin = std::find_if(entries.begin(), entries.end(),
                              [](const auto& kv) { return kv.first == "builtin"; });
  if (builtin != entries.end()) {
    std::string name = builtin->second;
    entries.erase(builtin);
    ProblemSpec p = make_builtin(name, entries);
    p.validate();
    return p;
  }

  std::map<std::string, std::string> kv(entries.begin(), entries.end());
  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto require = [&](const std::string& key) {
    auto v = take(key);
    if (!v) config_fail("missing field " + key);
    return *v;
  };

  ProblemSpec p;
  p.name = "config";
  const std::string f_text = require("f");
  const std::string tau_text = require("tau");
  const std::string k_text = require("k");
  p.L = parse_number("L", require("L"));
  if (auto v = take("t0")) p.t0 = parse_number("t0", *v);

  Monotonicity mono = Monotonicity::unknown;
  if (auto v = take("f_monotone")) mono = parse_monotonicity(*v);
  p.rhs = RhsSpec::from_expr(parse_field("f", f_text), mono);
  if (auto v = take("psi")) p.rhs.l1_bound = parse_function_of_t("psi", *v);

  p.deviation = parse_deviation(tau_text);
  if (auto v = take("r")) {
    p.r = parse_number("r", *v);
  } else if (p.deviation.kind() == DeviationKind::pure_delay) {
    p.r = p.deviation.delay();
  }
  if (!(p.L > 0.0)) config_fail("L must be positive");
  if (!(p.r >= 0.0)) config_fail("r must be nonnegative");

  auto tau_lo = take("tau_lo");
  auto tau_hi = take("tau_hi");
  if (tau_lo || tau_hi) {
    auto lo_fn = tau_lo ? parse_function_of_t("tau_lo", *tau_lo)
                        : std::function<double(double)>([lo = p.lo()](double) { return lo; });
    auto hi_fn = tau_hi ? parse_function_of_t("tau_hi", *tau_hi)
                        : std::function<double(double)>([hi = p.hi()](double) { return hi; });
    p.deviation.set_bounds([lo_fn, hi_fn](double t) { return std::pair{lo_fn(t), hi_fn(t)}; });
  }
  p.deviation.set_domain(p.lo(), p.hi());

  p.boundary = FunctionalSpec::constant_value(0.0);
  if (auto v = take("lambda")) p.boundary = parse_functional(*v);
  check_functional_domain(p.boundary, p);

  p.history_k = parse_function_of_t("k", k_text);

  auto alpha = take("alpha");
  auto beta = take("beta");
  if (alpha || beta) {
    if (!alpha || !beta) config_fail("alpha and beta must be given together");
    BracketHint hint;
    if (*alpha == "auto" || *beta == "auto") {
      if (*alpha != *beta) config_fail("alpha = auto requires beta = auto");
      hint.automatic = true;
    } else {
      hint.alpha = parse_function_of_t("alpha", *alpha);
      hint.beta = parse_function_of_t("beta", *beta);
    }
    p.bracket_hint = std::move(hint);
  }

  if (!kv.empty()) config_fail("unknown field " + kv.begin()->first);
  p.validate();
  return p;
}

ProblemSpec load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::config_error, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  ProblemSpec p = load_problem(ss.str());
  if (p.name == "config") p.name = path;
  return p;
}

}  // namespace fde
