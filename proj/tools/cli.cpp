#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "fde/bracket.hpp"
#include "fde/construct.hpp"
#include "fde/csv.hpp"
#include "fde/error.hpp"
#include "fde/explore.hpp"
#include "fde/problem.hpp"
#include "fde/solver.hpp"

namespace fde::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string problem;
  std::vector<std::string> params;
  std::size_t grid = 0;
  std::string alpha;
  std::string beta;
  double tol = 1e-9;

  // solve / explore
  std::string method = "auto";
  double fp_tol = 1e-10;
  std::size_t max_iter = 200;
  double damping = 1.0;
  std::size_t substeps = 4;
  std::string out;
  bool plot = false;
  std::string trace_dir;

  // verify
  std::string definition = "new";
  std::size_t quad_nodes = 64;
  bool conservative = false;

  // construct
  std::string mode = "auto";
  std::string out_dir = ".";
  double domain_lo = -1e6;
  double domain_hi = 1e6;
  std::size_t search_grid = 2000;

  // explore
  std::size_t seeds = 9;
  double residual_threshold = 1e-5;
  std::size_t threads = 1;
};

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::config_error:
    case ErrorKind::parse_error:
    case ErrorKind::invalid_argument:
    case ErrorKind::precondition:
    case ErrorKind::not_retarded:
      return kUsage;
    case ErrorKind::out_of_domain:
    case ErrorKind::domain_error:
    case ErrorKind::non_finite:
    case ErrorKind::hypotheses_violated:
    case ErrorKind::domain_exhausted:
    case ErrorKind::construction_unsound:
      return kFailed;
  }
  return kInternal;
}

std::size_t default_grid() {
  if (const char* env = std::getenv("FDE_DEFAULT_GRID")) {
    std::size_t n = 0;
    const char* end = env + std::char_traits<char>::length(env);
    auto [ptr, ec] = std::from_chars(env, end, n);
    if (ec != std::errc() || ptr != end || n == 0)
      throw Error(ErrorKind::config_error, "FDE_DEFAULT_GRID must be a positive integer");
    return n;
  }
  return 1000;
}

ProblemSpec load(const Options& o) {
  const auto names = builtin_names();
  if (std::find(names.begin(), names.end(), o.problem) != names.end()) {
    std::vector<std::pair<std::string, std::string>> params;
    for (const auto& kv : o.params) {
      auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0)
        throw Error(ErrorKind::config_error, "--param expects key=value, got " + kv);
      params.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
    }
    ProblemSpec p = make_builtin(o.problem, params);
    p.validate();
    return p;
  }
  if (!o.params.empty())
    throw Error(ErrorKind::config_error, "--param applies to builtin problems only");
  if (!fs::exists(o.problem))
    throw Error(ErrorKind::config_error, "unknown problem " + o.problem +
                                             " (neither a builtin name nor a file)");
  return load_problem_file(o.problem);
}

std::function<double(double)> function_of_t(const std::string& what, const std::string& text) {
  Expr e = parse_expr(text);
  if (e.uses(Var::x) || e.uses(Var::y))
    throw Error(ErrorKind::config_error, what + " may only use the variable t");
  return [e](double t) { return e.eval(Vars{t, {}, {}}); };
}

ConstructOptions construct_options(const Options& o) {
  ConstructOptions c;
  c.domain = {o.domain_lo, o.domain_hi};
  c.grid = o.search_grid;
  c.verify.tol = o.tol;
  return c;
}

std::optional<BracketPair> bracket_for(const ProblemSpec& p, const GridPtr& grid,
                                       const Options& o, bool required) {
  if (o.alpha.empty() != o.beta.empty())
    throw Error(ErrorKind::config_error, "--alpha and --beta must be given together");
  if (!o.alpha.empty())
    return make_bracket(grid, function_of_t("--alpha", o.alpha), function_of_t("--beta", o.beta),
                        p.boundary);
  if (!required && !p.bracket_hint) return std::nullopt;
  return default_bracket(p, grid, construct_options(o));
}

void write_fun(const fs::path& path, const GridFun& g) {
  std::ostringstream os;
  write_csv(os, g);
  write_text_file(path, os.str());
}

void write_plot(const fs::path& solution_csv, bool with_bracket) {
  const fs::path dir = solution_csv.parent_path();
  const std::string sol = solution_csv.filename().string();
  const std::string stem = solution_csv.stem().string();
  std::ostringstream gp;
  gp << "# x, alpha and beta versus t\n"
     << "set datafile separator \",\"\n"
     << "set terminal pngcairo size 900,600\n"
     << "set output \"" << stem << ".png\"\n"
     << "set xlabel \"t\"\n"
     << "set key left bottom\n"
     << "plot \"" << sol << "\" skip 1 using 1:2 with lines lw 2 title \"x\"";
  if (with_bracket)
    gp << ", \\\n     \"alpha.csv\" skip 1 using 1:2 with lines dt 2 title \"alpha\""
       << ", \\\n     \"beta.csv\" skip 1 using 1:2 with lines dt 2 title \"beta\"";
  gp << '\n';
  write_text_file(dir / (stem + ".gp"), gp.str());
}

fs::path with_suffix(const fs::path& p, const std::string& suffix) {
  return p.parent_path() / (p.stem().string() + suffix + p.extension().string());
}

SolveOptions solve_options(const Options& o, const GridPtr& grid) {
  SolveOptions so;
  so.fp_tol = o.fp_tol;
  so.max_iter = o.max_iter;
  so.damping = o.damping;
  so.substeps = o.substeps;
  so.grid = grid;
  so.keep_trace = !o.trace_dir.empty();
  so.validate();
  return so;
}

int cmd_list(std::ostream& out) {
  for (const auto& n : builtin_names()) out << n << '\n';
  return kOk;
}

int cmd_solve(const Options& o, std::ostream& out) {
  ProblemSpec p = load(o);
  GridPtr grid = p.grid(o.grid ? o.grid : default_grid());
  SolveOptions so = solve_options(o, grid);
  if (o.method == "auto") {
    so.method = p.deviation.kind() == DeviationKind::pure_delay && p.deviation.delay() > 0.0
                    ? Method::steps
                    : Method::picard;
  } else {
    so.method = parse_method(o.method);
  }

  const bool needs_bracket = so.method != Method::steps;
  std::optional<BracketPair> b = bracket_for(p, grid, o, needs_bracket);
  SolveReport rep = solve(p, b, so);

  const fs::path out_path = o.out.empty() ? fs::path("solution.csv") : fs::path(o.out);
  write_fun(out_path, rep.solution);
  if (o.plot) {
    if (b) {
      write_fun(out_path.parent_path() / "alpha.csv", b->alpha);
      write_fun(out_path.parent_path() / "beta.csv", b->beta);
    }
    write_plot(out_path, b.has_value());
  }
  if (!o.trace_dir.empty()) write_trace(o.trace_dir, "iterate", rep.iterate_trace);

  out << "problem=" << p.name << " method=" << to_string(so.method)
      << " converged=" << (rep.converged ? 1 : 0) << " iterations=" << rep.iterations
      << " sup_step=" << format_real(rep.sup_step) << '\n'
      << "ode_resid_sup=" << format_real(rep.residual.ode_resid_sup)
      << " boundary_resid_sup=" << format_real(rep.residual.boundary_resid_sup) << '\n';
  if (rep.residual.error_t)
    out << "residual evaluation failed at " << rep.residual.failed_nodes
        << " nodes, first at t=" << format_real(*rep.residual.error_t) << ": "
        << rep.residual.error << '\n';
  if (b && needs_bracket)
    out << "lower_bracket_margin=" << format_real(rep.lower_bracket_margin)
        << " upper_bracket_margin=" << format_real(rep.upper_bracket_margin) << '\n';
  out << "wrote " << out_path.string() << '\n';
  return rep.converged ? kOk : kFailed;
}

int cmd_verify(const Options& o, std::ostream& out) {
  ProblemSpec p = load(o);
  GridPtr grid = p.grid(o.grid ? o.grid : default_grid());
  BracketPair b = *bracket_for(p, grid, o, true);
  VerifyOptions vo;
  vo.tol = o.tol;
  vo.quad_nodes = o.quad_nodes;
  vo.conservative_envelope = o.conservative;
  VerificationReport rep;
  if (o.definition == "new") rep = verify_definition21(p, b, vo);
  else if (o.definition == "classical") rep = verify_classical(p, b, vo);
  else throw Error(ErrorKind::config_error, "--definition must be new or classical");

  const fs::path out_path = o.out.empty() ? fs::path("verification.csv") : fs::path(o.out);
  std::ostringstream csv;
  rep.write_csv(csv);
  write_text_file(out_path, csv.str());
  out << rep.summary() << '\n' << "wrote " << out_path.string() << '\n';
  return rep.pass ? kOk : kFailed;
}

int cmd_construct(const Options& o, std::ostream& out, std::ostream& err) {
  ProblemSpec p = load(o);
  GridPtr grid = p.grid(o.grid ? o.grid : default_grid());
  ConstructOptions co = construct_options(o);
  std::string mode = o.mode;
  if (mode == "auto") mode = p.rhs.depends_only_on_y() ? "state" : "envelope";
  if (mode != "state" && mode != "envelope")
    throw Error(ErrorKind::config_error, "--mode must be auto, state or envelope");

  const fs::path dir(o.out_dir);
  fs::create_directories(dir);
  auto dump_report = [&](const VerificationReport& rep) {
    std::ostringstream csv;
    rep.write_csv(csv);
    write_text_file(dir / "verification.csv", csv.str());
  };
  try {
    Construction c = mode == "state" ? construct_p31(p, grid, co) : construct_p32(p, grid, co);
    write_fun(dir / "alpha.csv", c.bracket.alpha);
    write_fun(dir / "beta.csv", c.bracket.beta);
    write_text_file(dir / "trace.txt", c.trace.serialize());
    dump_report(c.report);
    out << c.trace.serialize() << c.report.summary() << '\n'
        << "wrote alpha.csv beta.csv trace.txt verification.csv in " << dir.string() << '\n';
    return kOk;
  } catch (const ConstructionUnsound& e) {
    write_text_file(dir / "trace.txt", e.trace().serialize());
    dump_report(e.report());
    err << "construction failed: " << e.what() << '\n';
    return kFailed;
  }
}

int cmd_explore(const Options& o, std::ostream& out) {
  ProblemSpec p = load(o);
  GridPtr grid = p.grid(o.grid ? o.grid : default_grid());
  BracketPair b = *bracket_for(p, grid, o, true);
  ExploreOptions eo;
  eo.solve = solve_options(o, grid);
  eo.residual_threshold = o.residual_threshold;
  eo.threads = o.threads;
  if (o.seeds == 0) throw Error(ErrorKind::config_error, "--seeds must be positive");
  ExploreReport rep = extremal_search(p, b, default_seeds(b, o.seeds), eo);

  const fs::path out_path = o.out.empty() ? fs::path("explore.csv") : fs::path(o.out);
  std::ostringstream csv, matrix;
  rep.write_csv(csv);
  rep.write_matrix(matrix);
  write_text_file(out_path, csv.str());
  write_text_file(with_suffix(out_path, "_matrix"), matrix.str());
  for (std::size_t k = 0; k < rep.solutions.size(); ++k)
    write_fun(with_suffix(out_path, "_sol" + std::to_string(k)), rep.solutions[k].solution);

  out << "seeds=" << rep.seeds.size() << " distinct_solutions=" << rep.solutions.size()
      << " has_incomparable_pair=" << (rep.has_incomparable_pair ? 1 : 0) << '\n';
  for (std::size_t k = 0; k < rep.solutions.size(); ++k)
    out << "solution " << k << ": I=" << format_real(rep.i_values[k]) << " first_seed="
        << rep.first_seed[k] << '\n';
  if (!rep.solutions.empty()) {
    out << "largest I: solution " << rep.argmax_i << ", smallest I: solution " << rep.argmin_i
        << '\n';
    out << "maximal among computed solutions:";
    for (auto k : rep.maximal()) out << ' ' << k;
    out << "\nminimal among computed solutions:";
    for (auto k : rep.minimal()) out << ' ' << k;
    out << '\n';
  }
  out << "wrote " << out_path.string() << '\n';
  return rep.solutions.empty() ? kFailed : kOk;
}

void add_problem_options(CLI::App* sub, Options& o) {
  sub->add_option("-p,--problem", o.problem, "builtin name or config file")->required();
  sub->add_option("--param", o.params, "builtin parameter key=value (repeatable)");
  sub->add_option("--grid", o.grid, "forward grid cells (default $FDE_DEFAULT_GRID or 1000)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--alpha", o.alpha, "lower function, expression in t");
  sub->add_option("--beta", o.beta, "upper function, expression in t");
  sub->add_option("--tol", o.tol, "verification tolerance")->check(CLI::PositiveNumber);
}

void add_iteration_options(CLI::App* sub, Options& o) {
  sub->add_option("--fp-tol", o.fp_tol, "fixed-point tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--max-iter", o.max_iter, "iteration limit")->check(CLI::PositiveNumber);
  sub->add_option("--damping", o.damping, "under-relaxation in (0, 1]");
  sub->add_option("--substeps", o.substeps, "RK4 substeps per cell")->check(CLI::PositiveNumber);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lower/upper solutions for first-order functional differential equations", "fde"};
  app.require_subcommand(1);
  Options o;

  CLI::App* list = app.add_subcommand("list", "print builtin problem names");

  CLI::App* solve = app.add_subcommand("solve", "solve a problem and write the solution CSV");
  add_problem_options(solve, o);
  add_iteration_options(solve, o);
  solve->add_option("--method", o.method,
                    "auto, picard, steps, monotone_from_lower or monotone_from_upper");
  solve->add_option("--out", o.out, "solution CSV (default solution.csv)");
  solve->add_flag("--plot", o.plot, "also write alpha.csv, beta.csv and a gnuplot script");
  solve->add_option("--trace-dir", o.trace_dir, "write every iterate into this directory");

  CLI::App* verify = app.add_subcommand("verify", "check a lower/upper pair");
  add_problem_options(verify, o);
  verify->add_option("--definition", o.definition, "new (envelope) or classical");
  verify->add_option("--out", o.out, "report CSV (default verification.csv)");
  verify->add_option("--quad-nodes", o.quad_nodes, "scan points over E(t)")
      ->check(CLI::PositiveNumber);
  verify->add_flag("--conservative", o.conservative, "use the whole interval as tau envelope");

  CLI::App* construct = app.add_subcommand("construct", "build a linear lower/upper pair");
  add_problem_options(construct, o);
  construct->add_option("--mode", o.mode, "auto, state (f in y alone) or envelope (comparison functions)");
  construct->add_option("--out-dir", o.out_dir, "directory for alpha.csv, beta.csv, trace.txt");
  construct->add_option("--domain-lo", o.domain_lo, "lower end of the threshold search");
  construct->add_option("--domain-hi", o.domain_hi, "upper end of the threshold search");
  construct->add_option("--search-grid", o.search_grid, "samples per search region")
      ->check(CLI::Range(std::size_t{100}, std::size_t{10000000}));

  CLI::App* explore = app.add_subcommand("explore", "multi-seed search for extremal solutions");
  add_problem_options(explore, o);
  add_iteration_options(explore, o);
  explore->add_option("--seeds", o.seeds, "number of seeds alpha + s (beta - alpha)");
  explore->add_option("--out", o.out, "per-seed CSV (default explore.csv)");
  explore->add_option("--residual-threshold", o.residual_threshold,
                      "discard solutions with larger residuals");
  explore->add_option("--threads", o.threads, "parallel seeds")->check(CLI::PositiveNumber);

  std::vector<const char*> argv{"fde"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (list->parsed()) return cmd_list(out);
    if (solve->parsed()) return cmd_solve(o, out);
    if (verify->parsed()) return cmd_verify(o, out);
    if (construct->parsed()) return cmd_construct(o, out, err);
    if (explore->parsed()) return cmd_explore(o, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  err << app.help();
  return kUsage;
}

}  // namespace fde::cli
