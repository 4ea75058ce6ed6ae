#include "fde/explore.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <ostream>
#include <thread>

#include "fde/csv.hpp"
#include "fde/error.hpp"

namespace fde {

const char* to_string(Order o) noexcept {
  switch (o) {
    case Order::leq: return "leq";
    case Order::geq: return "geq";
    case Order::equal: return "equal";
    case Order::incomparable: return "incomparable";
  }
  return "incomparable";
}

double functional_I(const GridFun& x, double t0, double L) { return integrate(x, t0, t0 + L); }

Order compare(const GridFun& x1, const GridFun& x2, double tol) {
  if (!x1.same_grid(x2)) throw Error(ErrorKind::invalid_argument, "compare: grid mismatch");
  if (sup_distance(x1, x2) <= tol) return Order::equal;
  bool leq = true, geq = true;
  for (std::size_t i = 0; i < x1.size(); ++i) {
    if (x1[i] > x2[i] + tol) leq = false;
    if (x1[i] < x2[i] - tol) geq = false;
  }
  if (leq) return Order::leq;
  if (geq) return Order::geq;
  return Order::incomparable;
}

std::vector<GridFun> default_seeds(const BracketPair& b, std::size_t count) {
  std::vector<GridFun> seeds;
  if (count == 0) return seeds;
  for (std::size_t j = 0; j < count; ++j) {
    const double s = count == 1 ? 0.0 : static_cast<double>(j) / static_cast<double>(count - 1);
    std::vector<double> v(b.alpha.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = b.alpha[i] + s * (b.beta[i] - b.alpha[i]);
    seeds.emplace_back(b.alpha.grid_ptr(), std::move(v));
  }
  return seeds;
}

std::vector<std::size_t> deduplicate(const std::vector<GridFun>& xs, double tol) {
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    bool dup = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
      return compare(xs[k], xs[i], tol) == Order::equal;
    });
    if (!dup) kept.push_back(i);
  }
  return kept;
}

ExploreReport extremal_search(const ProblemSpec& p, const BracketPair& b,
                              const std::vector<GridFun>& seeds, const ExploreOptions& opts) {
  const double dedup_tol = opts.dedup_tol > 0.0 ? opts.dedup_tol : 10.0 * opts.solve.fp_tol;
  std::vector<std::optional<SolveReport>> runs(seeds.size());
  std::vector<SeedOutcome> outcomes(seeds.size());

  auto run_one = [&](std::size_t j) {
    SeedOutcome& out = outcomes[j];
    out.seed = j;
    try {
      SolveOptions so = opts.solve;
      so.method = Method::picard;
      so.initial = truncate(seeds[j], b);
      SolveReport rep = picard_solve(p, b, so);
      out.converged = rep.converged;
      out.iterations = rep.iterations;
      out.sup_step = rep.sup_step;
      out.ode_resid_sup = rep.residual.ode_resid_sup;
      out.boundary_resid_sup = rep.residual.boundary_resid_sup;
      out.i_value = functional_I(rep.solution, p.t0, p.L);
      out.accepted = rep.converged && rep.residual.failed_nodes == 0 &&
                     rep.residual.ode_resid_sup <= opts.residual_threshold &&
                     rep.residual.boundary_resid_sup <= opts.residual_threshold;
      if (!rep.converged) out.error = "not converged";
      else if (!out.accepted) out.error = "residual above threshold";
      runs[j] = std::move(rep);
    } catch (const Error& e) {
      out.error = e.what();
    }
  };

  const std::size_t threads = std::max<std::size_t>(1, std::min(opts.threads, seeds.size()));
  if (threads == 1) {
    for (std::size_t j = 0; j < seeds.size(); ++j) run_one(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (std::size_t j; (j = next++) < seeds.size();) run_one(j);
      });
    for (auto& t : pool) t.join();
  }

  // deduplicate in seed order, then sort by I (stable)
  std::vector<std::size_t> accepted;
  std::vector<GridFun> xs;
  for (std::size_t j = 0; j < seeds.size(); ++j) {
    if (!outcomes[j].accepted) continue;
    accepted.push_back(j);
    xs.push_back(runs[j]->solution);
  }
  std::vector<std::size_t> kept = deduplicate(xs, dedup_tol);
  std::stable_sort(kept.begin(), kept.end(), [&](std::size_t a, std::size_t c) {
    return outcomes[accepted[a]].i_value < outcomes[accepted[c]].i_value;
  });

  ExploreReport rep;
  for (std::size_t k : kept) {
    const std::size_t j = accepted[k];
    rep.solutions.push_back(std::move(*runs[j]));
    rep.first_seed.push_back(j);
    rep.i_values.push_back(outcomes[j].i_value);
  }
  for (std::size_t k = 0; k < accepted.size(); ++k) {
    const std::size_t j = accepted[k];
    for (std::size_t s = 0; s < rep.solutions.size(); ++s) {
      if (compare(rep.solutions[s].solution, xs[k], dedup_tol) == Order::equal) {
        outcomes[j].solution = s;
        break;
      }
    }
  }
  rep.seeds = std::move(outcomes);

  const std::size_t n = rep.solutions.size();
  rep.comparability.assign(n, std::vector<Order>(n, Order::equal));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t c = 0; c < n; ++c)
      if (a != c) {
        rep.comparability[a][c] = compare(rep.solutions[a].solution, rep.solutions[c].solution, dedup_tol);
        if (rep.comparability[a][c] == Order::incomparable) rep.has_incomparable_pair = true;
      }
  for (std::size_t a = 0; a < n; ++a) {
    if (rep.i_values[a] > rep.i_values[rep.argmax_i]) rep.argmax_i = a;
    if (rep.i_values[a] < rep.i_values[rep.argmin_i]) rep.argmin_i = a;
  }
  return rep;
}

std::vector<std::size_t> ExploreReport::maximal() const {
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < solutions.size(); ++a) {
    bool dominated = false;
    for (std::size_t c = 0; c < solutions.size(); ++c)
      if (c != a && comparability[a][c] == Order::leq) dominated = true;
    if (!dominated) out.push_back(a);
  }
  return out;
}

std::vector<std::size_t> ExploreReport::minimal() const {
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < solutions.size(); ++a) {
    bool dominated = false;
    for (std::size_t c = 0; c < solutions.size(); ++c)
      if (c != a && comparability[a][c] == Order::geq) dominated = true;
    if (!dominated) out.push_back(a);
  }
  return out;
}

void ExploreReport::write_csv(std::ostream& os) const {
  os << "seed,converged,iterations,sup_step,ode_resid_sup,boundary_resid_sup,I,accepted,solution\n";
  for (const auto& s : seeds) {
    os << s.seed << ',' << (s.converged ? 1 : 0) << ',' << s.iterations << ','
       << format_real(s.sup_step) << ',' << format_real(s.ode_resid_sup) << ','
       << format_real(s.boundary_resid_sup) << ',' << format_real(s.i_value) << ','
       << (s.accepted ? 1 : 0) << ',';
    if (s.solution) os << *s.solution;
    else os << -1;
    os << '\n';
  }
}

void ExploreReport::write_matrix(std::ostream& os) const {
  os << "solution";
  for (std::size_t c = 0; c < solutions.size(); ++c) os << ',' << c;
  os << '\n';
  for (std::size_t a = 0; a < solutions.size(); ++a) {
    os << a;
    for (std::size_t c = 0; c < solutions.size(); ++c) os << ',' << to_string(comparability[a][c]);
    os << '\n';
  }
}

}  // namespace fde
