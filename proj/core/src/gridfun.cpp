#include "fde/gridfun.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "fde/csv.hpp"
#include "fde/error.hpp"

namespace fde {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(ErrorKind::invalid_argument, msg);
}

}  // namespace

TimeGrid::TimeGrid(double t0, double r, double L, std::vector<double> nodes)
    : t0_(t0), r_(r), L_(L), nodes_(std::move(nodes)) {
  require(std::isfinite(t0) && std::isfinite(r) && std::isfinite(L),
          "grid parameters must be finite");
  require(r >= 0.0, "history length r must be nonnegative");
  require(L > 0.0, "forward length L must be positive");
  require(nodes_.size() >= 2, "grid needs at least two nodes");
  snap_ = 1e-9 * std::max(1.0, std::abs(t0) + r + L);
  require(std::abs(nodes_.front() - (t0 - r)) <= 1e-3 * snap_,
          "first node must be t0 - r");
  require(std::abs(nodes_.back() - (t0 + L)) <= 1e-3 * snap_,
          "last node must be t0 + L");
  for (std::size_t i = 0; i + 1 < nodes_.size(); ++i)
    require(nodes_[i] < nodes_[i + 1], "nodes must be strictly increasing");
  auto it = std::find(nodes_.begin(), nodes_.end(), t0);
  require(it != nodes_.end(), "t0 must be a node");
  i0_ = static_cast<std::size_t>(it - nodes_.begin());
}

double TimeGrid::snap(double t) const {
  if (!(t >= lo() - snap_ && t <= hi() + snap_)) {
    std::ostringstream msg;
    msg << "t = " << t << " outside [" << lo() << ", " << hi() << "]";
    throw Error(ErrorKind::out_of_domain, msg.str());
  }
  return std::clamp(t, lo(), hi());
}

std::size_t TimeGrid::cell_of(double t) const {
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
  if (it == nodes_.begin()) return 0;
  auto i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
  return std::min(i, nodes_.size() - 2);
}

bool TimeGrid::operator==(const TimeGrid& other) const noexcept {
  return t0_ == other.t0_ && r_ == other.r_ && L_ == other.L_ &&
         nodes_ == other.nodes_;
}

GridPtr make_grid(double t0, double r, double L, std::size_t n_minus,
                  std::size_t n_plus) {
  require(L > 0.0, "forward length L must be positive");
  require(r >= 0.0, "history length r must be nonnegative");
  require(n_plus >= 1, "need at least one forward cell");
  require(r == 0.0 || n_minus >= 1, "need at least one history cell when r > 0");

  std::vector<double> nodes;
  const std::size_t nm = r > 0.0 ? n_minus : 0;
  nodes.reserve(nm + n_plus + 1);
  for (std::size_t i = 0; i < nm; ++i) {
    // counts down from t0 - r; exact at both ends
    double frac = static_cast<double>(nm - i) / static_cast<double>(nm);
    nodes.push_back(i == 0 ? t0 - r : t0 - r * frac);
  }
  nodes.push_back(t0);
  for (std::size_t j = 1; j <= n_plus; ++j) {
    double frac = static_cast<double>(j) / static_cast<double>(n_plus);
    nodes.push_back(j == n_plus ? t0 + L : t0 + L * frac);
  }
  return std::make_shared<const TimeGrid>(t0, r, L, std::move(nodes));
}

GridPtr make_matched_grid(double t0, double r, double L, std::size_t n_plus) {
  std::size_t n_minus = 0;
  if (r > 0.0) {
    n_minus = static_cast<std::size_t>(
        std::llround(static_cast<double>(n_plus) * r / L));
    n_minus = std::max<std::size_t>(n_minus, 1);
  }
  return make_grid(t0, r, L, n_minus, n_plus);
}

GridFun::GridFun(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  require(grid_ != nullptr, "null grid");
  require(values_.size() == grid_->size(), "one value per node required");
  for (double v : values_) {
    if (!std::isfinite(v))
      throw Error(ErrorKind::non_finite, "grid function value is not finite");
  }
}

GridFun GridFun::sample(GridPtr grid, const std::function<double(double)>& fn) {
  std::vector<double> v;
  v.reserve(grid->size());
  for (double t : grid->nodes()) v.push_back(fn(t));
  return GridFun(std::move(grid), std::move(v));
}

GridFun GridFun::constant(GridPtr grid, double c) {
  std::vector<double> v(grid->size(), c);
  return GridFun(std::move(grid), std::move(v));
}

double GridFun::eval(double t) const {
  const TimeGrid& g = *grid_;
  t = g.snap(t);
  if (t >= g.hi()) return values_.back();
  std::size_t i = g.cell_of(t);
  const double ta = g[i];
  if (t == ta) return values_[i];
  const double tb = g[i + 1];
  return values_[i] + (values_[i + 1] - values_[i]) * ((t - ta) / (tb - ta));
}

double GridFun::slope(std::size_t cell) const noexcept {
  const TimeGrid& g = *grid_;
  return (values_[cell + 1] - values_[cell]) / (g[cell + 1] - g[cell]);
}

bool GridFun::same_grid(const GridFun& other) const noexcept {
  return grid_ == other.grid_ || *grid_ == *other.grid_;
}

double extremum_on(const GridFun& g, double a, double b, Extremum which) {
  const TimeGrid& grid = g.grid();
  if (a > b) throw Error(ErrorKind::invalid_argument, "extremum_on: a > b");
  a = grid.snap(a);
  b = grid.snap(b);
  const bool want_max = which == Extremum::max;
  double best = g.eval(a);
  auto consider = [&](double v) {
    if (want_max ? v > best : v < best) best = v;
  };
  consider(g.eval(b));
  const auto nodes = grid.nodes();
  auto first = std::upper_bound(nodes.begin(), nodes.end(), a);
  for (auto it = first; it != nodes.end() && *it < b; ++it)
    consider(g[static_cast<std::size_t>(it - nodes.begin())]);
  return best;
}

double integrate(const GridFun& g, double a, double b) {
  const TimeGrid& grid = g.grid();
  if (a > b) throw Error(ErrorKind::invalid_argument, "integrate: a > b");
  a = grid.snap(a);
  b = grid.snap(b);
  if (a == b) return 0.0;
  const auto nodes = grid.nodes();
  double sum = 0.0;
  double t_prev = a;
  double v_prev = g.eval(a);
  auto first = std::upper_bound(nodes.begin(), nodes.end(), a);
  for (auto it = first; it != nodes.end() && *it < b; ++it) {
    double v = g[static_cast<std::size_t>(it - nodes.begin())];
    sum += 0.5 * (v + v_prev) * (*it - t_prev);
    t_prev = *it;
    v_prev = v;
  }
  sum += 0.5 * (g.eval(b) + v_prev) * (b - t_prev);
  return sum;
}

double sup_distance(const GridFun& a, const GridFun& b) {
  if (!a.same_grid(b))
    throw Error(ErrorKind::invalid_argument, "grid mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

void write_csv(std::ostream& os, const GridFun& g) {
  os << "t,x\n";
  const auto nodes = g.grid().nodes();
  for (std::size_t i = 0; i < g.size(); ++i)
    os << format_real(nodes[i]) << ',' << format_real(g[i]) << '\n';
}

GridFun read_csv(std::istream& is, double t0) {
  std::string line;
  if (!std::getline(is, line) || line != "t,x")
    throw Error(ErrorKind::parse_error, "expected CSV header 't,x'");
  std::vector<double> ts, xs;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw Error(ErrorKind::parse_error, "malformed CSV row: " + line);
    ts.push_back(std::stod(line.substr(0, comma)));
    xs.push_back(std::stod(line.substr(comma + 1)));
  }
  if (ts.size() < 2) throw Error(ErrorKind::parse_error, "CSV needs two rows");
  auto grid = std::make_shared<const TimeGrid>(t0, t0 - ts.front(),
                                               ts.back() - t0, ts);
  return GridFun(std::move(grid), std::move(xs));
}

}  // namespace fde
