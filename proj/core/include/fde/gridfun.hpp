#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace fde {

/// Partition of I = [t0 - r, t0 + L] with t0 as a node. The history part I_-
/// is nodes[0..t0_index()], the forward part I_0 is nodes[t0_index()..].
class TimeGrid {
 public:
  /// Accepts any strictly increasing node set with nodes.front() = t0 - r,
  /// nodes.back() = t0 + L and t0 present exactly once.
  TimeGrid(double t0, double r, double L, std::vector<double> nodes);

  double t0() const noexcept { return t0_; }
  double r() const noexcept { return r_; }
  double L() const noexcept { return L_; }
  double lo() const noexcept { return nodes_.front(); }
  double hi() const noexcept { return nodes_.back(); }

  std::span<const double> nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  double operator[](std::size_t i) const noexcept { return nodes_[i]; }

  std::size_t t0_index() const noexcept { return i0_; }
  std::size_t cells() const noexcept { return nodes_.size() - 1; }
  std::size_t forward_cells() const noexcept { return nodes_.size() - 1 - i0_; }

  /// Absolute tolerance for evaluations just outside [lo, hi].
  double snap_tolerance() const noexcept { return snap_; }

  /// Maps t into [lo, hi], throwing out_of_domain beyond the snap tolerance.
  double snap(double t) const;

  /// Index i with nodes[i] <= t < nodes[i+1] (last cell for t = hi).
  std::size_t cell_of(double t) const;

  bool operator==(const TimeGrid& other) const noexcept;

 private:
  double t0_;
  double r_;
  double L_;
  std::vector<double> nodes_;
  std::size_t i0_ = 0;
  double snap_ = 0.0;
};

using GridPtr = std::shared_ptr<const TimeGrid>;

/// Uniform partition with n_minus cells on I_- and n_plus cells on I_0.
/// n_minus is ignored when r = 0.
GridPtr make_grid(double t0, double r, double L, std::size_t n_minus,
                  std::size_t n_plus);

/// Uniform grid with n_plus forward cells and a history part of the same
/// spacing (at least one cell when r > 0).
GridPtr make_matched_grid(double t0, double r, double L, std::size_t n_plus);

enum class Extremum { min, max };

/// Continuous piecewise-linear function on a TimeGrid.
class GridFun {
 public:
  GridFun(GridPtr grid, std::vector<double> values);

  /// Samples fn at every node.
  static GridFun sample(GridPtr grid, const std::function<double(double)>& fn);
  static GridFun constant(GridPtr grid, double c);

  const TimeGrid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }

  double eval(double t) const;
  double operator()(double t) const { return eval(t); }

  /// Slope on cell i (between nodes i and i+1).
  double slope(std::size_t cell) const noexcept;

  bool same_grid(const GridFun& other) const noexcept;

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// Exact extremum of g over [a, b]; attained at a, b or an interior node.
double extremum_on(const GridFun& g, double a, double b, Extremum which);

/// Exact integral of the interpolant over [a, b].
double integrate(const GridFun& g, double a, double b);

/// Sup-norm distance between two functions on the same grid.
double sup_distance(const GridFun& a, const GridFun& b);

/// `t,x` header, one row per node, 17 significant digits, LF endings.
void write_csv(std::ostream& os, const GridFun& g);

/// Inverse of write_csv; t0 must be one of the nodes.
GridFun read_csv(std::istream& is, double t0);

}  // namespace fde
