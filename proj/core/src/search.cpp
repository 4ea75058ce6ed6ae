#include "fde/search.hpp"

#include <algorithm>
#include <cmath>

namespace fde {

namespace {

bool better(double v, double best, Extremum which) {
  return which == Extremum::min ? v < best : v > best;
}

}  // namespace

Optimum golden_section(const std::function<double(double)>& fn, double a, double b,
                       int iters, Extremum which) {
  static const double kInvPhi = (std::sqrt(5.0) - 1.0) / 2.0;
  const double sign = which == Extremum::min ? 1.0 : -1.0;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = sign * fn(c);
  double fd = sign * fn(d);
  for (int i = 0; i < iters; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = sign * fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = sign * fn(d);
    }
  }
  return fc < fd ? Optimum{c, sign * fc} : Optimum{d, sign * fd};
}

Optimum scan_refine(const std::function<double(double)>& fn, double a, double b,
                    std::size_t points, int iters, Extremum which) {
  if (!(b > a)) return {a, fn(a)};
  points = std::max<std::size_t>(points, 2);
  const double h = (b - a) / static_cast<double>(points - 1);
  Optimum best{a, fn(a)};
  std::size_t best_i = 0;
  for (std::size_t i = 1; i < points; ++i) {
    double s = i + 1 == points ? b : a + h * static_cast<double>(i);
    double v = fn(s);
    if (better(v, best.value, which)) {
      best = {s, v};
      best_i = i;
    }
  }
  if (iters <= 0) return best;
  double lo = best_i == 0 ? a : a + h * static_cast<double>(best_i - 1);
  double hi = best_i + 1 >= points ? b : a + h * static_cast<double>(best_i + 1);
  Optimum refined = golden_section(fn, lo, hi, iters, which);
  return better(refined.value, best.value, which) ? refined : best;
}

}  // namespace fde
