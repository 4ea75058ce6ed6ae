#pragma once

#include <cstddef>
#include <functional>

#include "fde/gridfun.hpp"

namespace fde {

struct Optimum {
  double arg = 0.0;
  double value = 0.0;
};

/// Golden-section search for a min/max of fn on [a, b]. The endpoints are
/// not sampled; combine with scan_refine for robust results.
Optimum golden_section(const std::function<double(double)>& fn, double a, double b,
                       int iters, Extremum which);

/// Uniform scan at `points` samples of [a, b] (endpoints included) followed by
/// golden-section refinement on the two cells around the best sample. Returns
/// the better of the scan and the refinement.
Optimum scan_refine(const std::function<double(double)>& fn, double a, double b,
                    std::size_t points, int iters, Extremum which);

}  // namespace fde
