#pragma once

// Minimal deterministic SVG rendering for sweep results: a log-log panel of
// the polytope distance with its error budget, next to a log-linear panel of
// the pinning surrogate. Output depends only on the data passed in.

#include <string>
#include <vector>

namespace pinlab {

struct SweepPoint {
  double kappa = 0;
  double d_min = 0;
  double error_bound = 0;
  double q_overall = 0;
  bool ok = false;
};

std::string sweep_svg(const std::vector<SweepPoint>& points);

}  // namespace pinlab
