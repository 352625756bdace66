#pragma once

#include <string>
#include <vector>

namespace conslab {

struct SlopeFit {
  double slope = 0.0;      // least-squares fit of log r against log h
  double intercept = 0.0;
  std::vector<double> pair_slopes;  // between consecutive grids
  double min_slope = 0.0;
  bool pass = false;                // slope >= min_slope
};

// h and r of equal length >= min_points, all entries positive. Throws
// otherwise; a zero residual has no rate and is reported as an error.
SlopeFit fit_slope(const std::vector<double>& h, const std::vector<double>& r, double min_slope,
                   int min_points = 2);

}  // namespace conslab
