#include "conslab/convergence.hpp"

#include <cmath>

#include "conslab/error.hpp"

namespace conslab {

SlopeFit fit_slope(const std::vector<double>& h, const std::vector<double>& r, double min_slope, int min_points) {
  if (h.size() != r.size()) throw Error("fit_slope: h and r differ in length");
  if (static_cast<int>(h.size()) < min_points)
    throw Error("fit_slope: needs at least " + std::to_string(min_points) + " grid sizes, got " +
                std::to_string(h.size()));
  const size_t k = h.size();
  std::vector<double> lx(k), ly(k);
  for (size_t i = 0; i < k; ++i) {
    if (!(h[i] > 0.0) || !(r[i] > 0.0)) throw Error("fit_slope: h and r must be positive");
    lx[i] = std::log(h[i]);
    ly[i] = std::log(r[i]);
  }
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < k; ++i) mx += lx[i], my += ly[i];
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < k; ++i) sxx += (lx[i] - mx) * (lx[i] - mx), sxy += (lx[i] - mx) * (ly[i] - my);
  if (sxx == 0.0) throw Error("fit_slope: grid sizes must differ");
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (size_t i = 1; i < k; ++i) f.pair_slopes.push_back((ly[i] - ly[i - 1]) / (lx[i] - lx[i - 1]));
  f.min_slope = min_slope;
  f.pass = f.slope >= min_slope;
  return f;
}

}  // namespace conslab
