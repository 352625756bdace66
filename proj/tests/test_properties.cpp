// Exact discrete identities on random inputs. Inputs are dyadic (2^-24 lattice)
// and grids have n = 2^k + 1, so every stencil operation is exact and the
// identities hold as == 0.0.
#include <array>

#include "conslab/operators.hpp"
#include "conslab/sampling.hpp"
#include "conslab/targets.hpp"
#include "doctest.h"

using namespace conslab;

namespace {

constexpr int kCases = 100;
constexpr std::array<int, 3> kSizes{17, 33, 65};

GridPtr grid_for(int c) { return make_grid(kSizes[c % kSizes.size()]); }

double centered_max(const Grid& g, const Eigen::VectorXd& v) {
  double m = 0.0;
  for (int p = 0; p < g.N; ++p)
    if (g.centered[p]) m = std::max(m, std::abs(v[p]));
  return m;
}

}  // namespace

TEST_CASE("div of perp_grad vanishes exactly") {
  for (int c = 0; c < kCases; ++c) {
    const auto g = grid_for(c);
    const ScalarField f = quantized_band_limited(g, mix_seed(1, c));
    CHECK(centered_max(*g, div(perp_grad(f)).v) == 0.0);
  }
}

TEST_CASE("curl of grad vanishes exactly") {
  for (int c = 0; c < kCases; ++c) {
    const auto g = grid_for(c);
    const ScalarField f = quantized_band_limited(g, mix_seed(2, c));
    CHECK(centered_max(*g, curl(grad(f)).v) == 0.0);
  }
}

TEST_CASE("jacobian is exactly antisymmetric") {
  for (int c = 0; c < kCases; ++c) {
    const auto g = grid_for(c);
    // Unquantized inputs: the property holds for arbitrary doubles.
    const ScalarField a = band_limited(g, mix_seed(3, c)), b = band_limited(g, mix_seed(4, c));
    const ScalarField j1 = jacobian(a, b), j2 = jacobian(b, a);
    CHECK((j1.v + j2.v).cwiseAbs().maxCoeff() == 0.0);
    CHECK(jacobian(a, a).v.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("connections built from maps are exactly antisymmetric") {
  for (int c = 0; c < kCases; ++c) {
    const auto g = grid_for(c);
    MapField u(g, 3);
    for (int k = 0; k < 3; ++k) u.u.row(k) = band_limited(g, mix_seed(5, 3 * c + k)).v.transpose();
    const Connection O = omega_general(u, sphere_form, [](const Eigen::VectorXd&) { return constant_h_torsion(0.7); });
    const int m = O.m();
    double d = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        d = std::max(d, (O.X().row(i * m + j) + O.X().row(j * m + i)).cwiseAbs().maxCoeff());
        d = std::max(d, (O.Y().row(i * m + j) + O.Y().row(j * m + i)).cwiseAbs().maxCoeff());
      }
    CHECK(d == 0.0);
  }
}

TEST_CASE("quantized inputs sit on the dyadic lattice") {
  const auto g = make_grid(33);
  const ScalarField f = quantized_band_limited(g, 9);
  for (int p = 0; p < g->N; ++p) {
    const double s = f.v[p] * 16777216.0;
    CHECK(s == std::round(s));
  }
}
