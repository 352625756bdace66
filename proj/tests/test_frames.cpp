#include <cmath>
#include <numbers>
#include <vector>

#include "conslab/convergence.hpp"
#include "conslab/error.hpp"
#include "conslab/frames.hpp"
#include "conslab/operators.hpp"
#include "conslab/targets.hpp"
#include "doctest.h"

using namespace conslab;

TEST_CASE("constant map") {
  const auto g = make_grid(17);
  MapField u(g, 3);
  u.u.row(0).setConstant(0.6);
  u.u.row(2).setConstant(0.8);
  const Frame f = coulomb_frame(u);
  CHECK(f.coulomb_residual == 0.0);
  CHECK(check_frame(u, f).ok());
  const ScalarField a = solve_a(f);
  CHECK(a.v.cwiseAbs().maxCoeff() == 0.0);
  const FrameResidual r = frame_conservation_residual(u, f, a);
  // One-sided boundary stencils round a constant to ~1e-16.
  CHECK(r.r1 <= 1e-14);
  CHECK(r.r2 <= 1e-14);
  CHECK(second_derivative_report(u, f).lhs == 0.0);
}

TEST_CASE("Coulomb frame for the stereographic map") {
  const auto g = make_grid(65);
  const MapField u = stereo_sphere_map(g, 0.3);
  const Hodge H(g);
  const Frame f = coulomb_frame(H, u);
  CHECK(check_frame(u, f).ok());
  CHECK(f.coulomb_residual <= f.tol);
  CHECK(coulomb_frame_from(H, f).max_angle <= 1e-6);

  // (e2, grad e1) = grad^perp a up to the boundary layer of the Poisson
  // potential (a is a Dirichlet solve, not a first-order fit).
  const ScalarField a = solve_a(f);
  const VecField V = frame_connection(f), pa = perp_grad(a);
  const VecField d(g, V.x - pa.x, V.y - pa.y);
  CHECK(l2_norm(d, Region::interior) <= 0.05 * l2_norm(V, Region::interior));
  for (int p : g->boundary_ids) CHECK(a.v[p] == 0.0);

  const ABound b = a_bounds(a, f);
  CHECK(b.sup_ok);
  CHECK(b.grad_ok);
}

TEST_CASE("rotation by theta adds grad theta up to O(h^2)") {
  std::vector<double> h, err;
  for (int n : {33, 65, 129}) {
    const auto g = make_grid(n);
    const MapField u = stereo_sphere_map(g, 0.3);
    const Frame f = coulomb_frame(u);
    const auto theta = ScalarField::from(g, [](double x, double y) { return 0.5 * x * y + 0.2 * std::sin(2 * x); });
    const VecField V0 = frame_connection(f), V1 = frame_connection(rotate_frame(f, theta)), G = grad(theta);
    const VecField d(g, V1.x - V0.x - G.x, V1.y - V0.y - G.y);
    h.push_back(g->h);
    err.push_back(l2_norm(d, Region::centered) / l2_norm(G, Region::centered));
  }
  CHECK(fit_slope(h, err, 1.9).pass);
}

TEST_CASE("conservation laws converge and both controls do not") {
  for (double lambda : {0.2, 0.3}) {
    std::vector<double> h, r1, r2, c1, nc;
    for (int n : {33, 65, 129}) {
      const auto g = make_grid(n);
      const MapField u = stereo_sphere_map(g, lambda);
      const Poisson P(g);
      const Frame f = coulomb_frame(u);
      const ScalarField a = solve_a(P, f);
      const FrameResidual r = frame_conservation_residual(P, u, f, a);
      h.push_back(g->h);
      r1.push_back(r.r1);
      r2.push_back(r.r2);
      c1.push_back(frame_conservation_residual(P, u, f, ScalarField(g, 2.0 * a.v)).r1);
      // Non-Coulomb frame: rotate away from the gauge and recompute a.
      const Frame bad = rotate_frame(f, ScalarField::from(g, [](double x, double y) { return 0.7 * x * y + 0.3 * x; }));
      nc.push_back(frame_conservation_residual(P, u, bad, solve_a(P, bad)).r1);
    }
    CHECK(fit_slope(h, r1, 0.9).pass);
    CHECK(fit_slope(h, r2, 0.9).pass);
    CHECK(c1.back() > 0.5 * c1.front());
    CHECK(c1.back() > 10 * r1.back());
    CHECK(nc.back() > 0.5 * nc.front());
    CHECK(nc.back() > 10 * r1.back());
  }
}

TEST_CASE("non-harmonic map keeps the residual away from zero") {
  std::vector<double> r;
  for (int n : {33, 65}) {
    const auto g = make_grid(n);
    // Bending one component and renormalizing leaves the sphere map non-harmonic.
    MapField u = stereo_sphere_map(g, 0.3);
    for (int p = 0; p < g->N; ++p) {
      const double s = 0.3 * g->x[p] * g->x[p];
      Eigen::Vector3d v(u.u(0, p) + s, u.u(1, p), u.u(2, p));
      u.u.col(p) = v.normalized();
    }
    const Frame f = coulomb_frame(u);
    r.push_back(frame_conservation_residual(u, f, solve_a(f)).r1);
  }
  CHECK(r[1] > 0.5 * r[0]);
}

TEST_CASE("empirical second-derivative constant") {
  const auto g = make_grid(65);
  std::vector<double> C;
  for (double lambda : {0.1, 0.2, 0.3}) {
    const MapField u = stereo_sphere_map(g, lambda);
    const SecondDerivativeReport r = second_derivative_report(u, coulomb_frame(u));
    CHECK(r.lhs > 0.0);
    C.push_back(r.C);
  }
  const auto [lo, hi] = std::minmax_element(C.begin(), C.end());
  CHECK(*hi / *lo <= 3.0);
}

TEST_CASE("other targets plug in through the normal callback") {
  const auto g = make_grid(33);
  const Ellipsoid E;
  const MapField u = ellipsoid_geodesic_map(g, E, 1.0, 0.3);
  const NormalFn n = [E](const Eigen::Vector3d& y) -> Eigen::Vector3d { return E.normal(y); };
  const Frame f = coulomb_frame(u, {}, n);
  CHECK(check_frame(u, f, n).ok());
  CHECK(f.coulomb_residual <= f.tol);
}

TEST_CASE("pole margin violation names the node") {
  const auto g = make_grid(17);
  // lambda = 8 puts nodes exactly on both x and y unit circles |w| = 1 and the
  // centre on the south pole, so every axis meets a pole.
  const MapField u = stereo_sphere_map(g, 8.0);
  CHECK_THROWS_WITH_AS(coulomb_frame(u), doctest::Contains("fails at node ("), Error);
}
