#include <cmath>
#include <vector>

#include "conslab/convergence.hpp"
#include "conslab/error.hpp"
#include "conslab/operators.hpp"
#include "conslab/targets.hpp"
#include "doctest.h"

using namespace conslab;

namespace {

double fit(const std::vector<int>& ns, const std::vector<double>& r) {
  std::vector<double> h;
  for (int n : ns) h.push_back(2.0 / (n - 1));
  return fit_slope(h, r, 0.0).slope;
}

const std::vector<int> kNs{33, 65, 129};

}  // namespace

TEST_CASE("stereographic map lies on the sphere and solves the harmonic map equation") {
  std::vector<double> res;
  for (int n : kNs) {
    const auto g = make_grid(n);
    const MapField u = stereo_sphere_map(g, 0.3);
    CHECK(u.sphere_defect() < 1e-14);
    res.push_back(l2_rows(*g, harmonic_sphere_rows(u), Region::interior));
  }
  CHECK(fit(kNs, res) >= 1.9);
}

TEST_CASE("-Delta u = Omega . grad u differs from the sphere form by the tangency term") {
  // Omega . grad u = u |grad u|^2 - grad u^i (sum_j u^j grad u^j) exactly, so the
  // two residual rows differ only by the discrete tangency defect.
  const auto g = make_grid(33);
  const MapField u = stereo_sphere_map(g, 0.3);
  const Connection O = omega_sphere(u);
  const Eigen::MatrixXd pde = lap5_rows(*g, u.u) + connection_apply(O, u).u;
  const Eigen::MatrixXd ux = dx_rows(*g, u.u), uy = dy_rows(*g, u.u);
  Eigen::MatrixXd expected = harmonic_sphere_rows(u);
  for (int p : g->interior_ids) {
    const double tx = u.u.col(p).dot(ux.col(p)), ty = u.u.col(p).dot(uy.col(p));
    expected.col(p) -= ux.col(p) * tx + uy.col(p) * ty;
  }
  for (int p : g->interior_ids) CHECK((pde.col(p) - expected.col(p)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(tangency_defect(u) > 0.0);

  std::vector<double> res;
  for (int n : kNs) res.push_back(residual_pde(stereo_sphere_map(make_grid(n), 0.3), omega_sphere(stereo_sphere_map(make_grid(n), 0.3))).l2);
  CHECK(fit(kNs, res) >= 1.9);
}

TEST_CASE("wedge sign oracle") {
  const auto g = make_grid(17);
  const MapField u = cmc_cap_map(g, 2.0, 0.5);
  const double right = l2_rows(*g, cmc_rows(u, 2.0), Region::interior);
  const double wrong = l2_rows(*g, cmc_rows(u, -2.0), Region::interior);
  CHECK(right < 0.05 * wrong);
  CHECK(kWedgeSign == 1.0);
}

TEST_CASE("CMC cap residual is second order") {
  std::vector<double> res;
  for (int n : kNs) {
    const auto g = make_grid(n);
    res.push_back(l2_rows(*g, cmc_rows(cmc_cap_map(g, 2.0, 0.5), 2.0), Region::interior));
  }
  CHECK(fit(kNs, res) >= 1.9);
}

TEST_CASE("mean curvature connection reproduces the wedge term") {
  const auto g = make_grid(33);
  const MapField u = cmc_cap_map(g, 1.5, 0.4);
  const auto H = [](const Eigen::Vector3d&) { return 1.5; };
  const Connection O = omega_mean_curvature(u, H);
  const Eigen::MatrixXd rhs = wedge_rhs(u, H);
  CHECK((connection_apply(O, u).u - rhs).cwiseAbs().maxCoeff() <= 1e-10 * rhs.cwiseAbs().maxCoeff());
  // Same connection through the general Lagrangian form.
  const Connection G = omega_general(u, {}, [](const Eigen::VectorXd&) { return constant_h_torsion(1.5); });
  CHECK((G.X() - O.X()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((G.Y() - O.Y()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("sphere connection through the general form") {
  const auto g = make_grid(33);
  const MapField u = stereo_sphere_map(g, 0.25, {0.1, -0.2});
  const Connection a = omega_sphere(u), b = omega_general(u, sphere_form, {});
  CHECK((a.X() - b.X()).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((a.Y() - b.Y()).cwiseAbs().maxCoeff() <= 1e-14);
  const Connection c = omega_hypersurface(u, [](const Eigen::VectorXd& y) -> Eigen::VectorXd { return y.normalized(); });
  CHECK((a.X() - c.X()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("ellipsoid geodesic is a harmonic map into the ellipsoid") {
  const Ellipsoid E;
  std::vector<double> res;
  for (int n : kNs) {
    const auto g = make_grid(n);
    const MapField u = ellipsoid_geodesic_map(g, E, 1.0, 0.3);
    for (int p = 0; p < g->N; ++p) {
      const Eigen::Vector3d y = u.u.col(p);
      CHECK(std::abs(y[0] * y[0] / (E.a * E.a) + y[1] * y[1] / (E.b * E.b) + y[2] * y[2] / (E.c * E.c) - 1.0) < 1e-13);
    }
    const Connection O = omega_hypersurface(u, [E](const Eigen::VectorXd& y) { return E.normal(y); });
    res.push_back(residual_pde(u, O).hminus1);
  }
  CHECK(fit(kNs, res) >= 1.9);
}

TEST_CASE("errors name their cause") {
  const auto g = make_grid(17);
  CHECK_THROWS_AS(cmc_cap_map(g, 0.0, 0.3), Error);
  CHECK_THROWS_AS(stereo_sphere_map(g, -1.0), Error);
  MapField free(g, Eigen::MatrixXd::Ones(3, g->N));
  CHECK_THROWS_AS(omega_sphere(free), Error);
  const MapField u = stereo_sphere_map(g, 0.3);
  CHECK_THROWS_WITH_AS(omega_hypersurface(u, [](const Eigen::VectorXd& y) -> Eigen::VectorXd { return 2.0 * y; }),
                       doctest::Contains("not unit"), Error);
  CHECK_THROWS_AS(parse_geometry("torus"), Error);
}
