#include <cmath>
#include <random>

#include <Eigen/Geometry>

#include "conslab/error.hpp"
#include "conslab/gauge.hpp"
#include "conslab/operators.hpp"
#include "conslab/sampling.hpp"
#include "conslab/targets.hpp"
#include "doctest.h"

using namespace conslab;

namespace {

MatField random_antisym(const GridPtr& g, std::uint64_t seed, double scale) {
  return MatField::antisym(g, 3, [&](int i, int j) -> Eigen::VectorXd {
    return scale * band_limited(g, mix_seed(seed, 3 * i + j)).v;
  });
}

MatField times_exp(const MatField& P, const MatField& X, double t) {
  const MatField E = exp_antisym(MatField::antisym(X.grid(), X.m(), [&](int i, int j) -> Eigen::VectorXd {
    return t * X.entry(i, j);
  }));
  return MatField::rotation(P.grid(), matmul(P, E).data(), 1e-10);
}

double pairing(const MatField& G, const MatField& X) { return (G.data().array() * X.data().array()).sum(); }

// Connection with div = 0 by construction: Omega = grad^perp xi0, xi0 = 0 on
// boundary nodes.
Connection divergence_free(const GridPtr& g, MatField* xi0) {
  *xi0 = MatField::antisym(g, 3, [&](int i, int j) -> Eigen::VectorXd {
    ScalarField f = ScalarField::from(g, [&](double x, double y) {
      return 0.2 * (1 - x * x - y * y) * (x + (i + 1) * y - 0.3 * j);
    });
    for (int p : g->boundary_ids) f.v[p] = 0.0;
    return f.v;
  });
  return Connection::from_upper(g, 3, [&](int i, int j) { return perp_grad(ScalarField(g, xi0->entry(i, j))); });
}

}  // namespace

TEST_CASE("energy gradients match central differences") {
  const auto g = make_grid(17);
  const Connection O = omega_sphere(stereo_sphere_map(g, 0.3));
  const MatField P = exp_antisym(random_antisym(g, 1, 0.3));
  const MatField Gn = gauge_energy_gradient(O, P), Gl = link_energy_gradient(O, P);
  const double t = 1e-5;
  for (int d = 0; d < 5; ++d) {
    const MatField X = random_antisym(g, 100 + d, 1.0);
    const double fd_n = (gauge_energy(O, times_exp(P, X, t)) - gauge_energy(O, times_exp(P, X, -t))) / (2 * t);
    const double fd_l = (link_energy(O, times_exp(P, X, t)) - link_energy(O, times_exp(P, X, -t))) / (2 * t);
    const double an_n = pairing(Gn, X), an_l = pairing(Gl, X);
    CHECK(std::abs(fd_n - an_n) <= 1e-5 * std::abs(an_n));
    CHECK(std::abs(fd_l - an_l) <= 1e-5 * std::abs(an_l));
  }
}

TEST_CASE("zero connection gives the identity gauge exactly") {
  const auto g = make_grid(33);
  const GaugeResult r = coulomb_gauge(Connection(g, 3));
  CHECK((r.P.data() - MatField::identity(g, 3).data()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(r.xi.data().cwiseAbs().maxCoeff() == 0.0);
  CHECK(r.residual == 0.0);
  CHECK_FALSE(r.ratio_defined);
}

TEST_CASE("divergence-free connection recovers its potential") {
  const auto g = make_grid(33);
  MatField xi0;
  const Connection O = divergence_free(g, &xi0);
  const GaugeResult r = coulomb_gauge(O);
  const double err = l2_norm(MatField::general(g, r.xi.data() - xi0.data())) / l2_norm(xi0);
  CHECK(err <= 1e-6);
  CHECK(verify_gauge(r).all());
}

TEST_CASE("sphere connection at lambda = 0.3") {
  const auto g = make_grid(65);
  const Connection O = omega_sphere(stereo_sphere_map(g, 0.3));
  const GaugeResult r = coulomb_gauge(O);
  CHECK(r.residual_rel <= 1e-3);
  CHECK(r.energy_out <= r.energy_in);
  for (size_t k = 1; k < r.energy_trace.size(); ++k) CHECK(r.energy_trace[k] <= r.energy_trace[k - 1]);
  const GaugeVerification v = verify_gauge(r);
  CHECK(v.all());
  CHECK(v.residual_rel == doctest::Approx(r.residual_rel).epsilon(1e-6));
  for (int p : g->boundary_ids)
    for (int i = 0; i < 3; ++i) CHECK(r.xi.entry(i, (i + 1) % 3)[p] == 0.0);
}

TEST_CASE("gauge ratio is bounded uniformly in lambda") {
  const auto g = make_grid(33);
  double lo = 1e300, hi = 0.0;
  for (double lambda : {0.1, 0.2, 0.3}) {
    const GaugeResult r = coulomb_gauge(omega_sphere(stereo_sphere_map(g, lambda)));
    REQUIRE(r.ratio_defined);
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
  }
  CHECK(hi <= 3.0);
  CHECK(hi / lo <= 1.5);
}

TEST_CASE("constant rotation conjugates the connection") {
  const auto g = make_grid(17);
  const Connection O = omega_sphere(stereo_sphere_map(g, 0.3));
  Eigen::Matrix3d R = Eigen::AngleAxisd(0.7, Eigen::Vector3d(1, 2, 3).normalized()).toRotationMatrix();
  Eigen::MatrixXd data(9, g->N);
  for (int p = 0; p < g->N; ++p)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) data(3 * i + j, p) = R(i, j);
  const RotatedConnection rc = rotate_connection(O, MatField::rotation(g, data));
  for (int p = 0; p < g->N; p += 3) {
    const Eigen::Matrix3d ref = R.transpose() * Eigen::Matrix3d(O.at_x(p)) * R;
    CHECK((Eigen::Matrix3d(rc.omega.at_x(p)) - ref).cwiseAbs().maxCoeff() < 1e-13);
  }
  CHECK(rc.sym_defect < 1e-13);
}

TEST_CASE("smallness is enforced") {
  const auto g = make_grid(17);
  const Connection O = omega_sphere(stereo_sphere_map(g, 3.0));
  CHECK_THROWS_WITH_AS(coulomb_gauge(O), doctest::Contains("small"), Error);
}
