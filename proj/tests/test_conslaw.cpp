#include <cmath>
#include <numbers>

#include "conslab/conslaw.hpp"
#include "conslab/operators.hpp"
#include "conslab/targets.hpp"
#include "doctest.h"

using namespace conslab;

TEST_CASE("zero connection gives (A, B) = (id, 0) exactly") {
  const auto g = make_grid(33);
  const Connection O(g, 3);
  const ABResult r = build_AB(O, coulomb_gauge(O));
  CHECK((r.A.data() - MatField::identity(g, 3).data()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(r.B.data().cwiseAbs().maxCoeff() == 0.0);
  CHECK(r.fp_iters == 1);
}

TEST_CASE("lambda = 0.3 fixture") {
  double prev = 0.0, prev_cons = 0.0;
  for (int n : {33, 65}) {
    const auto g = make_grid(n);
    const MapField u = stereo_sphere_map(g, 0.3);
    const Connection O = omega_sphere(u);
    const ABResult r = build_AB(O, coulomb_gauge(O));
    CHECK(r.fp_iters < 50);
    for (size_t k = 1; k < r.trace.size(); ++k) CHECK(r.trace[k] < r.trace[k - 1]);
    CHECK(r.trace.back() <= 1e-9);
    CHECK(r.mean_defect <= 1e-10);
    CHECK(r.min_singular > 0.5);
    for (int p : g->boundary_ids) CHECK(r.B.at(p).cwiseAbs().maxCoeff() == 0.0);

    const double rel = gauge_relation_residual(r.A, r.B, O) / l2_norm(O, Region::interior);
    if (n == 65) CHECK(rel <= 1e-3);
    if (prev > 0.0) CHECK(rel < prev);
    prev = rel;

    const Poisson P(g);
    const double cons = conservation_residual(P, u, r.A, r.B).hminus1;
    const double scrambled = conservation_residual(P, u, r.A, MatField::general(g, 2.0 * r.B.data())).hminus1;
    CHECK(scrambled > 10.0 * cons);
    if (prev_cons > 0.0) CHECK(prev_cons / cons > std::pow(2.0, 0.9));
    prev_cons = cons;

    // Regularity demo: the Hodge remainder of A grad u is at solver precision.
    const RegularityReport reg = regularity_demo(u, r.A, r.B);
    CHECK(reg.rem_rel <= 1e-6);
    CHECK(reg.reconstruction_rel <= 1e-8);
    for (size_t k = 1; k < reg.oscillation.size(); ++k) CHECK(reg.oscillation[k] < reg.oscillation[k - 1]);
  }
}

TEST_CASE("gauge relation residual vanishes for a constant rotation") {
  const auto g = make_grid(17);
  const MatField A = exp_antisym(MatField::antisym(g, 3, [&](int i, int j) {
    return Eigen::VectorXd::Constant(g->N, 0.3 * (i + 1) - 0.2 * j);
  }));
  CHECK(gauge_relation_residual(A, MatField(g, 3), Connection(g, 3)) < 1e-14);
  CHECK(dist_SO(A) < 1e-12);
}

TEST_CASE("distance to SO(m)") {
  const auto g = make_grid(17);
  const MatField twice = MatField::general(g, 2.0 * MatField::identity(g, 3).data());
  CHECK(dist_SO(twice) == doctest::Approx(std::sqrt(3.0)));
  Eigen::MatrixXd refl = MatField::identity(g, 3).data();
  refl.row(0) *= -1.0;
  double smin = 0.0;
  // Nearest rotation to diag(-1, 1, 1) is at Frobenius distance 2.
  CHECK(dist_SO(MatField::general(g, refl), &smin) == doctest::Approx(2.0));
  CHECK(smin == doctest::Approx(1.0));
}

TEST_CASE("Shatah special case A = id") {
  double prev = 0.0, prev_stream = 0.0;
  for (int n : {33, 65}) {
    const auto g = make_grid(n);
    const MapField u = stereo_sphere_map(g, 0.3);
    const Poisson P(g);
    const double s = shatah_residual(P, u).hminus1;
    const MatField B = stream_potential(Hodge(g), omega_sphere(u));
    const double st = conservation_residual(P, u, MatField::identity(g, 3), B).hminus1;
    if (prev > 0.0) {
      CHECK(prev / s > std::pow(2.0, 0.9));
      CHECK(prev_stream / st > std::pow(2.0, 0.9));
    }
    prev = s;
    prev_stream = st;
  }
}
