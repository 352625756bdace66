#include "conslab/targets.hpp"

#include <array>
#include <cmath>
#include <string>

#include <Eigen/Geometry>

#include "conslab/error.hpp"
#include "conslab/operators.hpp"

namespace conslab {

MapField stereo_sphere_map(GridPtr g, double lambda, Point center) {
  if (!(lambda > 0.0)) throw Error("stereo_sphere_map: lambda must be positive");
  Eigen::MatrixXd u(3, g->N);
  for (int p = 0; p < g->N; ++p) {
    const double w1 = lambda * (g->x[p] - center.x), w2 = lambda * (g->y[p] - center.y);
    const double r2 = w1 * w1 + w2 * w2, d = 1.0 + r2;
    u(0, p) = 2.0 * w1 / d;
    u(1, p) = 2.0 * w2 / d;
    u(2, p) = (r2 - 1.0) / d;
  }
  return MapField(std::move(g), std::move(u), MapConstraint::unit_sphere);
}

MapField cmc_cap_map(GridPtr g, double H, double lambda, Point center) {
  if (H == 0.0) throw Error("cmc_cap_map: H = 0 is the harmonic case, use stereo_sphere_map");
  MapField s = stereo_sphere_map(std::move(g), lambda, center);
  return MapField(s.grid, s.u / H);
}

namespace {

Connection from_potential(const MapField& n) {
  const Grid& g = *n.grid;
  const int m = n.m();
  const Eigen::MatrixXd nx = dx_rows(g, n.u), ny = dy_rows(g, n.u);
  return Connection::from_upper(n.grid, m, [&](int i, int j) {
    const auto ni = n.u.row(i).array(), nj = n.u.row(j).array();
    Eigen::VectorXd vx = (ni * nx.row(j).array() - nj * nx.row(i).array()).matrix().transpose();
    Eigen::VectorXd vy = (ni * ny.row(j).array() - nj * ny.row(i).array()).matrix().transpose();
    return VecField(n.grid, std::move(vx), std::move(vy));
  });
}

}  // namespace

Connection omega_sphere(const MapField& u) {
  if (u.constraint != MapConstraint::unit_sphere) throw Error("omega_sphere needs a unit_sphere map");
  return from_potential(u);
}

Connection omega_hypersurface(const MapField& u, const VecFn& gauss) {
  const int m = u.m();
  Eigen::MatrixXd n(m, u.grid->N);
  for (int p = 0; p < u.grid->N; ++p) {
    const Eigen::VectorXd v = gauss(u.u.col(p));
    if (v.size() != m) throw Error("gauss map returned a vector of the wrong size");
    if (std::abs(v.norm() - 1.0) > 1e-8)
      throw Error("gauss map is not unit at node " + std::to_string(p) + " (|n| = " + std::to_string(v.norm()) + ")");
    n.col(p) = v;
  }
  return from_potential(MapField(u.grid, std::move(n)));
}

Connection omega_mean_curvature(const MapField& u, const std::function<double(const Eigen::Vector3d&)>& H) {
  if (u.m() != 3) throw Error("omega_mean_curvature needs m = 3");
  const Grid& g = *u.grid;
  Eigen::VectorXd Hv(g.N);
  for (int p = 0; p < g.N; ++p) Hv[p] = H(u.u.col(p));
  const Eigen::MatrixXd ux = dx_rows(g, u.u), uy = dy_rows(g, u.u);
  // H * sgn * grad^perp u^k
  auto term = [&](int k, double sgn) {
    Eigen::VectorXd vx = (sgn * Hv.array() * (-uy.row(k).transpose().array())).matrix();
    Eigen::VectorXd vy = (sgn * Hv.array() * ux.row(k).transpose().array()).matrix();
    return VecField(u.grid, std::move(vx), std::move(vy));
  };
  return Connection::from_upper(u.grid, 3, [&](int i, int j) {
    if (i == 0 && j == 1) return term(2, 1.0);
    if (i == 0 && j == 2) return term(1, -1.0);
    return term(0, 1.0);
  });
}

Connection omega_general(const MapField& u, const Tensor3Fn& A, const Tensor3Fn& L) {
  const Grid& g = *u.grid;
  const int m = u.m();
  const Eigen::MatrixXd ux = dx_rows(g, u.u), uy = dy_rows(g, u.u);
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(m * m, g.N), Y = Eigen::MatrixXd::Zero(m * m, g.N);
  for (int p = 0; p < g.N; ++p) {
    Tensor3 a(m), l(m);
    try {
      if (A) a = A(u.u.col(p));
      if (L) l = L(u.u.col(p));
    } catch (const std::exception& e) {
      throw Error("omega_general: callback failed at node " + std::to_string(p) + " (x = " + std::to_string(g.x[p]) +
                  ", y = " + std::to_string(g.y[p]) + "): " + e.what());
    }
    if (a.m != m || l.m != m) throw Error("omega_general: callback returned the wrong size at node " + std::to_string(p));
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        double vx = 0.0, vy = 0.0;
        for (int k = 0; k < m; ++k) {
          const double ca = a(i, j, k) - a(j, i, k);
          const double cl = 0.25 * (l(i, j, k) - l(j, i, k));
          vx += ca * ux(k, p) - cl * uy(k, p);
          vy += ca * uy(k, p) + cl * ux(k, p);
        }
        X(i * m + j, p) = vx;
        Y(i * m + j, p) = vy;
      }
  }
  return Connection::from_arrays(u.grid, m, X, Y);
}

Tensor3 sphere_form(const Eigen::VectorXd& u) {
  const int m = static_cast<int>(u.size());
  Tensor3 t(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) t(i, j, j) = u[i];
  return t;
}

Tensor3 constant_h_torsion(double H) {
  Tensor3 t(3);
  const int perm[3][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};
  for (const auto& q : perm) {
    t(q[0], q[1], q[2]) = 2.0 * H;
    t(q[0], q[2], q[1]) = -2.0 * H;
  }
  return t;
}

GeometryKind parse_geometry(const std::string& name) {
  if (name == "sphere_harmonic") return GeometryKind::sphere_harmonic;
  if (name == "hypersurface") return GeometryKind::hypersurface;
  if (name == "mean_curvature") return GeometryKind::mean_curvature;
  if (name == "general_lagrangian") return GeometryKind::general_lagrangian;
  throw Error("unknown geometry '" + name + "'");
}

Eigen::VectorXd Ellipsoid::normal(const Eigen::VectorXd& y) const {
  Eigen::VectorXd n(3);
  n << y[0] / (a * a), y[1] / (b * b), y[2] / (c * c);
  return n / n.norm();
}

namespace {

// 5-point Gauss-Legendre on [0,1].
constexpr std::array<double, 5> kGLx = {0.04691007703066800, 0.23076534494715845, 0.5, 0.76923465505284155,
                                        0.95308992296933200};
constexpr std::array<double, 5> kGLw = {0.11846344252809454, 0.23931433524968324, 0.28444444444444444,
                                        0.23931433524968324, 0.11846344252809454};

double ellipse_speed(double a, double b, double t) {
  return std::sqrt(a * a * std::sin(t) * std::sin(t) + b * b * std::cos(t) * std::cos(t));
}

double ellipse_arclength(double a, double b, double t) {
  const int pieces = std::max(1, static_cast<int>(std::ceil(std::abs(t) / 0.02)));
  const double d = t / pieces;
  double s = 0.0;
  for (int k = 0; k < pieces; ++k)
    for (int q = 0; q < 5; ++q) s += kGLw[q] * ellipse_speed(a, b, (k + kGLx[q]) * d);
  return s * d;
}

}  // namespace

MapField ellipsoid_geodesic_map(GridPtr g, const Ellipsoid& E, double speed, double angle) {
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(3, g->N);
  const double ca = std::cos(angle), sa = std::sin(angle);
  for (int p = 0; p < g->N; ++p) {
    const double s = speed * (g->x[p] * ca + g->y[p] * sa);
    double t = s / std::max(E.a, E.b);
    for (int it = 0; it < 60; ++it) {
      const double dt = (ellipse_arclength(E.a, E.b, t) - s) / ellipse_speed(E.a, E.b, t);
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    u(0, p) = E.a * std::cos(t);
    u(1, p) = E.b * std::sin(t);
  }
  return MapField(std::move(g), std::move(u));
}

MapField geometry_map(GridPtr g, const GeometrySpec& spec) {
  switch (spec.kind) {
    case GeometryKind::sphere_harmonic:
    case GeometryKind::general_lagrangian: return stereo_sphere_map(std::move(g), spec.lambda, spec.center);
    case GeometryKind::mean_curvature: return cmc_cap_map(std::move(g), spec.H, spec.lambda, spec.center);
    case GeometryKind::hypersurface: return ellipsoid_geodesic_map(std::move(g), Ellipsoid{}, spec.lambda);
  }
  throw Error("unknown geometry");
}

Connection geometry_omega(const MapField& u, const GeometrySpec& spec) {
  switch (spec.kind) {
    case GeometryKind::sphere_harmonic: return omega_sphere(u);
    case GeometryKind::hypersurface: {
      if (spec.gauss) return omega_hypersurface(u, spec.gauss);
      const Ellipsoid E;
      return omega_hypersurface(u, [E](const Eigen::VectorXd& y) { return E.normal(y); });
    }
    case GeometryKind::mean_curvature: {
      if (spec.H_fn) return omega_mean_curvature(u, spec.H_fn);
      const double H = spec.H;
      return omega_mean_curvature(u, [H](const Eigen::Vector3d&) { return H; });
    }
    case GeometryKind::general_lagrangian: {
      if (spec.A || spec.L) return omega_general(u, spec.A, spec.L);
      return omega_general(u, sphere_form, {});
    }
  }
  throw Error("unknown geometry");
}

double hminus1_rows(const Poisson& solver, const Eigen::MatrixXd& rows) {
  double s = 0.0;
  for (int i = 0; i < rows.rows(); ++i) {
    const double v = hminus1_norm(solver, ScalarField(solver.grid(), rows.row(i).transpose()));
    s += v * v;
  }
  return std::sqrt(s);
}

namespace {

// Zero every non-interior column.
Eigen::MatrixXd interior_only(const Grid& g, Eigen::MatrixXd r) {
  for (int p : g.boundary_ids) r.col(p).setZero();
  return r;
}

}  // namespace

PdeResidual residual_pde(const Poisson& solver, const MapField& u, const Connection& O) {
  require_same_grid(u.grid, O.grid());
  if (u.m() != O.m()) throw Error("residual_pde size mismatch");
  const Grid& g = *u.grid;
  const Eigen::MatrixXd r = interior_only(g, lap5_rows(g, u.u) + connection_apply(O, u).u);
  return {l2_rows(g, r, Region::interior), hminus1_rows(solver, r)};
}

PdeResidual residual_pde(const MapField& u, const Connection& O) { return residual_pde(Poisson(u.grid), u, O); }

Eigen::MatrixXd harmonic_sphere_rows(const MapField& u) {
  const Grid& g = *u.grid;
  const Eigen::MatrixXd ux = dx_rows(g, u.u), uy = dy_rows(g, u.u);
  const Eigen::RowVectorXd e = ux.colwise().squaredNorm() + uy.colwise().squaredNorm();
  Eigen::MatrixXd r = lap5_rows(g, u.u);
  for (int i = 0; i < u.m(); ++i) r.row(i).array() += u.u.row(i).array() * e.array();
  return interior_only(g, std::move(r));
}

namespace {

Eigen::MatrixXd cross_xy(const Grid& g, const MapField& u) {
  const Eigen::MatrixXd ux = dx_rows(g, u.u), uy = dy_rows(g, u.u);
  Eigen::MatrixXd c(3, g.N);
  for (int p = 0; p < g.N; ++p) c.col(p) = Eigen::Vector3d(ux.col(p)).cross(Eigen::Vector3d(uy.col(p)));
  return c;
}

}  // namespace

Eigen::MatrixXd cmc_rows(const MapField& u, double H) {
  if (u.m() != 3) throw Error("cmc residual needs m = 3");
  const Grid& g = *u.grid;
  return interior_only(g, lap5_rows(g, u.u) - (2.0 * H * kWedgeSign) * cross_xy(g, u));
}

Eigen::MatrixXd wedge_rhs(const MapField& u, const std::function<double(const Eigen::Vector3d&)>& H) {
  if (u.m() != 3) throw Error("wedge term needs m = 3");
  const Grid& g = *u.grid;
  Eigen::MatrixXd c = cross_xy(g, u);
  for (int p = 0; p < g.N; ++p) c.col(p) *= -2.0 * kWedgeSign * H(u.u.col(p));
  return c;
}

double tangency_defect(const MapField& u) {
  const Grid& g = *u.grid;
  const Eigen::MatrixXd ux = dx_rows(g, u.u), uy = dy_rows(g, u.u);
  double d = 0.0;
  for (int p : g.interior_ids) {
    const double a = u.u.col(p).dot(ux.col(p)), b = u.u.col(p).dot(uy.col(p));
    d = std::max(d, std::hypot(a, b));
  }
  return d;
}

}  // namespace conslab
