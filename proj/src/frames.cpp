#include "conslab/frames.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Geometry>

#include "conslab/error.hpp"
#include "conslab/operators.hpp"

namespace conslab {

namespace {

Eigen::Vector3d col3(const MapField& u, int p) { return u.u.col(p).head<3>(); }

double grad_norm(const MapField& u) {
  const Grid& g = *u.grid;
  const double a = l2_rows(g, dx_rows(g, u.u)), b = l2_rows(g, dy_rows(g, u.u));
  return std::sqrt(a * a + b * b);
}

// (grad u, e) and (grad^perp u, e) as vector fields.
VecField pair_grad(const Eigen::MatrixXd& ux, const Eigen::MatrixXd& uy, const MapField& e) {
  VecField out(e.grid);
  out.x = (ux.cwiseProduct(e.u)).colwise().sum().transpose();
  out.y = (uy.cwiseProduct(e.u)).colwise().sum().transpose();
  return out;
}

VecField rot(const VecField& V) { return {V.grid, -V.y, V.x}; }

double centered_div_norm(const VecField& V) { return l2_norm(div(V), Region::centered); }

Frame iterate(const Hodge& hodge, const Frame& start, const FrameOptions& opts) {
  const GridPtr& g = start.e1.grid;
  const double tol = opts.tol_rel * (1.0 + grad_norm(start.e1));
  ScalarField theta(g);
  Frame f = start;
  for (int it = 0;; ++it) {
    const VecField V = frame_connection(f);
    f.coulomb_residual = centered_div_norm(V);
    f.iterations = it;
    if (f.coulomb_residual <= tol) break;
    if (it >= opts.max_iter) {
      std::ostringstream os;
      os << "coulomb_frame: residual " << f.coulomb_residual << " above " << tol << " after " << it
         << " iterations";
      throw ConvergenceError(os.str());
    }
    theta.v -= hodge.decompose(V).D.v;
    f = rotate_frame(start, theta);
  }
  f.tol = tol;
  f.axis = start.axis;
  f.max_angle = theta.v.cwiseAbs().maxCoeff();
  return f;
}

}  // namespace

Eigen::Vector3d sphere_normal(const Eigen::Vector3d& y) { return y.normalized(); }

VecField frame_connection(const Frame& f) {
  const Grid& g = *f.e1.grid;
  return pair_grad(dx_rows(g, f.e1.u), dy_rows(g, f.e1.u), f.e2);
}

Frame rotate_frame(const Frame& f, const ScalarField& theta) {
  require_same_grid(f.e1.grid, theta.grid);
  Frame out = f;
  const Eigen::RowVectorXd c = theta.v.array().cos().matrix().transpose();
  const Eigen::RowVectorXd s = theta.v.array().sin().matrix().transpose();
  for (int k = 0; k < f.e1.m(); ++k) {
    out.e1.u.row(k) = f.e1.u.row(k).cwiseProduct(c) + f.e2.u.row(k).cwiseProduct(s);
    out.e2.u.row(k) = f.e2.u.row(k).cwiseProduct(c) - f.e1.u.row(k).cwiseProduct(s);
  }
  return out;
}

Frame coulomb_frame(const Hodge& hodge, const MapField& u, const FrameOptions& opts, const NormalFn& normal) {
  if (u.m() != 3) throw Error("coulomb_frame needs a map into R^3");
  const Grid& g = *u.grid;
  std::vector<Eigen::Vector3d> nrm(g.N);
  for (int p = 0; p < g.N; ++p) nrm[p] = normal(col3(u, p));

  // Axis whose worst alignment with the normal is smallest.
  int axis = 0, worst_node = 0;
  double best = 2.0;
  for (int k = 0; k < 3; ++k) {
    double w = 0.0;
    int node = 0;
    for (int p = 0; p < g.N; ++p)
      if (std::abs(nrm[p][k]) > w) w = std::abs(nrm[p][k]), node = p;
    if (w < best) best = w, axis = k, worst_node = node;
  }
  if (best > std::cos(opts.pole_margin)) {
    std::ostringstream os;
    os << "coulomb_frame: u within " << opts.pole_margin << " rad of the poles of every axis; best axis " << axis
       << " fails at node (" << g.x[worst_node] << ", " << g.y[worst_node] << ")";
    throw Error(os.str());
  }

  Frame f;
  f.e1 = MapField(u.grid, 3);
  f.e2 = MapField(u.grid, 3);
  f.axis = axis;
  const Eigen::Vector3d ek = Eigen::Vector3d::Unit(axis);
  for (int p = 0; p < g.N; ++p) {
    const Eigen::Vector3d e1 = (ek - ek.dot(nrm[p]) * nrm[p]).normalized();
    f.e1.u.col(p) = e1;
    f.e2.u.col(p) = nrm[p].cross(e1);
  }
  return iterate(hodge, f, opts);
}

Frame coulomb_frame(const MapField& u, const FrameOptions& opts, const NormalFn& normal) {
  return coulomb_frame(Hodge(u.grid), u, opts, normal);
}

Frame coulomb_frame_from(const Hodge& hodge, const Frame& start, const FrameOptions& opts) {
  Frame s = start;
  s.axis = -1;
  return iterate(hodge, s, opts);
}

FrameCheck check_frame(const MapField& u, const Frame& f, const NormalFn& normal) {
  FrameCheck c;
  for (int p = 0; p < u.grid->N; ++p) {
    const Eigen::Vector3d a = col3(f.e1, p), b = col3(f.e2, p), n = normal(col3(u, p));
    c.orthonormality = std::max({c.orthonormality, std::abs(a.norm() - 1.0), std::abs(b.norm() - 1.0),
                                 std::abs(a.dot(b))});
    c.tangency = std::max({c.tangency, std::abs(a.dot(n)), std::abs(b.dot(n))});
  }
  return c;
}

ScalarField solve_a(const Poisson& solver, const Frame& f) {
  ScalarField rhs(f.e1.grid);
  for (int k = 0; k < f.e1.m(); ++k) rhs.v -= jacobian(f.e1.comp(k), f.e2.comp(k)).v;
  return solver.dirichlet(rhs).first;
}

ScalarField solve_a(const Frame& f) { return solve_a(Poisson(f.e1.grid), f); }

ABound a_bounds(const ScalarField& a, const Frame& f, double slack) {
  ABound b;
  b.sup_a = sup_norm(a);
  b.grad_a = w12_seminorm(a);
  b.grad_e1 = grad_norm(f.e1);
  b.grad_e2 = grad_norm(f.e2);
  const double denom = b.grad_e1 * b.grad_e2;
  if (denom > 0.0) {
    b.ratio_sup = b.sup_a / denom;
    b.ratio_grad = b.grad_a / denom;
  }
  const double two_pi = 2.0 * std::numbers::pi;
  b.sup_ok = b.sup_a <= (1.0 + slack) / two_pi * denom;
  b.grad_ok = b.grad_a <= (1.0 + slack) / std::sqrt(two_pi) * denom;
  return b;
}

std::pair<ScalarField, ScalarField> frame_conservation_rows(const MapField& u, const Frame& f,
                                                            const ScalarField& a) {
  const Grid& g = *u.grid;
  const Eigen::MatrixXd ux = dx_rows(g, u.u), uy = dy_rows(g, u.u);
  const VecField g1 = pair_grad(ux, uy, f.e1), g2 = pair_grad(ux, uy, f.e2);
  const VecField p1 = rot(g1), p2 = rot(g2);
  const Eigen::ArrayXd ch = a.v.array().cosh(), sh = a.v.array().sinh();
  VecField W1(u.grid), W2(u.grid);
  W1.x = ch * g1.x.array() + sh * p2.x.array();
  W1.y = ch * g1.y.array() + sh * p2.y.array();
  W2.x = ch * g2.x.array() - sh * p1.x.array();
  W2.y = ch * g2.y.array() - sh * p1.y.array();
  ScalarField d1 = div(W1), d2 = div(W2);
  for (int p : g.boundary_ids) d1.v[p] = d2.v[p] = 0.0;
  return {d1, d2};
}

FrameResidual frame_conservation_residual(const Poisson& solver, const MapField& u, const Frame& f,
                                          const ScalarField& a) {
  const auto [d1, d2] = frame_conservation_rows(u, f, a);
  return {hminus1_norm(solver, d1), hminus1_norm(solver, d2)};
}

FrameResidual frame_conservation_residual(const MapField& u, const Frame& f, const ScalarField& a) {
  return frame_conservation_residual(Poisson(u.grid), u, f, a);
}

SecondDerivativeReport second_derivative_report(const MapField& u, const Frame& f) {
  const Grid& g = *u.grid;
  const Eigen::MatrixXd ux = dx_rows(g, u.u), uy = dy_rows(g, u.u);
  const Eigen::MatrixXd uxx = dx_rows(g, ux), uxy = dy_rows(g, ux), uyy = dy_rows(g, uy);
  SecondDerivativeReport r;
  for (int p : g.interior_ids) {
    if (g.x[p] * g.x[p] + g.y[p] * g.y[p] >= 0.25) continue;
    const double s = uxx.col(p).squaredNorm() + 2.0 * uxy.col(p).squaredNorm() + uyy.col(p).squaredNorm();
    r.lhs += std::sqrt(s);
  }
  r.lhs *= g.h * g.h;
  const double n1 = grad_norm(f.e1), n2 = grad_norm(f.e2);
  r.energy_e = n1 * n1 + n2 * n2;
  r.grad_e = std::sqrt(r.energy_e);
  r.grad_u = grad_norm(u);
  r.bracket = std::exp(r.energy_e / (4.0 * std::numbers::pi)) * (r.grad_e + 1.0) * r.grad_u;
  if (r.bracket > 0.0) r.C = r.lhs / r.bracket;
  return r;
}

}  // namespace conslab
