#include "conslab/operators.hpp"

#include <cmath>

#include "conslab/error.hpp"

namespace conslab {

VecField grad(const ScalarField& f) {
  const Grid& g = *f.grid;
  return {f.grid, g.Dx * f.v, g.Dy * f.v};
}

VecField perp_grad(const ScalarField& f) {
  const Grid& g = *f.grid;
  return {f.grid, -(g.Dy * f.v), g.Dx * f.v};
}

ScalarField div(const VecField& V) {
  const Grid& g = *V.grid;
  return {V.grid, g.Dx * V.x + g.Dy * V.y};
}

ScalarField curl(const VecField& V) {
  const Grid& g = *V.grid;
  return {V.grid, g.Dx * V.y - g.Dy * V.x};
}

ScalarField jacobian(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid, b.grid);
  const Grid& g = *a.grid;
  Eigen::VectorXd ax = g.Dx * a.v, ay = g.Dy * a.v, bx = g.Dx * b.v, by = g.Dy * b.v;
  // Each product is rounded on its own, so swapping a and b negates exactly.
  Eigen::VectorXd J(g.N);
  for (int k = 0; k < g.N; ++k) {
    const double p1 = ax[k] * by[k];
    const double p2 = ay[k] * bx[k];
    J[k] = p1 - p2;
  }
  return {a.grid, J};
}

ScalarField laplacian5(const ScalarField& f) {
  const Grid& g = *f.grid;
  ScalarField out(f.grid);
  const double s = 1.0 / (g.h * g.h);
  for (int p : g.interior_ids) {
    const auto& nb = g.nb[p];
    out.v[p] = (f.v[nb[0]] + f.v[nb[1]] + f.v[nb[2]] + f.v[nb[3]] - 4.0 * f.v[p]) * s;
  }
  return out;
}

Eigen::MatrixXd dx_rows(const Grid& g, const Eigen::MatrixXd& rows) { return (g.Dx * rows.transpose()).transpose(); }
Eigen::MatrixXd dy_rows(const Grid& g, const Eigen::MatrixXd& rows) { return (g.Dy * rows.transpose()).transpose(); }

Eigen::MatrixXd lap5_rows(const Grid& g, const Eigen::MatrixXd& rows) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows.rows(), rows.cols());
  const double s = 1.0 / (g.h * g.h);
  for (int p : g.interior_ids) {
    const auto& nb = g.nb[p];
    out.col(p) = (rows.col(nb[0]) + rows.col(nb[1]) + rows.col(nb[2]) + rows.col(nb[3]) - 4.0 * rows.col(p)) * s;
  }
  return out;
}

double region_weight(const Grid& g, int p, Region r) {
  switch (r) {
    case Region::closure: return g.w[p];
    case Region::interior: return g.interior[p] ? 1.0 : 0.0;
    case Region::centered: return g.centered[p] ? 1.0 : 0.0;
  }
  return 0.0;
}

double l2_rows(const Grid& g, const Eigen::MatrixXd& rows, Region r) {
  double s = 0.0;
  for (int p = 0; p < g.N; ++p) {
    const double w = region_weight(g, p, r);
    if (w != 0.0) s += w * rows.col(p).squaredNorm();
  }
  return std::sqrt(s) * g.h;
}

double l2_norm(const ScalarField& f, Region r) { return l2_rows(*f.grid, f.v.transpose(), r); }

double l2_norm(const VecField& V, Region r) {
  Eigen::MatrixXd rows(2, V.grid->N);
  rows.row(0) = V.x.transpose();
  rows.row(1) = V.y.transpose();
  return l2_rows(*V.grid, rows, r);
}

double l2_norm(const MapField& u, Region r) { return l2_rows(*u.grid, u.u, r); }
double l2_norm(const MatField& M, Region r) { return l2_rows(*M.grid(), M.data(), r); }

double l2_norm(const Connection& O, Region r) {
  const double a = l2_rows(*O.grid(), O.X(), r), b = l2_rows(*O.grid(), O.Y(), r);
  return std::sqrt(a * a + b * b);
}

double sup_norm(const ScalarField& f, Region r) {
  double s = 0.0;
  for (int p = 0; p < f.grid->N; ++p)
    if (region_weight(*f.grid, p, r) != 0.0) s = std::max(s, std::abs(f.v[p]));
  return s;
}

double w12_seminorm(const ScalarField& f) { return l2_norm(grad(f)); }

double integrate(const ScalarField& f) {
  const Grid& g = *f.grid;
  return g.w.dot(f.v) * g.h * g.h;
}

double area(const Grid& g) { return g.w.sum() * g.h * g.h; }

MatField matmul(const MatField& A, const MatField& B) {
  require_same_grid(A.grid(), B.grid());
  if (A.m() != B.m()) throw Error("matmul size mismatch");
  const int m = A.m();
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(m * m, A.grid()->N);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        C.row(i * m + j).array() += A.data().row(i * m + k).array() * B.data().row(k * m + j).array();
  return MatField::general(A.grid(), std::move(C));
}

MatField transpose(const MatField& A) {
  const int m = A.m();
  Eigen::MatrixXd T(m * m, A.grid()->N);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) T.row(j * m + i) = A.data().row(i * m + j);
  if (A.variant() == MatVariant::rotation) return MatField::rotation(A.grid(), std::move(T), 1e-8);
  if (A.variant() == MatVariant::antisym)
    return MatField::antisym(A.grid(), m, [&](int i, int j) -> Eigen::VectorXd { return T.row(i * m + j).transpose(); });
  return MatField::general(A.grid(), std::move(T));
}

MapField matvec(const MatField& A, const MapField& u) {
  require_same_grid(A.grid(), u.grid);
  if (A.m() != u.m()) throw Error("matvec size mismatch");
  const int m = A.m();
  MapField out(u.grid, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) out.u.row(i).array() += A.data().row(i * m + j).array() * u.u.row(j).array();
  return out;
}

MapField connection_apply(const Connection& O, const MapField& u) {
  require_same_grid(O.grid(), u.grid);
  if (O.m() != u.m()) throw Error("connection_apply size mismatch");
  const Grid& g = *u.grid;
  const int m = u.m();
  Eigen::MatrixXd ux = dx_rows(g, u.u), uy = dy_rows(g, u.u);
  MapField out(u.grid, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      out.u.row(i).array() +=
          O.X().row(i * m + j).array() * ux.row(j).array() + O.Y().row(i * m + j).array() * uy.row(j).array();
    }
  return out;
}

SmallMat expm_small(const SmallMat& X) {
  const int m = static_cast<int>(X.rows());
  const double nrm = X.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (nrm > 0.5) s = static_cast<int>(std::ceil(std::log2(nrm / 0.5)));
  const SmallMat Y = X / std::ldexp(1.0, s);
  SmallMat sum = SmallMat::Identity(m, m), term = SmallMat::Identity(m, m);
  for (int k = 1; k <= 30; ++k) {
    term = term * Y / static_cast<double>(k);
    sum += term;
    if (term.cwiseAbs().maxCoeff() <= 1e-18 * sum.cwiseAbs().maxCoeff()) break;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

MatField exp_antisym(const MatField& xi) {
  if (xi.variant() != MatVariant::antisym) throw Error("exp_antisym needs an antisymmetric field");
  const int m = xi.m();
  Eigen::MatrixXd out(m * m, xi.grid()->N);
  for (int p = 0; p < xi.grid()->N; ++p) {
    SmallMat R = expm_small(xi.at(p));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) out(i * m + j, p) = R(i, j);
  }
  return MatField::rotation(xi.grid(), std::move(out), 1e-12);
}

}  // namespace conslab
