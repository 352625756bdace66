#pragma once

#include <Eigen/Core>

#include "conslab/fields.hpp"

namespace conslab {

// Where a norm or an identity is evaluated.
//   closure:  all active nodes, boundary weighted 1/2
//   interior: x^2+y^2 < 1 (or non-edge nodes on the square)
//   centered: interior nodes whose four neighbours are interior
enum class Region { closure, interior, centered };

VecField grad(const ScalarField& f);
VecField perp_grad(const ScalarField& f);  // (-d_y f, d_x f)
ScalarField div(const VecField& V);
ScalarField curl(const VecField& V);       // d_x V_y - d_y V_x
ScalarField jacobian(const ScalarField& a, const ScalarField& b);
// 5-point Laplacian at interior nodes, 0 on boundary nodes.
ScalarField laplacian5(const ScalarField& f);

// Row-wise derivatives of an (r x N) array: rows * D^T.
Eigen::MatrixXd dx_rows(const Grid& g, const Eigen::MatrixXd& rows);
Eigen::MatrixXd dy_rows(const Grid& g, const Eigen::MatrixXd& rows);
Eigen::MatrixXd lap5_rows(const Grid& g, const Eigen::MatrixXd& rows);

double l2_norm(const ScalarField& f, Region r = Region::closure);
double l2_norm(const VecField& V, Region r = Region::closure);
double l2_norm(const MapField& u, Region r = Region::closure);
double l2_norm(const MatField& M, Region r = Region::closure);
double l2_norm(const Connection& O, Region r = Region::closure);  // full Frobenius, both triangles
// sqrt(sum_p h^2 wt_p |column p|^2) of an (r x N) array.
double l2_rows(const Grid& g, const Eigen::MatrixXd& rows, Region r = Region::closure);
double sup_norm(const ScalarField& f, Region r = Region::closure);
double w12_seminorm(const ScalarField& f);  // L2 of the centered gradient
double integrate(const ScalarField& f);
double area(const Grid& g);                 // integrate(1)
double region_weight(const Grid& g, int p, Region r);

MatField matmul(const MatField& A, const MatField& B);
MatField transpose(const MatField& A);
MapField matvec(const MatField& A, const MapField& u);
// i-th component: sum_j Omega^i_j . grad u^j
MapField connection_apply(const Connection& O, const MapField& u);

SmallMat expm_small(const SmallMat& X);
// Rotation field exp(xi) nodewise; xi must be the antisym variant.
MatField exp_antisym(const MatField& xi);

inline SmallMat skew(const SmallMat& M) { return 0.5 * (M - M.transpose()); }
inline SmallMat sym(const SmallMat& M) { return 0.5 * (M + M.transpose()); }

}  // namespace conslab
