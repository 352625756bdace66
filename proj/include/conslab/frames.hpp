#pragma once

#include <functional>
#include <utility>

#include <Eigen/Core>

#include "conslab/elliptic.hpp"
#include "conslab/fields.hpp"

namespace conslab {

// Unit normal of the target surface at a point of the image.
using NormalFn = std::function<Eigen::Vector3d(const Eigen::Vector3d&)>;
Eigen::Vector3d sphere_normal(const Eigen::Vector3d& y);

struct Frame {
  MapField e1, e2;               // unit tangent fields along u
  double coulomb_residual = 0.0; // ||div (e2, grad e1)|| over centered nodes
  double tol = 0.0;              // bound the residual was driven under
  int axis = -1;                 // reference axis of the initial frame, -1 if supplied
  int iterations = 0;
  double max_angle = 0.0;        // max |theta| applied to the starting frame
};

struct FrameOptions {
  double pole_margin = 0.1;  // radians between u and the reference axis
  double tol_rel = 1e-8;     // residual bound is tol_rel (1 + ||grad e1||)
  int max_iter = 100;
};

// (e2, grad e1) = sum_k e2^k grad e1^k.
VecField frame_connection(const Frame& f);

// Initial frame from the coordinate axis farthest from u, rotated into the
// Coulomb gauge by theta <- theta - D, D the gradient part of the Hodge
// decomposition of (e2, grad e1). Throws when u comes within pole_margin of
// both ends of every axis, naming the offending node of the best axis.
Frame coulomb_frame(const Hodge& hodge, const MapField& u, const FrameOptions& opts = {},
                    const NormalFn& normal = sphere_normal);
Frame coulomb_frame(const MapField& u, const FrameOptions& opts = {}, const NormalFn& normal = sphere_normal);

// Same iteration started from a given frame.
Frame coulomb_frame_from(const Hodge& hodge, const Frame& start, const FrameOptions& opts = {});

// e1' = cos t e1 + sin t e2, e2' = -sin t e1 + cos t e2.
Frame rotate_frame(const Frame& f, const ScalarField& theta);

struct FrameCheck {
  double orthonormality = 0.0;  // max nodewise of | |e_i| - 1 | and |(e1, e2)|
  double tangency = 0.0;        // max nodewise |(e_i, n(u))|
  bool ok() const { return orthonormality <= 1e-10 && tangency <= 1e-8; }
};
FrameCheck check_frame(const MapField& u, const Frame& f, const NormalFn& normal = sphere_normal);

// Delta a = -sum_k jacobian(e1^k, e2^k), a = 0 on boundary nodes.
// In the Coulomb gauge (e2, grad e1) = grad^perp a up to the Hodge remainder.
ScalarField solve_a(const Poisson& solver, const Frame& f);
ScalarField solve_a(const Frame& f);

struct ABound {
  double sup_a = 0.0, grad_a = 0.0;
  double grad_e1 = 0.0, grad_e2 = 0.0;
  double ratio_sup = 0.0, ratio_grad = 0.0;  // 0 when grad_e1 grad_e2 = 0
  bool sup_ok = true, grad_ok = true;        // against (1 + slack) / (2 pi), (1 + slack) / sqrt(2 pi)
};
ABound a_bounds(const ScalarField& a, const Frame& f, double slack = 0.1);

struct FrameResidual {
  double r1 = 0.0, r2 = 0.0;  // H^-1 proxies
};

// div(ch a (grad u, e1) + sh a (grad^perp u, e2)) and
// div(ch a (grad u, e2) - sh a (grad^perp u, e1)) at interior nodes.
std::pair<ScalarField, ScalarField> frame_conservation_rows(const MapField& u, const Frame& f, const ScalarField& a);
FrameResidual frame_conservation_residual(const Poisson& solver, const MapField& u, const Frame& f,
                                          const ScalarField& a);
FrameResidual frame_conservation_residual(const MapField& u, const Frame& f, const ScalarField& a);

struct SecondDerivativeReport {
  double lhs = 0.0;         // h^2 sum over interior nodes with r < 1/2 of |D^2 u|
  double energy_e = 0.0;    // ||grad e1||^2 + ||grad e2||^2
  double grad_e = 0.0;      // sqrt(energy_e)
  double grad_u = 0.0;
  double bracket = 0.0;     // exp(energy_e / 4 pi) (grad_e + 1) grad_u
  double C = 0.0;           // lhs / bracket, 0 when bracket = 0
};
SecondDerivativeReport second_derivative_report(const MapField& u, const Frame& f);

}  // namespace conslab
