#pragma once

#include <vector>

#include "conslab/elliptic.hpp"
#include "conslab/gauge.hpp"

namespace conslab {

struct ABOptions {
  double tol_fp = 1e-9;          // relative update norm
  int max_sweeps = 50;
  double boundary_weight = 1e-10;
};

struct ABResult {
  MatField A, B;
  MatField Ahat;                 // A = (Ahat + id) P^T, weighted mean of Ahat is 0
  int fp_iters = 0;
  std::vector<double> trace;     // relative update norm per sweep
  double fp_residual = 0.0;      // ||grad Atilde - grad^perp B P - Atilde grad^perp xi|| over interior nodes
  double fp_residual_rel = 0.0;  // divided by ||Omega||
  double mean_defect = 0.0;      // max |mean(Ahat + id) - id|
  double grad_A = 0.0, grad_B = 0.0;
  double ratio = 0.0;            // (||grad A|| + ||grad B||) / ||Omega||
  bool ratio_defined = false;
  double dist_SO = 0.0;          // max over interior nodes of |A - polar(A)|
  double min_singular = 0.0;     // min over nodes of sigma_min(A)
};

// Picard iteration on grad Atilde_{k+1} - grad^perp B_{k+1} P = Atilde_k grad^perp xi
// with Atilde = Ahat + id, B = 0 on boundary nodes.
ABResult build_AB(const Connection& O, const GaugeResult& gauge, const ABOptions& opts = {});

// ||grad A - A Omega - grad^perp B|| over interior nodes, both components.
double gauge_relation_residual(const MatField& A, const MatField& B, const Connection& O);

struct ConsResidual {
  double l2 = 0.0, hminus1 = 0.0;
};

// div(A grad u + B grad^perp u) at interior nodes.
Eigen::MatrixXd conservation_rows(const MapField& u, const MatField& A, const MatField& B);
ConsResidual conservation_residual(const Poisson& solver, const MapField& u, const MatField& A, const MatField& B);
ConsResidual conservation_residual(const MapField& u, const MatField& A, const MatField& B);

// div(u^i grad u^j - u^j grad u^i) over pairs i < j.
ConsResidual shatah_residual(const Poisson& solver, const MapField& u);

// A = id special case: B with grad^perp B = -Omega up to the Hodge remainder
// when div Omega = 0. B has free boundary values (Omega . nu != 0 on the circle
// rules out B = 0 there) and zero weighted mean.
MatField stream_potential(const Hodge& hodge, const Connection& O);

// A (Delta_h u + Omega . grad_h u) at interior nodes; bounded by the
// conservation and gauge-relation residuals up to a product-rule defect.
double weighted_pde_residual(const MapField& u, const MatField& A, const Connection& O);

struct RegularityReport {
  double rem_rel = 0.0;             // max over rows of the Hodge remainder, relative
  double reconstruction_rel = 0.0;  // ||grad u - A^-1 (grad^perp E + grad D)|| / ||grad u||
  double structure_l2 = 0.0;        // ||div(A grad u) + grad B . grad^perp u|| over interior nodes
  std::vector<double> radii;        // decreasing
  std::vector<double> oscillation;  // max over centres of max |u(q) - u(centre)| on the ball
};

RegularityReport regularity_demo(const MapField& u, const MatField& A, const MatField& B);

// Max nodewise Frobenius distance of A to its polar factor (Newton iteration),
// with an SVD fallback when det A < 0.
double dist_SO(const MatField& A, double* min_singular = nullptr);

}  // namespace conslab
