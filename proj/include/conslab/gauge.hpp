#pragma once

#include <vector>

#include "conslab/elliptic.hpp"
#include "conslab/error.hpp"
#include "conslab/fields.hpp"

namespace conslab {

struct RotatedConnection {
  Connection omega;          // antisymmetric part of P^T dP + P^T Omega P
  double sym_defect = 0.0;   // L2 norm of the discarded symmetric part
};

// P must be the rotation variant.
RotatedConnection rotate_connection(const Connection& O, const MatField& P);

// sum_p w_p h^2 |Omega^P(p)|^2, both triangles.
double gauge_energy(const Connection& O, const MatField& P);
// G with d/dt gauge_energy(O, P exp(tX)) at t = 0 equal to sum_p <G_p, X_p>_F.
MatField gauge_energy_gradient(const Connection& O, const MatField& P);

// Lattice energy sum_e w_e (2m - 2 tr(P_p^T U_e P_q)), U_e = exp(h (Omega(p)+Omega(q))/2)
// along the edge axis.
double link_energy(const Connection& O, const MatField& P);
MatField link_energy_gradient(const Connection& O, const MatField& P);

struct GaugeOptions {
  double tol_div = 0.0;      // <= 0 means 1e-8 (1 + ||Omega||)
  int max_iter = 400;        // link-energy descent steps
  double step0 = 1.0;
  double backtrack = 0.5;
  double eps = 5.0;          // smallness threshold on the input energy
  bool force = false;
  int polish_iters = 200;    // Hodge fixed-point steps after the descent
  double polish_tol = 1e-11; // residual / ||Omega|| target
};

struct GaugeResult {
  Connection omega;          // input
  MatField P, xi;            // rotation, antisym with xi = 0 on boundary nodes
  Connection rotated;
  double residual = 0.0;     // ||grad^perp xi - Omega^P|| over interior nodes
  double residual_rel = 0.0; // residual / ||Omega|| (interior)
  double omega_norm = 0.0;   // ||Omega|| over interior nodes
  double energy_in = 0.0, energy_out = 0.0;
  double sym_defect = 0.0;
  double div_norm = 0.0;     // ||div Omega^P|| over centered nodes
  double grad_P = 0.0, grad_xi = 0.0;
  double ratio = 0.0;        // (||grad P|| + ||grad xi||) / ||Omega||
  bool ratio_defined = false;
  int descent_iters = 0, polish_iters = 0;
  std::vector<double> energy_trace;  // link energy after each accepted descent step
};

struct GaugeError : ConvergenceError {
  GaugeResult best;
  GaugeError(const std::string& what, GaugeResult r) : ConvergenceError(what), best(std::move(r)) {}
};

GaugeResult coulomb_gauge(const Connection& O, const GaugeOptions& opts = {});

struct GaugeVerification {
  double orthogonality = 0.0, det_defect = 0.0;
  bool rotation_ok = false, det_ok = false;
  bool xi_antisym_ok = false, xi_boundary_ok = false;
  bool energy_ok = false;
  double residual = 0.0, residual_rel = 0.0;
  double ratio = 0.0;
  bool ratio_defined = false;
  bool all() const { return rotation_ok && det_ok && xi_antisym_ok && xi_boundary_ok && energy_ok; }
};

// Recomputes every certificate from P, xi and the stored input.
GaugeVerification verify_gauge(const GaugeResult& r);

}  // namespace conslab
