#pragma once

#include <memory>
#include <utility>

#include "conslab/fields.hpp"
#include "conslab/operators.hpp"

namespace conslab {

enum class SolverKind { direct_sparse, cg };

struct SolveReport {
  int iterations = 0;
  double final_residual = 0.0;  // relative algebraic residual
  SolverKind solver = SolverKind::direct_sparse;
  double projection = 0.0;      // Neumann: mean removed from the right-hand side
};

struct SolverOptions {
  SolverKind kind = SolverKind::direct_sparse;
  double tol = 1e-10;
  int max_iter = 0;  // 0 means 20 n^2
};

// 5-point Poisson solver bound to one grid. Factorizations are built in the
// constructor, so solve calls are const and safe to share between threads.
class Poisson {
 public:
  explicit Poisson(GridPtr g, SolverOptions opts = {});
  ~Poisson();
  Poisson(Poisson&&) noexcept;
  Poisson& operator=(Poisson&&) noexcept;

  // Delta_h phi = f at interior nodes, phi = 0 on boundary nodes.
  std::pair<ScalarField, SolveReport> dirichlet(const ScalarField& f) const;
  // Delta_h phi = f - mean_int(f) at interior nodes with reflected ghosts
  // (zero flux), boundary nodes set to the mean of their interior
  // neighbours, then shifted so that integrate(phi) = 0.
  std::pair<ScalarField, SolveReport> neumann(const ScalarField& f) const;

  // Multi-right-hand-side variants on (r x N) arrays.
  Eigen::MatrixXd dirichlet_rows(const Eigen::MatrixXd& f) const;
  Eigen::MatrixXd neumann_rows(const Eigen::MatrixXd& f) const;

  const GridPtr& grid() const { return g_; }

 private:
  struct Impl;
  GridPtr g_;
  std::unique_ptr<Impl> impl_;
};

std::pair<ScalarField, SolveReport> solve_dirichlet(const ScalarField& f, SolverOptions opts = {});
std::pair<ScalarField, SolveReport> solve_neumann(const ScalarField& f, SolverOptions opts = {});

// Energy norm of the Dirichlet solve Delta psi = r on interior nodes,
// sqrt(-h^2 sum psi r): a discrete H^-1 norm of r.
double hminus1_norm(const Poisson& solver, const ScalarField& r);
double hminus1_norm(const ScalarField& r);

struct HodgeResult {
  ScalarField E, D;  // E = 0 on boundary nodes, integrate(D) = 0
  VecField rem;      // V - perp_grad(E) - grad(D)
  double rem_rel = 0.0;       // ||rem|| / ||V|| over interior nodes
  double div_rem_rel = 0.0;   // max |div rem| / ||V|| over centered nodes
  double curl_rem_rel = 0.0;  // max |curl rem| / ||V|| over centered nodes
  SolveReport report;
};

// V = perp_grad(E) + grad(D) + rem. The pair (E, D) is the weighted least
// squares solution of the first-order system with interior rows weight 1 and
// boundary rows weight boundary_weight; interior rows are met to ~weight.
class Hodge {
 public:
  explicit Hodge(GridPtr g, double boundary_weight = 1e-10);
  ~Hodge();
  Hodge(Hodge&&) noexcept;
  Hodge& operator=(Hodge&&) noexcept;

  HodgeResult decompose(const VecField& V) const;

 private:
  struct Impl;
  GridPtr g_;
  std::unique_ptr<Impl> impl_;
};

HodgeResult hodge_decompose(const VecField& V);

}  // namespace conslab
