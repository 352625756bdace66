#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "conslab/elliptic.hpp"
#include "conslab/sampling.hpp"

namespace conslab {

enum class BC { dirichlet, neumann };
BC parse_bc(const std::string& name);
std::string bc_name(BC bc);

struct WenteReport {
  BC bc = BC::dirichlet;
  double norm_grad_a = 0.0, norm_grad_b = 0.0;
  double sup_phi = 0.0, norm_grad_phi = 0.0;
  double hess_l1 = 0.0;  // h^2 sum |D^2 phi| at interior nodes, no bound attached
  double ratio_sup = 0.0, ratio_grad = 0.0;
  bool defined = true;  // false when a or b is constant; ratios are then 0
};

// Delta phi = jacobian(a, b) with the chosen boundary condition.
std::pair<ScalarField, WenteReport> wente_solve(const Poisson& solver, const ScalarField& a, const ScalarField& b,
                                                BC bc = BC::dirichlet);
std::pair<ScalarField, WenteReport> wente_solve(const ScalarField& a, const ScalarField& b, BC bc = BC::dirichlet);

struct WenteRow {
  int sample_id = 0;
  int n = 0;
  double h = 0.0;
  WenteReport report;
};

struct WenteSweepSpec {
  Family family = Family::random;
  int samples = 20;
  std::vector<int> n_list;
  std::uint64_t seed = 0;
  BC bc = BC::dirichlet;
  Domain domain = Domain::disk;
  int jobs = 1;
};

// One row per (n, sample), ordered by n then sample; bit-identical for a fixed
// seed regardless of jobs.
std::vector<WenteRow> wente_sweep(const WenteSweepSpec& spec);

}  // namespace conslab
