#include "conslab/wente.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "conslab/error.hpp"

namespace conslab {

BC parse_bc(const std::string& name) {
  if (name == "dirichlet") return BC::dirichlet;
  if (name == "neumann") return BC::neumann;
  throw Error("unknown boundary condition '" + name + "' (expected dirichlet or neumann)");
}

std::string bc_name(BC bc) { return bc == BC::dirichlet ? "dirichlet" : "neumann"; }

namespace {

double hessian_l1(const ScalarField& phi) {
  const Grid& g = *phi.grid;
  const Eigen::VectorXd pxy = g.Dy * (g.Dx * phi.v);
  const double s = 1.0 / (g.h * g.h);
  double sum = 0.0;
  for (int p : g.interior_ids) {
    const auto& nb = g.nb[p];
    const double xx = (phi.v[nb[0]] - 2.0 * phi.v[p] + phi.v[nb[1]]) * s;
    const double yy = (phi.v[nb[2]] - 2.0 * phi.v[p] + phi.v[nb[3]]) * s;
    sum += std::sqrt(xx * xx + 2.0 * pxy[p] * pxy[p] + yy * yy);
  }
  return sum * g.h * g.h;
}

}  // namespace

std::pair<ScalarField, WenteReport> wente_solve(const Poisson& solver, const ScalarField& a, const ScalarField& b,
                                                BC bc) {
  require_same_grid(a.grid, b.grid);
  require_same_grid(solver.grid(), a.grid);
  const ScalarField J = jacobian(a, b);
  ScalarField phi = bc == BC::dirichlet ? solver.dirichlet(J).first : solver.neumann(J).first;
  WenteReport r;
  r.bc = bc;
  r.norm_grad_a = w12_seminorm(a);
  r.norm_grad_b = w12_seminorm(b);
  r.sup_phi = sup_norm(phi);
  r.norm_grad_phi = w12_seminorm(phi);
  r.hess_l1 = hessian_l1(phi);
  const double den = r.norm_grad_a * r.norm_grad_b;
  r.defined = den > 0.0;
  if (r.defined) {
    r.ratio_sup = r.sup_phi / den;
    r.ratio_grad = r.norm_grad_phi / den;
  }
  return {std::move(phi), r};
}

std::pair<ScalarField, WenteReport> wente_solve(const ScalarField& a, const ScalarField& b, BC bc) {
  return wente_solve(Poisson(a.grid), a, b, bc);
}

std::vector<WenteRow> wente_sweep(const WenteSweepSpec& spec) {
  if (spec.samples < 0) throw Error("samples must be nonnegative");
  std::vector<WenteRow> rows;
  for (int n : spec.n_list) {
    if (spec.samples == 0) continue;
    const GridPtr g = make_grid(n, spec.domain);
    const Poisson solver(g);
    std::vector<WenteRow> block(static_cast<size_t>(spec.samples));
    auto work = [&](int s) {
      SamplePair sp = sample_pair(g, spec.family, spec.seed, s);
      block[static_cast<size_t>(s)] = {s, n, g->h, wente_solve(solver, sp.a, sp.b, spec.bc).second};
    };
    const int jobs = std::max(1, std::min(spec.jobs, spec.samples));
    if (jobs == 1) {
      for (int s = 0; s < spec.samples; ++s) work(s);
    } else {
      std::vector<std::thread> pool;
      std::exception_ptr err;
      std::mutex mu;
      for (int t = 0; t < jobs; ++t)
        pool.emplace_back([&, t] {
          for (int s = t; s < spec.samples; s += jobs) {
            try {
              work(s);
            } catch (...) {
              std::lock_guard<std::mutex> lk(mu);
              if (!err) err = std::current_exception();
            }
          }
        });
      for (auto& th : pool) th.join();
      if (err) std::rethrow_exception(err);
    }
    rows.insert(rows.end(), block.begin(), block.end());
  }
  return rows;
}

}  // namespace conslab
