#include "conslab/elliptic.hpp"

#include <cmath>
#include <vector>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "conslab/error.hpp"

namespace conslab {

using CSpMat = Eigen::SparseMatrix<double>;
using LDLT = Eigen::SimplicialLDLT<CSpMat>;
using CG = Eigen::ConjugateGradient<CSpMat, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>>;

namespace {

double rel_residual(const CSpMat& A, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const double nb = b.norm();
  if (nb == 0.0) return (A * x).norm();
  return (A * x - b).norm() / nb;
}

// Solve A x = b with the configured method; the report carries the true
// relative residual of the returned x.
struct SpdSolver {
  CSpMat A;
  SolverOptions opts;
  LDLT ldlt;
  CG cg;

  void build(CSpMat M, const SolverOptions& o, int n) {
    A = std::move(M);
    opts = o;
    if (opts.max_iter <= 0) opts.max_iter = 20 * n * n;
    if (opts.kind == SolverKind::direct_sparse) {
      ldlt.compute(A);
      if (ldlt.info() != Eigen::Success) throw Error("sparse factorization failed");
    } else {
      cg.setTolerance(opts.tol);
      cg.setMaxIterations(opts.max_iter);
      cg.compute(A);
    }
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& b, SolveReport& rep) const {
    Eigen::VectorXd x;
    rep.solver = opts.kind;
    if (b.squaredNorm() == 0.0) {
      rep.iterations = 0;
      rep.final_residual = 0.0;
      return Eigen::VectorXd::Zero(b.size());
    }
    if (opts.kind == SolverKind::direct_sparse) {
      x = ldlt.solve(b);
      // One refinement step keeps the residual at the 1e-14 level on fine grids.
      x += ldlt.solve(b - A * x);
      rep.iterations = 2;
    } else {
      x = cg.solve(b);
      rep.iterations = static_cast<int>(cg.iterations());
    }
    rep.final_residual = rel_residual(A, x, b);
    if (!(rep.final_residual <= opts.tol)) {
      throw ConvergenceError("Poisson solve did not reach tolerance (residual " + std::to_string(rep.final_residual) +
                             ", iterations " + std::to_string(rep.iterations) + ")");
    }
    return x;
  }
};

}  // namespace

struct Poisson::Impl {
  SpdSolver dir, neu;  // neu is the graph Laplacian with interior position 0 pinned
  CSpMat neu_full;
};

Poisson::Poisson(GridPtr g, SolverOptions opts) : g_(std::move(g)), impl_(std::make_unique<Impl>()) {
  const Grid& G = *g_;
  const int ni = G.Ni();
  const double s = 1.0 / (G.h * G.h);
  std::vector<Eigen::Triplet<double>> td, tn, tnr;
  for (int a = 0; a < ni; ++a) {
    const int p = G.interior_ids[a];
    td.emplace_back(a, a, 4.0 * s);
    int deg = 0;
    for (int q : G.nb[p]) {
      if (q < 0) throw Error("interior node with inactive neighbour");
      const int b = G.interior_pos[q];
      if (b < 0) continue;
      td.emplace_back(a, b, -s);
      tn.emplace_back(a, b, -s);
      if (a > 0 && b > 0) tnr.emplace_back(a - 1, b - 1, -s);
      ++deg;
    }
    tn.emplace_back(a, a, deg * s);
    if (a > 0) tnr.emplace_back(a - 1, a - 1, deg * s);
  }
  CSpMat AD(ni, ni), AN(ni, ni), ANr(ni - 1, ni - 1);
  AD.setFromTriplets(td.begin(), td.end());
  AN.setFromTriplets(tn.begin(), tn.end());
  ANr.setFromTriplets(tnr.begin(), tnr.end());
  impl_->dir.build(std::move(AD), opts, G.n);
  impl_->neu.build(std::move(ANr), opts, G.n);
  impl_->neu_full = std::move(AN);
}

Poisson::~Poisson() = default;
Poisson::Poisson(Poisson&&) noexcept = default;
Poisson& Poisson::operator=(Poisson&&) noexcept = default;

std::pair<ScalarField, SolveReport> Poisson::dirichlet(const ScalarField& f) const {
  require_same_grid(g_, f.grid);
  const Grid& G = *g_;
  Eigen::VectorXd b(G.Ni());
  for (int a = 0; a < G.Ni(); ++a) b[a] = -f.v[G.interior_ids[a]];
  SolveReport rep;
  Eigen::VectorXd x = impl_->dir.solve(b, rep);
  ScalarField phi(g_);
  for (int a = 0; a < G.Ni(); ++a) phi.v[G.interior_ids[a]] = x[a];
  return {std::move(phi), rep};
}

std::pair<ScalarField, SolveReport> Poisson::neumann(const ScalarField& f) const {
  require_same_grid(g_, f.grid);
  const Grid& G = *g_;
  const int ni = G.Ni();
  Eigen::VectorXd b(ni);
  for (int a = 0; a < ni; ++a) b[a] = f.v[G.interior_ids[a]];
  SolveReport rep;
  rep.projection = b.mean();
  b.array() -= rep.projection;
  b = -b;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(ni);
  if (ni > 1) x.tail(ni - 1) = impl_->neu.solve(b.tail(ni - 1), rep);
  rep.final_residual = rel_residual(impl_->neu_full, x, b);
  ScalarField phi(g_);
  for (int a = 0; a < ni; ++a) phi.v[G.interior_ids[a]] = x[a];
  for (int p : G.boundary_ids) {
    double s = 0.0;
    int c = 0;
    for (int q : G.nb[p])
      if (q >= 0 && G.interior[q]) {
        s += phi.v[q];
        ++c;
      }
    phi.v[p] = c > 0 ? s / c : 0.0;
  }
  // Boundary nodes with no interior neighbour (square corners) take the mean
  // of their active neighbours.
  for (int p : G.boundary_ids) {
    bool has_interior = false;
    for (int q : G.nb[p]) has_interior = has_interior || (q >= 0 && G.interior[q]);
    if (has_interior) continue;
    double s = 0.0;
    int c = 0;
    for (int q : G.nb[p])
      if (q >= 0) {
        s += phi.v[q];
        ++c;
      }
    phi.v[p] = c > 0 ? s / c : 0.0;
  }
  phi.v.array() -= integrate(phi) / area(G);
  return {std::move(phi), rep};
}

Eigen::MatrixXd Poisson::dirichlet_rows(const Eigen::MatrixXd& f) const {
  Eigen::MatrixXd out(f.rows(), f.cols());
  for (int r = 0; r < f.rows(); ++r) out.row(r) = dirichlet(ScalarField(g_, f.row(r).transpose())).first.v.transpose();
  return out;
}

Eigen::MatrixXd Poisson::neumann_rows(const Eigen::MatrixXd& f) const {
  Eigen::MatrixXd out(f.rows(), f.cols());
  for (int r = 0; r < f.rows(); ++r) out.row(r) = neumann(ScalarField(g_, f.row(r).transpose())).first.v.transpose();
  return out;
}

std::pair<ScalarField, SolveReport> solve_dirichlet(const ScalarField& f, SolverOptions opts) {
  return Poisson(f.grid, opts).dirichlet(f);
}

std::pair<ScalarField, SolveReport> solve_neumann(const ScalarField& f, SolverOptions opts) {
  return Poisson(f.grid, opts).neumann(f);
}

double hminus1_norm(const Poisson& solver, const ScalarField& r) {
  const Grid& G = *r.grid;
  const ScalarField psi = solver.dirichlet(r).first;
  double s = 0.0;
  for (int p : G.interior_ids) s -= psi.v[p] * r.v[p];
  return std::sqrt(std::max(s, 0.0)) * G.h;
}

double hminus1_norm(const ScalarField& r) { return hminus1_norm(Poisson(r.grid), r); }

// Unknowns: E at interior nodes, then D at every active node except one pinned
// node (the constant mode of D is the only kernel of the weighted system).
struct Hodge::Impl {
  CSpMat K;           // 2N x (Ni + N - 1)
  Eigen::VectorXd W;  // row weights
  CSpMat M;
  LDLT ldlt;
  int pinned = 0;
};

Hodge::Hodge(GridPtr g, double boundary_weight) : g_(std::move(g)), impl_(std::make_unique<Impl>()) {
  const Grid& G = *g_;
  const int N = G.N, ni = G.Ni();
  impl_->pinned = G.interior_ids.front();
  auto dcol = [&](int q) { return ni + (q < impl_->pinned ? q : q - 1); };
  std::vector<Eigen::Triplet<double>> t;
  auto add = [&](const SpMat& D, int row0, double sE, bool e_col) {
    // Row block row0 + p gets sE * D applied to E (interior columns) when
    // e_col, otherwise D applied to D.
    for (int p = 0; p < N; ++p)
      for (SpMat::InnerIterator it(D, p); it; ++it) {
        const int q = static_cast<int>(it.col());
        if (e_col) {
          const int a = G.interior_pos[q];
          if (a >= 0) t.emplace_back(row0 + p, a, sE * it.value());
        } else if (q != impl_->pinned) {
          t.emplace_back(row0 + p, dcol(q), it.value());
        }
      }
  };
  // x rows: -Dy E + Dx D ; y rows: Dx E + Dy D
  add(G.Dy, 0, -1.0, true);
  add(G.Dx, 0, 1.0, false);
  add(G.Dx, N, 1.0, true);
  add(G.Dy, N, 1.0, false);
  impl_->K.resize(2 * N, ni + N - 1);
  impl_->K.setFromTriplets(t.begin(), t.end());
  impl_->W.resize(2 * N);
  for (int p = 0; p < N; ++p) impl_->W[p] = impl_->W[N + p] = G.interior[p] ? 1.0 : boundary_weight;
  impl_->M = impl_->K.transpose() * impl_->W.asDiagonal() * impl_->K;
  impl_->ldlt.compute(impl_->M);
  if (impl_->ldlt.info() != Eigen::Success) throw Error("Hodge factorization failed");
}

Hodge::~Hodge() = default;
Hodge::Hodge(Hodge&&) noexcept = default;
Hodge& Hodge::operator=(Hodge&&) noexcept = default;

HodgeResult Hodge::decompose(const VecField& V) const {
  require_same_grid(g_, V.grid);
  const Grid& G = *g_;
  const int N = G.N, ni = G.Ni();
  const auto& I = *impl_;
  Eigen::VectorXd v(2 * N);
  v << V.x, V.y;
  const Eigen::VectorXd rhs = I.K.transpose() * (I.W.asDiagonal() * v);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(I.K.cols());
  HodgeResult out;
  out.report.solver = SolverKind::direct_sparse;
  // Refinement residuals are formed from K, not from the normal matrix, which
  // keeps the boundary-selected part of the solution accurate.
  for (int it = 0; it < 4; ++it) {
    const Eigen::VectorXd r = I.K.transpose() * (I.W.asDiagonal() * (v - I.K * x));
    x += I.ldlt.solve(r);
    ++out.report.iterations;
  }
  const double nr = rhs.norm();
  out.report.final_residual = nr > 0 ? (I.K.transpose() * (I.W.asDiagonal() * (v - I.K * x))).norm() / nr : 0.0;

  out.E = ScalarField(g_);
  out.D = ScalarField(g_);
  for (int a = 0; a < ni; ++a) out.E.v[G.interior_ids[a]] = x[a];
  for (int q = 0; q < N; ++q) out.D.v[q] = q == I.pinned ? 0.0 : x[ni + (q < I.pinned ? q : q - 1)];
  out.D.v.array() -= integrate(out.D) / area(G);

  const VecField pe = perp_grad(out.E), gd = grad(out.D);
  out.rem = VecField(g_, V.x - pe.x - gd.x, V.y - pe.y - gd.y);
  const double nV = l2_norm(V, Region::interior);
  if (nV > 0) {
    out.rem_rel = l2_norm(out.rem, Region::interior) / nV;
    const ScalarField dr = div(out.rem), cr = curl(out.rem);
    out.div_rem_rel = sup_norm(dr, Region::centered) / nV;
    out.curl_rem_rel = sup_norm(cr, Region::centered) / nV;
  }
  return out;
}

HodgeResult hodge_decompose(const VecField& V) { return Hodge(V.grid).decompose(V); }

}  // namespace conslab
