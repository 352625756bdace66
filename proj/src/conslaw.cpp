#include "conslab/conslaw.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/LU>
#include <Eigen/SVD>
#include <Eigen/SparseCholesky>

#include "conslab/operators.hpp"
#include "conslab/targets.hpp"

namespace conslab {

namespace {

using CSpMat = Eigen::SparseMatrix<double>;

SmallMat node(const Eigen::MatrixXd& a, int m, int p) {
  SmallMat M(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) M(i, j) = a(i * m + j, p);
  return M;
}

// Nodewise product of two (m*m) x N arrays.
Eigen::MatrixXd mm_rows(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, int m) {
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(m * m, A.cols());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) C.row(i * m + j).array() += A.row(i * m + k).array() * B.row(k * m + j).array();
  return C;
}

double pair_norm(const Grid& g, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, Region r) {
  const double a = l2_rows(g, X, r), b = l2_rows(g, Y, r);
  return std::sqrt(a * a + b * b);
}

double grad_norm_rows(const Grid& g, const Eigen::MatrixXd& rows) {
  return pair_norm(g, dx_rows(g, rows), dy_rows(g, rows), Region::closure);
}

Eigen::MatrixXd interior_only(const Grid& g, Eigen::MatrixXd r) {
  for (int p : g.boundary_ids) r.col(p).setZero();
  return r;
}

// Weighted least squares for grad Ahat_row - grad^perp B_row P = F_row, one
// matrix row at a time. Unknowns: Ahat_j on all nodes (one pinned node per
// column), B_k on interior nodes.
class TwistedSolver {
 public:
  TwistedSolver(const MatField& P, double mu) : g_(*P.grid()), m_(P.m()) {
    const Grid& g = g_;
    const int N = g.N, ni = g.Ni(), m = m_;
    pinned_ = g.interior_ids.front();
    ncol_ = m * (N - 1) + m * ni;
    std::vector<Eigen::Triplet<double>> t;
    for (int j = 0; j < m; ++j)
      for (int c = 0; c < 2; ++c) {
        const SpMat& G = c == 0 ? g.Dx : g.Dy;
        // grad^perp = (-Dy, Dx)
        const SpMat& Dp = c == 0 ? g.Dy : g.Dx;
        const double sp = c == 0 ? -1.0 : 1.0;
        const int row0 = (2 * j + c) * N;
        for (int p = 0; p < N; ++p) {
          for (SpMat::InnerIterator it(G, p); it; ++it) {
            const int col = acol(j, static_cast<int>(it.col()));
            if (col >= 0) t.emplace_back(row0 + p, col, it.value());
          }
          for (SpMat::InnerIterator it(Dp, p); it; ++it) {
            const int b = g.interior_pos[static_cast<int>(it.col())];
            if (b < 0) continue;
            for (int k = 0; k < m; ++k) {
              const double v = -sp * it.value() * P.data()(k * m + j, p);
              if (v != 0.0) t.emplace_back(row0 + p, bcol(k, b), v);
            }
          }
        }
      }
    K_.resize(2 * m * N, ncol_);
    K_.setFromTriplets(t.begin(), t.end());
    W_.resize(2 * m * N);
    for (int r = 0; r < 2 * m; ++r)
      for (int p = 0; p < N; ++p) W_[r * N + p] = g.interior[p] ? 1.0 : mu;
    const CSpMat M = K_.transpose() * W_.asDiagonal() * K_;
    ldlt_.compute(M);
    if (ldlt_.info() != Eigen::Success) throw Error("build_AB: factorization failed");
  }

  // F: rows (2j + c) * N + p hold F_c[row, j](p).
  void solve(const Eigen::VectorXd& v, Eigen::MatrixXd& Ahat_row, Eigen::MatrixXd& B_row) const {
    const Grid& g = g_;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(ncol_);
    if (v.squaredNorm() > 0.0) {
      for (int it = 0; it < 4; ++it) x += ldlt_.solve(K_.transpose() * (W_.asDiagonal() * (v - K_ * x)));
    }
    Ahat_row = Eigen::MatrixXd::Zero(m_, g.N);
    B_row = Eigen::MatrixXd::Zero(m_, g.N);
    for (int j = 0; j < m_; ++j)
      for (int p = 0; p < g.N; ++p) {
        const int c = acol(j, p);
        if (c >= 0) Ahat_row(j, p) = x[c];
      }
    for (int k = 0; k < m_; ++k)
      for (int b = 0; b < g.Ni(); ++b) B_row(k, g.interior_ids[b]) = x[bcol(k, b)];
  }

 private:
  int acol(int j, int q) const {
    if (q == pinned_) return -1;
    return j * (g_.N - 1) + (q < pinned_ ? q : q - 1);
  }
  int bcol(int k, int b) const { return m_ * (g_.N - 1) + k * g_.Ni() + b; }

  const Grid& g_;
  int m_;
  int pinned_ = 0;
  int ncol_ = 0;
  CSpMat K_;
  Eigen::VectorXd W_;
  Eigen::SimplicialLDLT<CSpMat> ldlt_;
};

}  // namespace

ABResult build_AB(const Connection& O, const GaugeResult& gauge, const ABOptions& opts) {
  require_same_grid(O.grid(), gauge.P.grid());
  const GridPtr& gp = O.grid();
  const Grid& g = *gp;
  const int m = O.m();
  const int N = g.N;
  const MatField& P = gauge.P;
  const Eigen::MatrixXd px = -dy_rows(g, gauge.xi.data()), py = dx_rows(g, gauge.xi.data());
  const TwistedSolver solver(P, opts.boundary_weight);
  const Eigen::MatrixXd I = MatField::identity(gp, m).data();
  const double wsum = g.w.sum();

  ABResult R;
  Eigen::MatrixXd Ah = Eigen::MatrixXd::Zero(m * m, N), Bm = Eigen::MatrixXd::Zero(m * m, N);
  int growth = 0;
  double last = 0.0;
  for (int s = 0; s < opts.max_sweeps; ++s) {
    const Eigen::MatrixXd At = Ah + I;
    const Eigen::MatrixXd Fx = mm_rows(At, px, m), Fy = mm_rows(At, py, m);
    Eigen::MatrixXd An(m * m, N), Bn(m * m, N);
    for (int i = 0; i < m; ++i) {
      Eigen::VectorXd v(2 * m * N);
      for (int j = 0; j < m; ++j) {
        v.segment((2 * j) * N, N) = Fx.row(i * m + j).transpose();
        v.segment((2 * j + 1) * N, N) = Fy.row(i * m + j).transpose();
      }
      Eigen::MatrixXd ar, br;
      solver.solve(v, ar, br);
      An.middleRows(i * m, m) = ar;
      Bn.middleRows(i * m, m) = br;
    }
    // Normalization: weighted mean of Ahat is zero, i.e. mean(Atilde) = id.
    for (int r = 0; r < m * m; ++r) An.row(r).array() -= An.row(r).dot(g.w) / wsum;
    const double num = std::sqrt((An - Ah).squaredNorm() + (Bn - Bm).squaredNorm());
    const double den = std::sqrt(An.squaredNorm() + Bn.squaredNorm());
    const double upd = den > 0 ? num / den : 0.0;
    Ah = std::move(An);
    Bm = std::move(Bn);
    R.trace.push_back(upd);
    R.fp_iters = s + 1;
    if (upd <= opts.tol_fp) break;
    growth = (s > 0 && upd > last) ? growth + 1 : 0;
    last = upd;
    if (growth >= 5)
      throw ConvergenceError("build_AB: fixed-point updates grew for 5 consecutive sweeps; the smallness hypothesis on "
                             "int |Omega|^2 is likely violated");
  }
  if (R.trace.back() > opts.tol_fp)
    throw ConvergenceError("build_AB: no convergence in " + std::to_string(opts.max_sweeps) + " sweeps (update " +
                           std::to_string(R.trace.back()) + ")");

  const Eigen::MatrixXd At = Ah + I;
  R.Ahat = MatField::general(gp, Ah);
  R.B = MatField::general(gp, Bm);
  R.A = matmul(MatField::general(gp, At), transpose(P));
  // Re-substituted first-order defect.
  {
    const Eigen::MatrixXd BPx = mm_rows(-dy_rows(g, Bm), P.data(), m), BPy = mm_rows(dx_rows(g, Bm), P.data(), m);
    const Eigen::MatrixXd rx = dx_rows(g, At) - BPx - mm_rows(At, px, m);
    const Eigen::MatrixXd ry = dy_rows(g, At) - BPy - mm_rows(At, py, m);
    R.fp_residual = pair_norm(g, rx, ry, Region::interior);
  }
  const double on = pair_norm(g, O.X(), O.Y(), Region::interior);
  R.fp_residual_rel = on > 0 ? R.fp_residual / on : 0.0;
  for (int r = 0; r < m * m; ++r) R.mean_defect = std::max(R.mean_defect, std::abs(At.row(r).dot(g.w) / wsum - I(r, 0)));
  R.grad_A = grad_norm_rows(g, R.A.data());
  R.grad_B = grad_norm_rows(g, Bm);
  R.ratio_defined = on > 0;
  R.ratio = R.ratio_defined ? (R.grad_A + R.grad_B) / on : 0.0;
  R.dist_SO = dist_SO(R.A, &R.min_singular);
  return R;
}

double gauge_relation_residual(const MatField& A, const MatField& B, const Connection& O) {
  require_same_grid(A.grid(), O.grid());
  require_same_grid(B.grid(), O.grid());
  const Grid& g = *O.grid();
  const int m = O.m();
  if (A.m() != m || B.m() != m) throw Error("gauge_relation_residual size mismatch");
  const Eigen::MatrixXd rx = dx_rows(g, A.data()) - mm_rows(A.data(), O.X(), m) - (-dy_rows(g, B.data()));
  const Eigen::MatrixXd ry = dy_rows(g, A.data()) - mm_rows(A.data(), O.Y(), m) - dx_rows(g, B.data());
  return pair_norm(g, rx, ry, Region::interior);
}

Eigen::MatrixXd conservation_rows(const MapField& u, const MatField& A, const MatField& B) {
  require_same_grid(u.grid, A.grid());
  require_same_grid(u.grid, B.grid());
  const Grid& g = *u.grid;
  const int m = u.m();
  if (A.m() != m || B.m() != m) throw Error("conservation_residual size mismatch");
  const Eigen::MatrixXd ux = dx_rows(g, u.u), uy = dy_rows(g, u.u);
  Eigen::MatrixXd Vx = Eigen::MatrixXd::Zero(m, g.N), Vy = Eigen::MatrixXd::Zero(m, g.N);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const auto a = A.data().row(i * m + j).array(), b = B.data().row(i * m + j).array();
      Vx.row(i).array() += a * ux.row(j).array() - b * uy.row(j).array();
      Vy.row(i).array() += a * uy.row(j).array() + b * ux.row(j).array();
    }
  return interior_only(g, dx_rows(g, Vx) + dy_rows(g, Vy));
}

ConsResidual conservation_residual(const Poisson& solver, const MapField& u, const MatField& A, const MatField& B) {
  const Eigen::MatrixXd r = conservation_rows(u, A, B);
  return {l2_rows(*u.grid, r, Region::interior), hminus1_rows(solver, r)};
}

ConsResidual conservation_residual(const MapField& u, const MatField& A, const MatField& B) {
  return conservation_residual(Poisson(u.grid), u, A, B);
}

ConsResidual shatah_residual(const Poisson& solver, const MapField& u) {
  const Grid& g = *u.grid;
  const int m = u.m();
  const Eigen::MatrixXd ux = dx_rows(g, u.u), uy = dy_rows(g, u.u);
  Eigen::MatrixXd r(m * (m - 1) / 2, g.N);
  int k = 0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j, ++k) {
      const Eigen::RowVectorXd vx = (u.u.row(i).array() * ux.row(j).array() - u.u.row(j).array() * ux.row(i).array()).matrix();
      const Eigen::RowVectorXd vy = (u.u.row(i).array() * uy.row(j).array() - u.u.row(j).array() * uy.row(i).array()).matrix();
      r.row(k) = (g.Dx * vx.transpose() + g.Dy * vy.transpose()).transpose();
    }
  r = interior_only(g, std::move(r));
  return {l2_rows(g, r, Region::interior), hminus1_rows(solver, r)};
}

MatField stream_potential(const Hodge& hodge, const Connection& O) {
  const int m = O.m();
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m * m, O.grid()->N);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      // grad^perp B = -Omega  <=>  grad B = (-Omega_y, Omega_x)
      const VecField e = O.entry(i, j);
      const ScalarField D = hodge.decompose(VecField(O.grid(), -e.y, e.x)).D;
      B.row(i * m + j) = D.v.transpose();
      B.row(j * m + i) = -D.v.transpose();
    }
  return MatField::general(O.grid(), std::move(B));
}

double weighted_pde_residual(const MapField& u, const MatField& A, const Connection& O) {
  const Grid& g = *u.grid;
  const int m = u.m();
  const Eigen::MatrixXd r = lap5_rows(g, u.u) + connection_apply(O, u).u;
  Eigen::MatrixXd Ar = Eigen::MatrixXd::Zero(m, g.N);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) Ar.row(i).array() += A.data().row(i * m + j).array() * r.row(j).array();
  return l2_rows(g, interior_only(g, Ar), Region::interior);
}

RegularityReport regularity_demo(const MapField& u, const MatField& A, const MatField& B) {
  require_same_grid(u.grid, A.grid());
  const GridPtr& gp = u.grid;
  const Grid& g = *gp;
  const int m = u.m();
  const Eigen::MatrixXd ux = dx_rows(g, u.u), uy = dy_rows(g, u.u);
  std::vector<Eigen::PartialPivLU<SmallMat>> inv;
  inv.reserve(static_cast<size_t>(g.N));
  for (int p = 0; p < g.N; ++p) {
    const SmallMat Ap = node(A.data(), m, p);
    Eigen::JacobiSVD<SmallMat> svd(Ap);
    const double smin = svd.singularValues().minCoeff();
    if (!(smin > 1e-12 * std::max(1.0, svd.singularValues().maxCoeff())))
      throw Error("regularity_demo: A is singular at node " + std::to_string(p) + " (x = " + std::to_string(g.x[p]) +
                  ", y = " + std::to_string(g.y[p]) + ")");
    inv.emplace_back(Ap);
  }
  RegularityReport rep;
  const Hodge hodge(gp);
  Eigen::MatrixXd Gx(m, g.N), Gy(m, g.N), Vx = Eigen::MatrixXd::Zero(m, g.N), Vy = Eigen::MatrixXd::Zero(m, g.N);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      Vx.row(i).array() += A.data().row(i * m + j).array() * ux.row(j).array();
      Vy.row(i).array() += A.data().row(i * m + j).array() * uy.row(j).array();
    }
    const HodgeResult h = hodge.decompose(VecField(gp, Vx.row(i).transpose(), Vy.row(i).transpose()));
    rep.rem_rel = std::max(rep.rem_rel, h.rem_rel);
    Gx.row(i) = (-(g.Dy * h.E.v) + g.Dx * h.D.v).transpose();
    Gy.row(i) = (g.Dx * h.E.v + g.Dy * h.D.v).transpose();
  }
  Eigen::MatrixXd ex(m, g.N), ey(m, g.N);
  for (int p = 0; p < g.N; ++p) {
    ex.col(p) = inv[static_cast<size_t>(p)].solve(SmallVec(Gx.col(p))) - ux.col(p);
    ey.col(p) = inv[static_cast<size_t>(p)].solve(SmallVec(Gy.col(p))) - uy.col(p);
  }
  const double gu = pair_norm(g, ux, uy, Region::interior);
  rep.reconstruction_rel = gu > 0 ? pair_norm(g, ex, ey, Region::interior) / gu : 0.0;

  // div(A grad u) + grad B . grad^perp u, grad^perp = (-d_y, d_x)
  {
    Eigen::MatrixXd s = dx_rows(g, Vx) + dy_rows(g, Vy);
    const Eigen::MatrixXd bx = dx_rows(g, B.data()), by = dy_rows(g, B.data());
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        s.row(i).array() += bx.row(i * m + j).array() * (-uy.row(j).array()) + by.row(i * m + j).array() * ux.row(j).array();
    rep.structure_l2 = l2_rows(g, interior_only(g, s), Region::interior);
  }

  // Oscillation over balls of radius 2^-k, k = 1..4, centred at interior nodes.
  for (int k = 1; k <= 4; ++k) {
    const double r = std::ldexp(1.0, -k);
    const int reach = static_cast<int>(std::floor(r / g.h));
    double osc = 0.0;
    for (int p : g.interior_ids) {
      const auto [i0, j0] = g.ij[p];
      for (int di = -reach; di <= reach; ++di)
        for (int dj = -reach; dj <= reach; ++dj) {
          if ((di * di + dj * dj) * g.h * g.h > r * r) continue;
          const int q = g.id(i0 + di, j0 + dj);
          if (q < 0 || !g.interior[q]) continue;
          osc = std::max(osc, (u.u.col(q) - u.u.col(p)).norm());
        }
    }
    rep.radii.push_back(r);
    rep.oscillation.push_back(osc);
  }
  return rep;
}

double dist_SO(const MatField& A, double* min_singular) {
  const Grid& g = *A.grid();
  const int m = A.m();
  double d = 0.0, smin = std::numeric_limits<double>::infinity();
  for (int p = 0; p < g.N; ++p) {
    const SmallMat Ap = node(A.data(), m, p);
    Eigen::JacobiSVD<SmallMat> svd(Ap, Eigen::ComputeFullU | Eigen::ComputeFullV);
    smin = std::min(smin, svd.singularValues().minCoeff());
    if (!g.interior[p]) continue;
    double dp;
    if (Ap.determinant() > 0.0) {
      SmallMat Q = Ap;
      for (int it = 0; it < 50; ++it) {
        const SmallMat Qn = 0.5 * (Q + Q.inverse().transpose());
        const double ch = (Qn - Q).cwiseAbs().maxCoeff();
        Q = Qn;
        if (ch < 1e-15) break;
      }
      dp = (Ap - Q).norm();
    } else {
      // Nearest rotation flips the smallest singular direction.
      SmallVec s = svd.singularValues();
      s[m - 1] = -s[m - 1];
      dp = std::sqrt((s.array() - 1.0).square().sum());
    }
    d = std::max(d, dp);
  }
  if (min_singular) *min_singular = smin;
  return d;
}

}  // namespace conslab
