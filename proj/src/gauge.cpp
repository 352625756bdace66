#include "conslab/gauge.hpp"

#include <cmath>
#include <string>

#include <Eigen/LU>
#include <Eigen/SparseCholesky>

#include "conslab/operators.hpp"

namespace conslab {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor, kMaxM, kMaxM>;
using CSpMat = Eigen::SparseMatrix<double>;

// Node matrix from column p of an (m*m) x N array (row-major per node).
SmallMat node(const Eigen::MatrixXd& a, int m, int p) {
  SmallMat M(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) M(i, j) = a(i * m + j, p);
  return M;
}

void put(Eigen::MatrixXd& a, int m, int p, const SmallMat& M) {
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i * m + j, p) = M(i, j);
}

void require_rotation(const MatField& P) {
  if (P.variant() != MatVariant::rotation) throw Error("gauge: P must be a rotation field");
}

struct Rotated {
  Eigen::MatrixXd M[2];     // full P^T dP + P^T Omega P
  Eigen::MatrixXd PtOP[2];  // P^T Omega P
};

Rotated rotate_full(const Connection& O, const MatField& P) {
  require_same_grid(O.grid(), P.grid());
  if (O.m() != P.m()) throw Error("gauge: size mismatch");
  const Grid& g = *P.grid();
  const int m = P.m();
  Rotated r;
  const Eigen::MatrixXd* Oa[2] = {&O.X(), &O.Y()};
  for (int ax = 0; ax < 2; ++ax) {
    const Eigen::MatrixXd DP = ax == 0 ? dx_rows(g, P.data()) : dy_rows(g, P.data());
    r.M[ax].resize(m * m, g.N);
    r.PtOP[ax].resize(m * m, g.N);
    for (int p = 0; p < g.N; ++p) {
      const SmallMat Pp = node(P.data(), m, p);
      const SmallMat t = Pp.transpose() * node(*Oa[ax], m, p) * Pp;
      put(r.PtOP[ax], m, p, t);
      put(r.M[ax], m, p, Pp.transpose() * node(DP, m, p) + t);
    }
  }
  return r;
}

// Antisymmetric part of a full array, lower triangle filled by exact negation.
Eigen::MatrixXd skew_rows(const Eigen::MatrixXd& M, int m) {
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(M.rows(), M.cols());
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      S.row(i * m + j) = 0.5 * (M.row(i * m + j) - M.row(j * m + i));
      S.row(j * m + i) = -S.row(i * m + j);
    }
  return S;
}

Eigen::MatrixXd sym_rows(const Eigen::MatrixXd& M, int m) {
  Eigen::MatrixXd S(M.rows(), M.cols());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) S.row(i * m + j) = 0.5 * (M.row(i * m + j) + M.row(j * m + i));
  return S;
}

MatField antisym_from_coords(const GridPtr& g, int m, const Eigen::MatrixXd& c) {
  const auto basis = so_basis(m);
  return MatField::antisym(g, m, [&](int i, int j) -> Eigen::VectorXd {
    for (size_t k = 0; k < basis.size(); ++k)
      if (basis[k].first == i && basis[k].second == j) return c.row(static_cast<Eigen::Index>(k)).transpose();
    return Eigen::VectorXd::Zero(g->N);
  });
}

MatField right_multiply_exp(const MatField& P, const MatField& eta) {
  const int m = P.m();
  Eigen::MatrixXd out(m * m, P.grid()->N);
  for (int p = 0; p < P.grid()->N; ++p) put(out, m, p, node(P.data(), m, p) * expm_small(node(eta.data(), m, p)));
  return MatField::rotation(P.grid(), std::move(out), 1e-10);
}

struct Links {
  std::vector<Edge> edges;
  std::vector<SmallMat> U;
};

Links make_links(const Connection& O) {
  const Grid& g = *O.grid();
  const int m = O.m();
  Links L;
  L.edges = grid_edges(g);
  L.U.reserve(L.edges.size());
  for (const Edge& e : L.edges) {
    const Eigen::MatrixXd& A = e.axis == 0 ? O.X() : O.Y();
    L.U.push_back(expm_small(0.5 * g.h * (node(A, m, e.p) + node(A, m, e.q))));
  }
  return L;
}

double link_energy_impl(const Links& L, const MatField& P) {
  const int m = P.m();
  double s = 0.0;
  for (size_t k = 0; k < L.edges.size(); ++k) {
    const Edge& e = L.edges[k];
    const SmallMat X = node(P.data(), m, e.p).transpose() * L.U[k] * node(P.data(), m, e.q);
    s += e.w * (2.0 * m - 2.0 * X.trace());
  }
  return s;
}

// so(m) coordinates (d x N) of the link-energy gradient.
Eigen::MatrixXd link_gradient_coords(const Links& L, const MatField& P) {
  const int m = P.m();
  const auto basis = so_basis(m);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(basis.size()), P.grid()->N);
  for (size_t k = 0; k < L.edges.size(); ++k) {
    const Edge& e = L.edges[k];
    const SmallMat X = node(P.data(), m, e.p).transpose() * L.U[k] * node(P.data(), m, e.q);
    const SmallMat S = skew(X);
    for (size_t c = 0; c < basis.size(); ++c) {
      const double v = 2.0 * e.w * S(basis[c].first, basis[c].second);
      G(static_cast<Eigen::Index>(c), e.p) -= v;
      G(static_cast<Eigen::Index>(c), e.q) += v;
    }
  }
  return G;
}


double interior_conn_norm(const Grid& g, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
  const double a = l2_rows(g, X, Region::interior), b = l2_rows(g, Y, Region::interior);
  return std::sqrt(a * a + b * b);
}

double grad_norm_rows(const Grid& g, const Eigen::MatrixXd& rows) {
  const double a = l2_rows(g, dx_rows(g, rows)), b = l2_rows(g, dy_rows(g, rows));
  return std::sqrt(a * a + b * b);
}

}  // namespace

RotatedConnection rotate_connection(const Connection& O, const MatField& P) {
  require_rotation(P);
  const Rotated r = rotate_full(O, P);
  const int m = P.m();
  RotatedConnection out;
  out.omega = Connection::from_arrays(P.grid(), m, skew_rows(r.M[0], m), skew_rows(r.M[1], m));
  const double a = l2_rows(*P.grid(), sym_rows(r.M[0], m)), b = l2_rows(*P.grid(), sym_rows(r.M[1], m));
  out.sym_defect = std::sqrt(a * a + b * b);
  return out;
}

double gauge_energy(const Connection& O, const MatField& P) {
  const double n = l2_norm(rotate_connection(O, P).omega);
  return n * n;
}

MatField gauge_energy_gradient(const Connection& O, const MatField& P) {
  require_rotation(P);
  const Grid& g = *P.grid();
  const int m = P.m();
  const Rotated r = rotate_full(O, P);
  const double h2 = g.h * g.h;
  Eigen::MatrixXd Gt = Eigen::MatrixXd::Zero(m * m, g.N);
  for (int ax = 0; ax < 2; ++ax) {
    // Local part at p and the stencil part sent back through D^T.
    Eigen::MatrixXd X(m * m, g.N);
    for (int p = 0; p < g.N; ++p) {
      const double wt = 2.0 * g.w[p] * h2;
      const SmallMat M = node(r.M[ax], m, p), S = skew(M);
      const SmallMat Pp = node(P.data(), m, p);
      const SmallMat loc = wt * (-S * M.transpose() + node(r.PtOP[ax], m, p).transpose() * S);
      put(Gt, m, p, node(Gt, m, p) + loc);
      put(X, m, p, wt * Pp * S);
    }
    const SpMat& D = ax == 0 ? g.Dx : g.Dy;
    const Eigen::MatrixXd DtX = (D.transpose() * X.transpose()).transpose();
    for (int q = 0; q < g.N; ++q) put(Gt, m, q, node(Gt, m, q) + node(P.data(), m, q).transpose() * node(DtX, m, q));
  }
  return MatField::antisym(P.grid(), m, [&](int i, int j) -> Eigen::VectorXd {
    return (0.5 * (Gt.row(i * m + j) - Gt.row(j * m + i))).transpose();
  });
}

double link_energy(const Connection& O, const MatField& P) {
  require_rotation(P);
  require_same_grid(O.grid(), P.grid());
  return link_energy_impl(make_links(O), P);
}

MatField link_energy_gradient(const Connection& O, const MatField& P) {
  require_rotation(P);
  require_same_grid(O.grid(), P.grid());
  return antisym_from_coords(P.grid(), P.m(), link_gradient_coords(make_links(O), P));
}

namespace {

struct Certificate {
  Connection rotated;
  double sym_defect = 0.0;
  double residual = 0.0;
};

Certificate certify(const Connection& O, const MatField& P, const MatField& xi) {
  const Grid& g = *P.grid();
  RotatedConnection rc = rotate_connection(O, P);
  const Eigen::MatrixXd rx = rc.omega.X() + dy_rows(g, xi.data());
  const Eigen::MatrixXd ry = rc.omega.Y() - dx_rows(g, xi.data());
  return {std::move(rc.omega), rc.sym_defect, interior_conn_norm(g, rx, ry)};
}

// Gradient part of the Hodge decomposition of each rotated entry. A right
// increment P <- P exp(eta) changes Omega^P by grad(eta) plus a commutator
// that is small with Omega, so eta = -D is a contraction for small energy.
MatField hodge_gradient_part(const Hodge& hodge, const Connection& Op, MatField* xi) {
  const int m = Op.m();
  std::vector<HodgeResult> parts;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) parts.push_back(hodge.decompose(Op.entry(i, j)));
  auto pick = [&](int i, int j) -> const HodgeResult& {
    int k = 0;
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b, ++k)
        if (a == i && b == j) return parts[static_cast<size_t>(k)];
    return parts.front();
  };
  if (xi) *xi = MatField::antisym(Op.grid(), m, [&](int i, int j) -> Eigen::VectorXd { return pick(i, j).E.v; });
  return MatField::antisym(Op.grid(), m, [&](int i, int j) -> Eigen::VectorXd { return -pick(i, j).D.v; });
}

void finalize(GaugeResult& R, const Certificate& cert) {
  const Grid& g = *R.P.grid();
  R.rotated = cert.rotated;
  R.sym_defect = cert.sym_defect;
  R.residual = cert.residual;
  R.residual_rel = R.omega_norm > 0 ? R.residual / R.omega_norm : 0.0;
  const double e = l2_norm(R.rotated);
  R.energy_out = e * e;
  const Eigen::MatrixXd div = dx_rows(g, R.rotated.X()) + dy_rows(g, R.rotated.Y());
  R.div_norm = l2_rows(g, div, Region::centered);
  R.grad_P = grad_norm_rows(g, R.P.data());
  R.grad_xi = grad_norm_rows(g, R.xi.data());
  R.ratio_defined = R.omega_norm > 0;
  R.ratio = R.ratio_defined ? (R.grad_P + R.grad_xi) / R.omega_norm : 0.0;
}

}  // namespace

GaugeResult coulomb_gauge(const Connection& O, const GaugeOptions& opts) {
  const GridPtr& gp = O.grid();
  const Grid& g = *gp;
  const int m = O.m();
  GaugeResult R;
  R.omega = O;
  R.omega_norm = interior_conn_norm(g, O.X(), O.Y());
  {
    const double e = l2_norm(O);
    R.energy_in = e * e;
  }
  if (R.energy_in > opts.eps && !opts.force)
    throw Error("gauge: input energy " + std::to_string(R.energy_in) + " exceeds the smallness threshold eps = " +
                std::to_string(opts.eps) + " (Coulomb gauge needs int |Omega|^2 <= eps(m)); set force to override");
  const double tol_div = opts.tol_div > 0 ? opts.tol_div : 1e-8 * (1.0 + l2_norm(O));
  R.P = MatField(gp, m, MatVariant::rotation);
  R.xi = MatField(gp, m, MatVariant::antisym);

  const Hodge hodge(gp);
  const double target = opts.polish_tol * R.omega_norm;

  // Identity gauge already certified (includes Omega = 0).
  hodge_gradient_part(hodge, O, &R.xi);
  Certificate cert = certify(O, R.P, R.xi);
  if (cert.residual <= target || R.omega_norm == 0.0) {
    finalize(R, cert);
    return R;
  }

  // Phase 1: preconditioned descent of the link energy.
  const Links L = make_links(O);
  CSpMat Lw(g.N, g.N);
  {
    std::vector<Eigen::Triplet<double>> t;
    for (const Edge& e : L.edges) {
      t.emplace_back(e.p, e.p, 2.0 * e.w);
      t.emplace_back(e.q, e.q, 2.0 * e.w);
      t.emplace_back(e.p, e.q, -2.0 * e.w);
      t.emplace_back(e.q, e.p, -2.0 * e.w);
    }
    for (int p = 0; p < g.N; ++p) t.emplace_back(p, p, 1e-3);
    Lw.setFromTriplets(t.begin(), t.end());
  }
  Eigen::SimplicialLDLT<CSpMat> pre(Lw);
  if (pre.info() != Eigen::Success) throw Error("gauge: preconditioner factorization failed");
  double F = link_energy_impl(L, R.P);
  const double F0 = F;
  double tau = opts.step0;
  for (int it = 0; it < opts.max_iter; ++it) {
    const Eigen::MatrixXd G = link_gradient_coords(L, R.P);
    const Eigen::MatrixXd dcoord = (pre.solve(G.transpose())).transpose();
    tau = std::min(tau / opts.backtrack, opts.step0);
    MatField Pn;
    double Fn = F;
    bool accepted = false;
    while (tau >= 1e-12) {
      MatField scaled = antisym_from_coords(gp, m, -tau * dcoord);
      Pn = right_multiply_exp(R.P, scaled);
      Fn = link_energy_impl(L, Pn);
      if (Fn <= F) {
        accepted = true;
        break;
      }
      tau *= opts.backtrack;
    }
    if (!accepted) break;
    const double dec = F - Fn;
    R.P = std::move(Pn);
    F = Fn;
    R.energy_trace.push_back(F);
    R.descent_iters = it + 1;
    if (dec <= 1e-13 * F0) break;
  }

  // Phase 2: remove the remaining gradient part of Omega^P by fixed-point
  // rotation until the certificate stops improving.
  MatField eta = hodge_gradient_part(hodge, rotate_connection(O, R.P).omega, &R.xi);
  cert = certify(O, R.P, R.xi);
  MatField bestP = R.P, bestXi = R.xi;
  Certificate best = cert;
  int stalled = 0;
  for (int it = 0; it < opts.polish_iters && best.residual > target; ++it) {
    R.P = right_multiply_exp(R.P, eta);
    eta = hodge_gradient_part(hodge, rotate_connection(O, R.P).omega, &R.xi);
    cert = certify(O, R.P, R.xi);
    R.polish_iters = it + 1;
    if (cert.residual < best.residual) {
      stalled = cert.residual > 0.9 * best.residual ? stalled + 1 : 0;
      best = cert;
      bestP = R.P;
      bestXi = R.xi;
    } else {
      ++stalled;
    }
    if (stalled >= 3) break;
  }
  R.P = std::move(bestP);
  R.xi = std::move(bestXi);
  finalize(R, best);
  if (!(R.div_norm <= tol_div))
    throw GaugeError("gauge: ||div Omega^P|| = " + std::to_string(R.div_norm) + " above tol_div = " +
                         std::to_string(tol_div) + " after " + std::to_string(R.descent_iters) + " descent and " +
                         std::to_string(R.polish_iters) + " fixed-point steps",
                     R);
  return R;
}

GaugeVerification verify_gauge(const GaugeResult& r) {
  GaugeVerification v;
  const Grid& g = *r.P.grid();
  const int m = r.P.m();
  v.orthogonality = r.P.orthogonality_defect();
  v.rotation_ok = v.orthogonality <= 1e-10;
  for (int p = 0; p < g.N; ++p) v.det_defect = std::max(v.det_defect, std::abs(node(r.P.data(), m, p).determinant() - 1.0));
  v.det_ok = v.det_defect <= 1e-10;
  v.xi_antisym_ok = r.xi.antisymmetry_defect() == 0.0;
  v.xi_boundary_ok = true;
  for (int p : g.boundary_ids) v.xi_boundary_ok = v.xi_boundary_ok && r.xi.data().col(p).cwiseAbs().maxCoeff() == 0.0;
  if (!v.rotation_ok) return v;
  const MatField P = MatField::rotation(r.P.grid(), r.P.data(), 1e-10);
  const Certificate c = certify(r.omega, P, r.xi);
  const double ein = [&] { const double e = l2_norm(r.omega); return e * e; }();
  const double eout = [&] { const double e = l2_norm(c.rotated); return e * e; }();
  v.energy_ok = eout <= ein + 1e-10;
  const double on = interior_conn_norm(g, r.omega.X(), r.omega.Y());
  v.residual = c.residual;
  v.residual_rel = on > 0 ? c.residual / on : 0.0;
  v.ratio_defined = on > 0;
  v.ratio = v.ratio_defined ? (grad_norm_rows(g, P.data()) + grad_norm_rows(g, r.xi.data())) / on : 0.0;
  return v;
}

}  // namespace conslab
