#include "conslab/fields.hpp"

#include <cmath>
#include <string>

#include "conslab/error.hpp"

namespace conslab {

void require_same_grid(const GridPtr& a, const GridPtr& b) {
  if (!a || !b) throw Error("field without grid");
  if (a != b && (a->n != b->n || a->domain != b->domain)) throw Error("grid mismatch");
}

ScalarField::ScalarField(GridPtr g, Eigen::VectorXd values) : grid(std::move(g)), v(std::move(values)) {
  if (v.size() != grid->N) throw Error("scalar field size does not match grid");
}

ScalarField ScalarField::from(GridPtr g, const std::function<double(double, double)>& f) {
  ScalarField s(g);
  for (int k = 0; k < g->N; ++k) s.v[k] = f(g->x[k], g->y[k]);
  return s;
}

VecField::VecField(GridPtr g, Eigen::VectorXd vx, Eigen::VectorXd vy)
    : grid(std::move(g)), x(std::move(vx)), y(std::move(vy)) {
  if (x.size() != grid->N || y.size() != grid->N) throw Error("vector field size does not match grid");
}

MapField::MapField(GridPtr g, Eigen::MatrixXd values, MapConstraint c)
    : grid(std::move(g)), u(std::move(values)), constraint(c) {
  if (u.cols() != grid->N) throw Error("map field size does not match grid");
  if (c == MapConstraint::unit_sphere && sphere_defect() > 1e-12)
    throw Error("unit_sphere constraint violated");
}

double MapField::sphere_defect() const {
  double d = 0.0;
  for (int p : grid->interior_ids) d = std::max(d, std::abs(u.col(p).norm() - 1.0));
  return d;
}

MatField::MatField(GridPtr g, int m, MatVariant variant)
    : grid_(std::move(g)), m_(m), variant_(variant), data_(Eigen::MatrixXd::Zero(m * m, grid_->N)) {
  if (m < 1 || m > kMaxM) throw Error("matrix size must be in [1, " + std::to_string(kMaxM) + "]");
  if (variant == MatVariant::rotation)
    for (int i = 0; i < m; ++i) data_.row(i * m + i).setOnes();
}

MatField MatField::antisym(GridPtr g, int m, const std::function<Eigen::VectorXd(int, int)>& upper) {
  MatField M(std::move(g), m, MatVariant::antisym);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      Eigen::VectorXd v = upper(i, j);
      if (v.size() != M.grid_->N) throw Error("antisym entry size mismatch");
      M.data_.row(i * m + j) = v.transpose();
      M.data_.row(j * m + i) = -v.transpose();
    }
  return M;
}

MatField MatField::identity(GridPtr g, int m) {
  MatField M(std::move(g), m, MatVariant::general);
  for (int i = 0; i < m; ++i) M.data_.row(i * m + i).setOnes();
  return M;
}

MatField MatField::rotation(GridPtr g, Eigen::MatrixXd data, double tol) {
  MatField M;
  M.grid_ = std::move(g);
  M.m_ = static_cast<int>(std::lround(std::sqrt(static_cast<double>(data.rows()))));
  if (M.m_ * M.m_ != data.rows() || data.cols() != M.grid_->N) throw Error("rotation field shape mismatch");
  M.variant_ = MatVariant::rotation;
  M.data_ = std::move(data);
  if (M.orthogonality_defect() > tol) throw Error("rotation variant: P^T P differs from identity");
  return M;
}

MatField MatField::general(GridPtr g, Eigen::MatrixXd data) {
  MatField M;
  M.grid_ = std::move(g);
  M.m_ = static_cast<int>(std::lround(std::sqrt(static_cast<double>(data.rows()))));
  if (M.m_ * M.m_ != data.rows() || data.cols() != M.grid_->N) throw Error("matrix field shape mismatch");
  M.variant_ = MatVariant::general;
  M.data_ = std::move(data);
  return M;
}

SmallMat MatField::at(int p) const {
  SmallMat M(m_, m_);
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j) M(i, j) = data_(i * m_ + j, p);
  return M;
}

void MatField::set_entry(int i, int j, const Eigen::VectorXd& v) {
  if (variant_ == MatVariant::rotation) throw Error("rotation fields are immutable");
  if (variant_ == MatVariant::antisym) {
    if (i == j) throw Error("antisym diagonal is zero");
    data_.row(i * m_ + j) = v.transpose();
    data_.row(j * m_ + i) = -v.transpose();
    return;
  }
  data_.row(i * m_ + j) = v.transpose();
}

void MatField::set_at(int p, const SmallMat& M) {
  if (variant_ == MatVariant::rotation) throw Error("rotation fields are immutable");
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j) {
      if (variant_ == MatVariant::antisym) {
        if (i < j) {
          data_(i * m_ + j, p) = M(i, j);
          data_(j * m_ + i, p) = -M(i, j);
        } else if (i == j) {
          data_(i * m_ + i, p) = 0.0;
        }
      } else {
        data_(i * m_ + j, p) = M(i, j);
      }
    }
}

double MatField::orthogonality_defect() const {
  double d = 0.0;
  for (int p = 0; p < grid_->N; ++p) {
    SmallMat P = at(p);
    SmallMat E = P.transpose() * P;
    E -= SmallMat::Identity(m_, m_);
    d = std::max(d, E.cwiseAbs().maxCoeff());
  }
  return d;
}

double MatField::antisymmetry_defect() const {
  double d = 0.0;
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j)
      d = std::max(d, (data_.row(i * m_ + j) + data_.row(j * m_ + i)).cwiseAbs().maxCoeff());
  return d;
}

Connection::Connection(GridPtr g, int m)
    : grid_(std::move(g)),
      m_(m),
      X_(Eigen::MatrixXd::Zero(m * m, grid_->N)),
      Y_(Eigen::MatrixXd::Zero(m * m, grid_->N)) {
  if (m < 1 || m > kMaxM) throw Error("connection size out of range");
}

Connection Connection::from_upper(GridPtr g, int m, const std::function<VecField(int, int)>& upper) {
  Connection c(g, m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      VecField v = upper(i, j);
      require_same_grid(g, v.grid);
      c.X_.row(i * m + j) = v.x.transpose();
      c.Y_.row(i * m + j) = v.y.transpose();
      c.X_.row(j * m + i) = -v.x.transpose();
      c.Y_.row(j * m + i) = -v.y.transpose();
    }
  return c;
}

Connection Connection::from_arrays(GridPtr g, int m, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
  if (X.rows() != m * m || Y.rows() != m * m || X.cols() != g->N || Y.cols() != g->N)
    throw Error("connection array shape mismatch");
  Connection c(g, m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      c.X_.row(i * m + j) = X.row(i * m + j);
      c.Y_.row(i * m + j) = Y.row(i * m + j);
      c.X_.row(j * m + i) = -X.row(i * m + j);
      c.Y_.row(j * m + i) = -Y.row(i * m + j);
    }
  return c;
}

VecField Connection::entry(int i, int j) const {
  return {grid_, X_.row(i * m_ + j).transpose(), Y_.row(i * m_ + j).transpose()};
}

SmallMat Connection::at_x(int p) const {
  SmallMat M(m_, m_);
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j) M(i, j) = X_(i * m_ + j, p);
  return M;
}

SmallMat Connection::at_y(int p) const {
  SmallMat M(m_, m_);
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j) M(i, j) = Y_(i * m_ + j, p);
  return M;
}

std::vector<std::pair<int, int>> so_basis(int m) {
  std::vector<std::pair<int, int>> b;
  for (int a = 0; a < m; ++a)
    for (int c = a + 1; c < m; ++c) b.emplace_back(a, c);
  return b;
}

}  // namespace conslab
