#pragma once

#include <functional>
#include <utility>

#include <Eigen/Core>

#include "conslab/grid.hpp"

namespace conslab {

// Small dense matrices (m <= 8) live on the stack.
constexpr int kMaxM = 8;
using SmallMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxM, kMaxM>;
using SmallVec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxM, 1>;

struct ScalarField {
  GridPtr grid;
  Eigen::VectorXd v;

  ScalarField() = default;
  explicit ScalarField(GridPtr g) : grid(std::move(g)), v(Eigen::VectorXd::Zero(grid->N)) {}
  ScalarField(GridPtr g, Eigen::VectorXd values);
  static ScalarField from(GridPtr g, const std::function<double(double, double)>& f);
};

struct VecField {
  GridPtr grid;
  Eigen::VectorXd x, y;

  VecField() = default;
  explicit VecField(GridPtr g)
      : grid(std::move(g)), x(Eigen::VectorXd::Zero(grid->N)), y(Eigen::VectorXd::Zero(grid->N)) {}
  VecField(GridPtr g, Eigen::VectorXd vx, Eigen::VectorXd vy);
};

enum class MapConstraint { none, unit_sphere };

// u: m x N, column p is the value at node p.
struct MapField {
  GridPtr grid;
  Eigen::MatrixXd u;
  MapConstraint constraint = MapConstraint::none;

  MapField() = default;
  MapField(GridPtr g, int m) : grid(std::move(g)), u(Eigen::MatrixXd::Zero(m, grid->N)) {}
  MapField(GridPtr g, Eigen::MatrixXd values, MapConstraint c = MapConstraint::none);

  int m() const { return static_cast<int>(u.rows()); }
  ScalarField comp(int k) const { return {grid, u.row(k).transpose()}; }
  // max over interior nodes of | |u| - 1 |
  double sphere_defect() const;
};

enum class MatVariant { general, rotation, antisym };

// m x m matrix per node, stored as an (m*m) x N array; column p holds the
// node matrix in row-major order, entry (i,j) is row i*m+j.
class MatField {
 public:
  MatField() = default;
  MatField(GridPtr g, int m, MatVariant variant = MatVariant::general);
  // Antisymmetric field from its strictly upper entries; lower = -upper exactly.
  static MatField antisym(GridPtr g, int m, const std::function<Eigen::VectorXd(int, int)>& upper);
  static MatField identity(GridPtr g, int m);
  // Validates ||P^T P - id||_inf <= tol at every node.
  static MatField rotation(GridPtr g, Eigen::MatrixXd data, double tol = 1e-10);
  static MatField general(GridPtr g, Eigen::MatrixXd data);

  const GridPtr& grid() const { return grid_; }
  int m() const { return m_; }
  MatVariant variant() const { return variant_; }
  const Eigen::MatrixXd& data() const { return data_; }

  Eigen::VectorXd entry(int i, int j) const { return data_.row(i * m_ + j).transpose(); }
  SmallMat at(int p) const;

  // Mutation keeps the variant invariant: antisym writes both (i,j) and (j,i),
  // rotation fields are immutable.
  void set_entry(int i, int j, const Eigen::VectorXd& v);
  void set_at(int p, const SmallMat& M);

  // Max over nodes of ||M^T M - id||_inf and ||M + M^T||_inf.
  double orthogonality_defect() const;
  double antisymmetry_defect() const;

 private:
  GridPtr grid_;
  int m_ = 0;
  MatVariant variant_ = MatVariant::general;
  Eigen::MatrixXd data_;
};

// so(m)-valued 1-form. Only Omega^i_j with i<j are supplied; the full arrays
// are filled with exact negation, so Omega + Omega^T == 0 bitwise.
class Connection {
 public:
  Connection() = default;
  Connection(GridPtr g, int m);  // zero connection
  static Connection from_upper(GridPtr g, int m, const std::function<VecField(int, int)>& upper);
  static Connection from_arrays(GridPtr g, int m, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y);

  const GridPtr& grid() const { return grid_; }
  int m() const { return m_; }
  // (m*m) x N arrays, same layout as MatField.
  const Eigen::MatrixXd& X() const { return X_; }
  const Eigen::MatrixXd& Y() const { return Y_; }
  VecField entry(int i, int j) const;
  SmallMat at_x(int p) const;
  SmallMat at_y(int p) const;

 private:
  GridPtr grid_;
  int m_ = 0;
  Eigen::MatrixXd X_, Y_;
};

// Index pairs (a,b), a<b, spanning so(m); coordinate c of an antisymmetric X is X(a,b).
std::vector<std::pair<int, int>> so_basis(int m);

void require_same_grid(const GridPtr& a, const GridPtr& b);

}  // namespace conslab
