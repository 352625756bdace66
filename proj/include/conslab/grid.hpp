#pragma once

#include <array>
#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace conslab {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class Domain { disk, square };

// Masked Cartesian grid on [-1,1]^2. Only active nodes (interior plus boundary)
// carry values; all fields are indexed by active-node id.
struct Grid {
  int n = 0;
  double h = 0.0;
  Domain domain = Domain::disk;
  int N = 0;  // active node count

  std::vector<std::array<int, 2>> ij;         // lattice position of each active node
  std::vector<int> index;                      // n*n lattice -> active id, -1 if inactive
  std::vector<std::array<int, 4>> nb;          // +x, -x, +y, -y active neighbour or -1
  std::vector<char> interior;                  // per active node
  std::vector<char> centered;                  // interior with all four neighbours interior
  std::vector<int> interior_ids, boundary_ids;
  std::vector<int> interior_pos;               // active id -> position in interior_ids, -1 on boundary

  Eigen::VectorXd x, y;
  Eigen::VectorXd w;  // quadrature weight: 1 interior, 1/2 boundary

  SpMat Dx, Dy;  // first derivatives on active nodes

  int Ni() const { return static_cast<int>(interior_ids.size()); }
  int id(int i, int j) const {
    if (i < 0 || j < 0 || i >= n || j >= n) return -1;
    return index[static_cast<size_t>(i) * n + j];
  }
};

using GridPtr = std::shared_ptr<const Grid>;

// n odd and >= 17. Disk: interior is x^2+y^2 < 1, boundary the non-interior
// nodes 4-adjacent to it. Square: interior is every non-edge node.
GridPtr make_grid(int n, Domain domain = Domain::disk);

// Lattice-adjacent active pairs (p, q = p + e_axis), each listed once.
struct Edge {
  int p, q, axis;
  double w;  // 1/2 when both ends are boundary nodes, else 1
};
std::vector<Edge> grid_edges(const Grid& g);

}  // namespace conslab
