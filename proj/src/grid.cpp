#include "conslab/grid.hpp"

#include <string>
#include <vector>

#include "conslab/error.hpp"

namespace conslab {

namespace {

// Centered where both neighbours are active, otherwise one-sided second
// order, then first order, then zero.
SpMat derivative(const Grid& g, int axis) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<size_t>(g.N) * 3);
  const double s = 1.0 / g.h;
  for (int k = 0; k < g.N; ++k) {
    auto [i, j] = g.ij[k];
    auto at = [&](int step) {
      return axis == 0 ? g.id(i + step, j) : g.id(i, j + step);
    };
    const int p = at(1), m = at(-1);
    if (p >= 0 && m >= 0) {
      t.emplace_back(k, p, 0.5 * s);
      t.emplace_back(k, m, -0.5 * s);
    } else if (p >= 0) {
      const int p2 = at(2);
      if (p2 >= 0) {
        t.emplace_back(k, k, -1.5 * s);
        t.emplace_back(k, p, 2.0 * s);
        t.emplace_back(k, p2, -0.5 * s);
      } else {
        t.emplace_back(k, k, -s);
        t.emplace_back(k, p, s);
      }
    } else if (m >= 0) {
      const int m2 = at(-2);
      if (m2 >= 0) {
        t.emplace_back(k, k, 1.5 * s);
        t.emplace_back(k, m, -2.0 * s);
        t.emplace_back(k, m2, 0.5 * s);
      } else {
        t.emplace_back(k, k, s);
        t.emplace_back(k, m, -s);
      }
    }
  }
  SpMat D(g.N, g.N);
  D.setFromTriplets(t.begin(), t.end());
  D.makeCompressed();
  return D;
}

}  // namespace

GridPtr make_grid(int n, Domain domain) {
  if (n % 2 == 0) throw Error("n must be odd (got " + std::to_string(n) + ")");
  if (n < 17) throw Error("n must be at least 17 (got " + std::to_string(n) + ")");

  auto g = std::make_shared<Grid>();
  g->n = n;
  g->h = 2.0 / (n - 1);
  g->domain = domain;

  // Lattice coordinates are symmetric about the centre: x_i = (2i - (n-1)) / (n-1).
  auto coord = [n](int i) { return static_cast<double>(2 * i - (n - 1)) / (n - 1); };

  std::vector<char> inner(static_cast<size_t>(n) * n, 0), act(static_cast<size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const size_t k = static_cast<size_t>(i) * n + j;
      if (domain == Domain::disk) {
        const double x = coord(i), y = coord(j);
        inner[k] = x * x + y * y < 1.0;
      } else {
        inner[k] = i > 0 && j > 0 && i < n - 1 && j < n - 1;
      }
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const size_t k = static_cast<size_t>(i) * n + j;
      if (domain == Domain::square || inner[k]) {
        act[k] = 1;
        continue;
      }
      const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
      for (int s = 0; s < 4; ++s) {
        const int a = i + di[s], b = j + dj[s];
        if (a >= 0 && b >= 0 && a < n && b < n && inner[static_cast<size_t>(a) * n + b]) act[k] = 1;
      }
    }

  g->index.assign(static_cast<size_t>(n) * n, -1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (act[static_cast<size_t>(i) * n + j]) {
        g->index[static_cast<size_t>(i) * n + j] = g->N++;
        g->ij.push_back({i, j});
        g->interior.push_back(inner[static_cast<size_t>(i) * n + j]);
      }

  g->x.resize(g->N);
  g->y.resize(g->N);
  g->w.resize(g->N);
  g->nb.resize(g->N);
  g->interior_pos.assign(g->N, -1);
  for (int k = 0; k < g->N; ++k) {
    auto [i, j] = g->ij[k];
    g->x[k] = coord(i);
    g->y[k] = coord(j);
    g->w[k] = g->interior[k] ? 1.0 : 0.5;
    g->nb[k] = {g->id(i + 1, j), g->id(i - 1, j), g->id(i, j + 1), g->id(i, j - 1)};
    if (g->interior[k]) {
      g->interior_pos[k] = static_cast<int>(g->interior_ids.size());
      g->interior_ids.push_back(k);
    } else {
      g->boundary_ids.push_back(k);
    }
  }
  g->centered.assign(g->N, 0);
  for (int k = 0; k < g->N; ++k) {
    if (!g->interior[k]) continue;
    bool all = true;
    for (int q : g->nb[k]) all = all && q >= 0 && g->interior[q];
    g->centered[k] = all;
  }

  g->Dx = derivative(*g, 0);
  g->Dy = derivative(*g, 1);
  return g;
}

std::vector<Edge> grid_edges(const Grid& g) {
  std::vector<Edge> e;
  e.reserve(static_cast<size_t>(g.N) * 2);
  for (int p = 0; p < g.N; ++p)
    for (int axis = 0; axis < 2; ++axis) {
      const int q = g.nb[p][axis == 0 ? 0 : 2];
      if (q < 0) continue;
      const double w = (g.interior[p] || g.interior[q]) ? 1.0 : 0.5;
      e.push_back({p, q, axis, w});
    }
  return e;
}

}  // namespace conslab
