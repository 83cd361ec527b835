#pragma once

#include <utility>
#include <vector>

#include "jacobirl/matrix.hpp"

namespace jacobirl {

// Unweighted lattice graph over the upper triangle (diagonal included) of a
// symmetric matrix. Node v holds the entry at cell coords[v] = (i,j), i <= j,
// in upper_index order; edges join cells adjacent along a row or a column
// when both endpoints lie in the triangle.
struct LatticeGraph {
  int n = 0;
  std::vector<double> node_values;              // size n(n+1)/2, upper_index order
  std::vector<std::pair<int, int>> coords;      // (i,j) per node
  std::vector<std::pair<int, int>> edges;       // undirected, node ids a < b
  std::vector<std::vector<int>> neighbors;      // adjacency lists

  int num_nodes() const { return static_cast<int>(node_values.size()); }
};

inline LatticeGraph build_graph(const SymmetricMatrix& m) {
  const int n = m.n();
  LatticeGraph g;
  g.n = n;
  g.node_values.resize(upper_count(n));
  g.coords.resize(upper_count(n));
  g.neighbors.resize(upper_count(n));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const int v = upper_index(i, j, n);
      g.node_values[v] = m.at(i, j);
      g.coords[v] = {i, j};
    }
  auto connect = [&g](int a, int b) {
    g.edges.emplace_back(std::min(a, b), std::max(a, b));
    g.neighbors[a].push_back(b);
    g.neighbors[b].push_back(a);
  };
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const int v = upper_index(i, j, n);
      if (j + 1 < n) connect(v, upper_index(i, j + 1, n));      // right neighbor
      if (i + 1 <= j) connect(v, upper_index(i + 1, j, n));     // down neighbor
    }
  return g;
}

}  // namespace jacobirl
