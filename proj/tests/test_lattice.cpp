#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "jacobirl/lattice.hpp"

using namespace jacobirl;

namespace {
// oracle: enumerate all cell pairs at lattice distance one inside the triangle
int count_lattice_edges(int n) {
  int edges = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      if (j + 1 < n) ++edges;             // (i,j)-(i,j+1), stays upper since i <= j < j+1
      if (i + 1 <= j) ++edges;            // (i,j)-(i+1,j) requires i+1 <= j
    }
  return edges;
}
}  // namespace

TEST_CASE("n=2 graph shape") {
  const LatticeGraph g = build_graph(generate_random_symmetric(2, 1));
  CHECK(g.num_nodes() == 3);
  CHECK(g.edges.size() == 2);
}

TEST_CASE("edge counts match exhaustive enumeration") {
  for (int n = 2; n <= 12; ++n) {
    const LatticeGraph g = build_graph(generate_random_symmetric(n, 5));
    CHECK(g.num_nodes() == upper_count(n));
    CHECK(static_cast<int>(g.edges.size()) == count_lattice_edges(n));
    // closed form: n(n-1) lattice-neighbor pairs inside the triangle
    CHECK(static_cast<int>(g.edges.size()) == n * (n - 1));
  }
}

TEST_CASE("edges are undirected and stay in the triangle") {
  const LatticeGraph g = build_graph(generate_random_symmetric(6, 9));
  std::set<std::pair<int, int>> seen;
  for (auto [a, b] : g.edges) {
    CHECK(a < b);
    CHECK(seen.insert({a, b}).second);
    const auto [ai, aj] = g.coords[a];
    const auto [bi, bj] = g.coords[b];
    CHECK(std::abs(ai - bi) + std::abs(aj - bj) == 1);
    CHECK(ai <= aj);
    CHECK(bi <= bj);
  }
  for (int v = 0; v < g.num_nodes(); ++v)
    for (int u : g.neighbors[v]) CHECK(u != v);
}

TEST_CASE("node values round-trip to the matrix through upper_index") {
  const SymmetricMatrix m = generate_random_symmetric(5, 77);
  const LatticeGraph g = build_graph(m);
  for (int i = 0; i < 5; ++i)
    for (int j = i; j < 5; ++j) {
      const int v = upper_index(i, j, 5);
      CHECK(g.node_values[v] == m.at(i, j));
      CHECK(g.coords[v] == std::make_pair(i, j));
    }
}
