#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "jacobirl/matrix.hpp"
#include "oracles.hpp"

using namespace jacobirl;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
SymmetricMatrix mat2(double a, double b, double c) {
  return SymmetricMatrix(2, {a, b, b, c});
}
}  // namespace

TEST_CASE("construction enforces the invariants") {
  CHECK_THROWS_AS(SymmetricMatrix(1, {1.0}), DimensionMismatch);
  CHECK_THROWS_AS(SymmetricMatrix(2, {1, 2, 3}), DimensionMismatch);
  CHECK_THROWS_AS(SymmetricMatrix(2, {1, 2, 2.0000001, 1}), DimensionMismatch);
  const SymmetricMatrix m = mat2(1, 2, 3);
  CHECK(m.tol() > 0.0);
}

TEST_CASE("compute_givens on the all-ones 2x2") {
  const SymmetricMatrix m = mat2(1, 1, 1);
  const GivensRotation g = compute_givens(m, {0, 1});
  CHECK_THAT(g.c, WithinAbs(1.0 / std::sqrt(2.0), 1e-15));
  CHECK_THAT(g.s, WithinAbs(1.0 / std::sqrt(2.0), 1e-15));
  CHECK_THAT(g.c * g.c + g.s * g.s, WithinAbs(1.0, 1e-12));
  const SymmetricMatrix r = apply_rotation(m, g);
  // eigenvalues of the all-ones 2x2 are 0 and 2
  const auto d = oracles::sorted_diagonal(r);
  CHECK_THAT(d[0], WithinAbs(0.0, 1e-12));
  CHECK_THAT(d[1], WithinAbs(2.0, 1e-12));
  CHECK_THAT(r.at(0, 1), WithinAbs(0.0, 1e-12));
}

TEST_CASE("rotation diagonal for [[2,1],[1,2]] is {1,3}") {
  const SymmetricMatrix m = mat2(2, 1, 2);
  const SymmetricMatrix r = apply_rotation(m, compute_givens(m, {0, 1}));
  const auto d = oracles::sorted_diagonal(r);
  CHECK_THAT(d[0], WithinAbs(1.0, 1e-12));
  CHECK_THAT(d[1], WithinAbs(3.0, 1e-12));
}

TEST_CASE("off-norm drop at pivot (0,1) of the 3x3 example") {
  const SymmetricMatrix m(3, {4, 0.5, 0, 0.5, 3, 0.1, 0, 0.1, 1});
  const double before = off_norm(m);
  const GivensRotation g = compute_givens(m, {0, 1});
  const SymmetricMatrix r = apply_rotation(m, g);
  // off-norm reduction identity: off^2 drops by exactly 2 * 0.5^2
  CHECK_THAT(before * before - off_norm(r) * off_norm(r), WithinAbs(0.5, 1e-12));
  // direct full-matrix multiplication gives the same rotated matrix
  const auto dense = oracles::full_similarity(oracles::to_dense(m), 0, 1, g.c, g.s);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK_THAT(r.at(i, j), WithinAbs(dense[i][j], 1e-12));
}

TEST_CASE("compute_givens rejects a zeroed pivot") {
  const SymmetricMatrix m(3, {4, 0.5, 0, 0.5, 3, 0.1, 0, 0.1, 1});
  CHECK_THROWS_AS(compute_givens(m, {0, 2}), DegeneratePivot);
}

TEST_CASE("identity rotation leaves the matrix unchanged") {
  const SymmetricMatrix m = generate_random_symmetric(5, 11);
  const SymmetricMatrix r = apply_rotation(m, GivensRotation{1, 3, 1.0, 0.0});
  CHECK(r == m);
}

TEST_CASE("apply_rotation zeroes the pivot and preserves the invariants") {
  Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + static_cast<int>(rng.next_u64() % 8);  // 3..10
    const SymmetricMatrix m = generate_random_symmetric(n, rng.next_u64());
    const auto acts = [&] {
      std::vector<PivotAction> v;
      for (int p = 0; p < n - 1; ++p)
        for (int q = p + 1; q < n; ++q)
          if (std::abs(m.at(p, q)) > m.tol()) v.push_back({p, q});
      return v;
    }();
    REQUIRE_FALSE(acts.empty());
    const PivotAction a = acts[rng.uniform_int(0, static_cast<int>(acts.size()) - 1)];
    const SymmetricMatrix r = apply_rotation(m, compute_givens(m, a));

    CHECK(std::abs(r.at(a.p, a.q)) < 1e-10 * m.frobenius_norm());
    CHECK_THAT(r.frobenius_norm(), WithinRel(m.frobenius_norm(), 1e-10));
    CHECK_THAT(r.trace(), WithinRel(m.trace(), 1e-10));
    // off_norm(M')^2 == off_norm(M)^2 - 2 m_pq^2 to 1e-10 relative
    const double lhs = off_norm(r) * off_norm(r);
    const double rhs = off_norm(m) * off_norm(m) - 2.0 * m.at(a.p, a.q) * m.at(a.p, a.q);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max({std::abs(lhs), std::abs(rhs), 1e-30}));
    // exact symmetry after the rotation
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) CHECK(r.at(i, j) == r.at(j, i));
  }
}

TEST_CASE("eigenvalues are preserved by rotations") {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + trial % 4;
    const SymmetricMatrix m = generate_random_symmetric(n, rng.next_u64());
    const auto before = oracles::jacobi_eigenvalues(m);
    SymmetricMatrix r = m;
    for (int k = 0; k < 5; ++k) {
      PivotAction best{0, 1};
      double mag = -1;
      for (int p = 0; p < n - 1; ++p)
        for (int q = p + 1; q < n; ++q)
          if (std::abs(r.at(p, q)) > mag) {
            mag = std::abs(r.at(p, q));
            best = {p, q};
          }
      if (mag <= r.tol()) break;
      r.rotate(compute_givens(r, best));
    }
    const auto after = oracles::jacobi_eigenvalues(r);
    for (int i = 0; i < n; ++i) CHECK_THAT(after[i], WithinAbs(before[i], 1e-8));
  }
}

TEST_CASE("off_norm agrees with the brute-force double loop") {
  const SymmetricMatrix d(3, {1, 0, 0, 0, 2, 0, 0, 0, 3});
  CHECK(off_norm(d) == 0.0);
  const SymmetricMatrix x = mat2(0, 1, 0);
  CHECK_THAT(off_norm(x), WithinAbs(std::sqrt(2.0), 1e-15));
  Rng rng(3);
  for (int t = 0; t < 5; ++t) {
    const SymmetricMatrix m = generate_random_symmetric(5, rng.next_u64());
    CHECK_THAT(off_norm(m), WithinAbs(oracles::off_norm_brute(oracles::to_dense(m)), 1e-14));
  }
}

TEST_CASE("is_diagonalized thresholds") {
  CHECK(is_diagonalized(SymmetricMatrix(2, {5, 0, 0, 5}), 1e-8));
  CHECK(is_diagonalized(mat2(1, 1e-9, 1), 1e-8));
  CHECK_FALSE(is_diagonalized(mat2(1, 1e-3, 1), 1e-8));
}

TEST_CASE("classical MaxElem sweep converges within the rotation budget") {
  Rng rng(99);
  for (int n : {4, 8, 14, 20}) {
    SymmetricMatrix m = generate_random_symmetric(n, rng.next_u64());
    const double target = 1e-8 * m.frobenius_norm();
    const int budget = 20 * strict_upper_count(n);
    int used = 0;
    while (off_norm(m) >= target && used < budget) {
      PivotAction best{0, 1};
      double mag = -1;
      for (int p = 0; p < n - 1; ++p)
        for (int q = p + 1; q < n; ++q)
          if (std::abs(m.at(p, q)) > mag) {
            mag = std::abs(m.at(p, q));
            best = {p, q};
          }
      m.rotate(compute_givens(m, best));
      ++used;
    }
    CHECK(off_norm(m) < target);
  }
}

TEST_CASE("generate_random_symmetric is deterministic and symmetric") {
  const SymmetricMatrix a = generate_random_symmetric(4, 7);
  const SymmetricMatrix b = generate_random_symmetric(4, 7);
  const SymmetricMatrix c = generate_random_symmetric(4, 8);
  CHECK(a == b);
  CHECK_FALSE(a == c);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(a.at(i, j) == a.at(j, i));
}

TEST_CASE("matrix text round trip") {
  const SymmetricMatrix m = generate_random_symmetric(5, 123);
  std::stringstream ss;
  write_matrix(ss, m);
  const SymmetricMatrix r = read_matrix(ss);
  CHECK(r == m);
}

TEST_CASE("loader rejects asymmetry unless symmetrize is set") {
  std::stringstream bad("2\n1 0.5\n0.4 1\n");
  CHECK_THROWS_AS(read_matrix(bad), MatrixIoError);
  std::stringstream again("2\n1 0.5\n0.4 1\n");
  const SymmetricMatrix m = read_matrix(again, /*symmetrize=*/true);
  CHECK_THAT(m.at(0, 1), WithinAbs(0.45, 1e-15));
}

TEST_CASE("loader rejects truncated input") {
  std::stringstream bad("3\n1 0 0\n0 1 0\n");
  CHECK_THROWS_AS(read_matrix(bad), MatrixIoError);
}
