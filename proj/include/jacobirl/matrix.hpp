#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "jacobirl/indexing.hpp"
#include "jacobirl/rng.hpp"

namespace jacobirl {

struct DegeneratePivot : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MatrixIoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A pivot (p,q) with p < q, naming the strictly-upper entry a Givens
// rotation zeroes.
struct PivotAction {
  int p = 0;
  int q = 0;

  friend bool operator==(const PivotAction& a, const PivotAction& b) {
    return a.p == b.p && a.q == b.q;
  }
  friend bool operator<(const PivotAction& a, const PivotAction& b) {
    return a.p != b.p ? a.p < b.p : a.q < b.q;
  }
};

inline int strict_upper_index(PivotAction a, int n) { return strict_upper_index(a.p, a.q, n); }

// Plane rotation J(p,q,theta) with c = cos(theta), s = sin(theta).
// Layout: J[p][p] = J[q][q] = c, J[p][q] = s, J[q][p] = -s, identity
// elsewhere. The similarity transform J^T M J then zeroes entry (p,q) for
// the (c,s) produced by compute_givens below.
struct GivensRotation {
  int p = 0;
  int q = 0;
  double c = 1.0;
  double s = 0.0;
};

// Dense real symmetric matrix. Symmetry is exact at all times: every write
// mirrors across the diagonal. `tol` is the zero threshold used to decide
// whether an off-diagonal entry still counts as a pivot; it is fixed at
// construction (relative to the initial Frobenius norm by default) and is
// carried unchanged through rotations.
class SymmetricMatrix {
 public:
  SymmetricMatrix(int n, std::vector<double> entries, double tol = -1.0)
      : n_(n), a_(std::move(entries)) {
    if (n_ < 2) throw DimensionMismatch("SymmetricMatrix: n must be >= 2");
    if (a_.size() != static_cast<size_t>(n_) * n_)
      throw DimensionMismatch("SymmetricMatrix: entries size != n*n");
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j)
        if (a_[idx(i, j)] != a_[idx(j, i)])
          throw DimensionMismatch("SymmetricMatrix: entries not exactly symmetric");
    tol_ = tol > 0.0 ? tol : default_tol();
  }

  static SymmetricMatrix zero(int n) {
    return SymmetricMatrix(n, std::vector<double>(static_cast<size_t>(n) * n, 0.0));
  }

  int n() const { return n_; }
  double tol() const { return tol_; }
  void set_tol(double tol) {
    if (tol <= 0.0) throw DimensionMismatch("set_tol: tol must be > 0");
    tol_ = tol;
  }

  double at(int i, int j) const { return a_[idx(i, j)]; }

  // mirrored write
  void set(int i, int j, double v) {
    a_[idx(i, j)] = v;
    a_[idx(j, i)] = v;
  }

  const std::vector<double>& entries() const { return a_; }

  double frobenius_norm() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
  }

  double trace() const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += a_[idx(i, i)];
    return s;
  }

  // In-place similarity transform M <- J^T M J, touching only rows/columns
  // p and q. Valid for any (c,s); callers that need the functional form use
  // apply_rotation below.
  void rotate(const GivensRotation& g) {
    const int p = g.p, q = g.q;
    if (p < 0 || p >= q || q >= n_) throw DimensionMismatch("rotate: bad pivot indices");
    const double c = g.c, s = g.s;
    const double app = at(p, p), aqq = at(q, q), apq = at(p, q);
    for (int k = 0; k < n_; ++k) {
      if (k == p || k == q) continue;
      const double akp = at(k, p), akq = at(k, q);
      set(k, p, c * akp - s * akq);
      set(k, q, s * akp + c * akq);
    }
    a_[idx(p, p)] = c * c * app - 2.0 * s * c * apq + s * s * aqq;
    a_[idx(q, q)] = s * s * app + 2.0 * s * c * apq + c * c * aqq;
    set(p, q, (c * c - s * s) * apq + s * c * (app - aqq));
  }

  friend bool operator==(const SymmetricMatrix& x, const SymmetricMatrix& y) {
    return x.n_ == y.n_ && x.a_ == y.a_;
  }

 private:
  double default_tol() const {
    const double f = frobenius_norm();
    return f > 0.0 ? 1e-9 * f : 1e-12;
  }
  size_t idx(int i, int j) const { return static_cast<size_t>(i) * n_ + j; }

  int n_;
  std::vector<double> a_;
  double tol_;
};

// Frobenius norm of the off-diagonal part: sqrt(sum_{i<j} 2 m_ij^2).
// Zero exactly when the matrix is diagonal.
inline double off_norm(const SymmetricMatrix& m) {
  double s = 0.0;
  for (int i = 0; i < m.n(); ++i)
    for (int j = i + 1; j < m.n(); ++j) s += m.at(i, j) * m.at(i, j);
  return std::sqrt(2.0 * s);
}

inline bool is_diagonalized(const SymmetricMatrix& m, double threshold) {
  if (threshold <= 0.0) throw DimensionMismatch("is_diagonalized: threshold must be > 0");
  return off_norm(m) < threshold;
}

// Rotation (c,s) that zeroes entry (p,q) of J^T M J, via the stable closed
// form: tau = (a_qq - a_pp) / (2 a_pq), t the smaller root of
// t^2 + 2 tau t - 1 = 0, c = 1/sqrt(1+t^2), s = t c.
inline GivensRotation compute_givens(const SymmetricMatrix& m, PivotAction a) {
  if (a.p < 0 || a.p >= a.q || a.q >= m.n()) throw DimensionMismatch("compute_givens: bad pivot");
  const double apq = m.at(a.p, a.q);
  if (std::abs(apq) <= m.tol())
    throw DegeneratePivot("compute_givens: |m[p][q]| <= tol at (" + std::to_string(a.p) + "," +
                          std::to_string(a.q) + ")");
  const double tau = (m.at(a.q, a.q) - m.at(a.p, a.p)) / (2.0 * apq);
  double t;
  if (tau == 0.0) {
    t = 1.0;
  } else {
    t = std::copysign(1.0, tau) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  }
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  return {a.p, a.q, c, t * c};
}

inline SymmetricMatrix apply_rotation(const SymmetricMatrix& m, const GivensRotation& g) {
  SymmetricMatrix out = m;
  out.rotate(g);
  return out;
}

// Deterministic random symmetric matrix: entries i.i.d. uniform in
// [-scale, scale], then symmetrized as (A + A^T)/2.
inline SymmetricMatrix generate_random_symmetric(int n, uint64_t seed, double scale = 1.0) {
  if (n < 2) throw DimensionMismatch("generate_random_symmetric: n must be >= 2");
  Rng rng(seed);
  std::vector<double> a(static_cast<size_t>(n) * n);
  for (double& v : a) v = rng.uniform(-scale, scale);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double avg = 0.5 * (a[static_cast<size_t>(i) * n + j] + a[static_cast<size_t>(j) * n + i]);
      a[static_cast<size_t>(i) * n + j] = avg;
      a[static_cast<size_t>(j) * n + i] = avg;
    }
  return SymmetricMatrix(n, std::move(a));
}

// --- text format ---------------------------------------------------------
// line 1: N
// next N lines: N whitespace-separated decimal values
// The loader rejects asymmetry beyond 1e-9 relative to the Frobenius norm
// unless `symmetrize` is set, in which case (A + A^T)/2 is stored.

inline void write_matrix(std::ostream& os, const SymmetricMatrix& m) {
  os << m.n() << "\n";
  os << std::setprecision(17);
  for (int i = 0; i < m.n(); ++i) {
    for (int j = 0; j < m.n(); ++j) {
      if (j) os << ' ';
      os << m.at(i, j);
    }
    os << "\n";
  }
}

inline void write_matrix_file(const std::string& path, const SymmetricMatrix& m) {
  std::ofstream f(path);
  if (!f) throw MatrixIoError("cannot open for write: " + path);
  write_matrix(f, m);
  if (!f) throw MatrixIoError("write failed: " + path);
}

inline SymmetricMatrix read_matrix(std::istream& is, bool symmetrize = false) {
  int n = 0;
  if (!(is >> n) || n < 2) throw MatrixIoError("matrix text: bad dimension line");
  std::vector<double> a(static_cast<size_t>(n) * n);
  for (auto& v : a)
    if (!(is >> v)) throw MatrixIoError("matrix text: truncated entries");
  double fro = 0.0;
  for (double v : a) fro += v * v;
  fro = std::sqrt(fro);
  const double limit = 1e-9 * (fro > 0.0 ? fro : 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const size_t ij = static_cast<size_t>(i) * n + j, ji = static_cast<size_t>(j) * n + i;
      if (!symmetrize && std::abs(a[ij] - a[ji]) > limit)
        throw MatrixIoError("matrix text: asymmetric at (" + std::to_string(i) + "," +
                            std::to_string(j) + "); rerun with symmetrize");
      const double avg = 0.5 * (a[ij] + a[ji]);
      a[ij] = avg;
      a[ji] = avg;
    }
  return SymmetricMatrix(n, std::move(a));
}

inline SymmetricMatrix read_matrix_file(const std::string& path, bool symmetrize = false) {
  std::ifstream f(path);
  if (!f) throw MatrixIoError("cannot open for read: " + path);
  return read_matrix(f, symmetrize);
}

}  // namespace jacobirl
