#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace jacobirl {

// Seeded random source used everywhere the library needs randomness.
// Wraps std::mt19937_64 but maps raw engine words to doubles/ints by hand,
// so the generated streams are identical across standard library
// implementations. Copyable; copies advance independently.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in [lo, hi], both inclusive; rejection sampled
  int uniform_int(int lo, int hi) {
    const uint64_t span = static_cast<uint64_t>(hi) - static_cast<uint64_t>(lo) + 1;
    const uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return lo + static_cast<int>(x % span);
  }

  // standard normal via Box-Muller
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  // Gamma(shape, 1) via Marsaglia-Tsang; shape > 0
  double gamma(double shape) {
    if (shape < 1.0) {
      const double u = uniform();
      return gamma(shape + 1.0) * std::pow(u > 0 ? u : 1e-300, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (u > 0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  // Dirichlet(alpha, ..., alpha) sample of length k
  std::vector<double> dirichlet(double alpha, int k) {
    std::vector<double> g(k);
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
      g[i] = gamma(alpha);
      sum += g[i];
    }
    if (sum <= 0.0) sum = 1.0;
    for (double& v : g) v /= sum;
    return g;
  }

  // index sampled proportionally to non-negative weights (need not sum to 1);
  // rounding fall-through lands on the last positive weight, never a zero one
  int sample_weights(const std::vector<double>& w) {
    double total = 0.0;
    for (double v : w) total += v;
    double r = uniform() * total;
    int last_positive = -1;
    for (size_t i = 0; i < w.size(); ++i) {
      if (w[i] > 0.0) last_positive = static_cast<int>(i);
      r -= w[i];
      if (r < 0.0 && w[i] > 0.0) return static_cast<int>(i);
    }
    return last_positive >= 0 ? last_positive : static_cast<int>(w.size()) - 1;
  }

  template <class It>
  void shuffle(It first, It last) {
    const auto n = last - first;
    for (auto i = n - 1; i > 0; --i) {
      const int j = uniform_int(0, static_cast<int>(i));
      std::swap(first[i], first[j]);
    }
  }

  // independent child stream, e.g. one per worker or per game
  Rng split() { return Rng(next_u64() ^ 0x9e3779b97f4a7c15ull); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace jacobirl
