#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace jacobirl {

struct DegenerateTable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// log of the upper regularized incomplete gamma Q(a, x), a > 0, x >= 0.
// Series for P in the x < a+1 regime, Lentz continued fraction for Q
// otherwise; the log-domain result stays finite far past double underflow.
inline double log_igamma_upper_q(double a, double x) {
  if (a <= 0.0) throw std::invalid_argument("log_igamma_upper_q: a must be > 0");
  if (x <= 0.0) return 0.0;  // Q = 1
  if (x < a + 1.0) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 2000; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    const double log_p = -x + a * std::log(x) - std::lgamma(a) + std::log(sum);
    const double p = std::exp(log_p);
    if (p >= 1.0) return -1e308;
    return std::log1p(-p);
  }
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return -x + a * std::log(x) - std::lgamma(a) + std::log(h);
}

struct ChiSquaredResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;   // clamped at underflow; log10_p stays exact
  double log10_p = 0.0;
  bool low_expected_warning = false;  // some expected count < 5
};

// Pearson chi-squared test of independence on a contingency table of
// counts. Expected counts come from the row/column marginals; a zero
// marginal makes the table degenerate.
inline ChiSquaredResult chi_squared(const std::vector<std::vector<long>>& table) {
  const size_t rows = table.size();
  if (rows < 2) throw DegenerateTable("chi_squared: need at least 2 rows");
  const size_t cols = table.front().size();
  if (cols < 2) throw DegenerateTable("chi_squared: need at least 2 columns");
  for (const auto& r : table)
    if (r.size() != cols) throw DegenerateTable("chi_squared: ragged table");

  std::vector<double> row_sum(rows, 0.0), col_sum(cols, 0.0);
  double total = 0.0;
  for (size_t i = 0; i < rows; ++i)
    for (size_t j = 0; j < cols; ++j) {
      if (table[i][j] < 0) throw DegenerateTable("chi_squared: negative count");
      row_sum[i] += table[i][j];
      col_sum[j] += table[i][j];
      total += table[i][j];
    }
  for (double s : row_sum)
    if (s == 0.0) throw DegenerateTable("chi_squared: zero row marginal");
  for (double s : col_sum)
    if (s == 0.0) throw DegenerateTable("chi_squared: zero column marginal");

  ChiSquaredResult out;
  out.dof = static_cast<int>((rows - 1) * (cols - 1));
  for (size_t i = 0; i < rows; ++i)
    for (size_t j = 0; j < cols; ++j) {
      const double expected = row_sum[i] * col_sum[j] / total;
      if (expected < 5.0) out.low_expected_warning = true;
      const double diff = table[i][j] - expected;
      out.statistic += diff * diff / expected;
    }
  const double log_q = log_igamma_upper_q(out.dof / 2.0, out.statistic / 2.0);
  out.log10_p = log_q / std::log(10.0);
  out.p_value = log_q < -690.0 ? 0.0 : std::exp(log_q);
  return out;
}

}  // namespace jacobirl
