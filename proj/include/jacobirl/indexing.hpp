#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace jacobirl {

struct IndexOutOfRange : std::out_of_range {
  using std::out_of_range::out_of_range;
};

// number of upper-triangle cells including the diagonal
constexpr int upper_count(int n) { return n * (n + 1) / 2; }

// number of strictly-upper cells, i.e. the pivot/action space size
constexpr int strict_upper_count(int n) { return n * (n - 1) / 2; }

// Flat index of upper-triangle cell (i,j), i <= j, read row-major:
// (0,0),(0,1),...,(0,n-1),(1,1),...  Bijection onto 0 .. n(n+1)/2 - 1.
inline int upper_index(int i, int j, int n) {
  if (i < 0 || i > j || j >= n)
    throw IndexOutOfRange("upper_index: (" + std::to_string(i) + "," + std::to_string(j) +
                          ") out of range for n=" + std::to_string(n));
  return upper_count(n) - (n - i) * (n - i + 1) / 2 + (j - i);
}

// Inverse of upper_index.
inline std::pair<int, int> upper_unindex(int idx, int n) {
  if (idx < 0 || idx >= upper_count(n)) throw IndexOutOfRange("upper_unindex: bad index");
  int i = 0, rem = idx;
  while (rem >= n - i) {
    rem -= n - i;
    ++i;
  }
  return {i, i + rem};
}

// Flat index of strictly-upper cell (p,q), p < q, read row-major:
// (0,1),(0,2),...,(0,n-1),(1,2),...  Bijection onto 0 .. n(n-1)/2 - 1.
inline int strict_upper_index(int p, int q, int n) {
  if (p < 0 || p >= q || q >= n)
    throw IndexOutOfRange("strict_upper_index: (" + std::to_string(p) + "," + std::to_string(q) +
                          ") out of range for n=" + std::to_string(n));
  return p * (n - 1) - p * (p - 1) / 2 + (q - p - 1);
}

// Inverse of strict_upper_index.
inline std::pair<int, int> strict_upper_unindex(int idx, int n) {
  if (idx < 0 || idx >= strict_upper_count(n)) throw IndexOutOfRange("strict_upper_unindex: bad index");
  int p = 0, rem = idx;
  while (rem >= n - 1 - p) {
    rem -= n - 1 - p;
    ++p;
  }
  return {p, p + 1 + rem};
}

}  // namespace jacobirl
