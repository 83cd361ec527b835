#pragma once

#include <algorithm>
#include <array>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "jacobirl/matrix.hpp"

namespace jacobirl {

// The 8 cyclic pivot orderings forming the SMDP option space, ids 0..7.
enum class SweepOption : int {
  Horizontal = 0,
  HorizontalBack = 1,
  Vertical = 2,
  VerticalBack = 3,
  TopLeftBottomRight = 4,
  TopLeftBottomRightBack = 5,
  TopRightBottomLeft = 6,
  TopRightBottomLeftBack = 7,
};

constexpr int kNumSweepOptions = 8;

inline const std::array<SweepOption, 8>& all_options() {
  static const std::array<SweepOption, 8> opts = {
      SweepOption::Horizontal,         SweepOption::HorizontalBack,
      SweepOption::Vertical,           SweepOption::VerticalBack,
      SweepOption::TopLeftBottomRight, SweepOption::TopLeftBottomRightBack,
      SweepOption::TopRightBottomLeft, SweepOption::TopRightBottomLeftBack,
  };
  return opts;
}

inline const char* option_name(SweepOption o) {
  switch (o) {
    case SweepOption::Horizontal: return "Horizontal";
    case SweepOption::HorizontalBack: return "HorizontalBack";
    case SweepOption::Vertical: return "Vertical";
    case SweepOption::VerticalBack: return "VerticalBack";
    case SweepOption::TopLeftBottomRight: return "TopLeftBottomRight";
    case SweepOption::TopLeftBottomRightBack: return "TopLeftBottomRightBack";
    case SweepOption::TopRightBottomLeft: return "TopRightBottomLeft";
    case SweepOption::TopRightBottomLeftBack: return "TopRightBottomLeftBack";
  }
  throw std::invalid_argument("option_name: bad option");
}

inline SweepOption option_from_id(int id) {
  if (id < 0 || id >= kNumSweepOptions) throw std::invalid_argument("option_from_id: id must be 0..7");
  return static_cast<SweepOption>(id);
}

inline int option_id(SweepOption o) { return static_cast<int>(o); }

// Pivot visit order for one full sweep of `opt` on an n x n matrix. Always a
// permutation of the n(n-1)/2 strictly-upper pivots. The scan families:
//   Horizontal          row-major: (0,1),(0,2),...,(0,n-1),(1,2),...
//   Vertical            column-major: for q = 1..n-1, p = 0..q-1
//   TopLeftBottomRight  bands of constant q-p, nearest the diagonal first,
//                       ties by p ascending
//   TopRightBottomLeft  bands of constant p+(n-1-q), corner (0,n-1) first,
//                       ties by p ascending
// Each *Back variant is the exact reversal of its base sequence.
inline std::vector<PivotAction> pivot_sequence(SweepOption opt, int n) {
  if (n < 2) throw DimensionMismatch("pivot_sequence: n must be >= 2");
  std::vector<PivotAction> seq;
  seq.reserve(strict_upper_count(n));
  switch (opt) {
    case SweepOption::Horizontal:
    case SweepOption::HorizontalBack:
      for (int p = 0; p < n - 1; ++p)
        for (int q = p + 1; q < n; ++q) seq.push_back({p, q});
      break;
    case SweepOption::Vertical:
    case SweepOption::VerticalBack:
      for (int q = 1; q < n; ++q)
        for (int p = 0; p < q; ++p) seq.push_back({p, q});
      break;
    case SweepOption::TopLeftBottomRight:
    case SweepOption::TopLeftBottomRightBack:
      for (int d = 1; d < n; ++d)
        for (int p = 0; p + d < n; ++p) seq.push_back({p, p + d});
      break;
    case SweepOption::TopRightBottomLeft:
    case SweepOption::TopRightBottomLeftBack:
      for (int b = 0; b < n - 1; ++b)
        for (int p = 0; p <= b; ++p) seq.push_back({p, n - 1 - b + p});
      break;
  }
  if (option_id(opt) % 2 == 1) std::reverse(seq.begin(), seq.end());
  return seq;
}

// one line per pivot: "p q" (golden-file / docs format)
inline void write_pivot_sequence(std::ostream& os, const std::vector<PivotAction>& seq) {
  for (const auto& a : seq) os << a.p << ' ' << a.q << '\n';
}

}  // namespace jacobirl
