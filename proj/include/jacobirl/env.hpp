#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "jacobirl/matrix.hpp"
#include "jacobirl/orderings.hpp"

namespace jacobirl {

struct IllegalAction : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct StepOnTerminal : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Reward parameters shared by both decision processes. `epsilon` is the
// per-primitive-rotation cost magnitude of the SMDP; `tie_value` is the
// value handed to every player when all boards finish in the same round of
// the MDP race (a separate constant from epsilon); `discount` is gamma.
struct RewardConfig {
  double epsilon = 0.01;
  double tie_value = 0.0;
  double discount = 1.0;
};

// default diagonalization criterion: off_norm < 1e-8 * ||M||_F
inline double default_threshold(const SymmetricMatrix& m) {
  const double f = m.frobenius_norm();
  return 1e-8 * (f > 0.0 ? f : 1.0);
}

// --- classical Jacobi pivot selection as a fully observable MDP ----------

struct MdpState {
  SymmetricMatrix matrix;
  int step = 0;       // rotations performed on this board
  int max_depth = 0;  // per-player rotation budget D
  double threshold;   // off_norm convergence criterion

  MdpState(SymmetricMatrix m, int depth, double thr = -1.0)
      : matrix(std::move(m)), max_depth(depth),
        threshold(thr > 0.0 ? thr : default_threshold(matrix)) {}

  bool diagonalized() const { return off_norm(matrix) < threshold; }
};

// All strictly-upper pivots with |m_pq| > tol. With `constrain`, only the
// <= n pivots closest to the diagonal survive, where the distance of (p,q)
// is the band index q - p; ties resolve row-major.
inline std::vector<PivotAction> legal_pivots(const SymmetricMatrix& m, bool constrain) {
  std::vector<PivotAction> acts;
  for (int p = 0; p < m.n() - 1; ++p)
    for (int q = p + 1; q < m.n(); ++q)
      if (std::abs(m.at(p, q)) > m.tol()) acts.push_back({p, q});
  if (constrain && static_cast<int>(acts.size()) > m.n()) {
    std::stable_sort(acts.begin(), acts.end(), [](PivotAction a, PivotAction b) {
      const int da = a.q - a.p, db = b.q - b.p;
      if (da != db) return da < db;
      return a < b;
    });
    acts.resize(m.n());
  }
  return acts;
}

inline std::vector<PivotAction> mdp_legal_actions(const MdpState& s, bool constrain) {
  return legal_pivots(s.matrix, constrain);
}

inline MdpState mdp_step(const MdpState& s, PivotAction a) {
  if (std::abs(s.matrix.at(a.p, a.q)) <= s.matrix.tol())
    throw IllegalAction("mdp_step: pivot (" + std::to_string(a.p) + "," + std::to_string(a.q) +
                        ") is already zero");
  MdpState next = s;
  next.matrix.rotate(compute_givens(s.matrix, a));
  next.step += 1;
  return next;
}

// Race outcome of one player's board once the game is adjudicated.
enum class RaceOutcome { win, loss, tie };

inline double mdp_terminal_value(RaceOutcome o, const RewardConfig& cfg) {
  switch (o) {
    case RaceOutcome::win: return 1.0;
    case RaceOutcome::loss: return -1.0;
    case RaceOutcome::tie: return cfg.tie_value;
  }
  throw std::invalid_argument("mdp_terminal_value: bad outcome");
}

// convenience overload matching the simple winner/loser contract
inline double mdp_terminal_value(bool player_won_first, const RewardConfig& cfg) {
  return mdp_terminal_value(player_won_first ? RaceOutcome::win : RaceOutcome::loss, cfg);
}

// state-checked form: a board claimed as the winner must actually be done
inline double mdp_terminal_value(const MdpState& s, bool player_won_first,
                                 const RewardConfig& cfg) {
  if (player_won_first && !s.diagonalized())
    throw StepOnTerminal("mdp_terminal_value: called before termination");
  return mdp_terminal_value(player_won_first, cfg);
}

// --- cyclic Jacobi option selection as a dense-reward SMDP ---------------

struct SmdpState {
  SymmetricMatrix matrix;
  int sweeps_taken = 0;
  long primitive_rotations = 0;  // cumulative r across all options so far
  int max_sweeps = 0;
  double threshold;
  int prev_option = -1;  // last option executed; -1 at episode start

  SmdpState(SymmetricMatrix m, int sweeps, double thr = -1.0)
      : matrix(std::move(m)), max_sweeps(sweeps),
        threshold(thr > 0.0 ? thr : default_threshold(matrix)) {}

  bool diagonalized() const { return off_norm(matrix) < threshold; }
  bool terminal() const { return diagonalized() || sweeps_taken >= max_sweeps; }
};

// size-scaled sweep budget default
inline int default_max_sweeps(int n) { return 3 * n; }

struct SmdpStepResult {
  SmdpState state;
  double reward = 0.0;    // -epsilon * rotations
  int rotations = 0;      // primitive rotations actually performed
};

// One full sweep of `opt`: rotate every pivot of the option's sequence whose
// current magnitude exceeds tol, skip the rest. Reward is -epsilon per
// rotation performed, emitted in aggregate at option completion.
inline SmdpStepResult smdp_step(const SmdpState& s, SweepOption opt, const RewardConfig& cfg) {
  if (s.terminal()) throw StepOnTerminal("smdp_step: state is terminal");
  SmdpStepResult out{s, 0.0, 0};
  SymmetricMatrix& m = out.state.matrix;
  for (PivotAction a : pivot_sequence(opt, m.n())) {
    if (std::abs(m.at(a.p, a.q)) <= m.tol()) continue;
    m.rotate(compute_givens(m, a));
    ++out.rotations;
  }
  out.state.sweeps_taken += 1;
  out.state.primitive_rotations += out.rotations;
  out.state.prev_option = option_id(opt);
  out.reward = -cfg.epsilon * out.rotations;
  return out;
}

// Penalty applied when the sweep budget runs out before convergence: minus
// the absolute sum of the strictly-upper entries.
inline double smdp_timeout_penalty(const SmdpState& s) {
  double sum = 0.0;
  for (int p = 0; p < s.matrix.n() - 1; ++p)
    for (int q = p + 1; q < s.matrix.n(); ++q) sum += std::abs(s.matrix.at(p, q));
  return -sum;
}

// --- canonical state keys -------------------------------------------------

// Hex bitmask of which strictly-upper pivots sit above tol. Near convergence
// the quantized entries of distinct states coincide while their legal pivot
// sets differ, so search node keys append this mask.
inline std::string pivot_mask_hex(const SymmetricMatrix& m) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(static_cast<size_t>(strict_upper_count(m.n())) / 4 + 1);
  int nibble = 0, bits = 0;
  for (int p = 0; p < m.n() - 1; ++p)
    for (int q = p + 1; q < m.n(); ++q) {
      nibble = (nibble << 1) | (std::abs(m.at(p, q)) > m.tol() ? 1 : 0);
      if (++bits == 4) {
        out.push_back(digits[nibble]);
        nibble = 0;
        bits = 0;
      }
    }
  if (bits) out.push_back(digits[nibble << (4 - bits)]);
  return out;
}

// Deterministic key from the upper triangle (diagonal included) quantized to
// 6 decimal digits. Matrices equal up to the quantum map to equal keys.
inline std::string state_key(const SymmetricMatrix& m) {
  std::string key;
  key.reserve(static_cast<size_t>(upper_count(m.n())) * 12);
  char buf[32];
  for (int i = 0; i < m.n(); ++i)
    for (int j = i; j < m.n(); ++j) {
      const long long q = std::llround(m.at(i, j) * 1e6);
      const int len = std::snprintf(buf, sizeof(buf), "%lld,", q == 0 ? 0 : q);  // normalize -0
      key.append(buf, len);
    }
  return key;
}

}  // namespace jacobirl
