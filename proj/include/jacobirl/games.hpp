#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "jacobirl/env.hpp"
#include "jacobirl/gin.hpp"
#include "jacobirl/mcts.hpp"

// Game adapters binding the two decision processes to the search engine,
// plus the evaluators that back them (uniform, learned, rollout).

namespace jacobirl {

using MdpEvaluator = std::function<EvalResult(const MdpState&, const std::vector<int>&)>;
using SmdpEvaluator = std::function<EvalResult(const SmdpState&, const std::vector<int>&)>;

// action id of the largest-magnitude pivot among `legal` ids
inline int maxelem_action(const SymmetricMatrix& m, const std::vector<int>& legal) {
  int best = legal.front();
  double best_mag = -1.0;
  for (int id : legal) {
    const auto [p, q] = strict_upper_unindex(id, m.n());
    const double mag = std::abs(m.at(p, q));
    if (mag > best_mag) {
      best_mag = mag;
      best = id;
    }
  }
  return best;
}

inline PivotAction maxelem_pivot(const SymmetricMatrix& m) {
  PivotAction best{0, 1};
  double best_mag = -1.0;
  for (int p = 0; p < m.n() - 1; ++p)
    for (int q = p + 1; q < m.n(); ++q)
      if (std::abs(m.at(p, q)) > best_mag) {
        best_mag = std::abs(m.at(p, q));
        best = {p, q};
      }
  return best;
}

// --- classical Jacobi race (one player's board) ----------------------------
//
// Single-agent tree: every edge is one of this player's rotations. A
// diagonalized board is worth +1, exhausting the rotation budget is worth
// -1; race adjudication across players happens in selfplay, not here.
class MdpGame {
 public:
  struct Step {
    MdpState state;
    double reward;
  };
  using State = MdpState;

  MdpGame(int n, MdpEvaluator evaluator, bool constrain_actions = true,
          HeavyRolloutWindow window = {}, double guidance_weight = 0.75)
      : n_(n), eval_(std::move(evaluator)), constrain_(constrain_actions), window_(window),
        guidance_weight_(guidance_weight) {}

  int action_space_size() const { return strict_upper_count(n_); }

  std::vector<int> legal_actions(const State& s) const {
    std::vector<int> ids;
    for (PivotAction a : mdp_legal_actions(s, constrain_)) ids.push_back(strict_upper_index(a, n_));
    std::sort(ids.begin(), ids.end());
    return ids;
  }

  Step apply(const State& s, int action) const {
    const auto [p, q] = strict_upper_unindex(action, n_);
    return {mdp_step(s, {p, q}), 0.0};
  }

  std::optional<double> terminal_value(const State& s) const {
    if (s.diagonalized()) return 1.0;  // convergence checked before the cutoff
    if (s.step >= s.max_depth) return -1.0;
    return std::nullopt;
  }

  double discount() const { return 1.0; }

  std::string node_key(const State& s) const {
    return state_key(s.matrix) + "t" + std::to_string(s.step) + "|" + pivot_mask_hex(s.matrix);
  }

  EvalResult evaluate(const State& s, const std::vector<int>& legal) const {
    EvalResult ev = eval_(s, legal);
    if (window_.contains(s.step)) {
      const int target = maxelem_action(s.matrix, legal);
      for (size_t i = 0; i < legal.size(); ++i)
        if (legal[i] == target) {
          mix_onehot_prior(ev.priors, i, guidance_weight_);
          break;
        }
    }
    return ev;
  }

  const HeavyRolloutWindow& window() const { return window_; }

 private:
  int n_;
  MdpEvaluator eval_;
  bool constrain_;
  HeavyRolloutWindow window_;
  double guidance_weight_;
};

// --- cyclic Jacobi option selection ------------------------------------------
//
// Single-agent dense-reward tree over the 8 sweep options. Rewards and the
// timeout penalty are scaled by epsilon * n(n-1)/2 * max_sweeps so backed-up
// values stay in [-1, 1].
class SmdpGame {
 public:
  struct Step {
    SmdpState state;
    double reward;
  };
  using State = SmdpState;

  SmdpGame(RewardConfig reward, SmdpEvaluator evaluator)
      : reward_(reward), eval_(std::move(evaluator)) {}

  int action_space_size() const { return kNumSweepOptions; }

  std::vector<int> legal_actions(const State&) const {
    std::vector<int> ids(kNumSweepOptions);
    for (int i = 0; i < kNumSweepOptions; ++i) ids[i] = i;
    return ids;
  }

  double value_scale(const State& s) const {
    return reward_.epsilon * strict_upper_count(s.matrix.n()) * s.max_sweeps;
  }

  Step apply(const State& s, int action) const {
    SmdpStepResult r = smdp_step(s, option_from_id(action), reward_);
    return {std::move(r.state), r.reward / value_scale(s)};
  }

  std::optional<double> terminal_value(const State& s) const {
    if (s.diagonalized()) return 0.0;  // no future cost
    if (s.sweeps_taken >= s.max_sweeps)
      return std::clamp(smdp_timeout_penalty(s) / value_scale(s), -1.0, 0.0);
    return std::nullopt;
  }

  double discount() const { return reward_.discount; }

  std::string node_key(const State& s) const {
    return state_key(s.matrix) + "s" + std::to_string(s.sweeps_taken) + "|" +
           pivot_mask_hex(s.matrix);
  }

  EvalResult evaluate(const State& s, const std::vector<int>& legal) const { return eval_(s, legal); }

  const RewardConfig& reward_config() const { return reward_; }

 private:
  RewardConfig reward_;
  SmdpEvaluator eval_;
};

// --- evaluators ---------------------------------------------------------------

inline MdpEvaluator uniform_mdp_evaluator(double value = 0.0) {
  return [value](const MdpState&, const std::vector<int>& legal) {
    return EvalResult{std::vector<double>(legal.size(), 1.0 / legal.size()), value};
  };
}

inline SmdpEvaluator uniform_smdp_evaluator(double value = 0.0) {
  return [value](const SmdpState&, const std::vector<int>& legal) {
    return EvalResult{std::vector<double>(legal.size(), 1.0 / legal.size()), value};
  };
}

// learned evaluator over pivot slots; priors gathered at the legal ids
inline MdpEvaluator gin_mdp_evaluator(std::shared_ptr<const ModelParams> params) {
  return [params](const MdpState& s, const std::vector<int>& legal) {
    const GinOutput out = gin_forward(build_graph(s.matrix), *params, /*train_mode=*/false);
    EvalResult ev;
    ev.value = out.value;
    ev.priors.reserve(legal.size());
    for (int id : legal) ev.priors.push_back(out.policy[id]);
    return ev;  // engine renormalizes over the legal subset
  };
}

inline std::vector<double> option_onehot(int prev_option) {
  std::vector<double> oh(kNumSweepOptions, 0.0);
  if (prev_option >= 0 && prev_option < kNumSweepOptions) oh[prev_option] = 1.0;
  return oh;
}

// learned evaluator over the 8 options; consumes the graph plus a one-hot of
// the previously executed option (zeros at episode start)
inline SmdpEvaluator gin_smdp_evaluator(std::shared_ptr<const ModelParams> params) {
  return [params](const SmdpState& s, const std::vector<int>& legal) {
    const std::vector<double> extra = option_onehot(s.prev_option);
    const GinOutput out = gin_forward(build_graph(s.matrix), *params, /*train_mode=*/false, &extra);
    EvalResult ev;
    ev.value = out.value;
    ev.priors.reserve(legal.size());
    for (int id : legal) ev.priors.push_back(out.policy[id]);
    return ev;
  };
}

// Search-only leaf estimate: finish the episode by repeating one option
// (the previously executed one, or `fallback` at the start) and return the
// realized discounted cost on the backup scale. Uniform priors.
inline SmdpEvaluator rollout_smdp_evaluator(RewardConfig reward, int fallback = 4) {
  return [reward, fallback](const SmdpState& s, const std::vector<int>& legal) {
    const double scale = reward.epsilon * strict_upper_count(s.matrix.n()) * s.max_sweeps;
    const int opt = s.prev_option >= 0 ? s.prev_option : fallback;
    SmdpState cur = s;
    double ret = 0.0, disc = 1.0;
    while (!cur.terminal()) {
      SmdpStepResult r = smdp_step(cur, option_from_id(opt), reward);
      ret += disc * r.reward / scale;
      disc *= reward.discount;
      cur = std::move(r.state);
      if (r.rotations == 0) break;  // no pivot above tol; nothing further to do
    }
    if (!cur.diagonalized() && cur.sweeps_taken >= cur.max_sweeps)
      ret += disc * std::clamp(smdp_timeout_penalty(cur) / scale, -1.0, 0.0);
    return EvalResult{std::vector<double>(legal.size(), 1.0 / legal.size()),
                      std::clamp(ret, -1.0, 0.0)};
  };
}

}  // namespace jacobirl
