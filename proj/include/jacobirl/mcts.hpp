#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "jacobirl/env.hpp"
#include "jacobirl/rng.hpp"

// AlphaZero-style tree search, generic over a Game adapter:
//
//   struct Game {
//     using State = ...;
//     int action_space_size() const;
//     std::vector<int> legal_actions(const State&) const;     // ascending ids
//     struct Step { State state; double reward; };            // reward on the backup scale
//     Step apply(const State&, int action) const;
//     std::optional<double> terminal_value(const State&) const;
//     double discount() const;
//     std::string node_key(const State&) const;
//     EvalResult evaluate(const State&, const std::vector<int>& legal) const;
//   };
//
// node_key must fold in any progress counter that terminal_value depends on
// (rotation step, sweeps taken); otherwise near-identical matrices collapse
// into cycles. Nodes live in a transposition table keyed by node_key; backups
// walk the actual simulation path only.

namespace jacobirl {

struct TerminalRoot : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoLegalActions : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EvalResult {
  std::vector<double> priors;  // aligned with the legal-action list
  double value = 0.0;
};

struct SearchConfig {
  double c_puct = 1.4142135623730951;  // sqrt(2)
  int num_simulations = 30;
  double temperature = 1.0;     // visit-count exponent; 0 = argmax
  bool heavy_rollout = false;   // enable MaxElem-guided priors inside a window
  double guidance_weight = 0.75;
  double dirichlet_alpha = 0.0;  // > 0 adds root Dirichlet noise
  double dirichlet_weight = 0.25;
};

struct SearchNode {
  std::string key;
  std::vector<int> actions;          // legal action ids at expansion time
  std::vector<int> visit_counts;     // N(s,a)
  std::vector<double> total_values;  // W(s,a)
  std::vector<double> priors;        // P(s,a), sums to 1
  bool expanded = false;

  double q(int i) const { return total_values[i] / std::max(1, visit_counts[i]); }
  int total_visits() const {
    int t = 0;
    for (int v : visit_counts) t += v;
    return t;
  }
};

// Timestep window [t_start, t_end] drawn for MaxElem-guided expansion; both
// endpoints uniform on {1..D}. The window is empty (guidance off) whenever
// t_end <= t_start.
struct HeavyRolloutWindow {
  int t_start = 0;
  int t_end = 0;
  bool active() const { return t_end > t_start; }
  bool contains(int t) const { return active() && t > t_start && t < t_end; }
};

inline HeavyRolloutWindow heavy_rollout_window(int max_depth, Rng& rng) {
  if (max_depth < 1) throw std::invalid_argument("heavy_rollout_window: max_depth must be >= 1");
  return {rng.uniform_int(1, max_depth), rng.uniform_int(1, max_depth)};
}

// P <- (1-w) P + w onehot(idx)
inline void mix_onehot_prior(std::vector<double>& priors, size_t idx, double weight) {
  for (size_t i = 0; i < priors.size(); ++i) {
    priors[i] *= (1.0 - weight);
    if (i == idx) priors[i] += weight;
  }
}

// true when the rotation budget is exhausted before convergence; search
// treats such leaves as value -1
inline bool depth_cutoff_check(const MdpState& s, int max_depth) {
  return s.step >= max_depth && !s.diagonalized();
}

template <class Game>
class Mcts {
 public:
  using State = typename Game::State;

  Mcts(const Game& game, SearchConfig cfg) : game_(&game), cfg_(std::move(cfg)) {
    if (cfg_.num_simulations < 1) throw std::invalid_argument("Mcts: num_simulations must be >= 1");
  }

  // Runs the configured number of simulations from `root` and returns the
  // stochastic policy over the full action space: pi(a) proportional to
  // N(root,a)^(1/temperature), argmax with lowest-id tie break at
  // temperature zero. Illegal actions carry exactly 0.
  std::vector<double> search(const State& root, Rng* rng = nullptr) {
    if (game_->terminal_value(root)) throw TerminalRoot("search: root is terminal");
    const std::vector<int> legal = game_->legal_actions(root);
    if (legal.empty()) throw NoLegalActions("search: no legal actions at root");
    nodes_.clear();
    traces_.clear();
    root_key_ = game_->node_key(root);
    expand(root_key_, root, legal);
    if (cfg_.dirichlet_alpha > 0.0 && rng != nullptr) {
      SearchNode& rn = nodes_.at(root_key_);
      const auto noise = rng->dirichlet(cfg_.dirichlet_alpha, static_cast<int>(rn.priors.size()));
      for (size_t i = 0; i < rn.priors.size(); ++i)
        rn.priors[i] = (1.0 - cfg_.dirichlet_weight) * rn.priors[i] + cfg_.dirichlet_weight * noise[i];
    }
    for (int sim = 0; sim < cfg_.num_simulations; ++sim) simulate(root);
    return policy_from_root();
  }

  const SearchNode& root_node() const { return nodes_.at(root_key_); }
  const SearchNode* node(const std::string& key) const {
    auto it = nodes_.find(key);
    return it == nodes_.end() ? nullptr : &it->second;
  }
  size_t tree_size() const { return nodes_.size(); }

  void enable_trace(bool on) { trace_enabled_ = on; }
  // per simulation: the (node key, action id) path that was walked
  const std::vector<std::vector<std::pair<std::string, int>>>& traces() const { return traces_; }

 private:
  struct PathEdge {
    SearchNode* node;
    int action_index;
    double reward;
  };

  double expand(const std::string& key, const State& state, const std::vector<int>& legal) {
    EvalResult ev = game_->evaluate(state, legal);
    SearchNode node;
    node.key = key;
    node.actions = legal;
    node.visit_counts.assign(legal.size(), 0);
    node.total_values.assign(legal.size(), 0.0);
    node.priors = std::move(ev.priors);
    double sum = 0.0;
    for (double p : node.priors) sum += p;
    if (sum <= 0.0) {
      node.priors.assign(legal.size(), 1.0 / static_cast<double>(legal.size()));
    } else {
      for (double& p : node.priors) p /= sum;
    }
    node.expanded = true;
    nodes_[key] = std::move(node);
    return ev.value;
  }

  int select_index(const SearchNode& node) const {
    const double sqrt_total = std::sqrt(static_cast<double>(node.total_visits()));
    int best = 0;
    double best_score = -1e300;
    for (size_t i = 0; i < node.actions.size(); ++i) {
      const double u =
          cfg_.c_puct * node.priors[i] * sqrt_total / (1.0 + node.visit_counts[i]);
      const double score = node.q(static_cast<int>(i)) + u;
      if (score > best_score) {
        best_score = score;
        best = static_cast<int>(i);
      }
    }
    return best;
  }

  void simulate(const State& root) {
    std::vector<PathEdge> path;
    std::vector<std::pair<std::string, int>> trace;
    State state = root;
    SearchNode* node = &nodes_.at(root_key_);
    double leaf_value = 0.0;
    for (;;) {
      const int ai = select_index(*node);
      if (trace_enabled_) trace.emplace_back(node->key, node->actions[ai]);
      auto step = game_->apply(state, node->actions[ai]);
      path.push_back({node, ai, step.reward});
      state = std::move(step.state);
      if (auto tv = game_->terminal_value(state)) {
        leaf_value = *tv;
        break;
      }
      const std::string key = game_->node_key(state);
      auto it = nodes_.find(key);
      if (it == nodes_.end()) {
        leaf_value = expand(key, state, game_->legal_actions(state));
        break;
      }
      node = &it->second;
    }
    double g = leaf_value;
    for (auto e = path.rbegin(); e != path.rend(); ++e) {
      g = e->reward + game_->discount() * g;
      e->node->total_values[e->action_index] += std::clamp(g, -1.0, 1.0);
      e->node->visit_counts[e->action_index] += 1;
    }
    if (trace_enabled_) traces_.push_back(std::move(trace));
  }

  std::vector<double> policy_from_root() const {
    const SearchNode& rn = nodes_.at(root_key_);
    std::vector<double> pi(game_->action_space_size(), 0.0);
    if (cfg_.temperature <= 0.0) {
      int best = 0;
      for (size_t i = 1; i < rn.actions.size(); ++i)
        if (rn.visit_counts[i] > rn.visit_counts[best]) best = static_cast<int>(i);
      pi[rn.actions[best]] = 1.0;
      return pi;
    }
    double sum = 0.0;
    std::vector<double> w(rn.actions.size());
    for (size_t i = 0; i < rn.actions.size(); ++i) {
      w[i] = std::pow(static_cast<double>(rn.visit_counts[i]), 1.0 / cfg_.temperature);
      sum += w[i];
    }
    for (size_t i = 0; i < rn.actions.size(); ++i) pi[rn.actions[i]] = w[i] / sum;
    return pi;
  }

  const Game* game_;
  SearchConfig cfg_;
  std::unordered_map<std::string, SearchNode> nodes_;
  std::string root_key_;
  bool trace_enabled_ = false;
  std::vector<std::vector<std::pair<std::string, int>>> traces_;
};

}  // namespace jacobirl
