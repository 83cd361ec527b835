#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "jacobirl/games.hpp"
#include "jacobirl/parallel.hpp"

// Game generation and training orchestration: the two-player diagonalization
// race, single-agent option episodes, synthetic demonstrations, training
// rounds and champion gating.

namespace jacobirl {

struct EpisodeRecord {
  explicit EpisodeRecord(SymmetricMatrix m) : state_matrix(std::move(m)), key(state_key(state_matrix)) {}

  SymmetricMatrix state_matrix;
  std::string key;
  int step = 0;    // rotation timestep (race) or sweep stage (options)
  int player = 0;
  int prev_option = -1;
  std::vector<int> legal;
  std::vector<double> policy;  // pi over the mode's action space
  int action = -1;
  double reward = 0.0;  // raw option reward -epsilon*r; 0 in the race
  bool done = false;
  double value_target = 0.0;
};

struct Episode {
  explicit Episode(SymmetricMatrix init, int player_index = 0)
      : initial(std::move(init)), player(player_index) {}

  SymmetricMatrix initial;
  int player = 0;
  std::vector<EpisodeRecord> records;
  double outcome = 0.0;       // z for this player (race) / normalized return (options)
  long rotation_count = 0;
};

// --- policies ---------------------------------------------------------------

class MdpPolicy {
 public:
  virtual ~MdpPolicy() = default;
  // pi over the strict_upper_count(n) action ids of s
  virtual std::vector<double> act(const MdpState& s, Rng& rng) = 0;
  // heavy-rollout window drawn once per game and shared across players
  virtual void set_window(const HeavyRolloutWindow&) {}
  virtual std::string name() const = 0;
};

class MaxElemMdpPolicy final : public MdpPolicy {
 public:
  std::vector<double> act(const MdpState& s, Rng&) override {
    std::vector<double> pi(strict_upper_count(s.matrix.n()), 0.0);
    pi[strict_upper_index(maxelem_pivot(s.matrix), s.matrix.n())] = 1.0;
    return pi;
  }
  std::string name() const override { return "maxelem"; }
};

class RandomMdpPolicy final : public MdpPolicy {
 public:
  explicit RandomMdpPolicy(bool constrain = false) : constrain_(constrain) {}
  std::vector<double> act(const MdpState& s, Rng&) override {
    const auto acts = mdp_legal_actions(s, constrain_);
    std::vector<double> pi(strict_upper_count(s.matrix.n()), 0.0);
    for (PivotAction a : acts) pi[strict_upper_index(a, s.matrix.n())] = 1.0 / acts.size();
    return pi;
  }
  std::string name() const override { return "random"; }

 private:
  bool constrain_;
};

class MctsMdpPolicy final : public MdpPolicy {
 public:
  MctsMdpPolicy(MdpEvaluator evaluator, SearchConfig cfg, bool constrain = true)
      : eval_(std::move(evaluator)), cfg_(cfg), constrain_(constrain) {}

  std::vector<double> act(const MdpState& s, Rng& rng) override {
    MdpGame game(s.matrix.n(), eval_, constrain_, cfg_.heavy_rollout ? window_ : HeavyRolloutWindow{},
                 cfg_.guidance_weight);
    Mcts<MdpGame> search(game, cfg_);
    return search.search(s, &rng);
  }
  void set_window(const HeavyRolloutWindow& w) override { window_ = w; }
  std::string name() const override { return "mcts"; }
  SearchConfig& config() { return cfg_; }

 private:
  MdpEvaluator eval_;
  SearchConfig cfg_;
  bool constrain_;
  HeavyRolloutWindow window_;
};

class SmdpPolicy {
 public:
  virtual ~SmdpPolicy() = default;
  virtual std::vector<double> act(const SmdpState& s, Rng& rng) = 0;  // pi over 8 options
  virtual std::string name() const = 0;
};

class FixedOptionPolicy final : public SmdpPolicy {
 public:
  explicit FixedOptionPolicy(SweepOption opt) : opt_(opt) {}
  std::vector<double> act(const SmdpState&, Rng&) override {
    std::vector<double> pi(kNumSweepOptions, 0.0);
    pi[option_id(opt_)] = 1.0;
    return pi;
  }
  std::string name() const override { return std::string("option:") + option_name(opt_); }

 private:
  SweepOption opt_;
};

class MctsSmdpPolicy final : public SmdpPolicy {
 public:
  MctsSmdpPolicy(SmdpEvaluator evaluator, SearchConfig cfg, RewardConfig reward)
      : game_(reward, std::move(evaluator)), cfg_(cfg) {}

  std::vector<double> act(const SmdpState& s, Rng& rng) override {
    Mcts<SmdpGame> search(game_, cfg_);
    return search.search(s, &rng);
  }
  std::string name() const override { return "mcts"; }

 private:
  SmdpGame game_;
  SearchConfig cfg_;
};

// --- the two-player race (Algorithm-style adjudication) ----------------------

// Outcome values for players given which boards finished by the final round:
// nobody -> everyone -1; everybody -> tie value; otherwise finishers +1,
// the rest -1.
inline std::vector<double> adjudicate_race(const std::vector<bool>& finished,
                                           const RewardConfig& cfg) {
  if (cfg.tie_value <= -1.0 || cfg.tie_value >= 1.0)
    throw std::invalid_argument("adjudicate_race: tie_value must lie in (-1, 1)");
  const size_t n = finished.size();
  const size_t done = static_cast<size_t>(std::count(finished.begin(), finished.end(), true));
  std::vector<double> out(n);
  for (size_t i = 0; i < n; ++i) {
    if (done == 0)
      out[i] = -1.0;
    else if (done == n)
      out[i] = mdp_terminal_value(RaceOutcome::tie, cfg);
    else
      out[i] = mdp_terminal_value(finished[i], cfg);
  }
  return out;
}

// Both players race on independent copies of the same matrix, moving in
// round-robin order; the game ends at the first round in which any board is
// diagonalized, or when every player has spent the D-rotation budget.
inline std::vector<Episode> play_mdp_game(const SymmetricMatrix& matrix,
                                          const std::vector<MdpPolicy*>& players, int max_depth,
                                          Rng& rng, const RewardConfig& reward = {},
                                          bool heavy_rollout = true, double threshold = -1.0) {
  const int n_players = static_cast<int>(players.size());
  if (n_players < 1) throw std::invalid_argument("play_mdp_game: need at least one player");
  std::vector<Episode> episodes;
  episodes.reserve(n_players);
  for (int i = 0; i < n_players; ++i) episodes.emplace_back(matrix, i);

  HeavyRolloutWindow window{};
  if (heavy_rollout && max_depth >= 1) window = heavy_rollout_window(max_depth, rng);
  for (auto* p : players) p->set_window(window);

  std::vector<MdpState> boards;
  boards.reserve(n_players);
  for (int i = 0; i < n_players; ++i) boards.emplace_back(matrix, max_depth, threshold);

  std::vector<bool> finished(n_players, false);
  int t = 0;
  bool game_over = max_depth <= 0 || boards.front().diagonalized();
  while (!game_over) {
    for (int pind = 0; pind < n_players; ++pind) {
      MdpState& board = boards[pind];
      if (!finished[pind] && board.step < max_depth) {
        std::vector<double> pi = players[pind]->act(board, rng);
        const int action = rng.sample_weights(pi);
        EpisodeRecord rec(board.matrix);
        rec.step = board.step;
        rec.player = pind;
        for (PivotAction a : mdp_legal_actions(board, false))
          rec.legal.push_back(strict_upper_index(a, matrix.n()));
        rec.policy = std::move(pi);
        rec.action = action;
        const auto [p, q] = strict_upper_unindex(action, matrix.n());
        board = mdp_step(board, {p, q});
        rec.done = board.diagonalized();
        episodes[pind].records.push_back(std::move(rec));
        if (board.diagonalized()) finished[pind] = true;
      }
      ++t;
      if ((std::count(finished.begin(), finished.end(), true) > 0 && pind == n_players - 1) ||
          t >= max_depth * n_players) {
        game_over = true;
        break;
      }
    }
  }

  const std::vector<double> outcomes = adjudicate_race(finished, reward);
  for (int i = 0; i < n_players; ++i) {
    episodes[i].outcome = outcomes[i];
    episodes[i].rotation_count = boards[i].step;
    for (auto& rec : episodes[i].records) rec.value_target = outcomes[i];
    if (!episodes[i].records.empty()) episodes[i].records.back().done = true;
  }
  return episodes;
}

// --- single-agent option episodes --------------------------------------------

inline double smdp_value_scale(const SmdpState& s, const RewardConfig& reward) {
  return reward.epsilon * strict_upper_count(s.matrix.n()) * s.max_sweeps;
}

inline Episode play_smdp_episode(const SymmetricMatrix& matrix, SmdpPolicy& policy, int max_sweeps,
                                 Rng& rng, const RewardConfig& reward = {}, double threshold = -1.0) {
  Episode ep(matrix);
  SmdpState state(matrix, max_sweeps, threshold);
  const double scale = smdp_value_scale(state, reward);
  while (!state.terminal()) {
    std::vector<double> pi = policy.act(state, rng);
    const int action = rng.sample_weights(pi);
    EpisodeRecord rec(state.matrix);
    rec.step = state.sweeps_taken;
    rec.prev_option = state.prev_option;
    rec.legal.resize(kNumSweepOptions);
    for (int i = 0; i < kNumSweepOptions; ++i) rec.legal[i] = i;
    rec.policy = std::move(pi);
    rec.action = action;
    SmdpStepResult r = smdp_step(state, option_from_id(action), reward);
    rec.reward = r.reward;
    state = std::move(r.state);
    rec.done = state.terminal();
    const bool stuck = r.rotations == 0 && !state.terminal();  // every pivot under tol
    ep.records.push_back(std::move(rec));
    if (stuck) break;
  }
  ep.rotation_count = state.primitive_rotations;
  // discounted return-to-go on the search scale becomes the value target
  double tail = 0.0;
  if (!state.diagonalized() && state.sweeps_taken >= state.max_sweeps)
    tail = std::clamp(smdp_timeout_penalty(state) / scale, -1.0, 0.0);
  for (auto it = ep.records.rbegin(); it != ep.records.rend(); ++it) {
    tail = it->reward / scale + reward.discount * tail;
    it->value_target = std::clamp(tail, -1.0, 1.0);
  }
  ep.outcome = ep.records.empty() ? 0.0 : ep.records.front().value_target;
  return ep;
}

// --- synthetic demonstrations -------------------------------------------------

// Known-winning MaxElem demonstrations plus random-rotation transitions
// labeled by the outcome of finishing the board with MaxElem within the
// max_depth budget.
inline std::vector<Episode> make_synthetic_demos(int n, int count, int max_depth, Rng& rng,
                                                 double threshold = -1.0) {
  std::vector<Episode> out;
  out.reserve(count);
  const int hard_cap = 20 * strict_upper_count(n);
  for (int i = 0; i < count; ++i) {
    const SymmetricMatrix m = generate_random_symmetric(n, rng.next_u64());
    Episode ep(m);
    MdpState state(m, hard_cap, threshold);
    const bool random_prefix = (i % 2) == 1;
    const int prefix_len = random_prefix ? rng.uniform_int(1, std::max(1, n)) : 0;
    // random prefix: transitions the agent may encounter off the heuristic path
    int taken = 0;
    while (taken < prefix_len && !state.diagonalized()) {
      const auto legal = mdp_legal_actions(state, false);
      if (legal.empty()) break;
      const PivotAction a = legal[rng.uniform_int(0, static_cast<int>(legal.size()) - 1)];
      EpisodeRecord rec(state.matrix);
      rec.step = state.step;
      for (PivotAction l : legal) rec.legal.push_back(strict_upper_index(l, n));
      rec.policy.assign(strict_upper_count(n), 0.0);
      rec.policy[strict_upper_index(a, n)] = 1.0;
      rec.action = strict_upper_index(a, n);
      state = mdp_step(state, a);
      rec.done = state.diagonalized();
      ep.records.push_back(std::move(rec));
      ++taken;
    }
    // MaxElem continuation to completion
    const size_t demo_start = ep.records.size();
    while (!state.diagonalized() && state.step < hard_cap) {
      const PivotAction a = maxelem_pivot(state.matrix);
      EpisodeRecord rec(state.matrix);
      rec.step = state.step;
      for (PivotAction l : mdp_legal_actions(state, false))
        rec.legal.push_back(strict_upper_index(l, n));
      rec.policy.assign(strict_upper_count(n), 0.0);
      rec.policy[strict_upper_index(a, n)] = 1.0;
      rec.action = strict_upper_index(a, n);
      state = mdp_step(state, a);
      rec.done = state.diagonalized();
      ep.records.push_back(std::move(rec));
    }
    // label: prefix records get the continuation outcome against the budget,
    // pure demonstrations are winning by construction
    const double z = state.step <= max_depth ? 1.0 : -1.0;
    for (size_t r = 0; r < ep.records.size(); ++r)
      ep.records[r].value_target = random_prefix && r < demo_start ? z : (state.diagonalized() ? 1.0 : -1.0);
    ep.outcome = z;
    ep.rotation_count = state.step;
    out.push_back(std::move(ep));
  }
  return out;
}

// fixed-option demonstrations with realized returns, the option-game analogue
inline std::vector<Episode> make_synthetic_smdp_demos(int n, int count, int max_sweeps, Rng& rng,
                                                      const RewardConfig& reward = {},
                                                      double threshold = -1.0) {
  std::vector<Episode> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const SymmetricMatrix m = generate_random_symmetric(n, rng.next_u64());
    FixedOptionPolicy policy(option_from_id(rng.uniform_int(0, kNumSweepOptions - 1)));
    out.push_back(play_smdp_episode(m, policy, max_sweeps, rng, reward, threshold));
  }
  return out;
}

// --- training rounds and gating -----------------------------------------------

enum class GameMode { mdp, smdp };

struct TrainRoundConfig {
  int games_per_round = 200;
  int epochs = 15;
  int batch_size = 256;
  double lr = 0.001;
  double synthetic_fraction = 0.5;
  double gate_threshold = 0.55;
  int num_simulations = 100;  // training-time search budget (30 at inference)
  double temperature = 1.0;
  bool heavy_rollout = true;
  bool constrain_actions = true;
  int max_depth_override = 0;  // race budget D; 0 derives it per matrix from MaxElem
  int max_sweeps_override = 0;  // option budget; 0 = 3n
  RewardConfig reward;
  int jobs = 1;
};

// rotation count of the plain MaxElem heuristic, the budget-setting reference
inline int maxelem_rotation_count(const SymmetricMatrix& m, double threshold = -1.0,
                                  int hard_cap = -1) {
  MdpState s(m, 1, threshold);
  if (hard_cap < 0) hard_cap = 20 * strict_upper_count(m.n());
  int steps = 0;
  while (!s.diagonalized() && steps < hard_cap) {
    s.matrix.rotate(compute_givens(s.matrix, maxelem_pivot(s.matrix)));
    ++steps;
  }
  return steps;
}

inline TrainSample sample_from_record(const EpisodeRecord& rec, const GinConfig& cfg) {
  TrainSample s;
  s.graph = build_graph(rec.state_matrix);
  if (cfg.head == PolicyHead::pivots) {
    if (rec.state_matrix.n() > cfg.n_max)
      throw SizeExceedsMax("sample_from_record: matrix larger than n_max");
    s.policy_target.assign(cfg.policy_dim(), 0.0);
    std::copy(rec.policy.begin(), rec.policy.end(), s.policy_target.begin());
  } else {
    s.policy_target = rec.policy;
    s.extra = option_onehot(rec.prev_option);
  }
  s.value_target = rec.value_target;
  return s;
}

struct TrainingRoundResult {
  ModelParams candidate;
  std::vector<double> epoch_losses;
  int selfplay_records = 0;
  int synthetic_records = 0;
  double mean_outcome = 0.0;        // mean z of the learner's episodes
  std::vector<Episode> episodes;    // the round's self-play pool, for persistence
};

inline TrainingRoundResult training_round(const ModelParams& champion, const TrainRoundConfig& cfg,
                                          GameMode mode, const std::vector<SymmetricMatrix>& pool,
                                          bool opponent_is_maxelem, Rng& rng) {
  if (pool.empty()) throw std::invalid_argument("training_round: empty matrix pool");
  auto champ = std::make_shared<const ModelParams>(champion);
  SearchConfig scfg;
  scfg.num_simulations = cfg.num_simulations;
  scfg.temperature = cfg.temperature;
  scfg.heavy_rollout = cfg.heavy_rollout;

  std::vector<Episode> episodes;
  double outcome_sum = 0.0;
  int learner_games = 0;
  std::vector<uint64_t> seeds(cfg.games_per_round);
  for (auto& s : seeds) s = rng.next_u64();

  if (mode == GameMode::mdp) {
    std::vector<std::vector<Episode>> per_game(cfg.games_per_round);
    parallel_for(0, cfg.games_per_round, cfg.jobs, [&](int g) {
      Rng grng(seeds[g]);
      const SymmetricMatrix& m = pool[g % pool.size()];
      const int depth = cfg.max_depth_override > 0 ? cfg.max_depth_override
                                                   : maxelem_rotation_count(m);
      MctsMdpPolicy learner(gin_mdp_evaluator(champ), scfg, cfg.constrain_actions);
      std::unique_ptr<MdpPolicy> opponent;
      if (opponent_is_maxelem)
        opponent = std::make_unique<MaxElemMdpPolicy>();
      else
        opponent = std::make_unique<MctsMdpPolicy>(gin_mdp_evaluator(champ), scfg, cfg.constrain_actions);
      std::vector<MdpPolicy*> players{&learner, opponent.get()};
      per_game[g] = play_mdp_game(m, players, depth, grng, cfg.reward, cfg.heavy_rollout);
    });
    for (auto& game : per_game) {
      if (!game.empty()) {
        outcome_sum += game.front().outcome;
        ++learner_games;
      }
      for (auto& ep : game) episodes.push_back(std::move(ep));
    }
  } else {
    std::vector<Episode> slots(cfg.games_per_round, Episode(pool.front()));
    parallel_for(0, cfg.games_per_round, cfg.jobs, [&](int g) {
      Rng grng(seeds[g]);
      const SymmetricMatrix& m = pool[g % pool.size()];
      const int sweeps = cfg.max_sweeps_override > 0 ? cfg.max_sweeps_override
                                                     : default_max_sweeps(m.n());
      MctsSmdpPolicy learner(gin_smdp_evaluator(champ), scfg, cfg.reward);
      slots[g] = play_smdp_episode(m, learner, sweeps, grng, cfg.reward);
    });
    for (auto& ep : slots) {
      outcome_sum += ep.outcome;
      ++learner_games;
      episodes.push_back(std::move(ep));
    }
  }

  std::vector<TrainSample> samples;
  for (const auto& ep : episodes)
    for (const auto& rec : ep.records) samples.push_back(sample_from_record(rec, champion.cfg));
  const int selfplay_records = static_cast<int>(samples.size());
  std::vector<Episode> episode_pool = episodes;

  // mix in synthetic demonstrations at the configured fraction
  int synthetic_records = 0;
  if (cfg.synthetic_fraction > 0.0 && selfplay_records > 0) {
    const double f = std::min(cfg.synthetic_fraction, 0.95);
    const int target = static_cast<int>(f / (1.0 - f) * selfplay_records);
    const int n = pool.front().n();
    while (synthetic_records < target) {
      std::vector<Episode> demos;
      if (mode == GameMode::mdp) {
        const int depth = cfg.max_depth_override > 0 ? cfg.max_depth_override
                                                     : maxelem_rotation_count(pool.front());
        demos = make_synthetic_demos(n, 4, depth, rng);
      } else {
        const int sweeps = cfg.max_sweeps_override > 0 ? cfg.max_sweeps_override
                                                       : default_max_sweeps(n);
        demos = make_synthetic_smdp_demos(n, 4, sweeps, rng, cfg.reward);
      }
      for (const auto& ep : demos)
        for (const auto& rec : ep.records) {
          samples.push_back(sample_from_record(rec, champion.cfg));
          ++synthetic_records;
        }
      if (demos.empty()) break;
    }
  }
  if (samples.empty()) throw std::invalid_argument("training_round: no training data generated");

  TrainingRoundResult result{champion,
                             {},
                             selfplay_records,
                             synthetic_records,
                             learner_games > 0 ? outcome_sum / learner_games : 0.0,
                             std::move(episode_pool)};
  std::vector<size_t> order(samples.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order.begin(), order.end());
    double loss_sum = 0.0;
    int batches = 0;
    for (size_t at = 0; at < order.size(); at += cfg.batch_size) {
      std::vector<TrainSample> batch;
      for (size_t i = at; i < std::min(order.size(), at + cfg.batch_size); ++i)
        batch.push_back(samples[order[i]]);
      loss_sum += train_step(result.candidate, batch, cfg.lr, &rng);
      ++batches;
    }
    result.epoch_losses.push_back(batches ? loss_sum / batches : 0.0);
  }
  return result;
}

using MdpPolicyFactory = std::function<std::unique_ptr<MdpPolicy>()>;

// Mean head-to-head points for side A over the pool: win 1, tie 1/2, loss 0.
// Fresh policy instances per game so races can run in parallel.
inline double race_points(const MdpPolicyFactory& make_a, const MdpPolicyFactory& make_b,
                          const std::vector<SymmetricMatrix>& pool, const TrainRoundConfig& cfg,
                          Rng& rng) {
  if (pool.empty()) throw std::invalid_argument("race_points: empty pool");
  const int count = static_cast<int>(pool.size());
  std::vector<double> points(count, 0.0);
  std::vector<uint64_t> seeds(count);
  for (auto& s : seeds) s = rng.next_u64();
  parallel_for(0, count, cfg.jobs, [&](int i) {
    Rng grng(seeds[i]);
    const SymmetricMatrix& m = pool[i];
    const int depth = cfg.max_depth_override > 0 ? cfg.max_depth_override
                                                 : maxelem_rotation_count(m);
    auto a = make_a();
    auto b = make_b();
    std::vector<MdpPolicy*> players{a.get(), b.get()};
    const auto eps = play_mdp_game(m, players, depth, grng, cfg.reward, /*heavy_rollout=*/false);
    if (eps[0].outcome > eps[1].outcome)
      points[i] = 1.0;
    else if (eps[0].outcome == eps[1].outcome)
      points[i] = 0.5;
  });
  double total = 0.0;
  for (double p : points) total += p;
  return total / count;
}

struct GateResult {
  bool accepted = false;
  double candidate_metric = 0.0;  // win rate (race) / mean rotations (options)
  double champion_metric = 0.0;
};

// Candidate-vs-champion evaluation on a held-out pool. Race mode plays
// deterministic head-to-head games, ties worth half a point; option mode
// compares mean primitive rotations, accepting strict improvement only.
inline GateResult gate(const ModelParams& candidate, const ModelParams& champion,
                       const std::vector<SymmetricMatrix>& eval_pool, GameMode mode,
                       const TrainRoundConfig& cfg, Rng& rng) {
  if (eval_pool.empty()) throw std::invalid_argument("gate: empty evaluation pool");
  GateResult out;
  auto cand = std::make_shared<const ModelParams>(candidate);
  auto champ = std::make_shared<const ModelParams>(champion);
  SearchConfig scfg;
  scfg.num_simulations = cfg.num_simulations;
  scfg.temperature = 0.0;  // deterministic evaluation play
  scfg.heavy_rollout = false;

  const int count = static_cast<int>(eval_pool.size());
  if (mode == GameMode::mdp) {
    const auto make_cand = [&]() -> std::unique_ptr<MdpPolicy> {
      return std::make_unique<MctsMdpPolicy>(gin_mdp_evaluator(cand), scfg, cfg.constrain_actions);
    };
    const auto make_champ = [&]() -> std::unique_ptr<MdpPolicy> {
      return std::make_unique<MctsMdpPolicy>(gin_mdp_evaluator(champ), scfg, cfg.constrain_actions);
    };
    out.candidate_metric = race_points(make_cand, make_champ, eval_pool, cfg, rng);
    out.champion_metric = 1.0 - out.candidate_metric;
    out.accepted = out.candidate_metric > cfg.gate_threshold;
  } else {
    std::vector<long> c_rot(count, 0), h_rot(count, 0);
    std::vector<uint64_t> seeds(count);
    for (auto& s : seeds) s = rng.next_u64();
    parallel_for(0, count, cfg.jobs, [&](int i) {
      Rng grng(seeds[i]);
      const SymmetricMatrix& m = eval_pool[i];
      const int sweeps = cfg.max_sweeps_override > 0 ? cfg.max_sweeps_override
                                                     : default_max_sweeps(m.n());
      MctsSmdpPolicy a(gin_smdp_evaluator(cand), scfg, cfg.reward);
      MctsSmdpPolicy b(gin_smdp_evaluator(champ), scfg, cfg.reward);
      Rng ra = grng.split(), rb = grng.split();
      c_rot[i] = play_smdp_episode(m, a, sweeps, ra, cfg.reward).rotation_count;
      h_rot[i] = play_smdp_episode(m, b, sweeps, rb, cfg.reward).rotation_count;
    });
    double cs = 0.0, hs = 0.0;
    for (int i = 0; i < count; ++i) {
      cs += c_rot[i];
      hs += h_rot[i];
    }
    out.candidate_metric = cs / count;
    out.champion_metric = hs / count;
    out.accepted = out.candidate_metric < out.champion_metric;
  }
  return out;
}

// matrices shared between two pools (by canonical key); training and gating
// sets must not overlap
inline bool pools_disjoint(const std::vector<SymmetricMatrix>& a,
                           const std::vector<SymmetricMatrix>& b) {
  std::unordered_set<std::string> keys;
  for (const auto& m : a) keys.insert(state_key(m));
  for (const auto& m : b)
    if (keys.count(state_key(m))) return false;
  return true;
}

// FNV-1a over the raw parameter bytes, for champion lineage manifests
inline uint64_t params_hash(const ModelParams& p) {
  uint64_t h = 1469598103934665603ull;
  const auto* bytes = reinterpret_cast<const unsigned char*>(p.flat.data());
  for (size_t i = 0; i < p.flat.size() * sizeof(double); ++i) {
    h ^= bytes[i];
    h *= 1099511628211ull;
  }
  return h;
}

struct RoundInfo {
  int round = 0;
  double first_epoch_loss = 0.0;
  double last_epoch_loss = 0.0;
  double mean_outcome = 0.0;
  bool opponent_was_maxelem = false;  // race mode only
  bool gate_accepted = false;
  double candidate_metric = 0.0;
  double champion_metric = 0.0;
  uint64_t champion_hash = 0;
};

struct TrainRunResult {
  ModelParams champion;
  std::vector<RoundInfo> rounds;
};

// Full training loop: self-play rounds against MaxElem until the first gate
// pass, true self-play afterwards; every round's candidate must beat the
// incumbent on the held-out pool to become champion.
inline TrainRunResult run_training(const GinConfig& gin_cfg, const TrainRoundConfig& cfg,
                                   GameMode mode, const std::vector<SymmetricMatrix>& train_pool,
                                   const std::vector<SymmetricMatrix>& eval_pool, int rounds,
                                   uint64_t seed) {
  if (!pools_disjoint(train_pool, eval_pool))
    throw std::invalid_argument("run_training: train and eval pools overlap");
  Rng rng(seed);
  TrainRunResult out{ModelParams::init(gin_cfg, seed), {}};
  bool surpassed = false;
  for (int round = 0; round < rounds; ++round) {
    const bool vs_maxelem = mode == GameMode::mdp && !surpassed;
    TrainingRoundResult tr = training_round(out.champion, cfg, mode, train_pool, vs_maxelem, rng);
    const GateResult g = gate(tr.candidate, out.champion, eval_pool, mode, cfg, rng);
    RoundInfo info;
    info.round = round;
    info.first_epoch_loss = tr.epoch_losses.empty() ? 0.0 : tr.epoch_losses.front();
    info.last_epoch_loss = tr.epoch_losses.empty() ? 0.0 : tr.epoch_losses.back();
    info.mean_outcome = tr.mean_outcome;
    info.opponent_was_maxelem = vs_maxelem;
    info.gate_accepted = g.accepted;
    info.candidate_metric = g.candidate_metric;
    info.champion_metric = g.champion_metric;
    if (g.accepted) {
      out.champion = std::move(tr.candidate);
      surpassed = true;
    }
    info.champion_hash = params_hash(out.champion);
    out.rounds.push_back(info);
  }
  return out;
}

}  // namespace jacobirl
