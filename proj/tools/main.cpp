// jacobirl command line: matrix generation, diagonalization runs, training,
// benchmarking, and exports. One JSON config drives everything; flags
// override scalar fields; the resolved config is echoed into every output
// directory so a run can be reproduced from its artifacts.
//
// Exit codes: 0 success, 2 non-convergence, 3 config error, 4 IO error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "jacobirl/bench.hpp"
#include "jacobirl/episode_io.hpp"
#include "jacobirl/gin.hpp"
#include "jacobirl/selfplay.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace jacobirl;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AppConfig {
  std::string mode = "smdp";  // mdp | smdp
  std::vector<int> sizes{10};
  int count = 50;
  uint64_t seed = 0;
  bool seed_set = false;
  double threshold = 1e-8;  // relative to each matrix's Frobenius norm
  double scale = 1.0;
  int jobs = 1;
  std::string out = "runs/out";

  SearchConfig search;
  RewardConfig reward;
  GinConfig model;

  TrainRoundConfig training;
  int rounds = 5;
  int pool_size = 1000;
  std::string split = "750:250";

  std::string agent = "search";  // none | search | checkpoint | replay
  std::string checkpoint;
  std::string replay_table;
  int bench_max_sweeps = 0;
};

uint64_t env_seed_fallback() {
  if (const char* s = std::getenv("JACOBI_RL_SEED")) return std::strtoull(s, nullptr, 10);
  return 0;
}

template <class T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

AppConfig load_config(const std::string& path) {
  AppConfig cfg;
  cfg.model.dropout_rate = 0.3;
  if (path.empty()) return cfg;
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open " + path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: parse failure: ") + e.what());
  }
  maybe(j, "mode", cfg.mode);
  maybe(j, "sizes", cfg.sizes);
  maybe(j, "count", cfg.count);
  if (j.contains("seed")) {
    cfg.seed = j.at("seed").get<uint64_t>();
    cfg.seed_set = true;
  }
  maybe(j, "threshold", cfg.threshold);
  maybe(j, "scale", cfg.scale);
  maybe(j, "jobs", cfg.jobs);
  maybe(j, "out", cfg.out);
  if (j.contains("search")) {
    const json& s = j.at("search");
    maybe(s, "c_puct", cfg.search.c_puct);
    maybe(s, "num_simulations", cfg.search.num_simulations);
    maybe(s, "temperature", cfg.search.temperature);
    maybe(s, "heavy_rollout", cfg.search.heavy_rollout);
    maybe(s, "guidance_weight", cfg.search.guidance_weight);
    maybe(s, "dirichlet_alpha", cfg.search.dirichlet_alpha);
    maybe(s, "dirichlet_weight", cfg.search.dirichlet_weight);
  }
  if (j.contains("reward")) {
    const json& r = j.at("reward");
    maybe(r, "epsilon", cfg.reward.epsilon);
    maybe(r, "tie_value", cfg.reward.tie_value);
    maybe(r, "discount", cfg.reward.discount);
  }
  if (j.contains("model")) {
    const json& m = j.at("model");
    std::string head = "pivots";
    maybe(m, "head", head);
    cfg.model.head = head == "options" ? PolicyHead::options : PolicyHead::pivots;
    maybe(m, "n_max", cfg.model.n_max);
    maybe(m, "num_layers", cfg.model.num_layers);
    maybe(m, "hidden_dim", cfg.model.hidden_dim);
    maybe(m, "dropout_rate", cfg.model.dropout_rate);
    maybe(m, "learn_eps", cfg.model.learn_eps);
    maybe(m, "l2_coeff", cfg.model.l2_coeff);
  }
  if (j.contains("training")) {
    const json& t = j.at("training");
    maybe(t, "games_per_round", cfg.training.games_per_round);
    maybe(t, "epochs", cfg.training.epochs);
    maybe(t, "batch_size", cfg.training.batch_size);
    maybe(t, "lr", cfg.training.lr);
    maybe(t, "synthetic_fraction", cfg.training.synthetic_fraction);
    maybe(t, "gate_threshold", cfg.training.gate_threshold);
    maybe(t, "num_simulations", cfg.training.num_simulations);
    maybe(t, "max_depth", cfg.training.max_depth_override);
    maybe(t, "max_sweeps", cfg.training.max_sweeps_override);
    maybe(t, "rounds", cfg.rounds);
    maybe(t, "pool", cfg.pool_size);
    maybe(t, "split", cfg.split);
  }
  if (j.contains("bench")) {
    const json& b = j.at("bench");
    maybe(b, "agent", cfg.agent);
    maybe(b, "checkpoint", cfg.checkpoint);
    maybe(b, "replay_table", cfg.replay_table);
    maybe(b, "max_sweeps", cfg.bench_max_sweeps);
  }
  return cfg;
}

json to_json(const AppConfig& cfg) {
  json j;
  j["mode"] = cfg.mode;
  j["sizes"] = cfg.sizes;
  j["count"] = cfg.count;
  j["seed"] = cfg.seed;
  j["threshold"] = cfg.threshold;
  j["scale"] = cfg.scale;
  j["jobs"] = cfg.jobs;
  j["out"] = cfg.out;
  j["search"] = {{"c_puct", cfg.search.c_puct},
                 {"num_simulations", cfg.search.num_simulations},
                 {"temperature", cfg.search.temperature},
                 {"heavy_rollout", cfg.search.heavy_rollout},
                 {"guidance_weight", cfg.search.guidance_weight},
                 {"dirichlet_alpha", cfg.search.dirichlet_alpha},
                 {"dirichlet_weight", cfg.search.dirichlet_weight}};
  j["reward"] = {{"epsilon", cfg.reward.epsilon},
                 {"tie_value", cfg.reward.tie_value},
                 {"discount", cfg.reward.discount}};
  j["model"] = {{"head", cfg.model.head == PolicyHead::options ? "options" : "pivots"},
                {"n_max", cfg.model.n_max},
                {"num_layers", cfg.model.num_layers},
                {"hidden_dim", cfg.model.hidden_dim},
                {"dropout_rate", cfg.model.dropout_rate},
                {"learn_eps", cfg.model.learn_eps},
                {"l2_coeff", cfg.model.l2_coeff}};
  j["training"] = {{"games_per_round", cfg.training.games_per_round},
                   {"epochs", cfg.training.epochs},
                   {"batch_size", cfg.training.batch_size},
                   {"lr", cfg.training.lr},
                   {"synthetic_fraction", cfg.training.synthetic_fraction},
                   {"gate_threshold", cfg.training.gate_threshold},
                   {"num_simulations", cfg.training.num_simulations},
                   {"max_depth", cfg.training.max_depth_override},
                   {"max_sweeps", cfg.training.max_sweeps_override},
                   {"rounds", cfg.rounds},
                   {"pool", cfg.pool_size},
                   {"split", cfg.split}};
  j["bench"] = {{"agent", cfg.agent},
                {"checkpoint", cfg.checkpoint},
                {"replay_table", cfg.replay_table},
                {"max_sweeps", cfg.bench_max_sweeps}};
  return j;
}

void echo_config(const AppConfig& cfg) {
  fs::create_directories(cfg.out);
  std::ofstream f(fs::path(cfg.out) / "effective_config.json");
  if (!f) throw MatrixIoError("cannot write effective_config.json under " + cfg.out);
  f << to_json(cfg).dump(2) << "\n";
}

std::vector<SymmetricMatrix> generate_pool(int n, int count, uint64_t seed, double scale) {
  std::vector<SymmetricMatrix> pool;
  pool.reserve(count);
  Rng rng(seed);
  for (int i = 0; i < count; ++i) pool.push_back(generate_random_symmetric(n, rng.next_u64(), scale));
  return pool;
}

// --- gen ---------------------------------------------------------------------

int cmd_gen(const AppConfig& cfg) {
  if (cfg.sizes.empty()) throw ConfigError("gen: need at least one size");
  for (int n : cfg.sizes)
    if (n < 2) throw ConfigError("gen: sizes must be >= 2");
  if (cfg.count < 1) throw ConfigError("gen: count must be >= 1");
  int split_a = -1, split_b = -1;
  if (!cfg.split.empty()) {
    const auto colon = cfg.split.find(':');
    if (colon == std::string::npos) throw ConfigError("gen: split must be A:B");
    split_a = std::stoi(cfg.split.substr(0, colon));
    split_b = std::stoi(cfg.split.substr(colon + 1));
    if (split_a < 0 || split_b < 0 || split_a + split_b != cfg.count)
      throw ConfigError("gen: split parts must be non-negative and sum to count");
  }
  echo_config(cfg);
  for (int n : cfg.sizes) {
    const fs::path dir = fs::path(cfg.out) / ("n" + std::to_string(n));
    fs::create_directories(dir);
    const auto pool = generate_pool(n, cfg.count, cfg.seed + static_cast<uint64_t>(n), cfg.scale);
    std::ofstream train_manifest, eval_manifest;
    if (split_a >= 0) {
      train_manifest.open(dir / "train_manifest.txt");
      eval_manifest.open(dir / "eval_manifest.txt");
    }
    for (int i = 0; i < cfg.count; ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "matrix_%04d.txt", i);
      write_matrix_file((dir / name).string(), pool[i]);
      if (split_a >= 0) (i < split_a ? train_manifest : eval_manifest) << name << "\n";
    }
    std::cout << "gen: wrote " << cfg.count << " matrices of size " << n << " under " << dir
              << (split_a >= 0 ? " (split " + cfg.split + ")" : "") << "\n";
  }
  return 0;
}

// --- diag --------------------------------------------------------------------

int cmd_diag(const AppConfig& cfg, const std::string& matrix_path, const std::string& policy,
             bool symmetrize, const std::string& trace_path) {
  const SymmetricMatrix m = read_matrix_file(matrix_path, symmetrize);
  const double threshold = cfg.threshold * std::max(m.frobenius_norm(), 1e-300);
  std::vector<std::string> trace;
  long rotations = 0;
  bool converged = false;
  double final_off = 0.0;

  if (policy == "maxelem") {
    MdpState s(m, 1, threshold);
    const int cap = 20 * strict_upper_count(m.n());
    while (!s.diagonalized() && rotations < cap) {
      const PivotAction a = maxelem_pivot(s.matrix);
      if (std::abs(s.matrix.at(a.p, a.q)) <= s.matrix.tol()) break;
      trace.push_back(std::to_string(a.p) + " " + std::to_string(a.q));
      s.matrix.rotate(compute_givens(s.matrix, a));
      ++rotations;
    }
    converged = s.diagonalized();
    final_off = off_norm(s.matrix);
  } else if (policy.rfind("option:", 0) == 0) {
    const int id = std::stoi(policy.substr(7));
    SmdpState s(m, cfg.bench_max_sweeps > 0 ? cfg.bench_max_sweeps : default_max_sweeps(m.n()),
                threshold);
    while (!s.terminal()) {
      const auto r = smdp_step(s, option_from_id(id), cfg.reward);
      trace.push_back(option_name(option_from_id(id)));
      s = r.state;
      if (r.rotations == 0 && !s.diagonalized()) break;
    }
    rotations = s.primitive_rotations;
    converged = s.diagonalized();
    final_off = off_norm(s.matrix);
  } else if (policy.rfind("checkpoint:", 0) == 0) {
    const std::string ckpt_path = policy.substr(11);
    if (!fs::exists(ckpt_path)) throw MissingCheckpoint("diag: no checkpoint at " + ckpt_path);
    auto params = std::make_shared<const ModelParams>(load_params(ckpt_path));
    SearchConfig scfg = cfg.search;
    scfg.temperature = 0.0;
    Rng rng(cfg.seed);
    if (params->cfg.head == PolicyHead::options) {
      MctsSmdpPolicy agent(gin_smdp_evaluator(params), scfg, cfg.reward);
      SmdpState s(m, cfg.bench_max_sweeps > 0 ? cfg.bench_max_sweeps : default_max_sweeps(m.n()),
                  threshold);
      while (!s.terminal()) {
        const auto pi = agent.act(s, rng);
        const int opt = rng.sample_weights(pi);
        const auto r = smdp_step(s, option_from_id(opt), cfg.reward);
        trace.push_back(option_name(option_from_id(opt)));
        s = r.state;
        if (r.rotations == 0 && !s.diagonalized()) break;
      }
      rotations = s.primitive_rotations;
      converged = s.diagonalized();
      final_off = off_norm(s.matrix);
    } else {
      if (m.n() > params->cfg.n_max)
        throw ConfigError("diag: matrix larger than the checkpoint's n_max");
      MctsMdpPolicy agent(gin_mdp_evaluator(params), scfg, /*constrain=*/true);
      const int depth = 4 * strict_upper_count(m.n());
      MdpState s(m, depth, threshold);
      while (!s.diagonalized() && s.step < depth) {
        const auto pi = agent.act(s, rng);
        const int action = rng.sample_weights(pi);
        const auto [p, q] = strict_upper_unindex(action, m.n());
        trace.push_back(std::to_string(p) + " " + std::to_string(q));
        s = mdp_step(s, {p, q});
      }
      rotations = s.step;
      converged = s.diagonalized();
      final_off = off_norm(s.matrix);
    }
  } else {
    throw ConfigError("diag: policy must be maxelem, option:<0-7>, or checkpoint:<path>");
  }

  std::cout << "policy=" << policy << " rotations=" << rotations << " off_norm=" << final_off
            << " converged=" << (converged ? "true" : "false")
            << " threshold_rel=" << cfg.threshold << "\n";
  if (!trace_path.empty()) {
    std::ofstream tf(trace_path);
    if (!tf) throw MatrixIoError("diag: cannot write trace to " + trace_path);
    for (const auto& line : trace) tf << line << "\n";
  }
  return converged ? 0 : 2;
}

// --- train ---------------------------------------------------------------------

int cmd_train(AppConfig cfg) {
  if (cfg.mode != "mdp" && cfg.mode != "smdp") throw ConfigError("train: mode must be mdp|smdp");
  const GameMode mode = cfg.mode == "mdp" ? GameMode::mdp : GameMode::smdp;
  if (cfg.sizes.empty()) throw ConfigError("train: need sizes");
  cfg.model.head = mode == GameMode::mdp ? PolicyHead::pivots : PolicyHead::options;
  for (int n : cfg.sizes) cfg.model.n_max = std::max(cfg.model.n_max, n);
  echo_config(cfg);
  cfg.training.jobs = cfg.jobs;
  cfg.training.reward = cfg.reward;
  cfg.training.heavy_rollout = cfg.search.heavy_rollout;

  // 750:250-style split of the generated pool, disjoint by construction
  const auto colon = cfg.split.find(':');
  if (colon == std::string::npos) throw ConfigError("train: split must be A:B");
  const double a = std::stod(cfg.split.substr(0, colon));
  const double b = std::stod(cfg.split.substr(colon + 1));
  if (a <= 0 || b <= 0) throw ConfigError("train: split parts must be positive");

  std::vector<SymmetricMatrix> train_pool, eval_pool;
  Rng pool_rng(cfg.seed);
  const int per_size = std::max(2, cfg.pool_size / static_cast<int>(cfg.sizes.size()));
  for (int n : cfg.sizes) {
    const auto pool = generate_pool(n, per_size, pool_rng.next_u64(), cfg.scale);
    const int tc = std::max(1, static_cast<int>(per_size * a / (a + b)));
    for (int i = 0; i < per_size; ++i) (i < tc ? train_pool : eval_pool).push_back(pool[i]);
  }

  const fs::path out(cfg.out);
  fs::create_directories(out);
  std::ofstream metrics(out / "metrics.csv");
  metrics << "round,first_epoch_loss,last_epoch_loss,mean_outcome,opponent_maxelem,gate_accepted,"
             "candidate_metric,champion_metric,champion_hash\n";

  json manifest;
  manifest["config"] = to_json(cfg);
  manifest["rounds"] = json::array();

  if (!pools_disjoint(train_pool, eval_pool))
    throw ConfigError("train: generated train/eval pools overlap");

  Rng rng(cfg.seed);
  ModelParams champion = ModelParams::init(cfg.model, cfg.seed);
  save_params((out / "champion_round_0.bin").string(), champion);
  bool surpassed = false;
  for (int round = 0; round < cfg.rounds; ++round) {
    const bool vs_maxelem = mode == GameMode::mdp && !surpassed;
    const TrainingRoundResult tr =
        training_round(champion, cfg.training, mode, train_pool, vs_maxelem, rng);
    write_episodes_jsonl_file((out / ("episodes_round_" + std::to_string(round) + ".jsonl")).string(),
                              tr.episodes);
    const GateResult g = gate(tr.candidate, champion, eval_pool, mode, cfg.training, rng);
    if (g.accepted) {
      champion = tr.candidate;
      surpassed = true;
      save_params((out / ("champion_round_" + std::to_string(round + 1) + ".bin")).string(),
                  champion);
    }
    const uint64_t hash = params_hash(champion);
    metrics << round << ',' << (tr.epoch_losses.empty() ? 0.0 : tr.epoch_losses.front()) << ','
            << (tr.epoch_losses.empty() ? 0.0 : tr.epoch_losses.back()) << ',' << tr.mean_outcome
            << ',' << (vs_maxelem ? 1 : 0) << ',' << (g.accepted ? 1 : 0) << ','
            << g.candidate_metric << ',' << g.champion_metric << ',' << hash << "\n";
    metrics.flush();
    json jr;
    jr["round"] = round;
    jr["opponent_maxelem"] = vs_maxelem;
    jr["gate_accepted"] = g.accepted;
    jr["candidate_metric"] = g.candidate_metric;
    jr["champion_metric"] = g.champion_metric;
    jr["champion_hash"] = hash;
    jr["selfplay_records"] = tr.selfplay_records;
    jr["synthetic_records"] = tr.synthetic_records;
    manifest["rounds"].push_back(jr);
    std::cout << "round " << round << ": loss "
              << (tr.epoch_losses.empty() ? 0.0 : tr.epoch_losses.back())
              << (g.accepted ? " [champion replaced]" : " [champion kept]") << "\n";
  }
  save_params((out / "champion_latest.bin").string(), champion);
  std::ofstream mf(out / "manifest.json");
  mf << manifest.dump(2) << "\n";
  std::cout << "train: champion written to " << (out / "champion_latest.bin") << "\n";
  return 0;
}

// --- bench ---------------------------------------------------------------------

std::unique_ptr<SmdpPolicy> make_agent_policy(const AppConfig& cfg) {
  SearchConfig scfg = cfg.search;
  scfg.temperature = 0.0;
  if (cfg.agent == "search")
    return std::make_unique<MctsSmdpPolicy>(rollout_smdp_evaluator(cfg.reward), scfg, cfg.reward);
  if (cfg.agent == "checkpoint") {
    if (cfg.checkpoint.empty() || !fs::exists(cfg.checkpoint))
      throw MissingCheckpoint("bench: agent=checkpoint needs an existing checkpoint file");
    auto params = std::make_shared<const ModelParams>(load_params(cfg.checkpoint));
    if (params->cfg.head != PolicyHead::options)
      throw ConfigError("bench: checkpoint must carry an options head");
    return std::make_unique<MctsSmdpPolicy>(gin_smdp_evaluator(params), scfg, cfg.reward);
  }
  if (cfg.agent == "replay") {
    std::ifstream f(cfg.replay_table);
    if (!f) throw MissingCheckpoint("bench: agent=replay needs a readable replay_table CSV");
    std::string line;
    std::getline(f, line);  // header
    std::vector<std::array<double, 8>> table;
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      std::array<double, 8> row{};
      std::stringstream ss(line);
      std::string cell;
      std::getline(ss, cell, ',');  // stage index
      for (int i = 0; i < 8 && std::getline(ss, cell, ','); ++i) row[i] = std::stod(cell);
      table.push_back(row);
    }
    return std::make_unique<DistributionReplayPolicy>(table);
  }
  throw ConfigError("bench: agent must be none|search|checkpoint|replay");
}

int cmd_bench(const AppConfig& cfg) {
  if (cfg.sizes.empty()) throw ConfigError("bench: need sizes");
  echo_config(cfg);
  const fs::path out(cfg.out);
  fs::create_directories(out);
  const bool with_agent = cfg.agent != "none";

  std::vector<BenchReport> reports;
  json chi_summary = json::array();
  std::vector<std::vector<long>> size_option_counts;
  bool any_nonconverged = false;

  for (int n : cfg.sizes) {
    const auto pool = generate_pool(n, cfg.count, cfg.seed + static_cast<uint64_t>(n), cfg.scale);
    std::array<std::vector<long>, 8> baseline_counts;
    for (int o = 0; o < 8; ++o) {
      const auto r =
          run_baseline(option_from_id(o), pool, cfg.threshold, cfg.bench_max_sweeps, cfg.jobs);
      if (!r.nonconverged.empty()) {
        any_nonconverged = true;
        std::cerr << "bench: option " << o << " failed to converge on " << r.nonconverged.size()
                  << " matrices at n=" << n << "\n";
      }
      baseline_counts[o] = r.counts;
    }

    std::vector<long> agent_counts;
    if (with_agent) {
      auto agent = make_agent_policy(cfg);
      const auto r =
          run_agent(*agent, pool, cfg.threshold, cfg.bench_max_sweeps, cfg.seed, cfg.jobs);
      if (!r.nonconverged.empty()) {
        any_nonconverged = true;
        std::cerr << "bench: agent failed to converge on " << r.nonconverged.size()
                  << " matrices at n=" << n << "\n";
      }
      agent_counts = r.counts;

      const TransitionStats stats = collect_transitions(r.option_trace);
      std::ofstream csv(out / ("transitions_" + std::to_string(n) + ".csv"));
      export_transition_csv(csv, stats);
      std::ofstream dot(out / ("transitions_" + std::to_string(n) + ".dot"));
      export_transition_dot(dot, stats);
      try {
        const auto chi = transition_chi_squared(stats);
        chi_summary.push_back({{"n", n},
                               {"statistic", chi.statistic},
                               {"dof", chi.dof},
                               {"p_value", chi.p_value},
                               {"log10_p", chi.log10_p},
                               {"low_expected_warning", chi.low_expected_warning}});
      } catch (const DegenerateTable&) {
        chi_summary.push_back({{"n", n}, {"degenerate", true}});
      }
      std::vector<long> row(8, 0);
      for (const auto& seq : r.option_trace)
        for (int o : seq) row[o] += 1;
      size_option_counts.push_back(row);
    }
    reports.push_back(savings_report(n, baseline_counts, agent_counts, cfg.threshold, cfg.seed));
  }

  std::ofstream csv(out / "savings.csv");
  write_savings_csv(csv, reports, with_agent);
  json report;
  report["seed"] = cfg.seed;
  report["threshold_rel"] = cfg.threshold;
  report["config"] = to_json(cfg);
  report["reports"] = json::array();
  for (const auto& r : reports) {
    json jr;
    jr["matrix_size"] = r.matrix_size;
    jr["baseline_mean"] = r.baseline_mean;
    jr["baseline_min"] = r.baseline_min;
    jr["baseline_max"] = r.baseline_max;
    jr["per_option_mean"] = r.per_option_mean;
    if (with_agent) {
      jr["agent_mean"] = r.agent_mean;
      jr["savings_percent"] = r.savings_percent;
    }
    jr["num_instances"] = r.num_instances;
    report["reports"].push_back(jr);
  }
  if (with_agent && size_option_counts.size() >= 2) {
    try {
      const auto chi = chi_squared(size_option_counts);
      chi_summary.push_back({{"table", "size_x_option"},
                             {"statistic", chi.statistic},
                             {"dof", chi.dof},
                             {"p_value", chi.p_value},
                             {"log10_p", chi.log10_p}});
    } catch (const DegenerateTable&) {
    }
  }
  report["chi_squared"] = chi_summary;
  std::ofstream rj(out / "report.json");
  rj << report.dump(2) << "\n";

  for (const auto& r : reports) {
    std::cout << "n=" << r.matrix_size << " baseline_mean=" << r.baseline_mean;
    if (with_agent) std::cout << " agent_mean=" << r.agent_mean << " savings%=" << r.savings_percent;
    std::cout << "\n";
  }
  return any_nonconverged ? 2 : 0;
}

// --- export ----------------------------------------------------------------------

int cmd_export(const AppConfig& cfg, bool orderings, const std::vector<int>& ns,
               const std::string& episodes_path) {
  fs::create_directories(cfg.out);
  if (orderings) {
    for (SweepOption opt : all_options())
      for (int n : ns) {
        std::ofstream f(fs::path(cfg.out) /
                        (std::string(option_name(opt)) + "_" + std::to_string(n) + ".txt"));
        if (!f) throw MatrixIoError("export: cannot write ordering file");
        write_pivot_sequence(f, pivot_sequence(opt, n));
      }
    std::cout << "export: wrote ordering files for " << ns.size() << " sizes under " << cfg.out
              << "\n";
  }
  if (!episodes_path.empty()) {
    const auto episodes = read_episodes_jsonl_file(episodes_path);
    const TransitionStats stats = collect_transitions(episodes);
    std::ofstream csv(fs::path(cfg.out) / "transitions.csv");
    export_transition_csv(csv, stats);
    std::ofstream dot(fs::path(cfg.out) / "transitions.dot");
    export_transition_dot(dot, stats);
    std::cout << "export: transition tables from " << episodes.size() << " episodes written under "
              << cfg.out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Jacobi diagonalization heuristics: environments, search, training, benchmarks"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand name

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (flags override)");

  std::optional<uint64_t> seed_flag;
  std::optional<int> jobs_flag;
  std::optional<double> threshold_flag;
  std::optional<std::string> out_flag;
  std::optional<int> sims_flag;
  app.add_option("--seed", seed_flag, "global seed (fallback: env JACOBI_RL_SEED)");
  app.add_option("--jobs", jobs_flag, "worker pool size (0 = hardware parallelism)");
  app.add_option("--threshold", threshold_flag, "convergence threshold relative to ||M||_F");
  app.add_option("--out", out_flag, "output directory");
  app.add_option("--sims", sims_flag, "MCTS simulations per decision");

  auto* gen = app.add_subcommand("gen", "generate seeded random symmetric matrix pools");
  std::optional<int> gen_n;
  std::optional<int> gen_count;
  std::string gen_split;
  gen->add_option("--n", gen_n, "matrix dimension (overrides config sizes)");
  gen->add_option("--count", gen_count, "matrices per size");
  gen->add_option("--split", gen_split, "A:B disjoint train/eval manifests (A+B = count)");

  auto* diag = app.add_subcommand("diag", "diagonalize one matrix file under a policy");
  std::string diag_matrix, diag_policy = "maxelem", diag_trace;
  bool diag_symmetrize = false;
  diag->add_option("--matrix", diag_matrix, "matrix text file")->required();
  diag->add_option("--policy", diag_policy, "maxelem | option:<0-7> | checkpoint:<path>");
  diag->add_option("--trace", diag_trace, "write the pivot/option sequence to this file");
  diag->add_flag("--symmetrize", diag_symmetrize, "accept asymmetric input as (A+A^T)/2");

  auto* train = app.add_subcommand("train", "self-play training rounds with champion gating");
  std::optional<std::string> train_mode;
  std::optional<int> train_rounds;
  train->add_option("--mode", train_mode, "mdp | smdp");
  train->add_option("--rounds", train_rounds, "training rounds");

  auto* bench = app.add_subcommand("bench", "baseline/agent rotation counts and transition stats");
  std::optional<std::string> bench_agent;
  std::optional<std::string> bench_ckpt;
  std::string bench_sizes;
  std::optional<int> bench_count;
  bench->add_option("--agent", bench_agent, "none | search | checkpoint | replay");
  bench->add_option("--checkpoint", bench_ckpt, "options-head checkpoint for agent=checkpoint");
  bench->add_option("--sizes", bench_sizes, "comma-separated matrix sizes");
  bench->add_option("--count", bench_count, "matrices per size");

  auto* exp = app.add_subcommand("export", "write ordering golden files / transition exports");
  bool exp_orderings = false;
  std::string exp_ns = "3,4,5,8";
  std::string exp_episodes;
  exp->add_flag("--orderings", exp_orderings, "emit pivot-sequence files for all 8 options");
  exp->add_option("--n-list", exp_ns, "comma-separated sizes for --orderings");
  exp->add_option("--episodes", exp_episodes, "episode JSONL to turn into transition exports");

  CLI11_PARSE(app, argc, argv);

  try {
    AppConfig cfg = load_config(config_path);
    if (!cfg.seed_set && !seed_flag) cfg.seed = env_seed_fallback();
    if (seed_flag) cfg.seed = *seed_flag;
    if (jobs_flag) cfg.jobs = *jobs_flag == 0 ? default_jobs() : *jobs_flag;
    if (threshold_flag) cfg.threshold = *threshold_flag;
    if (out_flag) cfg.out = *out_flag;
    if (sims_flag) {
      cfg.search.num_simulations = *sims_flag;
      cfg.training.num_simulations = *sims_flag;
    }

    if (gen->parsed()) {
      if (gen_n) cfg.sizes = {*gen_n};
      if (gen_count) cfg.count = *gen_count;
      cfg.split = gen_split;  // empty = no manifests
      return cmd_gen(cfg);
    }
    if (diag->parsed()) return cmd_diag(cfg, diag_matrix, diag_policy, diag_symmetrize, diag_trace);
    if (train->parsed()) {
      if (train_mode) cfg.mode = *train_mode;
      if (train_rounds) cfg.rounds = *train_rounds;
      return cmd_train(cfg);
    }
    if (bench->parsed()) {
      if (bench_agent) cfg.agent = *bench_agent;
      if (bench_ckpt) cfg.checkpoint = *bench_ckpt;
      if (bench_count) cfg.count = *bench_count;
      if (!bench_sizes.empty()) {
        cfg.sizes.clear();
        std::stringstream ss(bench_sizes);
        std::string tok;
        while (std::getline(ss, tok, ',')) cfg.sizes.push_back(std::stoi(tok));
      }
      return cmd_bench(cfg);
    }
    if (exp->parsed()) {
      std::vector<int> ns;
      std::stringstream ss(exp_ns);
      std::string tok;
      while (std::getline(ss, tok, ',')) ns.push_back(std::stoi(tok));
      return cmd_export(cfg, exp_orderings, ns, exp_episodes);
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const MissingCheckpoint& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const NonConvergence& e) {
    std::cerr << "non-convergence: " << e.what() << "\n";
    return 2;
  } catch (const MatrixIoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const CorruptFile& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const VersionMismatch& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
