#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "jacobirl/parallel.hpp"
#include "jacobirl/selfplay.hpp"
#include "jacobirl/stats.hpp"

// Measurement apparatus: fixed-option baselines, agent rotation counts,
// sweep-transition statistics, and DOT/CSV exports.

namespace jacobirl {

struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MissingCheckpoint : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PolicyRunResult {
  std::vector<long> counts;                    // primitive rotations per matrix
  std::vector<std::vector<int>> option_trace;  // option ids chosen per sweep
  std::vector<int> nonconverged;               // indices that hit the sweep budget
};

// Repeats one fixed cyclic ordering until convergence (skip rule applied),
// per matrix. `threshold_rel` scales by each matrix's own Frobenius norm.
inline PolicyRunResult run_baseline(SweepOption opt, const std::vector<SymmetricMatrix>& pool,
                                    double threshold_rel = 1e-8, int max_sweeps = 0, int jobs = 1) {
  PolicyRunResult out;
  out.counts.assign(pool.size(), 0);
  out.option_trace.assign(pool.size(), {});
  std::vector<char> failed(pool.size(), 0);
  parallel_for(0, static_cast<int>(pool.size()), jobs, [&](int i) {
    const SymmetricMatrix& m = pool[i];
    const int sweeps = max_sweeps > 0 ? max_sweeps : default_max_sweeps(m.n());
    SmdpState s(m, sweeps, threshold_rel * m.frobenius_norm());
    RewardConfig rc;
    while (!s.terminal()) {
      SmdpStepResult r = smdp_step(s, opt, rc);
      out.option_trace[i].push_back(option_id(opt));
      s = std::move(r.state);
      if (r.rotations == 0 && !s.diagonalized()) break;  // nothing left above tol
    }
    out.counts[i] = s.primitive_rotations;
    if (!s.diagonalized()) failed[i] = 1;
  });
  for (size_t i = 0; i < pool.size(); ++i)
    if (failed[i]) out.nonconverged.push_back(static_cast<int>(i));
  return out;
}

// Agent runs: options chosen per sweep by an arbitrary policy (search-backed,
// distribution replay, or a fixed-option wrapper). Seeds derive from `seed`
// per matrix index, so runs are reproducible under any jobs count.
inline PolicyRunResult run_agent(SmdpPolicy& policy, const std::vector<SymmetricMatrix>& pool,
                                 double threshold_rel = 1e-8, int max_sweeps = 0, uint64_t seed = 0,
                                 int jobs = 1) {
  PolicyRunResult out;
  out.counts.assign(pool.size(), 0);
  out.option_trace.assign(pool.size(), {});
  std::vector<char> failed(pool.size(), 0);
  parallel_for(0, static_cast<int>(pool.size()), jobs, [&](int i) {
    Rng rng(seed ^ (0x9e3779b97f4a7c15ull * static_cast<uint64_t>(i + 1)));
    const SymmetricMatrix& m = pool[i];
    const int sweeps = max_sweeps > 0 ? max_sweeps : default_max_sweeps(m.n());
    SmdpState s(m, sweeps, threshold_rel * m.frobenius_norm());
    RewardConfig rc;
    while (!s.terminal()) {
      const std::vector<double> pi = policy.act(s, rng);
      const int action = rng.sample_weights(pi);
      SmdpStepResult r = smdp_step(s, option_from_id(action), rc);
      out.option_trace[i].push_back(action);
      s = std::move(r.state);
      if (r.rotations == 0 && !s.diagonalized()) break;
    }
    out.counts[i] = s.primitive_rotations;
    if (!s.diagonalized()) failed[i] = 1;
  });
  for (size_t i = 0; i < pool.size(); ++i)
    if (failed[i]) out.nonconverged.push_back(static_cast<int>(i));
  return out;
}

// Samples each sweep's option from a recorded per-stage distribution; stages
// past the table reuse its last row.
class DistributionReplayPolicy final : public SmdpPolicy {
 public:
  explicit DistributionReplayPolicy(std::vector<std::array<double, 8>> stage_probs)
      : probs_(std::move(stage_probs)) {
    if (probs_.empty()) throw std::invalid_argument("DistributionReplayPolicy: empty table");
  }
  std::vector<double> act(const SmdpState& s, Rng&) override {
    const auto& row = probs_[std::min<size_t>(s.sweeps_taken, probs_.size() - 1)];
    return std::vector<double>(row.begin(), row.end());
  }
  std::string name() const override { return "distribution-replay"; }

 private:
  std::vector<std::array<double, 8>> probs_;
};

// --- sweep transition statistics ------------------------------------------------

struct TransitionStats {
  std::vector<std::array<long, 8>> stage_counts;       // sweep stage x option
  std::array<std::array<long, 8>, 8> pair_counts{{}};  // option -> next option

  bool stage_populated(int stage) const {
    if (stage < 0 || stage >= static_cast<int>(stage_counts.size())) return false;
    long t = 0;
    for (long c : stage_counts[stage]) t += c;
    return t > 0;
  }

  std::vector<int> populated_stages() const {
    std::vector<int> out;
    for (int s = 0; s < static_cast<int>(stage_counts.size()); ++s)
      if (stage_populated(s)) out.push_back(s);
    return out;
  }

  // row-normalized probabilities; rows with no observations are absent by
  // contract and asking for one is an error
  std::array<double, 8> stage_probabilities(int stage) const {
    if (!stage_populated(stage)) throw DegenerateTable("stage_probabilities: unpopulated stage");
    long t = 0;
    for (long c : stage_counts[stage]) t += c;
    std::array<double, 8> p{};
    for (int i = 0; i < 8; ++i) p[i] = static_cast<double>(stage_counts[stage][i]) / t;
    return p;
  }

  std::array<double, 8> pair_probabilities(int from) const {
    long t = 0;
    for (long c : pair_counts[from]) t += c;
    if (t == 0) throw DegenerateTable("pair_probabilities: option never left");
    std::array<double, 8> p{};
    for (int i = 0; i < 8; ++i) p[i] = static_cast<double>(pair_counts[from][i]) / t;
    return p;
  }
};

inline TransitionStats collect_transitions(const std::vector<std::vector<int>>& option_sequences) {
  TransitionStats stats;
  for (const auto& seq : option_sequences) {
    if (stats.stage_counts.size() < seq.size()) stats.stage_counts.resize(seq.size(), {});
    for (size_t s = 0; s < seq.size(); ++s) {
      stats.stage_counts[s][seq[s]] += 1;
      if (s + 1 < seq.size()) stats.pair_counts[seq[s]][seq[s + 1]] += 1;
    }
  }
  return stats;
}

inline TransitionStats collect_transitions(const std::vector<Episode>& episodes) {
  std::vector<std::vector<int>> seqs;
  seqs.reserve(episodes.size());
  for (const auto& ep : episodes) {
    std::vector<int> seq;
    for (const auto& rec : ep.records) seq.push_back(rec.action);
    seqs.push_back(std::move(seq));
  }
  return collect_transitions(seqs);
}

// chi-squared test of association between sweep stage and option choice,
// built from the populated stages of the table
inline ChiSquaredResult transition_chi_squared(const TransitionStats& stats) {
  std::vector<std::vector<long>> table;
  for (int s : stats.populated_stages()) {
    std::vector<long> row(stats.stage_counts[s].begin(), stats.stage_counts[s].end());
    table.push_back(std::move(row));
  }
  // drop options never chosen anywhere (zero column marginals)
  std::vector<int> keep;
  for (int j = 0; j < 8; ++j) {
    long col = 0;
    for (const auto& row : table) col += row[j];
    if (col > 0) keep.push_back(j);
  }
  std::vector<std::vector<long>> trimmed;
  for (const auto& row : table) {
    std::vector<long> r;
    for (int j : keep) r.push_back(row[j]);
    trimmed.push_back(std::move(r));
  }
  return chi_squared(trimmed);
}

// --- exports ---------------------------------------------------------------------

// DOT digraph of option-to-option transition probabilities, edge labels to 3
// decimals; options that never transition are isolated nodes
inline void export_transition_dot(std::ostream& os, const TransitionStats& stats) {
  os << "digraph sweep_transitions {\n";
  for (int i = 0; i < 8; ++i)
    os << "  o" << i << " [label=\"" << i << ":" << option_name(option_from_id(i)) << "\"];\n";
  for (int i = 0; i < 8; ++i) {
    long t = 0;
    for (long c : stats.pair_counts[i]) t += c;
    if (t == 0) continue;
    for (int j = 0; j < 8; ++j) {
      if (stats.pair_counts[i][j] == 0) continue;
      const double p = static_cast<double>(stats.pair_counts[i][j]) / t;
      os << "  o" << i << " -> o" << j << " [label=\"" << std::fixed << std::setprecision(3) << p
         << "\", weight=" << std::max(1L, std::lround(p * 100)) << "];\n";
      os.unsetf(std::ios::fixed);
    }
  }
  os << "}\n";
}

// CSV of the stage x option probability table, one row per populated stage
inline void export_transition_csv(std::ostream& os, const TransitionStats& stats) {
  os << "stage";
  for (int j = 0; j < 8; ++j) os << ',' << option_name(option_from_id(j));
  os << '\n';
  for (int s : stats.populated_stages()) {
    const auto p = stats.stage_probabilities(s);
    os << s;
    for (int j = 0; j < 8; ++j) os << ',' << std::setprecision(9) << p[j];
    os << '\n';
  }
}

// --- savings reports ----------------------------------------------------------------

struct BenchReport {
  int matrix_size = 0;
  double baseline_mean = 0.0;  // mean over the 8 fixed options
  double baseline_min = 0.0;
  double baseline_max = 0.0;
  std::array<double, 8> per_option_mean{};
  double agent_mean = 0.0;
  double savings_percent = 0.0;  // 100 (baseline - agent) / baseline, may be negative
  int num_instances = 0;
  double threshold_rel = 0.0;
  uint64_t seed = 0;
};

inline double savings_percent(double baseline_mean, double agent_mean) {
  return 100.0 * (baseline_mean - agent_mean) / baseline_mean;
}

inline double mean_count(const std::vector<long>& counts) {
  double s = 0.0;
  for (long c : counts) s += static_cast<double>(c);
  return counts.empty() ? 0.0 : s / static_cast<double>(counts.size());
}

// one report row, Table-style: per-option baselines vs agent counts on the
// same pool
inline BenchReport savings_report(int matrix_size,
                                  const std::array<std::vector<long>, 8>& baseline_counts,
                                  const std::vector<long>& agent_counts, double threshold_rel,
                                  uint64_t seed) {
  BenchReport r;
  r.matrix_size = matrix_size;
  r.num_instances = static_cast<int>(agent_counts.size());
  r.threshold_rel = threshold_rel;
  r.seed = seed;
  double total = 0.0;
  r.baseline_min = 1e300;
  r.baseline_max = 0.0;
  for (int i = 0; i < 8; ++i) {
    r.per_option_mean[i] = mean_count(baseline_counts[i]);
    total += r.per_option_mean[i];
    r.baseline_min = std::min(r.baseline_min, r.per_option_mean[i]);
    r.baseline_max = std::max(r.baseline_max, r.per_option_mean[i]);
  }
  r.baseline_mean = total / 8.0;
  r.agent_mean = mean_count(agent_counts);
  r.savings_percent = savings_percent(r.baseline_mean, r.agent_mean);
  return r;
}

// Table-2-style CSV: {Matrix Size, Baseline, Alpha Zero, Savings (%)}
inline void write_savings_csv(std::ostream& os, const std::vector<BenchReport>& reports,
                              bool with_agent = true) {
  os << "Matrix Size,Baseline";
  if (with_agent) os << ",Alpha Zero,Savings (%)";
  os << '\n';
  for (const auto& r : reports) {
    os << r.matrix_size << ',' << std::setprecision(10) << r.baseline_mean;
    if (with_agent) os << ',' << r.agent_mean << ',' << std::setprecision(4) << r.savings_percent;
    os << '\n';
  }
}

}  // namespace jacobirl
