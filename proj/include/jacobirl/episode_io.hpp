#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "jacobirl/selfplay.hpp"

// Episode pools persist as JSON lines: one record per decision with
// {state_key, legal_actions, policy_target, action, reward, done} plus
// enough bookkeeping (initial matrix, player, step) to replay the episode
// through the environment and recover every state.

namespace jacobirl {

using json = nlohmann::json;

inline json episode_header_json(const Episode& ep) {
  json h;
  h["type"] = "episode";
  h["player"] = ep.player;
  h["outcome"] = ep.outcome;
  h["rotation_count"] = ep.rotation_count;
  h["n"] = ep.initial.n();
  h["initial"] = ep.initial.entries();
  return h;
}

inline json record_json(const EpisodeRecord& rec) {
  json r;
  r["state_key"] = rec.key;
  r["legal_actions"] = rec.legal;
  r["policy_target"] = rec.policy;
  r["action"] = rec.action;
  r["reward"] = rec.reward;
  r["done"] = rec.done;
  r["step"] = rec.step;
  r["player"] = rec.player;
  if (rec.prev_option >= 0) r["prev_option"] = rec.prev_option;
  return r;
}

inline void write_episodes_jsonl(std::ostream& os, const std::vector<Episode>& episodes) {
  for (const auto& ep : episodes) {
    os << episode_header_json(ep).dump() << '\n';
    for (const auto& rec : ep.records) os << record_json(rec).dump() << '\n';
  }
}

inline void write_episodes_jsonl_file(const std::string& path, const std::vector<Episode>& episodes) {
  std::ofstream f(path);
  if (!f) throw MatrixIoError("cannot open episode log for write: " + path);
  write_episodes_jsonl(f, episodes);
}

// Reads the format above. Policies/keys are restored verbatim; state
// matrices are reconstructed lazily by replay (see replay_episode).
inline std::vector<Episode> read_episodes_jsonl(std::istream& is) {
  std::vector<Episode> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    if (j.value("type", "") == "episode") {
      const int n = j.at("n").get<int>();
      SymmetricMatrix m(n, j.at("initial").get<std::vector<double>>());
      Episode ep(std::move(m), j.value("player", 0));
      ep.outcome = j.at("outcome").get<double>();
      ep.rotation_count = j.at("rotation_count").get<long>();
      out.push_back(std::move(ep));
    } else {
      if (out.empty()) throw MatrixIoError("episode log: record before episode header");
      Episode& ep = out.back();
      EpisodeRecord rec(ep.initial);  // placeholder matrix; replay restores states
      rec.key = j.at("state_key").get<std::string>();
      rec.legal = j.at("legal_actions").get<std::vector<int>>();
      rec.policy = j.at("policy_target").get<std::vector<double>>();
      rec.action = j.at("action").get<int>();
      rec.reward = j.at("reward").get<double>();
      rec.done = j.at("done").get<bool>();
      rec.step = j.value("step", 0);
      rec.player = j.value("player", 0);
      rec.prev_option = j.value("prev_option", -1);
      ep.records.push_back(std::move(rec));
    }
  }
  return out;
}

inline std::vector<Episode> read_episodes_jsonl_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw MatrixIoError("cannot open episode log for read: " + path);
  return read_episodes_jsonl(f);
}

// Per-simulation search paths as JSON, one array of {state_key, action}
// hops per simulation.
inline void write_search_trace_json(
    std::ostream& os, const std::vector<std::vector<std::pair<std::string, int>>>& traces) {
  json out = json::array();
  for (const auto& sim : traces) {
    json path = json::array();
    for (const auto& [key, action] : sim) path.push_back({{"state_key", key}, {"action", action}});
    out.push_back(std::move(path));
  }
  os << out.dump() << '\n';
}

// Replays a persisted episode's actions through the environment from its
// initial matrix, returning the visited state keys (pre-action, in order).
// Race episodes replay rotations; option episodes replay sweeps.
inline std::vector<std::string> replay_episode(const Episode& ep, GameMode mode,
                                               const RewardConfig& reward = {}) {
  std::vector<std::string> keys;
  if (mode == GameMode::mdp) {
    MdpState s(ep.initial, static_cast<int>(ep.records.size()) + 1);
    for (const auto& rec : ep.records) {
      keys.push_back(state_key(s.matrix));
      const auto [p, q] = strict_upper_unindex(rec.action, s.matrix.n());
      s = mdp_step(s, {p, q});
    }
  } else {
    SmdpState s(ep.initial, static_cast<int>(ep.records.size()) + 1);
    for (const auto& rec : ep.records) {
      keys.push_back(state_key(s.matrix));
      s = smdp_step(s, option_from_id(rec.action), reward).state;
    }
  }
  return keys;
}

}  // namespace jacobirl
