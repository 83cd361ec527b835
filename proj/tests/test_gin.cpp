#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "jacobirl/gin.hpp"

using namespace jacobirl;
using Catch::Matchers::WithinAbs;

namespace {

// local copy to avoid pulling games.hpp into this suite
std::vector<double> option_onehot_for_tests(int prev_option) {
  std::vector<double> oh(kNumSweepOptions, 0.0);
  if (prev_option >= 0 && prev_option < kNumSweepOptions) oh[prev_option] = 1.0;
  return oh;
}

GinConfig small_cfg(PolicyHead head = PolicyHead::pivots) {
  GinConfig cfg;
  cfg.head = head;
  cfg.n_max = 5;
  cfg.num_layers = 2;
  cfg.hidden_dim = 8;
  cfg.dropout_rate = 0.0;
  cfg.learn_eps = true;
  return cfg;
}

std::vector<double> uniform_target(int dim, int legal) {
  std::vector<double> t(dim, 0.0);
  for (int i = 0; i < legal; ++i) t[i] = 1.0 / legal;
  return t;
}

std::vector<TrainSample> small_batch(const GinConfig& cfg, int count, uint64_t seed) {
  Rng rng(seed);
  std::vector<TrainSample> batch;
  for (int i = 0; i < count; ++i) {
    const int n = 3 + static_cast<int>(rng.next_u64() % 3);  // 3..5
    TrainSample s;
    s.graph = build_graph(generate_random_symmetric(n, rng.next_u64()));
    if (cfg.head == PolicyHead::pivots) {
      s.policy_target.assign(cfg.policy_dim(), 0.0);
      s.policy_target[rng.uniform_int(0, strict_upper_count(n) - 1)] = 1.0;
    } else {
      s.policy_target.assign(kNumSweepOptions, 0.0);
      s.policy_target[rng.uniform_int(0, 7)] = 1.0;
      s.extra = option_onehot_for_tests(rng.uniform_int(-1, 7));
    }
    s.value_target = rng.uniform(-0.9, 0.9);
    batch.push_back(std::move(s));
  }
  return batch;
}

}  // namespace

TEST_CASE("forward output contracts") {
  const GinConfig cfg = small_cfg();
  const ModelParams params = ModelParams::init(cfg, 1);
  for (int n : {3, 4, 5}) {
    const LatticeGraph g = build_graph(generate_random_symmetric(n, 100 + n));
    const GinOutput out = gin_forward(g, params, false);
    CHECK(std::abs(out.value) < 1.0);
    double sum = 0.0;
    for (int i = 0; i < cfg.policy_dim(); ++i) {
      if (i >= strict_upper_count(n))
        CHECK(out.policy[i] == 0.0);
      else
        CHECK(out.policy[i] >= 0.0);
      sum += out.policy[i];
    }
    CHECK_THAT(sum, WithinAbs(1.0, 1e-9));
  }
}

TEST_CASE("forward is deterministic with dropout disabled") {
  const GinConfig cfg = small_cfg();
  const ModelParams params = ModelParams::init(cfg, 3);
  const LatticeGraph g = build_graph(generate_random_symmetric(4, 9));
  const GinOutput a = gin_forward(g, params, false);
  const GinOutput b = gin_forward(g, params, false);
  CHECK(a.value == b.value);
  CHECK(a.policy == b.policy);
}

TEST_CASE("pooled representations are invariant to node relabeling") {
  const GinConfig cfg = small_cfg();
  const ModelParams params = ModelParams::init(cfg, 5);
  const LatticeGraph g = build_graph(generate_random_symmetric(4, 21));
  // relabel nodes with a fixed permutation, remapping edges and adjacency
  const int V = g.num_nodes();
  std::vector<int> perm(V);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(6);
  rng.shuffle(perm.begin(), perm.end());
  LatticeGraph h = g;
  for (int v = 0; v < V; ++v) {
    h.node_values[perm[v]] = g.node_values[v];
    h.coords[perm[v]] = g.coords[v];
  }
  h.edges.clear();
  for (auto [a, b] : g.edges)
    h.edges.emplace_back(std::min(perm[a], perm[b]), std::max(perm[a], perm[b]));
  h.neighbors.assign(V, {});
  for (auto [a, b] : h.edges) {
    h.neighbors[a].push_back(b);
    h.neighbors[b].push_back(a);
  }
  const GinOutput oa = gin_forward(g, params, false);
  const GinOutput ob = gin_forward(h, params, false);
  CHECK_THAT(oa.value, WithinAbs(ob.value, 1e-9));
  for (int i = 0; i < cfg.policy_dim(); ++i) CHECK_THAT(oa.policy[i], WithinAbs(ob.policy[i], 1e-9));
}

TEST_CASE("map_policy zero-padding and normalization") {
  const int n_max = 5;
  std::vector<double> logits(strict_upper_count(n_max), 0.0);
  SECTION("uniform logits at n=3 give 1/3 on the legal slots") {
    const PolicyVector pv = map_policy(logits, 3, n_max);
    for (int i = 0; i < 3; ++i) CHECK_THAT(pv.values[i], WithinAbs(1.0 / 3.0, 1e-12));
    for (size_t i = 3; i < pv.values.size(); ++i) CHECK(pv.values[i] == 0.0);
  }
  SECTION("n = n_max is a plain softmax over all slots") {
    Rng rng(2);
    for (auto& v : logits) v = rng.uniform(-2, 2);
    const PolicyVector pv = map_policy(logits, n_max, n_max);
    double sum = 0.0;
    for (double v : pv.values) {
      CHECK(v > 0.0);
      sum += v;
    }
    CHECK_THAT(sum, WithinAbs(1.0, 1e-9));
  }
  SECTION("all sizes keep illegal slots at exactly zero") {
    Rng rng(3);
    for (auto& v : logits) v = rng.uniform(-2, 2);
    for (int n = 2; n <= n_max; ++n) {
      const PolicyVector pv = map_policy(logits, n, n_max);
      double sum = 0.0;
      for (int i = 0; i < strict_upper_count(n_max); ++i) {
        if (i >= strict_upper_count(n)) CHECK(pv.values[i] == 0.0);
        sum += pv.values[i];
      }
      CHECK_THAT(sum, WithinAbs(1.0, 1e-9));
    }
  }
  SECTION("oversized matrices are rejected") {
    CHECK_THROWS_AS(map_policy(logits, 6, n_max), SizeExceedsMax);
  }
}

TEST_CASE("analytic gradients match central finite differences") {
  for (PolicyHead head : {PolicyHead::pivots, PolicyHead::options}) {
    const GinConfig cfg = small_cfg(head);
    ModelParams params = ModelParams::init(cfg, 11);
    const auto batch = small_batch(cfg, 3, 77);
    const auto [loss, grad] = loss_and_gradient(params, batch, /*train_mode=*/false);
    REQUIRE(std::isfinite(loss));

    const ParamLayout lay(cfg);
    // probe a few weights from every tensor: layer MLPs, eps, combiner, heads
    std::vector<size_t> probes;
    Rng rng(13);
    auto probe_range = [&](size_t off, size_t len, int count) {
      for (int i = 0; i < count; ++i) probes.push_back(off + rng.next_u64() % len);
    };
    for (int k = 0; k < cfg.num_layers; ++k) {
      probe_range(lay.w1[k], static_cast<size_t>(cfg.hidden_dim) * cfg.layer_input_dim(k), 3);
      probe_range(lay.b1[k], cfg.hidden_dim, 2);
      probe_range(lay.w2[k], static_cast<size_t>(cfg.hidden_dim) * cfg.hidden_dim, 3);
      probe_range(lay.b2[k], cfg.hidden_dim, 2);
      probes.push_back(lay.eps[k]);
    }
    probe_range(lay.wc, static_cast<size_t>(cfg.hidden_dim) *
                            (cfg.num_layers * cfg.hidden_dim + cfg.extra_dim()), 4);
    probe_range(lay.bc, cfg.hidden_dim, 2);
    probe_range(lay.wv, cfg.hidden_dim, 3);
    probes.push_back(lay.bv);
    probe_range(lay.wp, static_cast<size_t>(cfg.policy_dim()) * cfg.hidden_dim, 4);
    probe_range(lay.bp, cfg.policy_dim(), 2);

    for (size_t idx : probes) {
      const double w0 = params.flat[idx];
      const double h = 1e-5 * std::max(1.0, std::abs(w0));
      params.flat[idx] = w0 + h;
      const double lp = loss_and_gradient(params, batch, false).first;
      params.flat[idx] = w0 - h;
      const double lm = loss_and_gradient(params, batch, false).first;
      params.flat[idx] = w0;
      const double fd = (lp - lm) / (2.0 * h);
      const double tol = 1e-4 * std::max({std::abs(grad[idx]), std::abs(fd), 1e-5});
      INFO("probe index " << idx << " analytic " << grad[idx] << " fd " << fd);
      CHECK(std::abs(grad[idx] - fd) <= tol);
    }
  }
}

TEST_CASE("overfitting a fixed batch strictly decreases the loss") {
  const GinConfig cfg = small_cfg();
  ModelParams params = ModelParams::init(cfg, 19);
  const auto batch = small_batch(cfg, 8, 5);
  double prev = 1e300;
  for (int step = 0; step < 50; ++step) {
    const double loss = train_step(params, batch, 0.005);
    CHECK(loss < prev);
    prev = loss;
  }
}

TEST_CASE("zero learning rate leaves parameters unchanged") {
  const GinConfig cfg = small_cfg();
  ModelParams params = ModelParams::init(cfg, 23);
  const std::vector<double> before = params.flat;
  train_step(params, small_batch(cfg, 2, 6), 0.0);
  CHECK(params.flat == before);
}

TEST_CASE("non-finite parameters abort training with diagnostics") {
  const GinConfig cfg = small_cfg();
  ModelParams params = ModelParams::init(cfg, 29);
  params.flat[0] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(train_step(params, small_batch(cfg, 2, 7), 0.01), NonFiniteLoss);
}

TEST_CASE("dropout perturbs training forward passes only") {
  GinConfig cfg = small_cfg();
  cfg.dropout_rate = 0.5;
  const ModelParams params = ModelParams::init(cfg, 31);
  const LatticeGraph g = build_graph(generate_random_symmetric(4, 10));
  Rng rng(1);
  const GinOutput train_a = gin_forward(g, params, true, nullptr, &rng);
  const GinOutput train_b = gin_forward(g, params, true, nullptr, &rng);
  const GinOutput infer_a = gin_forward(g, params, false);
  const GinOutput infer_b = gin_forward(g, params, false);
  CHECK(infer_a.value == infer_b.value);
  CHECK(train_a.value != train_b.value);  // different masks with overwhelming probability
}

TEST_CASE("checkpoint round trip is bitwise exact") {
  const GinConfig cfg = small_cfg(PolicyHead::options);
  ModelParams params = ModelParams::init(cfg, 37);
  params.iteration = 42;
  const std::string path = "test_ckpt.bin";
  save_params(path, params);
  const ModelParams loaded = load_params(path);
  CHECK(loaded.flat == params.flat);
  CHECK(loaded.iteration == 42);
  CHECK(loaded.seed == 37);
  CHECK(loaded.cfg.head == cfg.head);
  CHECK(loaded.cfg.n_max == cfg.n_max);
  CHECK(loaded.cfg.num_layers == cfg.num_layers);
  CHECK(loaded.cfg.hidden_dim == cfg.hidden_dim);
  std::remove(path.c_str());
}

TEST_CASE("corrupt and mismatched checkpoints are rejected") {
  const GinConfig cfg = small_cfg();
  const ModelParams params = ModelParams::init(cfg, 41);
  const std::string path = "test_ckpt_bad.bin";
  save_params(path, params);

  SECTION("truncation") {
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
    out.close();
    CHECK_THROWS_AS(load_params(path), CorruptFile);
  }
  SECTION("wrong version field") {
    std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
    f.seekp(8);
    const uint32_t bad = 999;
    f.write(reinterpret_cast<const char*>(&bad), sizeof(bad));
    f.close();
    CHECK_THROWS_AS(load_params(path), VersionMismatch);
  }
  std::remove(path.c_str());
}
