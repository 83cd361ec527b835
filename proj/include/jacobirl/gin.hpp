#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "jacobirl/lattice.hpp"
#include "jacobirl/orderings.hpp"
#include "jacobirl/rng.hpp"

// Size-invariant policy/value approximator over upper-triangle lattice
// graphs: sum-aggregation message passing with per-layer two-affine MLPs,
// per-layer sum pooling, a combiner, and tanh value / masked-softmax policy
// heads. Written from scratch; gradients are hand-derived (see
// gin_backward) and checked against finite differences in the test suite.

namespace jacobirl {

struct SizeExceedsMax : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonFiniteLoss : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct VersionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CorruptFile : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// node feature expansion: value, |value|, diagonal flag, band index / n
constexpr int kNodeFeatureDim = 4;

inline void node_features(const LatticeGraph& g, int v, double* out) {
  const double val = g.node_values[v];
  out[0] = val;
  out[1] = std::abs(val);
  out[2] = (g.coords[v].first == g.coords[v].second) ? 1.0 : 0.0;
  out[3] = static_cast<double>(g.coords[v].second - g.coords[v].first) / g.n;
}

// pivots: one policy slot per strictly-upper cell of the largest supported
// matrix; options: one slot per cyclic ordering
enum class PolicyHead { pivots, options };

struct GinConfig {
  PolicyHead head = PolicyHead::pivots;
  int n_max = 12;
  int num_layers = 5;
  int hidden_dim = 128;
  double dropout_rate = 0.3;
  bool learn_eps = false;
  double l2_coeff = 1e-4;

  int policy_dim() const {
    return head == PolicyHead::pivots ? strict_upper_count(n_max) : kNumSweepOptions;
  }
  // graph-level input appended before the combiner (previous-option one-hot)
  int extra_dim() const { return head == PolicyHead::options ? kNumSweepOptions : 0; }
  int layer_input_dim(int k) const { return k == 0 ? kNodeFeatureDim : hidden_dim; }
};

// offsets of every tensor inside the flat parameter vector
struct ParamLayout {
  std::vector<size_t> w1, b1, w2, b2, eps;
  size_t wc = 0, bc = 0, wv = 0, bv = 0, wp = 0, bp = 0, total = 0;
  explicit ParamLayout(const GinConfig& c) {
    const int L = c.num_layers, H = c.hidden_dim;
    size_t off = 0;
    auto take = [&off](size_t count) {
      const size_t o = off;
      off += count;
      return o;
    };
    for (int k = 0; k < L; ++k) {
      const int in = c.layer_input_dim(k);
      w1.push_back(take(static_cast<size_t>(H) * in));
      b1.push_back(take(H));
      w2.push_back(take(static_cast<size_t>(H) * H));
      b2.push_back(take(H));
      eps.push_back(take(1));
    }
    wc = take(static_cast<size_t>(H) * (static_cast<size_t>(L) * H + c.extra_dim()));
    bc = take(H);
    wv = take(H);
    bv = take(1);
    wp = take(static_cast<size_t>(c.policy_dim()) * H);
    bp = take(c.policy_dim());
    total = off;
  }
};

template <class T>
struct MatViewT {
  T* d;
  int rows, cols;
  T& operator()(int r, int c) const { return d[static_cast<size_t>(r) * cols + c]; }
  T* row(int r) const { return d + static_cast<size_t>(r) * cols; }
};
using MatView = MatViewT<double>;
using CMatView = MatViewT<const double>;

struct ModelParams {
  GinConfig cfg;
  uint64_t iteration = 0;
  uint64_t seed = 0;
  std::vector<double> flat;

  static ModelParams init(const GinConfig& cfg, uint64_t seed) {
    ModelParams p;
    p.cfg = cfg;
    p.seed = seed;
    const ParamLayout lay(cfg);
    p.flat.assign(lay.total, 0.0);
    Rng rng(seed);
    auto fill = [&rng, &p](size_t off, int rows, int cols, double scale) {
      const double bound = scale * std::sqrt(6.0 / (rows + cols));
      for (size_t i = 0; i < static_cast<size_t>(rows) * cols; ++i)
        p.flat[off + i] = rng.uniform(-bound, bound);
    };
    for (int k = 0; k < cfg.num_layers; ++k) {
      fill(lay.w1[k], cfg.hidden_dim, cfg.layer_input_dim(k), 1.0);
      fill(lay.w2[k], cfg.hidden_dim, cfg.hidden_dim, 1.0);
    }
    fill(lay.wc, cfg.hidden_dim, cfg.num_layers * cfg.hidden_dim + cfg.extra_dim(), 1.0);
    // heads start near zero: value ~ 0 and policy ~ uniform before training
    fill(lay.wv, 1, cfg.hidden_dim, 0.01);
    fill(lay.wp, cfg.policy_dim(), cfg.hidden_dim, 0.01);
    return p;
  }
};

// view over either a parameter vector or a gradient buffer with identical layout
template <class T>
struct ParamsViewT {
  T* base;
  const ParamLayout* lay;
  const GinConfig* cfg;

  MatViewT<T> w1(int k) const { return {base + lay->w1[k], cfg->hidden_dim, cfg->layer_input_dim(k)}; }
  T* b1(int k) const { return base + lay->b1[k]; }
  MatViewT<T> w2(int k) const { return {base + lay->w2[k], cfg->hidden_dim, cfg->hidden_dim}; }
  T* b2(int k) const { return base + lay->b2[k]; }
  T& eps(int k) const { return base[lay->eps[k]]; }
  MatViewT<T> wc() const {
    return {base + lay->wc, cfg->hidden_dim, cfg->num_layers * cfg->hidden_dim + cfg->extra_dim()};
  }
  T* bc() const { return base + lay->bc; }
  T* wv() const { return base + lay->wv; }
  T& bv() const { return base[lay->bv]; }
  MatViewT<T> wp() const { return {base + lay->wp, cfg->policy_dim(), cfg->hidden_dim}; }
  T* bp() const { return base + lay->bp; }
};
using ParamsView = ParamsViewT<double>;
using CParamsView = ParamsViewT<const double>;

// --- scalable policy vector ------------------------------------------------

// Probability vector over the n_max(n_max-1)/2 pivot slots. Slots that are
// illegal for the current matrix size are exactly zero; smaller matrices
// occupy the leading slots of their own strict_upper_index range.
struct PolicyVector {
  std::vector<double> values;
  int n_max = 0;
};

inline PolicyVector map_policy(const std::vector<double>& logits, int n, int n_max) {
  if (n > n_max) throw SizeExceedsMax("map_policy: n exceeds n_max");
  if (logits.size() != static_cast<size_t>(strict_upper_count(n_max)))
    throw DimensionMismatch("map_policy: logits size != n_max(n_max-1)/2");
  PolicyVector out{std::vector<double>(logits.size(), 0.0), n_max};
  const int legal = strict_upper_count(n);
  double mx = -1e300;
  for (int i = 0; i < legal; ++i) mx = std::max(mx, logits[i]);
  double z = 0.0;
  for (int i = 0; i < legal; ++i) z += std::exp(logits[i] - mx);
  for (int i = 0; i < legal; ++i) out.values[i] = std::exp(logits[i] - mx) / z;
  return out;
}

// --- forward pass ----------------------------------------------------------

struct GinOutput {
  std::vector<double> policy;  // policy_dim probabilities, illegal slots exactly 0
  double value = 0.0;          // in (-1, 1)
};

// intermediates retained for the hand-written backward pass
struct ForwardTrace {
  std::vector<std::vector<double>> h;     // h[0] = input features, h[k] = layer k output
  std::vector<std::vector<double>> z;     // aggregated message input per layer
  std::vector<std::vector<double>> a1;    // pre-rectifier MLP hidden per layer
  std::vector<std::vector<double>> mask;  // dropout masks per layer (empty = off)
  std::vector<double> pooled;             // per-layer sums concatenated (+ extra)
  std::vector<double> uc;                 // pre-rectifier combiner
  std::vector<double> fmask;              // dropout mask on the final hidden
  std::vector<double> f;                  // final hidden state
  std::vector<double> logits;
  std::vector<double> policy;
  double value_pre = 0.0, value = 0.0;
  int legal_slots = 0;
};

namespace detail {

inline std::vector<double> softmax(const std::vector<double>& logits) {
  double mx = -1e300;
  for (double v : logits) mx = std::max(mx, v);
  double z = 0.0;
  std::vector<double> out(logits.size());
  for (size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    z += out[i];
  }
  for (double& v : out) v /= z;
  return out;
}

inline void matvec(const CMatView& w, const double* x, const double* bias, double* y) {
  for (int r = 0; r < w.rows; ++r) {
    const double* row = w.row(r);
    double acc = bias ? bias[r] : 0.0;
    for (int c = 0; c < w.cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

// y += W^T g
inline void matvec_t_add(const CMatView& w, const double* g, double* y) {
  for (int r = 0; r < w.rows; ++r) {
    const double* row = w.row(r);
    const double gr = g[r];
    if (gr == 0.0) continue;
    for (int c = 0; c < w.cols; ++c) y[c] += row[c] * gr;
  }
}

// dW += g x^T, db += g
inline void outer_add(const MatView& dw, double* db, const double* g, const double* x) {
  for (int r = 0; r < dw.rows; ++r) {
    double* row = dw.row(r);
    const double gr = g[r];
    if (db) db[r] += gr;
    if (gr == 0.0) continue;
    for (int c = 0; c < dw.cols; ++c) row[c] += gr * x[c];
  }
}

inline void dropout_forward(std::vector<double>& x, std::vector<double>& mask, double rate,
                            Rng* rng) {
  mask.assign(x.size(), 1.0);
  if (rate <= 0.0 || rng == nullptr) return;
  const double keep = 1.0 - rate;
  for (size_t i = 0; i < x.size(); ++i) {
    mask[i] = rng->uniform() < rate ? 0.0 : 1.0 / keep;
    x[i] *= mask[i];
  }
}

}  // namespace detail

inline GinOutput gin_forward(const LatticeGraph& g, const ModelParams& params, bool train_mode,
                             const std::vector<double>* extra = nullptr, Rng* dropout_rng = nullptr,
                             ForwardTrace* trace = nullptr) {
  const GinConfig& cfg = params.cfg;
  if (cfg.head == PolicyHead::pivots && g.n > cfg.n_max)
    throw SizeExceedsMax("gin_forward: graph size exceeds n_max");
  const ParamLayout lay(cfg);
  if (params.flat.size() != lay.total) throw DimensionMismatch("gin_forward: bad parameter vector");
  const CParamsView w{params.flat.data(), &lay, &cfg};
  const int V = g.num_nodes(), H = cfg.hidden_dim, L = cfg.num_layers;
  const bool drop = train_mode && cfg.dropout_rate > 0.0 && dropout_rng != nullptr;

  ForwardTrace local;
  ForwardTrace& tr = trace ? *trace : local;
  tr.h.assign(L + 1, {});
  tr.z.assign(L + 1, {});
  tr.a1.assign(L + 1, {});
  tr.mask.assign(L + 1, {});

  tr.h[0].resize(static_cast<size_t>(V) * kNodeFeatureDim);
  for (int v = 0; v < V; ++v) node_features(g, v, &tr.h[0][static_cast<size_t>(v) * kNodeFeatureDim]);

  for (int k = 1; k <= L; ++k) {
    const int in = cfg.layer_input_dim(k - 1);
    const double eps = w.eps(k - 1);
    auto& z = tr.z[k];
    z.assign(static_cast<size_t>(V) * in, 0.0);
    const auto& hp = tr.h[k - 1];
    for (int v = 0; v < V; ++v) {
      double* zv = &z[static_cast<size_t>(v) * in];
      const double* hv = &hp[static_cast<size_t>(v) * in];
      for (int c = 0; c < in; ++c) zv[c] = (1.0 + eps) * hv[c];
      for (int u : g.neighbors[v]) {
        const double* hu = &hp[static_cast<size_t>(u) * in];
        for (int c = 0; c < in; ++c) zv[c] += hu[c];
      }
    }
    auto& a1 = tr.a1[k];
    a1.resize(static_cast<size_t>(V) * H);
    auto& h = tr.h[k];
    h.resize(static_cast<size_t>(V) * H);
    std::vector<double> r(H);
    for (int v = 0; v < V; ++v) {
      detail::matvec(w.w1(k - 1), &z[static_cast<size_t>(v) * in], w.b1(k - 1),
                     &a1[static_cast<size_t>(v) * H]);
      for (int i = 0; i < H; ++i) r[i] = std::max(0.0, a1[static_cast<size_t>(v) * H + i]);
      detail::matvec(w.w2(k - 1), r.data(), w.b2(k - 1), &h[static_cast<size_t>(v) * H]);
    }
    if (drop) detail::dropout_forward(h, tr.mask[k], cfg.dropout_rate, dropout_rng);
  }

  // Per-layer sum pooling, concatenated, plus graph-level extra input. The
  // sums are scaled by 1/V before the combiner; the factor folds into the
  // combiner weights, so this only conditions the optimization across graph
  // sizes rather than changing the function class.
  const int E = cfg.extra_dim();
  const double pool_scale = 1.0 / static_cast<double>(V);
  tr.pooled.assign(static_cast<size_t>(L) * H + E, 0.0);
  for (int k = 1; k <= L; ++k) {
    double* dst = &tr.pooled[static_cast<size_t>(k - 1) * H];
    for (int v = 0; v < V; ++v) {
      const double* hv = &tr.h[k][static_cast<size_t>(v) * H];
      for (int i = 0; i < H; ++i) dst[i] += hv[i];
    }
    for (int i = 0; i < H; ++i) dst[i] *= pool_scale;
  }
  if (E > 0 && extra) {
    if (extra->size() != static_cast<size_t>(E)) throw DimensionMismatch("gin_forward: bad extra input");
    for (int i = 0; i < E; ++i) tr.pooled[static_cast<size_t>(L) * H + i] = (*extra)[i];
  }

  tr.uc.resize(H);
  detail::matvec(w.wc(), tr.pooled.data(), w.bc(), tr.uc.data());
  tr.f.resize(H);
  for (int i = 0; i < H; ++i) tr.f[i] = std::max(0.0, tr.uc[i]);
  if (drop) detail::dropout_forward(tr.f, tr.fmask, cfg.dropout_rate, dropout_rng);

  tr.value_pre = w.bv();
  for (int i = 0; i < H; ++i) tr.value_pre += w.wv()[i] * tr.f[i];
  tr.value = std::tanh(tr.value_pre);

  const int P = cfg.policy_dim();
  tr.logits.resize(P);
  detail::matvec(w.wp(), tr.f.data(), w.bp(), tr.logits.data());

  GinOutput out;
  out.value = tr.value;
  if (cfg.head == PolicyHead::pivots) {
    out.policy = map_policy(tr.logits, g.n, cfg.n_max).values;
    tr.legal_slots = strict_upper_count(g.n);
  } else {
    out.policy = detail::softmax(tr.logits);  // all 8 options are always legal
    tr.legal_slots = kNumSweepOptions;
  }
  tr.policy = out.policy;
  return out;
}

// --- training ---------------------------------------------------------------

struct TrainSample {
  LatticeGraph graph;
  std::vector<double> extra;          // empty unless the head uses a graph-level input
  std::vector<double> policy_target;  // proper probability vector, policy_dim long
  double value_target = 0.0;          // in [-1, 1]
};

namespace detail {

// accumulates d(loss_sample)/d(params) into grad; returns the sample loss
inline double gin_backward(const LatticeGraph& g, const ModelParams& params,
                           const ForwardTrace& tr, const std::vector<double>& policy_target,
                           double value_target, std::vector<double>& grad) {
  const GinConfig& cfg = params.cfg;
  const ParamLayout lay(cfg);
  const CParamsView w{params.flat.data(), &lay, &cfg};
  const ParamsView dw{grad.data(), &lay, &cfg};
  const int V = g.num_nodes(), H = cfg.hidden_dim, L = cfg.num_layers, P = cfg.policy_dim();

  // loss = (value - z)^2 - sum_a pi(a) log p(a); log p from logits directly
  double mx = -1e300;
  for (int i = 0; i < tr.legal_slots; ++i) mx = std::max(mx, tr.logits[i]);
  double lse = 0.0;
  for (int i = 0; i < tr.legal_slots; ++i) lse += std::exp(tr.logits[i] - mx);
  lse = mx + std::log(lse);
  double ce = 0.0;
  for (int i = 0; i < tr.legal_slots; ++i)
    if (policy_target[i] > 0.0) ce -= policy_target[i] * (tr.logits[i] - lse);
  const double verr = tr.value - value_target;
  const double loss = verr * verr + ce;

  // value head
  const double dv = 2.0 * verr * (1.0 - tr.value * tr.value);
  std::vector<double> df(H, 0.0);
  for (int i = 0; i < H; ++i) {
    dw.wv()[i] += dv * tr.f[i];
    df[i] += dv * w.wv()[i];
  }
  dw.bv() += dv;

  // policy head; illegal slots carry no gradient
  std::vector<double> dlogits(P, 0.0);
  for (int i = 0; i < tr.legal_slots; ++i) dlogits[i] = tr.policy[i] - policy_target[i];
  outer_add(dw.wp(), dw.bp(), dlogits.data(), tr.f.data());
  matvec_t_add(w.wp(), dlogits.data(), df.data());

  // combiner
  std::vector<double> duc(H);
  for (int i = 0; i < H; ++i) {
    double d = df[i];
    if (!tr.fmask.empty()) d *= tr.fmask[i];
    duc[i] = tr.uc[i] > 0.0 ? d : 0.0;
  }
  outer_add(dw.wc(), dw.bc(), duc.data(), tr.pooled.data());
  std::vector<double> dpooled(tr.pooled.size(), 0.0);
  matvec_t_add(w.wc(), duc.data(), dpooled.data());

  // walk the message-passing layers backwards
  const double pool_scale = 1.0 / static_cast<double>(V);
  std::vector<double> dh(static_cast<size_t>(V) * H, 0.0);
  std::vector<double> dh_prev;
  std::vector<double> da1(H), dz(std::max(H, kNodeFeatureDim));
  std::vector<double> r(H);
  for (int k = L; k >= 1; --k) {
    const int in = cfg.layer_input_dim(k - 1);
    const double* dpool = &dpooled[static_cast<size_t>(k - 1) * H];
    const double eps = w.eps(k - 1);
    dh_prev.assign(static_cast<size_t>(V) * in, 0.0);
    double deps = 0.0;
    for (int v = 0; v < V; ++v) {
      double* dhv = &dh[static_cast<size_t>(v) * H];
      for (int i = 0; i < H; ++i) dhv[i] += dpool[i] * pool_scale;
      if (!tr.mask[k].empty())
        for (int i = 0; i < H; ++i) dhv[i] *= tr.mask[k][static_cast<size_t>(v) * H + i];
      const double* a1v = &tr.a1[k][static_cast<size_t>(v) * H];
      for (int i = 0; i < H; ++i) r[i] = std::max(0.0, a1v[i]);
      outer_add(dw.w2(k - 1), dw.b2(k - 1), dhv, r.data());
      std::fill(da1.begin(), da1.end(), 0.0);
      matvec_t_add(w.w2(k - 1), dhv, da1.data());
      for (int i = 0; i < H; ++i)
        if (a1v[i] <= 0.0) da1[i] = 0.0;
      const double* zv = &tr.z[k][static_cast<size_t>(v) * in];
      outer_add(dw.w1(k - 1), dw.b1(k - 1), da1.data(), zv);
      std::fill(dz.begin(), dz.begin() + in, 0.0);
      matvec_t_add(w.w1(k - 1), da1.data(), dz.data());
      // z_v = (1+eps) h_v + sum_{u in N(v)} h_u
      const double* hv = &tr.h[k - 1][static_cast<size_t>(v) * in];
      double* dhp_v = &dh_prev[static_cast<size_t>(v) * in];
      for (int c = 0; c < in; ++c) {
        dhp_v[c] += (1.0 + eps) * dz[c];
        deps += dz[c] * hv[c];
      }
      for (int u : g.neighbors[v]) {
        double* dhp_u = &dh_prev[static_cast<size_t>(u) * in];
        for (int c = 0; c < in; ++c) dhp_u[c] += dz[c];
      }
    }
    if (cfg.learn_eps) dw.eps(k - 1) += deps;
    dh.swap(dh_prev);  // dh now holds gradients w.r.t. h[k-1]
  }
  return loss;
}

}  // namespace detail

// Mean batch loss
//   mean_batch[(v - z)^2 - sum_a pi(a) log p(a)] + l2 * |w|^2
// and its full gradient. Dropout masks are drawn per sample when a rate and
// an rng are supplied (training); omit the rng for a deterministic loss.
inline std::pair<double, std::vector<double>> loss_and_gradient(
    const ModelParams& params, const std::vector<TrainSample>& batch, bool train_mode = true,
    Rng* dropout_rng = nullptr) {
  if (batch.empty()) throw std::invalid_argument("loss_and_gradient: empty batch");
  const ParamLayout lay(params.cfg);
  std::vector<double> grad(lay.total, 0.0);
  double loss_sum = 0.0;
  for (const auto& s : batch) {
    ForwardTrace tr;
    const std::vector<double>* extra = s.extra.empty() ? nullptr : &s.extra;
    gin_forward(s.graph, params, train_mode, extra, dropout_rng, &tr);
    loss_sum += detail::gin_backward(s.graph, params, tr, s.policy_target, s.value_target, grad);
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  const double l2 = params.cfg.l2_coeff;
  double l2_term = 0.0;
  for (size_t i = 0; i < grad.size(); ++i) {
    const double w = params.flat[i];
    l2_term += w * w;
    grad[i] = grad[i] * inv + 2.0 * l2 * w;
  }
  return {loss_sum * inv + l2 * l2_term, std::move(grad)};
}

// One gradient-descent update; returns the loss at the pre-update parameters.
inline double train_step(ModelParams& params, const std::vector<TrainSample>& batch, double lr,
                         Rng* dropout_rng = nullptr) {
  auto [loss, grad] = loss_and_gradient(params, batch, /*train_mode=*/true, dropout_rng);
  if (!std::isfinite(loss))
    throw NonFiniteLoss("train_step: non-finite loss (batch=" + std::to_string(batch.size()) +
                        ", lr=" + std::to_string(lr) + ", iteration=" +
                        std::to_string(params.iteration) + ")");
  for (size_t i = 0; i < grad.size(); ++i) params.flat[i] -= lr * grad[i];
  params.iteration += 1;
  return loss;
}

// loss of a batch at fixed parameters, no update, no dropout
inline double eval_loss(const ModelParams& params, const std::vector<TrainSample>& batch) {
  return loss_and_gradient(params, batch, /*train_mode=*/false, nullptr).first;
}

// --- checkpoints -------------------------------------------------------------

namespace detail {

constexpr char kCheckpointMagic[8] = {'J', 'R', 'L', 'G', 'I', 'N', 'C', 'K'};
constexpr uint32_t kCheckpointVersion = 1;

template <class T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
void read_pod(std::istream& is, T& v) {
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw CorruptFile("checkpoint: truncated");
}

}  // namespace detail

inline void save_params(const std::string& path, const ModelParams& p) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw CorruptFile("checkpoint: cannot open for write: " + path);
  f.write(detail::kCheckpointMagic, sizeof(detail::kCheckpointMagic));
  detail::write_pod(f, detail::kCheckpointVersion);
  detail::write_pod(f, static_cast<uint32_t>(p.cfg.head));
  detail::write_pod(f, static_cast<int32_t>(p.cfg.n_max));
  detail::write_pod(f, static_cast<int32_t>(p.cfg.num_layers));
  detail::write_pod(f, static_cast<int32_t>(p.cfg.hidden_dim));
  detail::write_pod(f, static_cast<uint8_t>(p.cfg.learn_eps ? 1 : 0));
  detail::write_pod(f, p.cfg.dropout_rate);
  detail::write_pod(f, p.cfg.l2_coeff);
  detail::write_pod(f, p.iteration);
  detail::write_pod(f, p.seed);
  detail::write_pod(f, static_cast<uint64_t>(p.flat.size()));
  f.write(reinterpret_cast<const char*>(p.flat.data()),
          static_cast<std::streamsize>(p.flat.size() * sizeof(double)));
  if (!f) throw CorruptFile("checkpoint: write failed: " + path);
}

inline ModelParams load_params(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CorruptFile("checkpoint: cannot open for read: " + path);
  char magic[8];
  if (!f.read(magic, sizeof(magic)) || std::memcmp(magic, detail::kCheckpointMagic, 8) != 0)
    throw CorruptFile("checkpoint: bad magic: " + path);
  uint32_t version = 0;
  detail::read_pod(f, version);
  if (version != detail::kCheckpointVersion)
    throw VersionMismatch("checkpoint: version " + std::to_string(version) + " unsupported");
  ModelParams p;
  uint32_t head = 0;
  int32_t n_max = 0, layers = 0, hidden = 0;
  uint8_t learn_eps = 0;
  detail::read_pod(f, head);
  detail::read_pod(f, n_max);
  detail::read_pod(f, layers);
  detail::read_pod(f, hidden);
  detail::read_pod(f, learn_eps);
  detail::read_pod(f, p.cfg.dropout_rate);
  detail::read_pod(f, p.cfg.l2_coeff);
  detail::read_pod(f, p.iteration);
  detail::read_pod(f, p.seed);
  if (head > 1 || n_max < 2 || layers < 1 || hidden < 1)
    throw CorruptFile("checkpoint: implausible header fields");
  p.cfg.head = static_cast<PolicyHead>(head);
  p.cfg.n_max = n_max;
  p.cfg.num_layers = layers;
  p.cfg.hidden_dim = hidden;
  p.cfg.learn_eps = learn_eps != 0;
  uint64_t count = 0;
  detail::read_pod(f, count);
  const ParamLayout lay(p.cfg);
  if (count != lay.total) throw CorruptFile("checkpoint: parameter count mismatch");
  p.flat.resize(count);
  if (!f.read(reinterpret_cast<char*>(p.flat.data()),
              static_cast<std::streamsize>(count * sizeof(double))))
    throw CorruptFile("checkpoint: truncated parameter block");
  return p;
}

}  // namespace jacobirl
