#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "corrclust/hash.hpp"
#include "corrclust/predictor.hpp"
#include "corrclust/space_meter.hpp"
#include "corrclust/types.hpp"

namespace corrclust {

/// Reweighted subgraph of G+ approximating its cuts within (1 +- epsilon).
struct SparsifierGraph {
  struct WeightedEdge {
    Vertex u, v;
    double w;
  };

  int n = 0;
  std::vector<WeightedEdge> edges;
  double epsilon = 0.0;

  long long words() const { return 3LL * static_cast<long long>(edges.size()) + 2; }
};

inline double adapted_quality_L(const SparsifierGraph& h, const std::vector<VertexPair>& neg_edges,
                                const DistanceOracle& o) {
  double L = 0.0;
  for (const auto& e : h.edges) L += e.w * o.query(e.u, e.v);
  for (auto [u, v] : neg_edges) L += 1.0 - o.query(u, v);
  return L;
}

/// Total prediction mass of the sparsifier, sum of w'*d over its edges.
inline double total_prediction_volume(const SparsifierGraph& h, const DistanceOracle& o) {
  double v = 0.0;
  for (const auto& e : h.edges) v += e.w * o.query(e.u, e.v);
  return v;
}

/// Weight of the cut (a, V \ a) in h.
inline double cut_weight(const SparsifierGraph& h, const std::vector<char>& in_a) {
  double w = 0.0;
  for (const auto& e : h.edges)
    if (in_a[e.u] != in_a[e.v]) w += e.w;
  return w;
}

inline double cut_weight(const SparsifierGraph& h, const std::vector<Vertex>& a) {
  std::vector<char> mask(h.n, 0);
  for (Vertex v : a) mask[v] = 1;
  return cut_weight(h, mask);
}

/// Electrical resistance between u and v: (e_u - e_v)^T L^+ (e_u - e_v),
/// computed densely on u's connected component. Infinity when disconnected.
inline double effective_resistance(int n, const std::vector<SparsifierGraph::WeightedEdge>& edges,
                                   Vertex u, Vertex v) {
  if (u == v) return 0.0;
  // Component of u via union-find.
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : edges) parent[find(e.u)] = find(e.v);
  if (find(u) != find(v)) return std::numeric_limits<double>::infinity();

  std::vector<int> local(n, -1);
  int m = 0;
  int root = find(u);
  for (int x = 0; x < n; ++x)
    if (find(x) == root) local[x] = m++;

  // L + J/m is positive definite on the component and agrees with L^+ on
  // vectors orthogonal to the all-ones vector.
  Eigen::MatrixXd L = Eigen::MatrixXd::Constant(m, m, 1.0 / m);
  for (const auto& e : edges) {
    int a = local[e.u], b = local[e.v];
    if (a < 0 || b < 0) continue;
    L(a, a) += e.w;
    L(b, b) += e.w;
    L(a, b) -= e.w;
    L(b, a) -= e.w;
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  rhs[local[u]] = 1.0;
  rhs[local[v]] = -1.0;
  Eigen::VectorXd x = L.ldlt().solve(rhs);
  return x[local[u]] - x[local[v]];
}

inline double effective_resistance(const SparsifierGraph& g, Vertex u, Vertex v) {
  return effective_resistance(g.n, g.edges, u, v);
}

enum class SparsifierMode { exact, sampled };

struct SparsifierOptions {
  SparsifierMode mode = SparsifierMode::exact;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  double sampling_constant = 8.0;  // the C in p_e = min(1, C ln(n) eps^-2 w_e R(e))
  SpaceMeter* meter = nullptr;
};

/// Single-pass insertion-only sparsifier construction. Exact mode keeps every
/// edge at unit weight (an epsilon = 0 sparsifier). Sampled mode buffers edges
/// and, whenever the buffer exceeds ~eps^-2 n log n, merges it into the current
/// sparsifier and resamples edges by effective resistance.
class SparsifierBuilder {
 public:
  SparsifierBuilder(int n, const SparsifierOptions& opt) : n_(n), opt_(opt), rng_(opt.seed) {
    if (opt.mode == SparsifierMode::sampled && !(opt.epsilon > 0.0 && opt.epsilon < 1.0))
      throw std::invalid_argument("SparsifierBuilder: sampled mode needs epsilon in (0,1)");
    double ln_n = std::log(std::max(n, 2));
    buffer_limit_ = opt.mode == SparsifierMode::sampled
                        ? std::max<long long>(64, static_cast<long long>(
                              std::ceil(4.0 * n * ln_n / (opt.epsilon * opt.epsilon))))
                        : std::numeric_limits<long long>::max();
  }

  void add_edge(Vertex u, Vertex v) {
    if (u == v || u < 0 || v < 0 || u >= n_ || v >= n_)
      throw std::invalid_argument("SparsifierBuilder: bad edge");
    auto key = pair_key(u, v);
    if (seen_.count(key)) return;  // net multiplicity is 0 or 1 per pair
    seen_.insert(key);
    auto [a, b] = ordered(u, v);
    buffer_.push_back({a, b, 1.0});
    if (static_cast<long long>(buffer_.size()) > buffer_limit_) reduce();
    rebase();
  }

  SparsifierGraph finalize() {
    if (opt_.mode == SparsifierMode::sampled && !buffer_.empty()) reduce();
    SparsifierGraph out;
    out.n = n_;
    out.epsilon = opt_.mode == SparsifierMode::exact ? 0.0 : opt_.epsilon;
    out.edges = opt_.mode == SparsifierMode::exact ? std::move(buffer_) : std::move(current_);
    buffer_.clear();
    current_.clear();
    seen_.clear();
    rebase();
    return out;
  }

  long long words() const { return charged_; }

 private:
  void reduce() {
    // Merge buffer into the running sparsifier, then resample every edge with
    // probability min(1, C ln(n) eps^-2 w_e R(e)) and weight w_e / p_e, where
    // R(e) is the effective resistance in the merged graph.
    std::vector<SparsifierGraph::WeightedEdge> merged = std::move(current_);
    merged.insert(merged.end(), buffer_.begin(), buffer_.end());
    buffer_.clear();
    double scale = opt_.sampling_constant * std::log(std::max(n_, 2)) /
                   (opt_.epsilon * opt_.epsilon);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    current_.clear();
    for (const auto& e : merged) {
      double r = effective_resistance(n_, merged, e.u, e.v);
      double p = std::min(1.0, scale * e.w * r);
      if (p >= 1.0 || unit(rng_) < p) current_.push_back({e.u, e.v, e.w / p});
    }
  }

  // One word per dedup key, three per live edge.
  void rebase() {
    long long now = static_cast<long long>(seen_.size()) +
                    3LL * static_cast<long long>(buffer_.size() + current_.size());
    if (opt_.meter) {
      if (now > charged_) opt_.meter->alloc(now - charged_);
      else opt_.meter->release(charged_ - now);
    }
    charged_ = now;
  }

  int n_;
  SparsifierOptions opt_;
  std::mt19937_64 rng_;
  long long buffer_limit_;
  long long charged_ = 0;
  std::unordered_set<std::uint64_t> seen_;
  std::vector<SparsifierGraph::WeightedEdge> buffer_;
  std::vector<SparsifierGraph::WeightedEdge> current_;
};

/// Builds a sparsifier from an insertion-only stream of positive edges.
/// Deletions are unsupported here; dynamic streams go through the replay
/// concession owned by the harness.
inline SparsifierGraph build_sparsifier(const Stream& s, const SparsifierOptions& opt) {
  SparsifierBuilder b(s.n, opt);
  for (const auto& e : s.updates) {
    if (e.sign != EdgeSign::positive) continue;
    if (e.delta < 0)
      throw stream_error("build_sparsifier: deletions unsupported in insertion-only mode");
    b.add_edge(e.u, e.v);
  }
  return b.finalize();
}

inline SparsifierGraph exact_sparsifier(const SignedGraph& g) {
  SparsifierGraph h;
  h.n = g.n();
  h.epsilon = 0.0;
  for (auto [u, v] : g.pos_edges()) h.edges.push_back({u, v, 1.0});
  return h;
}

/// Streaming estimate of a clustering's cost on a complete instance: sum over
/// clusters of [ the sparsifier cut of the cluster + C(|C|,2) - half the exact
/// positive degree mass ]. With the exact sparsifier this telescopes to
/// crossing positives plus intra-cluster implicit negatives, i.e. the cost.
inline double estimated_cost(const SparsifierGraph& h, const std::vector<int>& pos_degrees,
                             const Clustering& c, bool clamp = false) {
  if (c.size() != h.n || static_cast<int>(pos_degrees.size()) != h.n)
    throw std::invalid_argument("estimated_cost: size mismatch");
  std::unordered_map<int, double> boundary;
  std::unordered_map<int, long long> sizes;
  std::unordered_map<int, double> deg_mass;
  for (int v = 0; v < h.n; ++v) {
    ++sizes[c.labels[v]];
    deg_mass[c.labels[v]] += pos_degrees[v];
  }
  for (const auto& e : h.edges) {
    if (c.labels[e.u] != c.labels[e.v]) {
      boundary[c.labels[e.u]] += e.w;
      boundary[c.labels[e.v]] += e.w;
    }
  }
  double total = 0.0;
  for (auto& [label, sz] : sizes) {
    double cut = 0.0;
    if (auto it = boundary.find(label); it != boundary.end()) cut = it->second;
    total += cut + 0.5 * static_cast<double>(sz) * (sz - 1) - 0.5 * deg_mass[label];
  }
  return clamp ? std::max(0.0, total) : total;
}

}  // namespace corrclust
