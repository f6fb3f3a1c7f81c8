#pragma once

#include <climits>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "corrclust/hash.hpp"
#include "corrclust/predictor.hpp"
#include "corrclust/types.hpp"

namespace corrclust {

// Tag mixed into a run seed to derive the per-pair join coins. Streaming
// wrappers and their offline equivalents must share this derivation for the
// coupling tests to be exact.
inline constexpr std::uint64_t kJoinCoinTag = 0x4A4F494EULL;

/// Rank/degree truncation thresholds. A vertex u is uninteresting iff
/// pi_u >= tau_u iff deg+(u) >= sigma_u; both reduce to rank * degree >= key
/// with key = (c/eps) * n * ln(n), so every caller tests the same product.
struct TruncationThresholds {
  double epsilon = 0.2;
  double c = 4.0;
  int n = 0;
  double key = 0.0;

  TruncationThresholds(int n_, double epsilon_ = 0.2, double c_ = 4.0)
      : epsilon(epsilon_), c(c_), n(n_) {
    if (!(epsilon > 0.0 && epsilon < 0.25))
      throw std::invalid_argument("TruncationThresholds: epsilon outside (0, 1/4)");
    if (!(c > 0.0)) throw std::invalid_argument("TruncationThresholds: c must be positive");
    if (n < 0) throw std::invalid_argument("TruncationThresholds: negative n");
    key = (c / epsilon) * n * std::log(static_cast<double>(std::max(n, 1)));
  }

  double tau(int pos_deg) const {
    return pos_deg <= 0 ? std::numeric_limits<double>::infinity() : key / pos_deg;
  }
  double sigma(int rank) const { return key / rank; }
  double ell(int t) const { return key / t; }

  bool uninteresting(int rank, int pos_deg) const {
    return pos_deg > 0 && static_cast<double>(rank) * pos_deg >= key;
  }

  // pi_v < tau_u for the attach step.
  bool rank_below_tau(int rank_v, int deg_u) const {
    return deg_u <= 0 || static_cast<double>(rank_v) * deg_u < key;
  }

  // Smallest iteration t in 1..n with deg >= ell_t; 0 when none.
  int singleton_iteration(int pos_deg) const {
    if (pos_deg <= 0) return 0;
    long long t = static_cast<long long>(std::ceil(key / pos_deg));
    if (t < 1) t = 1;
    while (t > 1 && static_cast<double>(t - 1) * pos_deg >= key) --t;
    while (static_cast<double>(t) * pos_deg < key) ++t;
    return t > n ? 0 : static_cast<int>(t);
  }
};

/// Inputs shared by the truncated pivot pair: the store (subgraph induced by
/// interesting vertices), the graph whose edges back the attach step and pair
/// signs, and the exact end-of-stream positive degrees.
struct PivotStoreContext {
  const SignedGraph* attach_graph = nullptr;
  std::vector<char> interesting;
  std::vector<std::vector<Vertex>> store_adj;
  std::vector<int> pos_degrees;
};

inline PivotStoreContext make_offline_store(const SignedGraph& g, const RandomPermutation& pi,
                                            const TruncationThresholds& thr) {
  PivotStoreContext ctx;
  ctx.attach_graph = &g;
  ctx.interesting.resize(g.n());
  ctx.pos_degrees.resize(g.n());
  ctx.store_adj.resize(g.n());
  for (Vertex v = 0; v < g.n(); ++v) {
    ctx.pos_degrees[v] = g.pos_degree(v);
    ctx.interesting[v] = !thr.uninteresting(pi.rank(v), ctx.pos_degrees[v]);
  }
  for (auto [u, v] : g.pos_edges())
    if (ctx.interesting[u] && ctx.interesting[v]) {
      ctx.store_adj[u].push_back(v);
      ctx.store_adj[v].push_back(u);
    }
  return ctx;
}

namespace detail {

inline void validate_store(const PivotStoreContext& ctx, int n) {
  if (!ctx.attach_graph || ctx.attach_graph->n() != n ||
      static_cast<int>(ctx.interesting.size()) != n ||
      static_cast<int>(ctx.store_adj.size()) != n ||
      static_cast<int>(ctx.pos_degrees.size()) != n)
    throw std::invalid_argument("pivot: malformed store context");
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v : ctx.store_adj[u]) {
      if (!ctx.interesting[u] || !ctx.interesting[v] || !ctx.attach_graph->has_pos(u, v))
        throw std::invalid_argument("pivot: store is not an induced subgraph of the positive graph");
    }
}

inline EdgeSign pair_sign(const SignedGraph& g, Vertex u, Vertex v) {
  return g.has_pos(u, v) ? EdgeSign::positive : EdgeSign::negative;
}

}  // namespace detail

/// Deterministic truncated pivot: rank-order pivots over the store, then each
/// uninteresting vertex joins the smallest-rank admissible pivot it is
/// positively connected to; leftovers become singletons.
inline Clustering truncated_pivot(const PivotStoreContext& ctx, const RandomPermutation& pi,
                                  const TruncationThresholds& thr) {
  const int n = pi.n();
  detail::validate_store(ctx, n);
  std::vector<int> label(n, -1);
  std::vector<char> is_pivot(n, 0);
  int next = 0;
  for (int r = 1; r <= n; ++r) {
    Vertex u = pi.at_rank(r);
    if (!ctx.interesting[u] || label[u] != -1) continue;
    is_pivot[u] = 1;
    label[u] = next;
    for (Vertex v : ctx.store_adj[u])
      if (label[v] == -1) label[v] = next;
    ++next;
  }
  for (Vertex u = 0; u < n; ++u) {
    if (ctx.interesting[u]) continue;
    int best_rank = INT_MAX;
    Vertex best = -1;
    for (Vertex v : ctx.attach_graph->pos_neighbors(u)) {
      if (!is_pivot[v] || !thr.rank_below_tau(pi.rank(v), ctx.pos_degrees[u])) continue;
      if (pi.rank(v) < best_rank) {
        best_rank = pi.rank(v);
        best = v;
      }
    }
    if (best >= 0) label[u] = label[best];
  }
  for (Vertex u = 0; u < n; ++u)
    if (label[u] == -1) label[u] = next++;
  return Clustering{std::move(label)};
}

/// Prediction-guided variant: pivot clusters are formed by independent coin
/// flips with separation probability p_uv = f(d_uv), and uninteresting
/// vertices try admissible pivots in rank order with the same coins.
inline Clustering truncated_pivot_pred(const PivotStoreContext& ctx, const RandomPermutation& pi,
                                       const DistanceOracle& oracle,
                                       const TruncationThresholds& thr,
                                       const RoundingParams& params, std::uint64_t coin_seed) {
  const int n = pi.n();
  detail::validate_store(ctx, n);
  const SignedGraph& g = *ctx.attach_graph;
  std::vector<int> label(n, -1);
  std::vector<Vertex> pivots_by_rank;
  int next = 0;
  for (int r = 1; r <= n; ++r) {
    Vertex u = pi.at_rank(r);
    if (!ctx.interesting[u] || label[u] != -1) continue;
    label[u] = next;
    pivots_by_rank.push_back(u);
    for (Vertex v = 0; v < n; ++v) {
      if (v == u || !ctx.interesting[v] || label[v] != -1) continue;
      double p = round_probability(detail::pair_sign(g, u, v), oracle.query(u, v), params);
      if (pair_coin_u01(coin_seed, u, v) < 1.0 - p) label[v] = label[u];
    }
    ++next;
  }
  for (Vertex u = 0; u < n; ++u) {
    if (ctx.interesting[u]) continue;
    for (Vertex v : pivots_by_rank) {
      if (!thr.rank_below_tau(pi.rank(v), ctx.pos_degrees[u])) continue;
      double p = round_probability(detail::pair_sign(g, u, v), oracle.query(u, v), params);
      if (pair_coin_u01(coin_seed, u, v) < 1.0 - p) {
        label[u] = label[v];
        break;
      }
    }
  }
  for (Vertex u = 0; u < n; ++u)
    if (label[u] == -1) label[u] = next++;
  return Clustering{std::move(label)};
}

/// Sequential truncated pivot over the full graph: at iteration t the
/// unclustered vertices of degree >= ell_t become singletons, then the t-th
/// vertex of pi pivots if still unclustered.
inline Clustering cklpu_pivot(const SignedGraph& g, const RandomPermutation& pi,
                              const TruncationThresholds& thr) {
  const int n = g.n();
  std::vector<int> label(n, -1);
  std::vector<std::vector<Vertex>> trigger(n + 1);
  for (Vertex v = 0; v < n; ++v) {
    int t = thr.singleton_iteration(g.pos_degree(v));
    if (t >= 1) trigger[t].push_back(v);
  }
  int next = 0;
  for (int t = 1; t <= n; ++t) {
    for (Vertex v : trigger[t])
      if (label[v] == -1) label[v] = next++;
    Vertex u = pi.at_rank(t);
    if (label[u] != -1) continue;
    label[u] = next;
    for (Vertex v : g.pos_neighbors(u))
      if (label[v] == -1) label[v] = next;
    ++next;
  }
  return Clustering{std::move(label)};
}

/// cklpu_pivot with probabilistic joins: a pivot u absorbs each unclustered v
/// with probability 1 - p_uv; the degree-based singleton rule is unchanged.
inline Clustering pairwise_diss(const SignedGraph& g, const RandomPermutation& pi,
                                const DistanceOracle& oracle, const TruncationThresholds& thr,
                                const RoundingParams& params, std::uint64_t coin_seed) {
  const int n = g.n();
  std::vector<int> label(n, -1);
  std::vector<std::vector<Vertex>> trigger(n + 1);
  for (Vertex v = 0; v < n; ++v) {
    int t = thr.singleton_iteration(g.pos_degree(v));
    if (t >= 1) trigger[t].push_back(v);
  }
  int next = 0;
  for (int t = 1; t <= n; ++t) {
    for (Vertex v : trigger[t])
      if (label[v] == -1) label[v] = next++;
    Vertex u = pi.at_rank(t);
    if (label[u] != -1) continue;
    label[u] = next;
    for (Vertex v = 0; v < n; ++v) {
      if (v == u || label[v] != -1) continue;
      double p = round_probability(detail::pair_sign(g, u, v), oracle.query(u, v), params);
      if (pair_coin_u01(coin_seed, u, v) < 1.0 - p) label[v] = next;
    }
    ++next;
  }
  return Clustering{std::move(label)};
}

/// Pivot with per-vertex counters: a non-pivot turn increments the counters of
/// its unclustered positive neighbors; a counter reaching k forces a
/// singleton. pi supplies the uniform processing order.
inline Clustering cm_pivot(const SignedGraph& g, int k, const RandomPermutation& pi) {
  if (k < 2) throw std::invalid_argument("cm_pivot: k must be at least 2");
  const int n = g.n();
  std::vector<int> label(n, -1);
  std::vector<int> counter(n, 0);
  int next = 0;
  for (int t = 1; t <= n; ++t) {
    Vertex w = pi.at_rank(t);
    if (label[w] == -1) {
      label[w] = next;
      for (Vertex v : g.pos_neighbors(w))
        if (label[v] == -1) label[v] = next;
      ++next;
    } else {
      for (Vertex v : g.pos_neighbors(w)) {
        if (label[v] != -1) continue;
        if (++counter[v] == k) label[v] = next++;
      }
    }
  }
  return Clustering{std::move(label)};
}

/// cm_pivot with probabilistic joins and probabilistic counter increments.
inline Clustering pairwise_diss2(const SignedGraph& g, const DistanceOracle& oracle, int k,
                                 const RandomPermutation& pi, const RoundingParams& params,
                                 std::uint64_t coin_seed) {
  if (k < 2) throw std::invalid_argument("pairwise_diss2: k must be at least 2");
  const int n = g.n();
  std::vector<int> label(n, -1);
  std::vector<int> counter(n, 0);
  int next = 0;
  for (int t = 1; t <= n; ++t) {
    Vertex w = pi.at_rank(t);
    if (label[w] == -1) {
      label[w] = next;
      for (Vertex v = 0; v < n; ++v) {
        if (v == w || label[v] != -1) continue;
        double p = round_probability(detail::pair_sign(g, v, w), oracle.query(v, w), params);
        if (pair_coin_u01(coin_seed, v, w) < 1.0 - p) label[v] = next;
      }
      ++next;
    } else {
      for (Vertex v = 0; v < n; ++v) {
        if (label[v] != -1) continue;
        double p = round_probability(detail::pair_sign(g, v, w), oracle.query(v, w), params);
        if (pair_coin_u01(coin_seed, v, w) < 1.0 - p && ++counter[v] == k) label[v] = next++;
      }
    }
  }
  return Clustering{std::move(label)};
}

/// Prerounds every pair into a sampled instance G' (pair positive with
/// probability 1 - p_uv) and runs cm_pivot on G'. Shares the per-pair coins
/// with pairwise_diss2, which makes the two coincide run-for-run under a
/// common seed.
inline Clustering pairwise_diss2_preround(const SignedGraph& g, const DistanceOracle& oracle,
                                          int k, const RandomPermutation& pi,
                                          const RoundingParams& params, std::uint64_t coin_seed) {
  if (k < 2) throw std::invalid_argument("pairwise_diss2_preround: k must be at least 2");
  const int n = g.n();
  std::vector<VertexPair> pos;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v) {
      double p = round_probability(detail::pair_sign(g, u, v), oracle.query(u, v), params);
      if (p < 1.0 && pair_coin_u01(coin_seed, u, v) < 1.0 - p) pos.push_back({u, v});
    }
  SignedGraph sampled(n, std::move(pos), {}, /*complete_mode=*/true);
  return cm_pivot(sampled, k, pi);
}

/// Post-processing of the insertion-only algorithm: scan vertices in rank
/// order; each joins the lowest-rank pivot in its queue, self-pivots when it
/// is its own best candidate, and otherwise becomes a singleton.
///
/// A queue must contain its owner unless it was filled to `capacity`, in which
/// case the owner was legitimately evicted by lower-rank entries.
inline Clustering cluster_from_queues(const RandomPermutation& pi,
                                      const std::vector<std::vector<Vertex>>& queues,
                                      int capacity = -1) {
  const int n = pi.n();
  if (static_cast<int>(queues.size()) != n)
    throw std::invalid_argument("cluster_from_queues: one queue per vertex required");
  for (Vertex u = 0; u < n; ++u) {
    bool has_owner = false;
    for (size_t i = 0; i < queues[u].size(); ++i) {
      if (queues[u][i] == u) has_owner = true;
      if (i > 0 && pi.rank(queues[u][i - 1]) >= pi.rank(queues[u][i]))
        throw std::invalid_argument("cluster_from_queues: queue not sorted by rank");
    }
    if (!has_owner && (capacity < 0 || static_cast<int>(queues[u].size()) != capacity))
      throw std::invalid_argument("cluster_from_queues: owner missing from its own queue");
  }
  std::vector<int> label(n, -1);
  std::vector<char> is_pivot(n, 0);
  int next = 0;
  for (int r = 1; r <= n; ++r) {
    Vertex u = pi.at_rank(r);
    Vertex best = -1;
    for (Vertex v : queues[u])
      if (is_pivot[v] || v == u) {
        best = v;
        break;
      }
    if (best == -1) {
      label[u] = next++;
    } else if (best == u) {
      is_pivot[u] = 1;
      label[u] = next++;
    } else {
      label[u] = label[best];
    }
  }
  return Clustering{std::move(label)};
}

}  // namespace corrclust
