#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>
#include <unordered_set>
#include <vector>

#include "corrclust/hash.hpp"
#include "corrclust/l0_sampler.hpp"
#include "corrclust/pivot.hpp"
#include "corrclust/predictor.hpp"
#include "corrclust/sparsifier.hpp"
#include "corrclust/space_meter.hpp"
#include "corrclust/stream.hpp"
#include "corrclust/types.hpp"

namespace corrclust {

struct StreamingRunReport {
  std::string algo;
  int n = 0;
  std::uint64_t seed = 0;
  int chosen_branch = 1;
  double est_cost_1 = 0.0;
  double est_cost_2 = 0.0;
  long long words_peak = 0;    // algorithm state only
  long long replay_words = 0;  // desk-scale replay concession, metered apart
  double runtime_ms = 0.0;
  long long recovered_edges = -1;  // dynamic only
  bool recovery_complete = true;   // dynamic only
};

struct DynamicCcOptions {
  double epsilon = 0.2;
  double c = 4.0;
  std::uint64_t seed = 0;
  // Per-vertex sampler cap; the paper-scale target 10 c log(n) sigma_u is far
  // beyond desk memory. -1 resolves to ceil(64 ln n).
  int s_max = -1;
  bool clamp_estimates = false;
  RoundingParams rounding{};
  // Test hook: recover every edge incident to interesting vertices from the
  // replayed stream instead of from the samplers.
  bool force_full_recovery = false;
  const RandomPermutation* pi_override = nullptr;
};

struct DynamicCcResult {
  Clustering clustering;
  StreamingRunReport report;
  Clustering branch1, branch2;
};

/// Single-pass algorithm for complete instances in dynamic streams: per-vertex
/// l0-samplers over the positive adjacency vectors plus exact degree counters;
/// post-processing recovers the edges incident to interesting vertices, runs
/// the truncated pivot pair on the store, and keeps the clustering with the
/// lower estimated cost. Negative-signed items are not part of G+ and are
/// skipped. Cost estimation uses an exact sparsifier rebuilt from a second
/// pass over the stream; its storage is metered separately as a concession.
inline DynamicCcResult dynamic_cc(const Stream& stream, const DistanceOracle& oracle,
                                  const DynamicCcOptions& opt) {
  auto t0 = std::chrono::steady_clock::now();
  const int n = stream.n;
  TruncationThresholds thr(n, opt.epsilon, opt.c);
  SpaceMeter meter;

  RandomPermutation pi = opt.pi_override ? *opt.pi_override
                                         : RandomPermutation::random(n, mix64(opt.seed, 1));
  const std::uint64_t fp_seed = mix64(opt.seed, 2);
  const double ln_n = std::log(static_cast<double>(std::max(n, 2)));
  const int s_max = opt.s_max > 0 ? opt.s_max : static_cast<int>(std::ceil(64.0 * ln_n));

  std::vector<std::vector<L0Sampler>> bank(n);
  std::vector<int> degree(n, 0);
  meter.alloc(2LL * n);  // ranks + degree counters
  for (Vertex u = 0; u < n; ++u) {
    double target = 10.0 * opt.c * ln_n * thr.sigma(pi.rank(u));
    int count = target > s_max ? s_max : std::max(1, static_cast<int>(std::ceil(target)));
    bank[u].reserve(count);
    for (int j = 0; j < count; ++j) {
      bank[u].emplace_back(n, 0.1, mix64(opt.seed, 3 + u, j), fp_seed);
      meter.alloc(bank[u].back().words());
    }
  }
  meter.record_phase("preprocessing");

  for (const auto& e : stream.updates) {
    if (e.sign != EdgeSign::positive) continue;
    if (e.u == e.v || e.u < 0 || e.v < 0 || e.u >= n || e.v >= n)
      throw stream_error("dynamic_cc: bad stream item");
    degree[e.u] += e.delta;
    degree[e.v] += e.delta;
    if (degree[e.u] < 0 || degree[e.v] < 0)
      throw stream_error("dynamic_cc: net negative multiplicity");
    std::uint64_t cu = detail::fp_coeff(fp_seed, static_cast<std::uint64_t>(e.u));
    std::uint64_t cv = detail::fp_coeff(fp_seed, static_cast<std::uint64_t>(e.v));
    for (auto& s : bank[e.u]) s.update_with_coeff(e.v, e.delta, cv);
    for (auto& s : bank[e.v]) s.update_with_coeff(e.u, e.delta, cu);
  }
  meter.record_phase("streaming");

  std::vector<char> interesting(n, 0);
  for (Vertex u = 0; u < n; ++u) interesting[u] = !thr.uninteresting(pi.rank(u), degree[u]);

  StreamingRunReport report;
  report.algo = "dynamic";
  report.n = n;
  report.seed = opt.seed;

  // Replay concession: the net graph backs the exact cost-estimation
  // sparsifier (and forced recovery in tests).
  SignedGraph net = materialize_stream(stream, /*complete_mode=*/true);
  SparsifierGraph cost_basis = exact_sparsifier(net);
  report.replay_words = 3LL * static_cast<long long>(net.pos_edges().size()) + cost_basis.words();

  std::vector<VertexPair> recovered;
  bool complete = true;
  if (opt.force_full_recovery) {
    for (auto [u, v] : net.pos_edges())
      if (interesting[u] || interesting[v]) recovered.push_back({u, v});
  } else {
    std::unordered_set<std::uint64_t> seen;
    for (Vertex u = 0; u < n; ++u) {
      if (!interesting[u]) continue;
      std::unordered_set<Vertex> distinct;
      for (const auto& s : bank[u]) {
        if (static_cast<int>(distinct.size()) >= degree[u]) break;
        auto got = s.sample();
        if (!got) continue;
        if (distinct.insert(*got).second && seen.insert(pair_key(u, *got)).second)
          recovered.push_back(ordered(u, *got));
      }
      if (static_cast<int>(distinct.size()) < degree[u]) complete = false;
    }
  }
  report.recovered_edges = static_cast<long long>(recovered.size());
  report.recovery_complete = complete;

  SignedGraph rec(n, std::move(recovered), {}, /*complete_mode=*/true);
  PivotStoreContext ctx;
  ctx.attach_graph = &rec;
  ctx.interesting = interesting;
  ctx.pos_degrees = degree;
  ctx.store_adj.resize(n);
  for (auto [u, v] : rec.pos_edges())
    if (interesting[u] && interesting[v]) {
      ctx.store_adj[u].push_back(v);
      ctx.store_adj[v].push_back(u);
    }
  meter.alloc(2LL * static_cast<long long>(rec.pos_edges().size()));
  meter.record_phase("postprocessing");

  DynamicCcResult out;
  out.branch1 = truncated_pivot(ctx, pi, thr);
  out.branch2 = truncated_pivot_pred(ctx, pi, oracle, thr, opt.rounding,
                                     mix64(opt.seed, kJoinCoinTag));
  report.est_cost_1 = estimated_cost(cost_basis, degree, out.branch1, opt.clamp_estimates);
  report.est_cost_2 = estimated_cost(cost_basis, degree, out.branch2, opt.clamp_estimates);
  report.chosen_branch = report.est_cost_2 < report.est_cost_1 ? 2 : 1;  // tie keeps branch 1
  out.clustering = report.chosen_branch == 1 ? out.branch1 : out.branch2;
  report.words_peak = meter.words_peak();
  report.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  out.report = std::move(report);
  return out;
}

/// Rank-ordered neighbor queue capped at k entries; admission evicts the
/// highest-rank member when full.
class NeighborQueue {
 public:
  NeighborQueue(Vertex owner, int k, const RandomPermutation& pi) : k_(k), pi_(&pi) {
    entries_.push_back(owner);
  }

  void add(Vertex v) {
    auto pos = std::lower_bound(entries_.begin(), entries_.end(), v,
                                [&](Vertex a, Vertex b) { return pi_->rank(a) < pi_->rank(b); });
    if (pos != entries_.end() && *pos == v) return;
    entries_.insert(pos, v);
    if (static_cast<int>(entries_.size()) > k_) entries_.pop_back();
  }

  const std::vector<Vertex>& entries() const { return entries_; }

 private:
  int k_;
  const RandomPermutation* pi_;
  std::vector<Vertex> entries_;
};

struct InsertionCcOptions {
  int k = 10;
  double epsilon = 0.2;
  std::uint64_t seed = 0;
  double sampling_constant = 8.0;
  bool clamp_estimates = false;
  RoundingParams rounding{};
  const RandomPermutation* pi_override = nullptr;
};

struct InsertionCcResult {
  Clustering clustering;
  StreamingRunReport report;
  Clustering branch1, branch2;
};

/// Single-pass algorithm for complete instances in insertion-only streams:
/// A(u) keeps the k lowest-rank positive neighbors seen so far, B(u) admits
/// arrivals of either sign with probability 1 - p_uv (one coin per pair), and
/// both queue families are clustered in rank order after the stream. The cost
/// estimator runs on a sparsifier built during the stream.
inline InsertionCcResult insertion_cc(const Stream& stream, const DistanceOracle& oracle,
                                      const InsertionCcOptions& opt) {
  auto t0 = std::chrono::steady_clock::now();
  if (opt.k < 2) throw std::invalid_argument("insertion_cc: k must be at least 2");
  const int n = stream.n;
  SpaceMeter meter;
  RandomPermutation pi = opt.pi_override ? *opt.pi_override
                                         : RandomPermutation::random(n, mix64(opt.seed, 1));
  const std::uint64_t coin_seed = mix64(opt.seed, kJoinCoinTag);

  std::vector<NeighborQueue> a_queues, b_queues;
  a_queues.reserve(n);
  b_queues.reserve(n);
  for (Vertex u = 0; u < n; ++u) {
    a_queues.emplace_back(u, opt.k, pi);
    b_queues.emplace_back(u, opt.k, pi);
  }
  std::vector<int> degree(n, 0);
  meter.alloc(2LL * n + 2LL * n * (opt.k + 1));

  SparsifierOptions sp;
  sp.mode = SparsifierMode::sampled;
  sp.epsilon = opt.epsilon;
  sp.seed = mix64(opt.seed, 4);
  sp.sampling_constant = opt.sampling_constant;
  sp.meter = &meter;
  SparsifierBuilder builder(n, sp);

  for (const auto& e : stream.updates) {
    if (e.delta < 0) throw stream_error("insertion_cc: deletion in insertion-only stream");
    if (e.u == e.v || e.u < 0 || e.v < 0 || e.u >= n || e.v >= n)
      throw stream_error("insertion_cc: bad stream item");
    if (e.sign == EdgeSign::positive) {
      a_queues[e.u].add(e.v);
      a_queues[e.v].add(e.u);
      ++degree[e.u];
      ++degree[e.v];
      builder.add_edge(e.u, e.v);
    }
    double p = round_probability(e.sign, oracle.query(e.u, e.v), opt.rounding);
    if (pair_coin_u01(coin_seed, e.u, e.v) < 1.0 - p) {
      b_queues[e.u].add(e.v);
      b_queues[e.v].add(e.u);
    }
  }
  meter.record_phase("streaming");

  SparsifierGraph h = builder.finalize();
  meter.alloc(h.words());

  auto snapshot = [&](const std::vector<NeighborQueue>& qs) {
    std::vector<std::vector<Vertex>> out(n);
    for (Vertex u = 0; u < n; ++u) out[u] = qs[u].entries();
    return out;
  };
  InsertionCcResult out;
  out.branch1 = cluster_from_queues(pi, snapshot(a_queues), opt.k);
  out.branch2 = cluster_from_queues(pi, snapshot(b_queues), opt.k);
  meter.record_phase("postprocessing");

  StreamingRunReport report;
  report.algo = "insertion";
  report.n = n;
  report.seed = opt.seed;
  report.est_cost_1 = estimated_cost(h, degree, out.branch1, opt.clamp_estimates);
  report.est_cost_2 = estimated_cost(h, degree, out.branch2, opt.clamp_estimates);
  report.chosen_branch = report.est_cost_2 < report.est_cost_1 ? 2 : 1;
  out.clustering = report.chosen_branch == 1 ? out.branch1 : out.branch2;
  report.words_peak = meter.words_peak();
  report.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  out.report = std::move(report);
  return out;
}

}  // namespace corrclust
