#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "corrclust/predictor.hpp"
#include "corrclust/sparsifier.hpp"
#include "corrclust/space_meter.hpp"
#include "corrclust/stream.hpp"
#include "corrclust/types.hpp"

namespace corrclust {

/// A finalized ball: members within prediction distance radius of the center,
/// with its boundary weight and volume at that radius.
struct BallState {
  Vertex center = -1;
  double radius = 0.0;
  std::vector<Vertex> members;
  double boundary = 0.0;
  double volume = 0.0;
  bool safeguard_hit = false;  // finalized at the 1/3 cap (non-metric input)
};

/// Volume of the ball (center, members, r) against the remainder-restricted
/// sparsifier edges: V*/n seed term, intra-ball prediction mass, and the
/// partial mass of cut edges. v_star is the total prediction volume of the
/// ORIGINAL sparsifier.
inline double ball_volume(const SparsifierGraph& h_remainder, const DistanceOracle& o,
                          Vertex center, const std::vector<Vertex>& members, double r,
                          int n_total, double v_star) {
  if (n_total <= 0) throw std::invalid_argument("ball_volume: n_total must be positive");
  std::vector<char> in(h_remainder.n, 0);
  for (Vertex v : members) {
    if (o.query(center, v) > r)
      throw std::invalid_argument("ball_volume: member beyond the stated radius");
    in[v] = 1;
  }
  double vol = v_star / n_total;
  for (const auto& e : h_remainder.edges) {
    bool iu = in[e.u], iv = in[e.v];
    if (iu && iv) vol += e.w * o.query(e.u, e.v);
    else if (iu) vol += e.w * (r - o.query(center, e.u));
    else if (iv) vol += e.w * (r - o.query(center, e.v));
  }
  return vol;
}

inline double ball_volume(const SparsifierGraph& h, const DistanceOracle& o, Vertex center,
                          const std::vector<Vertex>& members, double r, int n_total) {
  return ball_volume(h, o, center, members, r, n_total, total_prediction_volume(h, o));
}

/// Grows a ball around `center` over the remaining vertices until the boundary
/// is at most log_factor times the volume, returning the smallest such radius.
///
/// Between membership events the boundary is constant and the volume linear in
/// r with slope equal to the boundary, so each segment is solved in closed
/// form. Metric predictions terminate below 1/3; otherwise the ball is
/// finalized just under 1/3 and flagged.
inline BallState grow_ball(const std::vector<SparsifierGraph::WeightedEdge>& remainder_edges,
                           const DistanceOracle& o, const std::vector<Vertex>& remainder,
                           Vertex center, int n_total, double v_star, double log_factor) {
  constexpr double kRadiusCap = 1.0 / 3.0 - 1e-9;
  const double seed_term = v_star / n_total;

  std::vector<std::pair<double, Vertex>> by_dist;
  by_dist.reserve(remainder.size());
  for (Vertex v : remainder) by_dist.push_back({o.query(center, v), v});
  std::sort(by_dist.begin(), by_dist.end());

  std::unordered_map<Vertex, std::vector<std::pair<Vertex, double>>> adj;
  for (const auto& e : remainder_edges) {
    adj[e.u].push_back({e.v, e.w});
    adj[e.v].push_back({e.u, e.w});
  }

  std::unordered_map<Vertex, char> in;
  double intra = 0.0, cut_w = 0.0, cut_base = 0.0;
  auto add_member = [&](Vertex x) {
    in[x] = 1;
    auto it = adj.find(x);
    if (it == adj.end()) return;
    for (auto [y, w] : it->second) {
      if (in.count(y)) {
        // formerly a cut edge with inside endpoint y
        intra += w * o.query(x, y);
        cut_w -= w;
        cut_base -= w * o.query(center, y);
      } else {
        cut_w += w;
        cut_base += w * o.query(center, x);
      }
    }
  };

  BallState out;
  out.center = center;
  auto finalize = [&](double r, bool safeguard) {
    out.radius = r;
    out.safeguard_hit = safeguard;
    out.boundary = cut_w;
    out.volume = seed_term + intra - cut_base + cut_w * r;
    for (auto& [d, v] : by_dist)
      if (d <= r) out.members.push_back(v);
    std::sort(out.members.begin(), out.members.end());
    return out;
  };

  size_t i = 0;
  while (i < by_dist.size() && by_dist[i].first <= kRadiusCap) {
    double event_r = by_dist[i].first;
    while (i < by_dist.size() && by_dist[i].first == event_r) add_member(by_dist[i++].second);
    double vol_here = seed_term + intra - cut_base + cut_w * event_r;
    if (cut_w <= log_factor * vol_here) return finalize(event_r, false);
    double next_event = i < by_dist.size() ? by_dist[i].first : std::numeric_limits<double>::infinity();
    // cut_w > 0 past this point: a zero boundary always satisfies the rule.
    double r_th = (cut_w / log_factor - (seed_term + intra - cut_base)) / cut_w;
    if (r_th < next_event && r_th <= kRadiusCap) return finalize(r_th, false);
    if (next_event > kRadiusCap) break;
  }
  return finalize(kRadiusCap, true);
}

enum class GeneralFallback { ballgrow, singletons };

struct GeneralCcOptions {
  double epsilon = 0.2;
  std::uint64_t seed = 0;
  // Budget for storing negative edges, in words; -1 resolves to
  // 16 eps^-2 n ceil(log2 n).
  long long neg_budget_words = -1;
  GeneralFallback fallback = GeneralFallback::ballgrow;
  double sampling_constant = 8.0;
};

struct BallInfo {
  Vertex center;
  double radius;
  int size;
};

struct GeneralCcReport {
  int n = 0;
  std::uint64_t seed = 0;
  std::string branch;  // "ballgrow" | "fallback_ballgrow" | "fallback_singletons"
  bool neg_budget_exceeded = false;
  long long words_peak = 0;
  long long replay_words = 0;
  std::vector<BallInfo> balls;
  int safeguard_warnings = 0;
  double runtime_ms = 0.0;
  double adapted_L = 0.0;  // measured against the realized sparsifier
};

struct GeneralCcResult {
  Clustering clustering;
  GeneralCcReport report;
};

/// Single-pass algorithm for general signed graphs: maintain a sparsifier of
/// G+ and store negative edges until their word budget is exceeded. If the
/// budget holds, the configured fallback strategy produces the clustering;
/// otherwise prediction-guided ball growing peels clusters off the sparsifier.
/// Dynamic positive streams route through a replayed net edge set, metered
/// separately.
inline GeneralCcResult general_cc(const Stream& stream, const DistanceOracle& oracle,
                                  const GeneralCcOptions& opt) {
  auto t0 = std::chrono::steady_clock::now();
  const int n = stream.n;
  SpaceMeter meter;
  GeneralCcReport report;
  report.n = n;
  report.seed = opt.seed;

  long long budget = opt.neg_budget_words;
  if (budget < 0) {
    int log2n = 1;
    while ((1 << log2n) < std::max(n, 2)) ++log2n;
    budget = static_cast<long long>(16.0 / (opt.epsilon * opt.epsilon)) * n * log2n;
  }

  bool has_pos_deletion = false;
  for (const auto& e : stream.updates)
    if (e.sign == EdgeSign::positive && e.delta < 0) {
      has_pos_deletion = true;
      break;
    }

  SparsifierOptions sp;
  sp.mode = SparsifierMode::sampled;
  sp.epsilon = opt.epsilon;
  sp.seed = mix64(opt.seed, 4);
  sp.sampling_constant = opt.sampling_constant;
  sp.meter = &meter;
  SparsifierBuilder builder(n, sp);

  std::unordered_map<std::uint64_t, int> pos_mult;  // replay concession (dynamic only)
  std::unordered_map<std::uint64_t, char> negatives;
  bool storing_negatives = true;
  bool exceeded = false;

  for (const auto& e : stream.updates) {
    if (e.u == e.v || e.u < 0 || e.v < 0 || e.u >= n || e.v >= n)
      throw stream_error("general_cc: bad stream item");
    if (e.sign == EdgeSign::positive) {
      if (has_pos_deletion) {
        int& m = pos_mult[pair_key(e.u, e.v)];
        m += e.delta;
        if (m < 0) throw stream_error("general_cc: delete without matching insert");
      } else {
        builder.add_edge(e.u, e.v);
      }
    } else if (storing_negatives) {
      auto key = pair_key(e.u, e.v);
      if (e.delta > 0) {
        if (!negatives.emplace(key, 1).second)
          throw stream_error("general_cc: duplicate negative insert");
        meter.alloc(2);
        if (2LL * static_cast<long long>(negatives.size()) > budget) {
          exceeded = true;
          storing_negatives = false;
          meter.release(2LL * static_cast<long long>(negatives.size()));
          negatives.clear();
        }
      } else {
        if (negatives.erase(key) == 0)
          throw stream_error("general_cc: delete without matching insert");
        meter.release(2);
      }
    }
  }
  if (has_pos_deletion) {
    report.replay_words = 3LL * static_cast<long long>(pos_mult.size());
    for (auto& [key, m] : pos_mult) {
      if (m > 1) throw stream_error("general_cc: net multiplicity above one");
      if (m == 1)
        builder.add_edge(static_cast<int>(key >> 32), static_cast<int>(key & 0xffffffffu));
    }
  }
  SparsifierGraph h = builder.finalize();
  meter.alloc(h.words());
  meter.record_phase("streaming");

  report.neg_budget_exceeded = exceeded;
  std::vector<VertexPair> stored_negatives;
  for (auto& [key, one] : negatives)
    stored_negatives.push_back({static_cast<int>(key >> 32), static_cast<int>(key & 0xffffffffu)});
  report.adapted_L = adapted_quality_L(h, stored_negatives, oracle);

  GeneralCcResult out;
  bool use_fallback = !exceeded;
  report.branch = use_fallback
                      ? (opt.fallback == GeneralFallback::ballgrow ? "fallback_ballgrow"
                                                                   : "fallback_singletons")
                      : "ballgrow";

  if (use_fallback && opt.fallback == GeneralFallback::singletons) {
    out.clustering.labels.resize(n);
    for (Vertex v = 0; v < n; ++v) out.clustering.labels[v] = v;
  } else {
    const double v_star = total_prediction_volume(h, oracle);
    const double log_factor = 3.0 * std::log(static_cast<double>(n) + 1.0);
    std::vector<char> remaining(n, 1);
    std::vector<SparsifierGraph::WeightedEdge> edges = h.edges;
    out.clustering.labels.assign(n, -1);
    int next = 0;
    for (Vertex center = 0; center < n; ++center) {
      if (!remaining[center]) continue;
      std::vector<Vertex> remainder;
      for (Vertex v = center; v < n; ++v)
        if (remaining[v]) remainder.push_back(v);
      BallState ball = grow_ball(edges, oracle, remainder, center, n, v_star, log_factor);
      for (Vertex v : ball.members) {
        out.clustering.labels[v] = next;
        remaining[v] = 0;
      }
      ++next;
      if (ball.safeguard_hit) ++report.safeguard_warnings;
      report.balls.push_back({ball.center, ball.radius, static_cast<int>(ball.members.size())});
      std::erase_if(edges, [&](const SparsifierGraph::WeightedEdge& e) {
        return !remaining[e.u] || !remaining[e.v];
      });
    }
  }
  report.words_peak = meter.words_peak();
  report.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  out.report = std::move(report);
  return out;
}

}  // namespace corrclust
