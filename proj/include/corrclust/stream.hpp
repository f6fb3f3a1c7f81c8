#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "corrclust/types.hpp"

namespace corrclust {

enum class StreamMode { insertion_only, dynamic };

struct StreamOptions {
  StreamMode mode = StreamMode::insertion_only;
  double churn = 0.0;  // decoy insert/delete pairs per explicit edge; dynamic only
  std::uint64_t seed = 0;
  // Also emit the implicit negative pairs of complete_mode instances as
  // explicit negative inserts. Off by default: implicit negatives normally
  // stay implicit. Insertion-only algorithms that coin-flip on negative
  // arrivals can opt in.
  bool include_implicit_negatives = false;
};

/// Materializes a graph as an edge stream. Dynamic mode interleaves
/// churn * m decoy insert/delete pairs drawn from distinct non-edges, so the
/// net result replays to exactly the input graph.
inline Stream to_stream(const SignedGraph& g, const StreamOptions& opt) {
  if (opt.churn < 0) throw std::invalid_argument("to_stream: negative churn");
  std::mt19937_64 rng(opt.seed);

  std::vector<EdgeUpdate> items;
  for (auto [u, v] : g.pos_edges()) items.push_back({u, v, EdgeSign::positive, +1});
  for (auto [u, v] : g.neg_edges()) items.push_back({u, v, EdgeSign::negative, +1});
  if (opt.include_implicit_negatives && g.complete_mode()) {
    for (int u = 0; u < g.n(); ++u)
      for (int v = u + 1; v < g.n(); ++v)
        if (!g.has_pos(u, v)) items.push_back({u, v, EdgeSign::negative, +1});
  }

  if (opt.mode == StreamMode::insertion_only) {
    std::shuffle(items.begin(), items.end(), rng);
    return {g.n(), std::move(items)};
  }

  // Decoys: distinct non-edges of the final graph. Complete-mode instances get
  // positive decoys (the stream carries G+ only); otherwise the sign is random.
  long long m = static_cast<long long>(items.size());
  long long want = std::llround(opt.churn * static_cast<double>(m));
  long long free_pairs = g.pair_count() - static_cast<long long>(g.pos_edges().size()) -
                         static_cast<long long>(g.neg_edges().size());
  if (opt.include_implicit_negatives && g.complete_mode()) free_pairs = 0;
  long long n_decoys = std::min(want, free_pairs);

  std::unordered_set<std::uint64_t> used;
  std::vector<VertexPair> decoys;
  std::uniform_int_distribution<int> pick(0, std::max(g.n() - 1, 0));
  while (static_cast<long long>(decoys.size()) < n_decoys) {
    int u = pick(rng), v = pick(rng);
    if (u == v) continue;
    auto key = pair_key(u, v);
    if (g.has_pos(u, v) || g.has_neg(u, v) || used.count(key)) continue;
    used.insert(key);
    decoys.push_back(ordered(u, v));
  }

  // decoy_of[i]: index of the decoy that update i belongs to, -1 for real
  // items. After a full shuffle, each decoy's insert is swapped in front of its
  // delete if needed, which preserves the uniform arrangement of the multiset.
  std::vector<int> decoy_of(items.size(), -1);
  std::uniform_int_distribution<int> sign_die(0, 1);
  for (int d = 0; d < static_cast<int>(decoys.size()); ++d) {
    EdgeSign s = g.complete_mode()
                     ? EdgeSign::positive
                     : (sign_die(rng) ? EdgeSign::positive : EdgeSign::negative);
    items.push_back({decoys[d].first, decoys[d].second, s, +1});
    decoy_of.push_back(d);
    items.push_back({decoys[d].first, decoys[d].second, s, -1});
    decoy_of.push_back(d);
  }
  std::vector<size_t> idx(items.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<EdgeUpdate> out(items.size());
  std::vector<int> out_decoy(items.size());
  for (size_t i = 0; i < idx.size(); ++i) {
    out[i] = items[idx[i]];
    out_decoy[i] = decoy_of[idx[i]];
  }
  std::unordered_map<int, size_t> first_pos;
  for (size_t i = 0; i < out.size(); ++i) {
    int d = out_decoy[i];
    if (d < 0) continue;
    auto it = first_pos.find(d);
    if (it == first_pos.end()) {
      first_pos.emplace(d, i);
    } else if (out[it->second].delta == -1) {
      std::swap(out[it->second], out[i]);
    }
  }
  return {g.n(), std::move(out)};
}

/// Replays a stream into the net graph it encodes. Any pair whose multiplicity
/// goes negative, or ends above one, is a stream-integrity violation.
inline SignedGraph materialize_stream(const Stream& s, bool complete_mode) {
  std::unordered_map<std::uint64_t, int> pos_mult, neg_mult;
  for (const auto& e : s.updates) {
    if (e.u == e.v) throw stream_error("materialize_stream: self-loop update");
    if (e.u < 0 || e.v < 0 || e.u >= s.n || e.v >= s.n)
      throw stream_error("materialize_stream: endpoint out of range");
    auto& mult = e.sign == EdgeSign::positive ? pos_mult : neg_mult;
    int& m = mult[pair_key(e.u, e.v)];
    m += e.delta;
    if (m < 0) throw stream_error("materialize_stream: delete without matching insert");
  }
  std::vector<VertexPair> pos, neg;
  for (auto& [key, m] : pos_mult) {
    if (m > 1) throw stream_error("materialize_stream: net multiplicity above one");
    if (m == 1) pos.push_back({static_cast<int>(key >> 32), static_cast<int>(key & 0xffffffffu)});
  }
  for (auto& [key, m] : neg_mult) {
    if (m > 1) throw stream_error("materialize_stream: net multiplicity above one");
    if (m == 1) neg.push_back({static_cast<int>(key >> 32), static_cast<int>(key & 0xffffffffu)});
  }
  if (complete_mode) neg.clear();
  return SignedGraph(s.n, std::move(pos), std::move(neg), complete_mode);
}

}  // namespace corrclust
