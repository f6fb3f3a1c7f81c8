#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace corrclust {

using Vertex = int;
using VertexPair = std::pair<Vertex, Vertex>;

enum class EdgeSign { positive, negative };

inline VertexPair ordered(Vertex u, Vertex v) {
  return u < v ? VertexPair{u, v} : VertexPair{v, u};
}

inline std::uint64_t pair_key(Vertex u, Vertex v) {
  auto [a, b] = ordered(u, v);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

// Raised on malformed or inconsistent edge streams (net-negative multiplicity,
// deletions fed to insertion-only algorithms, and the like).
struct stream_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A ±-labeled graph. In complete_mode every unlisted pair is an implicit
/// negative edge; implicit negatives are never materialized.
class SignedGraph {
 public:
  SignedGraph() = default;

  SignedGraph(int n, std::vector<VertexPair> pos, std::vector<VertexPair> neg,
              bool complete_mode)
      : n_(n), complete_mode_(complete_mode) {
    if (n < 0) throw std::invalid_argument("SignedGraph: negative vertex count");
    if (complete_mode && !neg.empty())
      throw std::invalid_argument("SignedGraph: complete_mode forbids explicit negatives");
    pos_adj_.resize(n);
    neg_adj_.resize(n);
    for (auto& e : pos) add_edge(e.first, e.second, EdgeSign::positive);
    for (auto& e : neg) add_edge(e.first, e.second, EdgeSign::negative);
    for (auto& a : pos_adj_) std::sort(a.begin(), a.end());
    for (auto& a : neg_adj_) std::sort(a.begin(), a.end());
    std::sort(pos_edges_.begin(), pos_edges_.end());
    std::sort(neg_edges_.begin(), neg_edges_.end());
  }

  int n() const { return n_; }
  bool complete_mode() const { return complete_mode_; }
  const std::vector<VertexPair>& pos_edges() const { return pos_edges_; }
  const std::vector<VertexPair>& neg_edges() const { return neg_edges_; }
  const std::vector<Vertex>& pos_neighbors(Vertex u) const { return pos_adj_[u]; }
  const std::vector<Vertex>& neg_neighbors(Vertex u) const { return neg_adj_[u]; }
  int pos_degree(Vertex u) const { return static_cast<int>(pos_adj_[u].size()); }

  bool has_pos(Vertex u, Vertex v) const { return pos_set_.count(pair_key(u, v)) != 0; }
  bool has_neg(Vertex u, Vertex v) const { return neg_set_.count(pair_key(u, v)) != 0; }

  // Pair label under the instance's semantics: in complete_mode any non-positive
  // pair is negative; otherwise unlisted pairs are neutral (cost-free).
  bool is_negative_pair(Vertex u, Vertex v) const {
    return complete_mode_ ? !has_pos(u, v) : has_neg(u, v);
  }

  long long pair_count() const {
    return static_cast<long long>(n_) * (n_ - 1) / 2;
  }

 private:
  void add_edge(Vertex u, Vertex v, EdgeSign sign) {
    if (u == v) throw std::invalid_argument("SignedGraph: self-loop");
    if (u < 0 || v < 0 || u >= n_ || v >= n_)
      throw std::invalid_argument("SignedGraph: endpoint out of range");
    auto key = pair_key(u, v);
    if (pos_set_.count(key) || neg_set_.count(key))
      throw std::invalid_argument("SignedGraph: duplicate or conflicting edge");
    auto [a, b] = ordered(u, v);
    if (sign == EdgeSign::positive) {
      pos_set_.insert(key);
      pos_edges_.push_back({a, b});
      pos_adj_[a].push_back(b);
      pos_adj_[b].push_back(a);
    } else {
      neg_set_.insert(key);
      neg_edges_.push_back({a, b});
      neg_adj_[a].push_back(b);
      neg_adj_[b].push_back(a);
    }
  }

  int n_ = 0;
  bool complete_mode_ = false;
  std::vector<VertexPair> pos_edges_, neg_edges_;
  std::vector<std::vector<Vertex>> pos_adj_, neg_adj_;
  std::unordered_set<std::uint64_t> pos_set_, neg_set_;
};

/// One stream item: endpoint pair, sign, +1 insert / -1 delete.
struct EdgeUpdate {
  Vertex u = 0, v = 0;
  EdgeSign sign = EdgeSign::positive;
  int delta = +1;
};

struct Stream {
  int n = 0;
  std::vector<EdgeUpdate> updates;
};

/// Total assignment of vertices to cluster ids. Ids are opaque: costs (and all
/// comparisons used in tests) are invariant under relabeling.
struct Clustering {
  std::vector<int> labels;

  int size() const { return static_cast<int>(labels.size()); }
  bool same_cluster(Vertex u, Vertex v) const { return labels[u] == labels[v]; }

  int num_clusters() const {
    std::unordered_set<int> ids(labels.begin(), labels.end());
    return static_cast<int>(ids.size());
  }

  std::vector<std::vector<Vertex>> clusters() const {
    std::unordered_map<int, int> index;
    std::vector<std::vector<Vertex>> out;
    for (Vertex v = 0; v < size(); ++v) {
      auto [it, fresh] = index.try_emplace(labels[v], static_cast<int>(out.size()));
      if (fresh) out.emplace_back();
      out[it->second].push_back(v);
    }
    return out;
  }

  // Relabels cluster ids in order of first occurrence; canonical form for
  // comparing clusterings irrespective of id choice.
  Clustering canonical() const {
    std::unordered_map<int, int> remap;
    Clustering out;
    out.labels.reserve(labels.size());
    for (int l : labels) {
      auto [it, fresh] = remap.try_emplace(l, static_cast<int>(remap.size()));
      out.labels.push_back(it->second);
    }
    return out;
  }

  bool operator==(const Clustering& other) const {
    return canonical().labels == other.canonical().labels;
  }
};

/// Bijection V -> {1,..,n}, reproducible from a seed.
struct RandomPermutation {
  std::vector<int> rank_of;  // vertex -> rank in 1..n
  std::vector<Vertex> order; // rank-1 -> vertex

  static RandomPermutation random(int n, std::uint64_t seed) {
    RandomPermutation p;
    p.order.resize(n);
    std::iota(p.order.begin(), p.order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(p.order.begin(), p.order.end(), rng);
    p.build_ranks();
    return p;
  }

  static RandomPermutation from_order(std::vector<Vertex> order) {
    RandomPermutation p;
    p.order = std::move(order);
    p.build_ranks();
    return p;
  }

  int n() const { return static_cast<int>(order.size()); }
  int rank(Vertex v) const { return rank_of[v]; }
  Vertex at_rank(int r) const { return order[r - 1]; }

 private:
  void build_ranks() {
    rank_of.assign(order.size(), 0);
    for (int r = 0; r < static_cast<int>(order.size()); ++r) {
      if (order[r] < 0 || order[r] >= static_cast<int>(order.size()) || rank_of[order[r]] != 0)
        throw std::invalid_argument("RandomPermutation: not a bijection");
      rank_of[order[r]] = r + 1;
    }
  }
};

}  // namespace corrclust
