#pragma once

#include <random>
#include <stdexcept>
#include <vector>

#include "corrclust/types.hpp"

namespace corrclust {

struct SbmResult {
  SignedGraph graph;
  Clustering ground_truth;
};

/// Stochastic block model with planted near-equal clusters: intra-cluster
/// pairs positive with probability p, inter-cluster pairs positive with
/// probability 1-p. Result is a complete_mode instance.
inline SbmResult generate_sbm(int n, int k_clusters, double p, std::uint64_t seed) {
  if (!(p > 0.5 && p <= 1.0))
    throw std::invalid_argument("generate_sbm: p must lie in (0.5, 1]");
  if (n < 0 || k_clusters < 1 || k_clusters > std::max(n, 1))
    throw std::invalid_argument("generate_sbm: bad n/k");

  // n mod k spread one-per-cluster; labels assigned in contiguous blocks.
  Clustering truth;
  truth.labels.resize(n);
  {
    int base = k_clusters > 0 ? n / k_clusters : 0;
    int extra = k_clusters > 0 ? n % k_clusters : 0;
    int v = 0;
    for (int c = 0; c < k_clusters; ++c) {
      int sz = base + (c < extra ? 1 : 0);
      for (int i = 0; i < sz; ++i) truth.labels[v++] = c;
    }
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<VertexPair> pos;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      double prob = truth.labels[u] == truth.labels[v] ? p : 1.0 - p;
      if (unit(rng) < prob) pos.push_back({u, v});
    }
  return {SignedGraph(n, std::move(pos), {}, /*complete_mode=*/true), std::move(truth)};
}

}  // namespace corrclust
