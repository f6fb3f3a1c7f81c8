#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "corrclust/types.hpp"

namespace corrclust {

/// Number of disagreements: positive edges across clusters plus negative edges
/// inside clusters. Implicit negatives (complete_mode) are counted per cluster
/// as C(|C|,2) minus the intra-cluster positive count, never materialized.
inline long long cost(const SignedGraph& g, const Clustering& c) {
  if (c.size() != g.n())
    throw std::invalid_argument("cost: clustering does not label every vertex");

  long long crossing_pos = 0;
  std::unordered_map<int, long long> intra_pos;
  for (auto [u, v] : g.pos_edges()) {
    if (c.labels[u] != c.labels[v])
      ++crossing_pos;
    else
      ++intra_pos[c.labels[u]];
  }

  long long intra_neg = 0;
  if (g.complete_mode()) {
    std::unordered_map<int, long long> sizes;
    for (int l : c.labels) ++sizes[l];
    for (auto& [l, s] : sizes) {
      long long pairs = s * (s - 1) / 2;
      auto it = intra_pos.find(l);
      intra_neg += pairs - (it == intra_pos.end() ? 0 : it->second);
    }
  } else {
    for (auto [u, v] : g.neg_edges())
      if (c.labels[u] == c.labels[v]) ++intra_neg;
  }
  return crossing_pos + intra_neg;
}

struct OptResult {
  long long opt_cost = 0;
  Clustering witness;
};

/// Exact optimum by enumerating all set partitions (restricted growth strings
/// in lexicographic order; ties broken by the first partition enumerated).
inline OptResult brute_force_opt(const SignedGraph& g) {
  const int n = g.n();
  if (n > 12)
    throw std::invalid_argument("brute_force_opt: n > 12 exceeds enumeration limit");
  if (n == 0) return {0, Clustering{}};

  // Dense sign matrix: +1 positive, -1 negative, 0 neutral.
  std::vector<signed char> sign(static_cast<size_t>(n) * n, 0);
  if (g.complete_mode()) {
    for (auto& s : sign) s = -1;
    for (int v = 0; v < n; ++v) sign[static_cast<size_t>(v) * n + v] = 0;
  } else {
    for (auto [u, v] : g.neg_edges()) {
      sign[static_cast<size_t>(u) * n + v] = -1;
      sign[static_cast<size_t>(v) * n + u] = -1;
    }
  }
  for (auto [u, v] : g.pos_edges()) {
    sign[static_cast<size_t>(u) * n + v] = +1;
    sign[static_cast<size_t>(v) * n + u] = +1;
  }

  std::vector<int> a(n, 0), best(n, 0);
  long long best_cost = -1;
  while (true) {
    long long c = 0;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v) {
        signed char s = sign[static_cast<size_t>(u) * n + v];
        if (s > 0 && a[u] != a[v]) ++c;
        else if (s < 0 && a[u] == a[v]) ++c;
      }
    if (best_cost < 0 || c < best_cost) {
      best_cost = c;
      best = a;
    }
    // Next restricted growth string.
    int i = n - 1;
    while (i > 0) {
      int mx = 0;
      for (int j = 0; j < i; ++j) mx = std::max(mx, a[j]);
      if (a[i] <= mx) break;
      --i;
    }
    if (i == 0) break;
    ++a[i];
    for (int j = i + 1; j < n; ++j) a[j] = 0;
  }
  return {best_cost, Clustering{best}};
}

}  // namespace corrclust
