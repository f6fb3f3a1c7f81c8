#pragma once

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "corrclust/hash.hpp"
#include "corrclust/types.hpp"

namespace corrclust {

struct SparsifierGraph;  // sparsifier.hpp

/// Queryable pairwise distance predictor: query(u,v) in [0,1], symmetric,
/// query(u,u) = 0, deterministic after construction. Immutable and safe to
/// share across threads.
class DistanceOracle {
 public:
  enum class Kind { noisy, embedding, table, constant };

  double query(Vertex u, Vertex v) const {
    if (u == v) return 0.0;
    auto [a, b] = ordered(u, v);
    return impl_->query(a, b);
  }
  double operator()(Vertex u, Vertex v) const { return query(u, v); }
  Kind kind() const { return kind_; }
  int clamp_warnings() const { return clamp_warnings_; }

  /// query(u,v) = eps0 within the reference cluster, 1-eps0 across.
  static DistanceOracle noisy(const Clustering& reference, double eps0) {
    if (!(eps0 >= 0.0 && eps0 < 0.5))
      throw std::invalid_argument("noisy oracle: eps0 must lie in [0, 0.5)");
    struct Impl final : Base {
      std::vector<int> labels;
      double eps0;
      double query(Vertex u, Vertex v) const override {
        return labels[u] == labels[v] ? eps0 : 1.0 - eps0;
      }
    };
    auto impl = std::make_shared<Impl>();
    impl->labels = reference.labels;
    impl->eps0 = eps0;
    return DistanceOracle(Kind::noisy, std::move(impl));
  }

  /// query(u,v) = clamp(1 - cos(x_u, x_v), 0, 1).
  static DistanceOracle embedding(const std::vector<std::vector<double>>& vectors) {
    struct Impl final : Base {
      std::vector<std::vector<double>> x;
      std::vector<double> norm;
      double query(Vertex u, Vertex v) const override {
        double dot = 0.0;
        for (size_t i = 0; i < x[u].size(); ++i) dot += x[u][i] * x[v][i];
        double d = 1.0 - dot / (norm[u] * norm[v]);
        return std::min(1.0, std::max(0.0, d));
      }
    };
    auto impl = std::make_shared<Impl>();
    impl->x = vectors;
    impl->norm.reserve(vectors.size());
    size_t dim = vectors.empty() ? 0 : vectors.front().size();
    for (const auto& v : vectors) {
      if (v.size() != dim)
        throw std::invalid_argument("embedding oracle: inconsistent dimensions");
      double s = 0.0;
      for (double c : v) s += c * c;
      if (s == 0.0) throw std::invalid_argument("embedding oracle: zero vector");
      impl->norm.push_back(std::sqrt(s));
    }
    return DistanceOracle(Kind::embedding, std::move(impl));
  }

  /// Sparse table of pairwise distances; unlisted pairs default to 1.
  /// Out-of-range values are clamped into [0,1] and counted.
  static DistanceOracle table(const std::vector<std::tuple<Vertex, Vertex, double>>& entries) {
    struct Impl final : Base {
      std::unordered_map<std::uint64_t, double> d;
      double query(Vertex u, Vertex v) const override {
        auto it = d.find(pair_key(u, v));
        return it == d.end() ? 1.0 : it->second;
      }
    };
    auto impl = std::make_shared<Impl>();
    int clamped = 0;
    for (auto& [u, v, d] : entries) {
      if (u == v) continue;
      double dd = d;
      if (dd < 0.0 || dd > 1.0) {
        dd = std::min(1.0, std::max(0.0, dd));
        ++clamped;
      }
      impl->d[pair_key(u, v)] = dd;
    }
    DistanceOracle o(Kind::table, std::move(impl));
    o.clamp_warnings_ = clamped;
    return o;
  }

  static DistanceOracle constant(double value) {
    if (value < 0.0 || value > 1.0)
      throw std::invalid_argument("constant oracle: value outside [0,1]");
    struct Impl final : Base {
      double value;
      double query(Vertex, Vertex) const override { return value; }
    };
    auto impl = std::make_shared<Impl>();
    impl->value = value;
    return DistanceOracle(Kind::constant, std::move(impl));
  }

  /// 0/1 indicator of a clustering; a noisy oracle with eps0 = 0.
  static DistanceOracle indicator(const Clustering& reference) {
    return noisy(reference, 0.0);
  }

 private:
  struct Base {
    virtual ~Base() = default;
    virtual double query(Vertex u, Vertex v) const = 0;
  };
  DistanceOracle(Kind k, std::shared_ptr<const Base> impl)
      : kind_(k), impl_(std::move(impl)) {}

  Kind kind_;
  std::shared_ptr<const Base> impl_;
  int clamp_warnings_ = 0;
};

/// Rounding breakpoints for turning distances into separation probabilities.
struct RoundingParams {
  double a = 0.19;
  double b = 0.5095;

  RoundingParams() = default;
  RoundingParams(double a_, double b_) : a(a_), b(b_) {
    if (!(0.0 < a && a < b && b < 1.0))
      throw std::invalid_argument("RoundingParams: need 0 < a < b < 1");
  }
};

/// p_uv: for positive pairs 0 below a, ((d-a)/(b-a))^2 on [a,b], 1 above b;
/// for negative pairs the identity.
inline double round_probability(EdgeSign sign, double d, const RoundingParams& p = {}) {
  if (!(d >= 0.0 && d <= 1.0))
    throw std::domain_error("round_probability: distance outside [0,1]");
  if (sign == EdgeSign::negative) return d;
  if (d < p.a) return 0.0;
  if (d > p.b) return 1.0;
  double r = (d - p.a) / (p.b - p.a);
  return r * r;
}

/// Prediction objective L = sum_{E+} d_uv + sum_{E-} (1 - d_uv); implicit
/// negatives included in complete_mode. beta = L / OPT when OPT is known.
inline double quality_L(const SignedGraph& g, const DistanceOracle& o) {
  double L = 0.0;
  for (auto [u, v] : g.pos_edges()) L += o.query(u, v);
  if (g.complete_mode()) {
    for (int u = 0; u < g.n(); ++u)
      for (int v = u + 1; v < g.n(); ++v)
        if (!g.has_pos(u, v)) L += 1.0 - o.query(u, v);
  } else {
    for (auto [u, v] : g.neg_edges()) L += 1.0 - o.query(u, v);
  }
  return L;
}

/// Adapted objective: positive terms weighted by sparsifier edge weights.
/// Defined in sparsifier.hpp once SparsifierGraph is complete.
double adapted_quality_L(const SparsifierGraph& h, const std::vector<VertexPair>& neg_edges,
                         const DistanceOracle& o);

/// Counts sampled triples (u,v,w) violating d_uv + d_vw >= d_uw (with a 1e-9
/// slack). Exhausts all triples when sample_size covers them.
inline long long triangle_violation_count(const DistanceOracle& o, int n,
                                          long long sample_size, std::uint64_t seed) {
  constexpr double kSlack = 1e-9;
  if (n < 3 || sample_size <= 0) return 0;
  long long all = static_cast<long long>(n) * (n - 1) / 2 * (n - 2);
  long long violations = 0;
  if (sample_size >= all) {
    for (int u = 0; u < n; ++u)
      for (int w = u + 1; w < n; ++w) {
        double duw = o.query(u, w);
        for (int v = 0; v < n; ++v) {
          if (v == u || v == w) continue;
          if (o.query(u, v) + o.query(v, w) < duw - kSlack) ++violations;
        }
      }
    return violations;
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (long long i = 0; i < sample_size; ++i) {
    int u = pick(rng), v = pick(rng), w = pick(rng);
    if (u == v || v == w || u == w) {
      --i;
      continue;
    }
    if (o.query(u, v) + o.query(v, w) < o.query(u, w) - kSlack) ++violations;
  }
  return violations;
}

/// Prediction table file: lines "u v d" with d decimal.
inline DistanceOracle load_prediction_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_prediction_table: cannot open " + path);
  std::vector<std::tuple<Vertex, Vertex, double>> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    bool blank = true;
    for (char c : line)
      if (!isspace(static_cast<unsigned char>(c))) { blank = (c == '#'); break; }
    if (blank) continue;
    std::istringstream ls(line);
    int u, v;
    double d;
    if (!(ls >> u >> v >> d))
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 'u v d'");
    entries.push_back({u, v, d});
  }
  return DistanceOracle::table(entries);
}

/// Embedding file: lines "u x1 ... xd".
inline DistanceOracle load_embedding_oracle(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_embedding_oracle: cannot open " + path);
  std::unordered_map<int, std::vector<double>> rows;
  int n = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    bool blank = true;
    for (char c : line)
      if (!isspace(static_cast<unsigned char>(c))) { blank = (c == '#'); break; }
    if (blank) continue;
    std::istringstream ls(line);
    int u;
    if (!(ls >> u))
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 'u x1 ... xd'");
    std::vector<double> x;
    double c;
    while (ls >> c) x.push_back(c);
    if (x.empty())
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": vertex with no coordinates");
    rows[u] = std::move(x);
    n = std::max(n, u + 1);
  }
  std::vector<std::vector<double>> vectors(n);
  for (auto& [u, x] : rows) vectors[u] = std::move(x);
  for (int v = 0; v < n; ++v)
    if (vectors[v].empty())
      throw std::runtime_error("load_embedding_oracle: vertex " + std::to_string(v) + " missing");
  return DistanceOracle::embedding(vectors);
}

}  // namespace corrclust
