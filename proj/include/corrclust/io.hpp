#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "corrclust/types.hpp"

namespace corrclust {

struct EdgeListOptions {
  // Directed inputs are merged into undirected edges either way; the flag only
  // records what the file claims to be.
  bool directed = true;
  // Default convention: listed edges are positive and all unlisted pairs are
  // implicit negatives. Any explicit third sign column turns this off.
  bool complete_mode_default = true;
};

struct LoadedGraph {
  SignedGraph graph;
  std::vector<std::string> names;  // dense id -> original label
  int dropped_self_loops = 0;
};

namespace detail {

inline std::runtime_error parse_error(const std::string& path, int line,
                                      const std::string& what) {
  return std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

inline bool comment_or_blank(const std::string& s) {
  for (char c : s) {
    if (c == '#') return true;
    if (!isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace detail

/// Edge-list file: one edge per line, "u v" or "u v s" with s in {+,-};
/// '#' lines ignored. Labels are arbitrary tokens, remapped to dense ids in
/// order of first appearance. Duplicate (possibly reversed) entries merge;
/// on a sign conflict the later entry wins.
inline LoadedGraph load_edge_list(const std::string& path,
                                  const EdgeListOptions& opt = {}) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_edge_list: cannot open " + path);

  std::unordered_map<std::string, int> id_of;
  std::vector<std::string> names;
  auto intern = [&](const std::string& tok) {
    auto [it, fresh] = id_of.try_emplace(tok, static_cast<int>(names.size()));
    if (fresh) names.push_back(tok);
    return it->second;
  };

  std::unordered_map<std::uint64_t, EdgeSign> edges;
  bool saw_sign_column = false;
  int dropped = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::comment_or_blank(line)) continue;
    std::istringstream ls(line);
    std::string a, b, s;
    if (!(ls >> a >> b))
      throw detail::parse_error(path, lineno, "expected 'u v' or 'u v s'");
    EdgeSign sign = EdgeSign::positive;
    if (ls >> s) {
      if (s == "+") sign = EdgeSign::positive;
      else if (s == "-") sign = EdgeSign::negative;
      else throw detail::parse_error(path, lineno, "sign must be '+' or '-', got '" + s + "'");
      saw_sign_column = true;
      std::string rest;
      if (ls >> rest) throw detail::parse_error(path, lineno, "trailing token '" + rest + "'");
    }
    int u = intern(a), v = intern(b);
    if (u == v) {
      ++dropped;
      continue;
    }
    edges[pair_key(u, v)] = sign;
  }

  bool complete = opt.complete_mode_default && !saw_sign_column;
  std::vector<VertexPair> pos, neg;
  for (auto& [key, sign] : edges) {
    VertexPair e{static_cast<int>(key >> 32), static_cast<int>(key & 0xffffffffu)};
    if (sign == EdgeSign::positive || complete) pos.push_back(e);
    else neg.push_back(e);
  }
  return {SignedGraph(static_cast<int>(names.size()), std::move(pos), std::move(neg), complete),
          std::move(names), dropped};
}

/// Stream file: one update per line, "u v s d" with s in {+,-}, d in {+1,-1}.
/// Vertex ids are dense integers.
inline Stream load_stream(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_stream: cannot open " + path);
  Stream out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::comment_or_blank(line)) continue;
    std::istringstream ls(line);
    long long u, v;
    std::string s;
    int d;
    if (!(ls >> u >> v >> s >> d) || (s != "+" && s != "-") || (d != 1 && d != -1))
      throw detail::parse_error(path, lineno, "expected 'u v s d' with s in {+,-}, d in {+1,-1}");
    if (u < 0 || v < 0) throw detail::parse_error(path, lineno, "negative vertex id");
    EdgeUpdate e{static_cast<int>(u), static_cast<int>(v),
                 s == "+" ? EdgeSign::positive : EdgeSign::negative, d};
    out.n = std::max({out.n, e.u + 1, e.v + 1});
    out.updates.push_back(e);
  }
  return out;
}

inline void save_stream(const Stream& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_stream: cannot open " + path);
  for (const auto& e : s.updates)
    out << e.u << ' ' << e.v << ' ' << (e.sign == EdgeSign::positive ? '+' : '-') << ' '
        << (e.delta > 0 ? "+1" : "-1") << '\n';
}

/// Labels file: "u cluster_id" per line, dense integer ids.
inline Clustering load_labels(const std::string& path, int n_hint = 0) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_labels: cannot open " + path);
  std::vector<std::pair<int, int>> entries;
  int n = n_hint;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::comment_or_blank(line)) continue;
    std::istringstream ls(line);
    int u, l;
    if (!(ls >> u >> l)) throw detail::parse_error(path, lineno, "expected 'u label'");
    entries.push_back({u, l});
    n = std::max(n, u + 1);
  }
  Clustering c;
  c.labels.assign(n, -1);
  for (auto [u, l] : entries) c.labels[u] = l;
  for (int v = 0; v < n; ++v)
    if (c.labels[v] == -1)
      throw std::runtime_error("load_labels: vertex " + std::to_string(v) + " unlabeled");
  return c;
}

inline void save_labels(const Clustering& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_labels: cannot open " + path);
  for (int v = 0; v < c.size(); ++v) out << v << ' ' << c.labels[v] << '\n';
}

}  // namespace corrclust
