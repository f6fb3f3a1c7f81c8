#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "corrclust/ballgrow.hpp"
#include "corrclust/cost.hpp"
#include "corrclust/generate.hpp"
#include "corrclust/io.hpp"
#include "corrclust/pivot.hpp"
#include "corrclust/predictor.hpp"
#include "corrclust/sparsifier.hpp"
#include "corrclust/stream.hpp"
#include "corrclust/streaming.hpp"
#include "corrclust/types.hpp"

namespace corrclust {

/// Second-pass materialization of a stream's net graph. Storage is metered
/// separately from algorithm state; this backs the desk-scale concessions.
inline SignedGraph replay_oracle(const Stream& s, bool complete_mode, SpaceMeter* meter = nullptr) {
  SignedGraph g = materialize_stream(s, complete_mode);
  if (meter) {
    meter->alloc(2LL * static_cast<long long>(g.pos_edges().size() + g.neg_edges().size()));
    meter->record_phase("replay");
  }
  return g;
}

struct DatasetSpec {
  enum class Kind { sbm, file } kind = Kind::sbm;
  std::string name;
  // sbm
  int n = 100, k = 4;
  double p = 0.9;
  // file
  std::string path;
};

struct ExperimentConfig {
  std::vector<DatasetSpec> datasets;
  std::vector<std::string> algos;
  std::vector<std::string> predictors = {"none"};
  int trials = 1;
  std::uint64_t base_seed = 1;
  double epsilon = 0.2;
  double c = 4.0;
  int k = 10;
  double churn = 0.5;
  bool stream_implicit_negatives = false;  // insertion-only runs on complete instances
  bool record_runtime = true;              // off: runtime column written as 0 (byte-stable CSV)
  std::string out_path;      // rows CSV; empty = no file
  std::string summary_path;  // summary CSV; empty = no file
};

struct ReportRow {
  std::string dataset, algo, predictor;
  std::optional<double> beta_measured;  // L/OPT when OPT computable, raw L for large n
  int trial = 0;
  long long cost = 0;
  long long opt_or_lowerbound = 0;
  long long words_peak = 0;
  double runtime_ms = 0.0;
  std::string branch;
};

namespace detail {

inline std::string fmt_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline bool is_learning_algo(const std::string& a) {
  return a == "dynamic" || a == "insertion" || a == "general" || a == "truncated_pivot_pred" ||
         a == "pairwise_diss" || a == "pairwise_diss2" || a == "pairwise_diss2_preround";
}

inline bool is_streaming_algo(const std::string& a) {
  return a == "dynamic" || a == "insertion" || a == "general";
}

inline bool known_algo(const std::string& a) {
  return is_learning_algo(a) || a == "cklpu_pivot" || a == "cm_pivot" || a == "truncated_pivot";
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (!isspace(static_cast<unsigned char>(ch))) {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace detail

/// Parses "sbm:n=100,k=4,p=0.9" or "file:path/to/edges.txt".
inline DatasetSpec parse_dataset_spec(const std::string& spec) {
  DatasetSpec d;
  auto colon = spec.find(':');
  std::string kind = spec.substr(0, colon);
  std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "sbm") {
    d.kind = DatasetSpec::Kind::sbm;
    for (const auto& kv : detail::split(rest, ',')) {
      auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("dataset spec: expected key=value in '" + spec + "'");
      std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
      if (key == "n") d.n = std::stoi(val);
      else if (key == "k") d.k = std::stoi(val);
      else if (key == "p") d.p = std::stod(val);
      else throw std::invalid_argument("dataset spec: unknown key '" + key + "'");
    }
    d.name = "sbm_n" + std::to_string(d.n) + "_k" + std::to_string(d.k) + "_p" +
             detail::fmt_double(d.p);
  } else if (kind == "file") {
    if (rest.empty()) throw std::invalid_argument("dataset spec: file path missing");
    d.kind = DatasetSpec::Kind::file;
    d.path = rest;
    auto slash = rest.find_last_of('/');
    d.name = slash == std::string::npos ? rest : rest.substr(slash + 1);
  } else {
    throw std::invalid_argument("dataset spec: unknown kind '" + kind + "'");
  }
  return d;
}

/// Builds an oracle from a spec string:
///   noisy:eps0[:labels_path] | embed:path | table:path | const:value | none
/// noisy without a labels path needs a reference clustering from the caller.
inline DistanceOracle make_oracle(const std::string& spec, const Clustering* reference) {
  auto colon = spec.find(':');
  std::string kind = spec.substr(0, colon);
  std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "noisy") {
    auto colon2 = rest.find(':');
    double eps0 = std::stod(rest.substr(0, colon2));
    if (colon2 != std::string::npos) {
      Clustering ref = load_labels(rest.substr(colon2 + 1));
      return DistanceOracle::noisy(ref, eps0);
    }
    if (!reference)
      throw std::invalid_argument("predictor 'noisy' needs a reference clustering "
                                  "(ground truth or a labels file)");
    return DistanceOracle::noisy(*reference, eps0);
  }
  if (kind == "embed") return load_embedding_oracle(rest);
  if (kind == "table") return load_prediction_table(rest);
  if (kind == "const") return DistanceOracle::constant(std::stod(rest));
  throw std::invalid_argument("unknown predictor spec '" + spec + "'");
}

struct SingleRunParams {
  std::string algo;
  double epsilon = 0.2;
  double c = 4.0;
  int k = 10;
  std::uint64_t seed = 0;
  long long neg_budget_words = -1;
  GeneralFallback fallback = GeneralFallback::ballgrow;
  bool clamp_estimates = false;
};

struct SingleRunResult {
  Clustering clustering;
  StreamingRunReport streaming;  // filled for streaming algos
  GeneralCcReport general;       // filled for algo == "general"
  bool is_streaming = false;
  bool is_general = false;
  double runtime_ms = 0.0;
};

/// Runs one algorithm. Streaming algorithms consume the stream; offline ones
/// run on the materialized graph (which the caller supplies so signs stay
/// authoritative).
inline SingleRunResult run_single(const SignedGraph& graph, const Stream& stream,
                                  const DistanceOracle* oracle, const SingleRunParams& prm) {
  SingleRunResult out;
  auto t0 = std::chrono::steady_clock::now();
  const std::string& a = prm.algo;
  if (detail::is_learning_algo(a) && !oracle)
    throw std::invalid_argument("algorithm '" + a + "' needs a predictor");

  if (a == "dynamic") {
    DynamicCcOptions o;
    o.epsilon = prm.epsilon;
    o.c = prm.c;
    o.seed = prm.seed;
    o.clamp_estimates = prm.clamp_estimates;
    auto r = dynamic_cc(stream, *oracle, o);
    out.clustering = std::move(r.clustering);
    out.streaming = std::move(r.report);
    out.is_streaming = true;
  } else if (a == "insertion") {
    InsertionCcOptions o;
    o.k = prm.k;
    o.epsilon = prm.epsilon;
    o.seed = prm.seed;
    o.clamp_estimates = prm.clamp_estimates;
    auto r = insertion_cc(stream, *oracle, o);
    out.clustering = std::move(r.clustering);
    out.streaming = std::move(r.report);
    out.is_streaming = true;
  } else if (a == "general") {
    GeneralCcOptions o;
    o.epsilon = prm.epsilon;
    o.seed = prm.seed;
    o.neg_budget_words = prm.neg_budget_words;
    o.fallback = prm.fallback;
    auto r = general_cc(stream, *oracle, o);
    out.clustering = std::move(r.clustering);
    out.general = std::move(r.report);
    out.is_general = true;
  } else {
    RandomPermutation pi = RandomPermutation::random(graph.n(), mix64(prm.seed, 1));
    TruncationThresholds thr(graph.n(), prm.epsilon, prm.c);
    std::uint64_t coins = mix64(prm.seed, kJoinCoinTag);
    if (a == "truncated_pivot") {
      auto ctx = make_offline_store(graph, pi, thr);
      out.clustering = truncated_pivot(ctx, pi, thr);
    } else if (a == "truncated_pivot_pred") {
      auto ctx = make_offline_store(graph, pi, thr);
      out.clustering = truncated_pivot_pred(ctx, pi, *oracle, thr, {}, coins);
    } else if (a == "cklpu_pivot") {
      out.clustering = cklpu_pivot(graph, pi, thr);
    } else if (a == "pairwise_diss") {
      out.clustering = pairwise_diss(graph, pi, *oracle, thr, {}, coins);
    } else if (a == "cm_pivot") {
      out.clustering = cm_pivot(graph, prm.k, pi);
    } else if (a == "pairwise_diss2") {
      out.clustering = pairwise_diss2(graph, *oracle, prm.k, pi, {}, coins);
    } else if (a == "pairwise_diss2_preround") {
      out.clustering = pairwise_diss2_preround(graph, *oracle, prm.k, pi, {}, coins);
    } else {
      throw std::invalid_argument("unknown algorithm '" + a + "'");
    }
  }
  out.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

inline void validate_config(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (cfg.datasets.empty()) throw std::invalid_argument("config: no datasets");
  if (cfg.algos.empty()) throw std::invalid_argument("config: no algorithms");
  for (const auto& a : cfg.algos)
    if (!detail::known_algo(a)) throw std::invalid_argument("config: unknown algorithm '" + a + "'");
  for (const auto& d : cfg.datasets) {
    if (d.kind == DatasetSpec::Kind::file) {
      std::ifstream probe(d.path);
      if (!probe) throw std::invalid_argument("config: dataset file not found: " + d.path);
    } else {
      if (!(d.p > 0.5 && d.p <= 1.0))
        throw std::invalid_argument("config: sbm p outside (0.5, 1]");
    }
  }
  for (const auto& p : cfg.predictors) {
    if (p == "none") continue;
    auto colon = p.find(':');
    std::string kind = p.substr(0, colon);
    if (kind == "embed" || kind == "table") {
      std::ifstream probe(p.substr(colon + 1));
      if (!probe)
        throw std::invalid_argument("config: predictor file not found: " + p.substr(colon + 1));
    } else if (kind != "noisy" && kind != "const") {
      throw std::invalid_argument("config: unknown predictor '" + p + "'");
    }
  }
  bool any_learning = false;
  for (const auto& a : cfg.algos) any_learning |= detail::is_learning_algo(a);
  bool any_pred = false;
  for (const auto& p : cfg.predictors) any_pred |= (p != "none");
  if (any_learning && !any_pred)
    throw std::invalid_argument("config: learning algorithms listed but no predictors given");
}

struct ExperimentResult {
  std::vector<ReportRow> rows;
  std::vector<std::string> errors;  // per-trial failures; the run continues
};

/// Runs the full sweep. Per (dataset, trial) the instance and stream are fixed
/// and shared across algorithms and predictors, so comparisons are paired.
/// Everything is reproducible from (config, base_seed).
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  ExperimentResult result;
  for (size_t di = 0; di < cfg.datasets.size(); ++di) {
    const DatasetSpec& ds = cfg.datasets[di];
    for (int trial = 0; trial < cfg.trials; ++trial) {
      std::uint64_t trial_seed = mix64(cfg.base_seed, di + 1, trial + 1);
      SignedGraph graph;
      Clustering ground_truth;
      bool have_truth = false;
      if (ds.kind == DatasetSpec::Kind::sbm) {
        auto sbm = generate_sbm(ds.n, ds.k, ds.p, trial_seed);
        graph = std::move(sbm.graph);
        ground_truth = std::move(sbm.ground_truth);
        have_truth = true;
      } else {
        graph = load_edge_list(ds.path).graph;
      }

      std::optional<OptResult> opt;
      if (graph.n() <= 12) opt = brute_force_opt(graph);

      for (const auto& algo : cfg.algos) {
        std::vector<std::string> preds;
        if (detail::is_learning_algo(algo)) {
          for (const auto& p : cfg.predictors)
            if (p != "none") preds.push_back(p);
        } else {
          preds.push_back("none");
        }
        for (const auto& pred : preds) {
          ReportRow row;
          row.dataset = ds.name;
          row.algo = algo;
          row.predictor = pred;
          row.trial = trial;
          try {
            std::optional<DistanceOracle> oracle;
            if (pred != "none")
              oracle = make_oracle(pred, have_truth ? &ground_truth : nullptr);

            StreamOptions so;
            so.seed = mix64(trial_seed, 7);
            so.mode = algo == "insertion" ? StreamMode::insertion_only : StreamMode::dynamic;
            so.churn = algo == "insertion" ? 0.0 : cfg.churn;
            so.include_implicit_negatives =
                algo == "insertion" && cfg.stream_implicit_negatives;
            Stream stream;
            if (detail::is_streaming_algo(algo)) stream = to_stream(graph, so);

            SingleRunParams prm;
            prm.algo = algo;
            prm.epsilon = cfg.epsilon;
            prm.c = cfg.c;
            prm.k = cfg.k;
            prm.seed = mix64(trial_seed, 9);
            auto run = run_single(graph, stream, oracle ? &*oracle : nullptr, prm);

            // Exact cost, always from the replayed graph for streaming runs.
            if (detail::is_streaming_algo(algo)) {
              SignedGraph replayed = replay_oracle(stream, graph.complete_mode());
              row.cost = cost(replayed, run.clustering);
            } else {
              row.cost = cost(graph, run.clustering);
            }
            row.opt_or_lowerbound = opt ? opt->opt_cost : 0;
            if (oracle) {
              double L = quality_L(graph, *oracle);
              if (opt && opt->opt_cost > 0)
                row.beta_measured = L / static_cast<double>(opt->opt_cost);
              else if (!opt)
                row.beta_measured = L;  // raw objective when OPT is out of reach
            }
            if (run.is_streaming) {
              row.words_peak = run.streaming.words_peak;
              row.branch = "branch" + std::to_string(run.streaming.chosen_branch);
            } else if (run.is_general) {
              row.words_peak = run.general.words_peak;
              row.branch = run.general.branch;
            }
            row.runtime_ms = cfg.record_runtime ? run.runtime_ms : 0.0;
            result.rows.push_back(std::move(row));
          } catch (const std::exception& ex) {
            result.errors.push_back(ds.name + "/" + algo + "/" + pred + "/trial" +
                                    std::to_string(trial) + ": " + ex.what());
          }
        }
      }
    }
  }
  return result;
}

inline std::string report_csv_header() {
  return "dataset,algo,predictor,beta_measured,trial,cost,opt_or_lowerbound,words_peak,"
         "runtime_ms,branch";
}

inline std::string to_csv(const ReportRow& r) {
  std::ostringstream out;
  out << r.dataset << ',' << r.algo << ',' << r.predictor << ','
      << (r.beta_measured ? detail::fmt_double(*r.beta_measured) : "") << ',' << r.trial << ','
      << r.cost << ',' << r.opt_or_lowerbound << ',' << r.words_peak << ','
      << detail::fmt_double(r.runtime_ms) << ',' << r.branch;
  return out.str();
}

inline void write_rows_csv(const std::vector<ReportRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_rows_csv: cannot open " + path);
  out << report_csv_header() << '\n';
  for (const auto& r : rows) out << to_csv(r) << '\n';
}

struct SummaryRow {
  std::string dataset, algo, predictor;
  int trials = 0;
  double mean_cost = 0.0, sd_cost = 0.0;
  long long min_cost = 0;
  double mean_words = 0.0;
  std::optional<double> vs_nonlearning;  // mean cost ratio against the counterpart
};

/// Groups rows by (dataset, algo, predictor) in stable order and aggregates.
/// Learning algorithms also get their cost ratio against the non-learning
/// counterpart on the same dataset when present.
inline std::vector<SummaryRow> summarize(const std::vector<ReportRow>& rows) {
  std::map<std::tuple<std::string, std::string, std::string>, std::vector<const ReportRow*>> groups;
  for (const auto& r : rows) groups[{r.dataset, r.algo, r.predictor}].push_back(&r);

  auto counterpart = [](const std::string& algo) -> std::string {
    if (algo == "dynamic" || algo == "pairwise_diss" || algo == "truncated_pivot_pred")
      return "cklpu_pivot";
    if (algo == "insertion" || algo == "pairwise_diss2" || algo == "pairwise_diss2_preround")
      return "cm_pivot";
    return "";
  };

  std::map<std::pair<std::string, std::string>, double> base_mean;  // (dataset, algo) -> mean
  for (auto& [key, rs] : groups) {
    auto& [ds, algo, pred] = key;
    if (pred != "none") continue;
    double m = 0;
    for (auto* r : rs) m += static_cast<double>(r->cost);
    base_mean[{ds, algo}] = m / rs.size();
  }

  std::vector<SummaryRow> out;
  for (auto& [key, rs] : groups) {
    auto& [ds, algo, pred] = key;
    SummaryRow s;
    s.dataset = ds;
    s.algo = algo;
    s.predictor = pred;
    s.trials = static_cast<int>(rs.size());
    double sum = 0, sum_words = 0;
    s.min_cost = rs.front()->cost;
    for (auto* r : rs) {
      sum += static_cast<double>(r->cost);
      sum_words += static_cast<double>(r->words_peak);
      s.min_cost = std::min(s.min_cost, r->cost);
    }
    s.mean_cost = sum / s.trials;
    s.mean_words = sum_words / s.trials;
    double var = 0;
    for (auto* r : rs) {
      double d = static_cast<double>(r->cost) - s.mean_cost;
      var += d * d;
    }
    s.sd_cost = s.trials > 1 ? std::sqrt(var / (s.trials - 1)) : 0.0;
    std::string cp = counterpart(algo);
    if (!cp.empty()) {
      auto it = base_mean.find({ds, cp});
      if (it != base_mean.end() && it->second > 0) s.vs_nonlearning = s.mean_cost / it->second;
    }
    out.push_back(std::move(s));
  }
  return out;
}

inline void write_summary_csv(const std::vector<SummaryRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_summary_csv: cannot open " + path);
  out << "dataset,algo,predictor,trials,mean_cost,sd_cost,min_cost,mean_words,vs_nonlearning\n";
  for (const auto& s : rows) {
    out << s.dataset << ',' << s.algo << ',' << s.predictor << ',' << s.trials << ','
        << detail::fmt_double(s.mean_cost) << ',' << detail::fmt_double(s.sd_cost) << ','
        << s.min_cost << ',' << detail::fmt_double(s.mean_words) << ','
        << (s.vs_nonlearning ? detail::fmt_double(*s.vs_nonlearning) : "") << '\n';
  }
}

/// key=value config file; '#' comments. Lists are comma separated, datasets
/// semicolon separated.
inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("load_config: cannot open " + path);
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    bool blank = true;
    for (char ch : line)
      if (!isspace(static_cast<unsigned char>(ch))) blank = false;
    if (blank) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key=value");
    auto strip = [](std::string s) {
      size_t a = s.find_first_not_of(" \t");
      size_t b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = strip(line.substr(0, eq)), val = strip(line.substr(eq + 1));
    if (key == "datasets") {
      for (const auto& d : detail::split(val, ';')) cfg.datasets.push_back(parse_dataset_spec(d));
    } else if (key == "algos") {
      cfg.algos = detail::split(val, ',');
    } else if (key == "predictors") {
      cfg.predictors = detail::split(val, ',');
    } else if (key == "trials") {
      cfg.trials = std::stoi(val);
    } else if (key == "seed") {
      cfg.base_seed = std::stoull(val);
    } else if (key == "epsilon") {
      cfg.epsilon = std::stod(val);
    } else if (key == "c") {
      cfg.c = std::stod(val);
    } else if (key == "k") {
      cfg.k = std::stoi(val);
    } else if (key == "churn") {
      cfg.churn = std::stod(val);
    } else if (key == "stream_implicit_negatives") {
      cfg.stream_implicit_negatives = (val == "1" || val == "true");
    } else if (key == "record_runtime") {
      cfg.record_runtime = (val == "1" || val == "true");
    } else if (key == "out") {
      cfg.out_path = val;
    } else if (key == "summary") {
      cfg.summary_path = val;
    } else {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": unknown key '" + key +
                                  "'");
    }
  }
  return cfg;
}

}  // namespace corrclust
