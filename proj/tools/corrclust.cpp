#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <string>

#include "corrclust/harness.hpp"

using namespace corrclust;

namespace {

int cmd_run(const std::string& algo, const std::string& stream_path,
            const std::string& graph_path, const std::string& predictor,
            const std::string& labels_path, double epsilon, double c, int k,
            std::uint64_t seed, long long neg_budget, const std::string& fallback,
            bool exact_cost, bool clamp, const std::string& out_path,
            const std::string& labels_out) {
  SignedGraph graph;
  Stream stream;
  bool have_graph = false;
  if (!graph_path.empty()) {
    graph = load_edge_list(graph_path).graph;
    have_graph = true;
  }
  if (!stream_path.empty()) {
    stream = load_stream(stream_path);
  } else if (have_graph && detail::is_streaming_algo(algo)) {
    StreamOptions so;
    so.mode = algo == "insertion" ? StreamMode::insertion_only : StreamMode::dynamic;
    so.seed = mix64(seed, 7);
    stream = to_stream(graph, so);
  }
  if (!have_graph && !detail::is_streaming_algo(algo)) {
    if (stream.updates.empty() && stream.n == 0)
      throw std::invalid_argument("offline algorithms need --graph or --stream");
    graph = materialize_stream(stream, algo != "general");
    have_graph = true;
  }
  if (detail::is_streaming_algo(algo) && stream_path.empty() && !have_graph)
    throw std::invalid_argument("streaming algorithms need --stream or --graph");

  std::optional<Clustering> reference;
  if (!labels_path.empty()) reference = load_labels(labels_path);
  std::optional<DistanceOracle> oracle;
  if (predictor != "none")
    oracle = make_oracle(predictor, reference ? &*reference : nullptr);

  SingleRunParams prm;
  prm.algo = algo;
  prm.epsilon = epsilon;
  prm.c = c;
  prm.k = k;
  prm.seed = seed;
  prm.neg_budget_words = neg_budget;
  prm.clamp_estimates = clamp;
  if (fallback == "singletons") prm.fallback = GeneralFallback::singletons;
  else if (fallback == "ballgrow") prm.fallback = GeneralFallback::ballgrow;
  else throw std::invalid_argument("--fallback must be ballgrow or singletons");

  auto run = run_single(graph, stream, oracle ? &*oracle : nullptr, prm);

  long long true_cost = -1;
  if (exact_cost) {
    if (detail::is_streaming_algo(algo)) {
      SignedGraph replayed = replay_oracle(stream, algo != "general");
      true_cost = cost(replayed, run.clustering);
    } else {
      true_cost = cost(graph, run.clustering);
    }
  }

  std::ostringstream csv;
  csv << "algo,n,seed,chosen_branch,est_cost_1,est_cost_2,true_cost,words_peak,runtime_ms\n";
  csv << algo << ',' << (run.is_streaming ? run.streaming.n : (run.is_general ? run.general.n : graph.n()))
      << ',' << seed << ',';
  if (run.is_streaming) {
    csv << run.streaming.chosen_branch << ',' << detail::fmt_double(run.streaming.est_cost_1)
        << ',' << detail::fmt_double(run.streaming.est_cost_2);
  } else if (run.is_general) {
    csv << run.general.branch << ",,";
  } else {
    csv << ",,";
  }
  csv << ',' << (true_cost >= 0 ? std::to_string(true_cost) : "") << ','
      << (run.is_streaming ? run.streaming.words_peak
                           : (run.is_general ? run.general.words_peak : 0))
      << ',' << detail::fmt_double(run.runtime_ms) << '\n';

  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open " + out_path);
    out << csv.str();
  }
  if (!labels_out.empty()) save_labels(run.clustering, labels_out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming correlation clustering toolkit"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run one algorithm on a stream or graph");
  std::string algo = "dynamic", stream_path, graph_path, predictor = "none", labels_path;
  std::string fallback = "ballgrow", out_path, labels_out;
  double epsilon = 0.2, c = 4.0;
  int k = 10;
  std::uint64_t seed = 1;
  long long neg_budget = -1;
  bool exact_cost = false, clamp = false;
  run->add_option("--algo", algo,
                  "dynamic|insertion|general|truncated_pivot|truncated_pivot_pred|cklpu_pivot|"
                  "pairwise_diss|cm_pivot|pairwise_diss2|pairwise_diss2_preround");
  run->add_option("--stream", stream_path, "stream file: lines 'u v s d'");
  run->add_option("--graph", graph_path, "edge-list file: lines 'u v' or 'u v s'");
  run->add_option("--predictor", predictor,
                  "noisy:eps0[:labels] | embed:path | table:path | const:val | none");
  run->add_option("--labels", labels_path, "reference clustering for noisy predictors");
  run->add_option("--epsilon", epsilon);
  run->add_option("--c", c, "truncation constant");
  run->add_option("--k", k, "queue capacity / counter bound");
  run->add_option("--seed", seed);
  run->add_option("--neg-budget", neg_budget, "negative-edge word budget (general)");
  run->add_option("--fallback", fallback, "ballgrow|singletons (general)");
  run->add_flag("--exact-cost", exact_cost, "replay the stream and report the exact cost");
  run->add_flag("--clamp", clamp, "clamp cost estimates at zero");
  run->add_option("--out", out_path, "report CSV path (default: stdout)");
  run->add_option("--labels-out", labels_out, "write the clustering to a labels file");

  // experiment
  auto* exp = app.add_subcommand("experiment", "Run a config-driven sweep");
  std::string config_path;
  exp->add_option("--config", config_path, "key=value config file")->required();

  // gen
  auto* gen = app.add_subcommand("gen", "Generate an SBM instance and stream files");
  int gn = 100, gk = 4;
  double gp = 0.9, gchurn = 0.5;
  std::uint64_t gseed = 1;
  std::string gmode = "insertion_only", graph_out, truth_out, stream_out;
  gen->add_option("--n", gn);
  gen->add_option("--k", gk);
  gen->add_option("--p", gp);
  gen->add_option("--seed", gseed);
  gen->add_option("--mode", gmode, "insertion_only|dynamic");
  gen->add_option("--churn", gchurn);
  gen->add_option("--graph-out", graph_out);
  gen->add_option("--labels-out", truth_out, "ground-truth labels file");
  gen->add_option("--stream-out", stream_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(algo, stream_path, graph_path, predictor, labels_path, epsilon, c, k, seed,
                     neg_budget, fallback, exact_cost, clamp, out_path, labels_out);
    }
    if (exp->parsed()) {
      ExperimentConfig cfg = load_config(config_path);
      validate_config(cfg);
      auto result = run_experiment(cfg);
      for (const auto& err : result.errors) std::cerr << "trial failed: " << err << '\n';
      if (!cfg.out_path.empty()) {
        write_rows_csv(result.rows, cfg.out_path);
      } else {
        std::cout << report_csv_header() << '\n';
        for (const auto& r : result.rows) std::cout << to_csv(r) << '\n';
      }
      auto summary = summarize(result.rows);
      if (!cfg.summary_path.empty()) write_summary_csv(summary, cfg.summary_path);
      return 0;
    }
    if (gen->parsed()) {
      auto sbm = generate_sbm(gn, gk, gp, gseed);
      if (!graph_out.empty()) {
        std::ofstream out(graph_out);
        if (!out) throw std::runtime_error("cannot open " + graph_out);
        for (auto [u, v] : sbm.graph.pos_edges()) out << u << ' ' << v << '\n';
      }
      if (!truth_out.empty()) save_labels(sbm.ground_truth, truth_out);
      if (!stream_out.empty()) {
        StreamOptions so;
        so.mode = gmode == "dynamic" ? StreamMode::dynamic : StreamMode::insertion_only;
        so.churn = gchurn;
        so.seed = mix64(gseed, 7);
        save_stream(to_stream(sbm.graph, so), stream_out);
      }
      return 0;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}
