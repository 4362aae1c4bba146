// ablp: a,b-neighborhood link prediction command line.
//
//   ablp stats <edges>
//   ablp centrality <edges> --measure betweenness --top 10
//   ablp sweep <edges> --a-max 5 --b-max 5 --strategy degree,random --seeds 1,2 --out r.csv
//   ablp train <edges> --a 3 --b 1 --out model.json
//   ablp eval <edges> [--model model.json]
//   ablp complete <edges> --model model.json --epsilon 0.9 --out added.txt
//
// Exit status: 0 ok, 1 usage error, 2 data or model error.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "ablp/centrality.hpp"
#include "ablp/eval.hpp"
#include "ablp/featurize.hpp"
#include "ablp/graph.hpp"
#include "ablp/model.hpp"
#include "ablp/parallel.hpp"
#include "ablp/predict.hpp"

namespace {

constexpr const char* kToolVersion = "0.1.0";
constexpr std::uint64_t kDefaultSeed = 42;

using nlohmann::json;
using Clock = std::chrono::steady_clock;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ablp::DataError("cannot open '" + path + "'");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
  return hex.str();
}

ablp::Graph load_graph(const std::string& path) {
  auto loaded = ablp::load_edge_list_file(path);
  if (loaded.skipped_self_loops > 0) {
    std::cerr << "warning: skipped " << loaded.skipped_self_loops << " self-loop line(s)\n";
  }
  if (loaded.duplicate_edges > 0) {
    std::cerr << "note: collapsed " << loaded.duplicate_edges << " duplicate edge line(s)\n";
  }
  return std::move(loaded.graph);
}

std::size_t resolve_threads(std::size_t requested) {
  return requested > 0 ? requested : ablp::default_thread_count();
}

template <typename T>
std::vector<std::string> names(const std::vector<T>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) out.emplace_back(ablp::to_string(item));
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ablp::DataError("cannot write '" + path + "'");
  out << text;
  if (!out) throw ablp::DataError("write failed for '" + path + "'");
}

void write_manifest(const std::string& output, const std::string& subcommand, const std::string& input,
                    json parameters, Clock::time_point start) {
  json manifest;
  manifest["subcommand"] = subcommand;
  manifest["tool_version"] = kToolVersion;
  manifest["input"] = {{"path", input}, {"sha256", sha256_file(input)}};
  manifest["parameters"] = std::move(parameters);
  manifest["wall_ms"] = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  write_text(output + ".manifest.json", manifest.dump(2) + "\n");
}

// Flags shared by subcommands that featurize and train.
struct PipelineFlags {
  int a = 3;
  int b = 1;
  std::string strategy = "degree";
  std::uint64_t seed = kDefaultSeed;
  bool mask_pair_edge = false;
  std::string classifier = "forest";
  int trees = 100;
  int max_depth = 0;
  int min_leaf = 1;
  int feature_subsample = 0;
  double learning_rate = 0.1;
  int epochs = 200;
  double l2 = 0.0;
  double balance = 1.0;
  double test_fraction = 0.25;

  void add_model_flags(CLI::App* app) {
    app->add_option("--classifier", classifier, "forest | tree | logistic")
        ->check(CLI::IsMember({"forest", "tree", "logistic"}))
        ->capture_default_str();
    app->add_option("--trees", trees, "Forest size")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--max-depth", max_depth, "Tree depth limit, 0 = unbounded")->check(CLI::NonNegativeNumber);
    app->add_option("--min-leaf", min_leaf, "Minimum rows per leaf")->check(CLI::PositiveNumber);
    app->add_option("--feature-subsample", feature_subsample, "Features tried per split, 0 = sqrt(K)")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--learning-rate", learning_rate, "Logistic step size")->check(CLI::PositiveNumber);
    app->add_option("--epochs", epochs, "Logistic epochs")->check(CLI::NonNegativeNumber);
    app->add_option("--l2", l2, "Logistic L2 penalty")->check(CLI::NonNegativeNumber);
    app->add_option("--balance", balance, "Negatives kept per positive; 0 keeps all rows")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
  }

  void add_feature_flags(CLI::App* app) {
    app->add_option("--a", a, "Neighbors per expanded node")->check(CLI::Range(1, 1 << 16))->capture_default_str();
    app->add_option("--b", b, "Expansion rounds")->check(CLI::Range(0, 1 << 16))->capture_default_str();
    app->add_option("--strategy", strategy, "random | degree | betweenness | closeness")
        ->check(CLI::IsMember({"random", "degree", "betweenness", "closeness"}))
        ->capture_default_str();
    app->add_option("--seed", seed, "Seed for ordering, sampling and training")->capture_default_str();
    app->add_flag("--mask-pair-edge", mask_pair_edge, "Hide the (u,v) edge while building its features");
  }

  ablp::FeatureConfig features() const {
    return {a, b, ablp::parse_strategy(strategy), mask_pair_edge, seed};
  }

  ablp::Hyperparameters hyperparameters() const {
    switch (ablp::parse_classifier_kind(classifier)) {
      case ablp::ClassifierKind::forest:
        return ablp::ForestParams{trees, max_depth, min_leaf, feature_subsample, true};
      case ablp::ClassifierKind::tree:
        return ablp::TreeParams{max_depth, min_leaf};
      case ablp::ClassifierKind::logistic:
        return ablp::LogisticParams{learning_rate, epochs, l2};
    }
    return ablp::ForestParams{};
  }

  std::optional<double> negative_ratio() const {
    return balance > 0.0 ? std::optional<double>(balance) : std::nullopt;
  }

  json to_json() const {
    return {{"a", a},
            {"b", b},
            {"strategy", strategy},
            {"seed", seed},
            {"mask_pair_edge", mask_pair_edge},
            {"classifier", classifier},
            {"trees", trees},
            {"max_depth", max_depth},
            {"min_leaf", min_leaf},
            {"feature_subsample", feature_subsample},
            {"learning_rate", learning_rate},
            {"epochs", epochs},
            {"l2", l2},
            {"balance", balance},
            {"test_fraction", test_fraction}};
  }
};

std::string format_report(const ablp::MetricsReport& r) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << "  precision  " << std::setw(8) << r.precision << '\n'
      << "  recall     " << std::setw(8) << r.recall << '\n'
      << "  f1         " << std::setw(8) << r.f1 << '\n'
      << "  tp=" << r.counts.tp << " fp=" << r.counts.fp << " fn=" << r.counts.fn << " tn=" << r.counts.tn << '\n';
  return out.str();
}

ablp::Classifier read_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ablp::DataError("cannot open model '" + path + "'");
  return ablp::load_model(in);
}

template <typename T>
std::vector<T> split_list(const std::string& text, T (*parse)(const std::string&)) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(parse(item));
    } catch (const std::exception&) {
      throw UsageError("invalid list item '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError("empty list '" + text + "'");
  return out;
}

ablp::StrategyKind strategy_item(const std::string& s) { return ablp::parse_strategy(s); }
std::uint64_t seed_item(const std::string& s) {
  std::size_t used = 0;
  const auto value = std::stoull(s, &used);
  if (used != s.size()) throw std::invalid_argument(s);
  return value;
}

int run(int argc, char** argv) {
  CLI::App app{"a,b-neighborhood link prediction"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  std::size_t threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: AB_LINKPRED_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);

  std::string input;
  auto add_input = [&](CLI::App* sub) {
    sub->add_option("file", input, "Edge list")->required()->check(CLI::ExistingFile);
    sub->add_option("--threads", threads, "Worker threads")->check(CLI::NonNegativeNumber);
  };

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "Print node/edge counts and average degree");
  add_input(stats_cmd);

  // centrality
  auto* centrality_cmd = app.add_subcommand("centrality", "Rank nodes by a centrality measure");
  add_input(centrality_cmd);
  std::string measure = "degree";
  std::size_t top = 0;
  centrality_cmd->add_option("--measure", measure, "degree | betweenness | closeness")
      ->check(CLI::IsMember({"degree", "betweenness", "closeness"}))
      ->capture_default_str();
  centrality_cmd->add_option("--top", top, "Only print the k highest, 0 = all");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate every (a,b) cell of a grid");
  add_input(sweep_cmd);
  PipelineFlags sweep_flags;
  int a_max = 5, b_max = 5;
  std::string strategies = "degree,betweenness,random";
  std::string seeds = std::to_string(kDefaultSeed);
  std::string out_csv, heatmap, heatmap_metric = "f1";
  bool no_timing = false;
  sweep_cmd->add_option("--a-max", a_max, "Largest a")->check(CLI::Range(1, 1 << 16))->capture_default_str();
  sweep_cmd->add_option("--b-max", b_max, "Largest b")->check(CLI::Range(0, 1 << 16))->capture_default_str();
  sweep_cmd->add_option("--strategy", strategies, "Comma-separated strategies")->capture_default_str();
  sweep_cmd->add_option("--seeds", seeds, "Comma-separated seeds")->capture_default_str();
  sweep_cmd->add_option("--test-fraction", sweep_flags.test_fraction, "Held-out fraction")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  sweep_cmd->add_flag("--mask-pair-edge", sweep_flags.mask_pair_edge, "Hide the (u,v) edge while featurizing");
  sweep_flags.add_model_flags(sweep_cmd);
  sweep_cmd->add_option("--out", out_csv, "CSV output path, '-' for stdout")->required();
  sweep_cmd->add_option("--heatmap", heatmap, "SVG heatmap output path");
  sweep_cmd->add_option("--metric", heatmap_metric, "Heatmap metric")
      ->check(CLI::IsMember({"precision", "recall", "f1"}));
  sweep_cmd->add_flag("--no-timing", no_timing, "Leave wall_ms empty so the CSV is reproducible byte for byte");

  // train
  auto* train_cmd = app.add_subcommand("train", "Train a scoring model and save it as JSON");
  add_input(train_cmd);
  PipelineFlags train_flags;
  train_flags.test_fraction = 0.0;
  std::string model_out;
  train_flags.add_feature_flags(train_cmd);
  train_flags.add_model_flags(train_cmd);
  train_cmd->add_option("--test-fraction", train_flags.test_fraction,
                        "Hold out this fraction and report its metrics; 0 trains on every row")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  train_cmd->add_option("--out", model_out, "Model output path")->required();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Run one experiment cell, or score a saved model");
  add_input(eval_cmd);
  PipelineFlags eval_flags;
  std::string eval_model;
  bool csv_row = false;
  eval_flags.add_feature_flags(eval_cmd);
  eval_flags.add_model_flags(eval_cmd);
  eval_cmd->add_option("--test-fraction", eval_flags.test_fraction, "Held-out fraction")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  eval_cmd->add_option("--model", eval_model, "Score this model on every pair instead of training")
      ->check(CLI::ExistingFile);
  eval_cmd->add_flag("--csv-row", csv_row, "Also print the result as a sweep CSV row");

  // complete
  auto* complete_cmd = app.add_subcommand("complete", "Add predicted edges to the graph");
  add_input(complete_cmd);
  std::string complete_model, complete_out, mode = "iterative";
  double epsilon = 0.9;
  std::size_t max_steps = 10;
  complete_cmd->add_option("--model", complete_model, "Model JSON from `train`")->required()->check(CLI::ExistingFile);
  complete_cmd->add_option("--epsilon", epsilon, "Score threshold")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  complete_cmd->add_option("--mode", mode, "iterative | noniterative")
      ->check(CLI::IsMember({"iterative", "noniterative"}))
      ->capture_default_str();
  complete_cmd->add_option("--max-steps", max_steps, "Iteration cap")->capture_default_str();
  complete_cmd->add_option("--out", complete_out, "Added-edge output path, '-' for stdout")->required();

  if (argc <= 1) {
    std::cerr << app.help();
    return 1;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  threads = resolve_threads(threads);
  const auto start = Clock::now();

  if (stats_cmd->parsed()) {
    const auto s = ablp::stats(load_graph(input));
    std::cout << "nodes=" << s.nodes << " edges=" << s.edges << " avg_degree=" << std::fixed << std::setprecision(2)
              << s.avg_degree << '\n';
    return 0;
  }

  if (centrality_cmd->parsed()) {
    const auto g = load_graph(input);
    const auto table = ablp::compute_centrality(g, ablp::parse_measure(measure));
    std::vector<ablp::NodeId> nodes(g.node_count());
    std::iota(nodes.begin(), nodes.end(), ablp::NodeId{1});
    std::stable_sort(nodes.begin(), nodes.end(),
                     [&](ablp::NodeId x, ablp::NodeId y) { return table.values[x] > table.values[y]; });
    if (top > 0 && top < nodes.size()) nodes.resize(top);
    std::cout << std::fixed << std::setprecision(6);
    for (auto v : nodes) std::cout << g.label(v) << ' ' << table.values[v] << '\n';
    return 0;
  }

  if (sweep_cmd->parsed()) {
    const auto g = load_graph(input);
    ablp::SweepSpec spec;
    spec.a_max = a_max;
    spec.b_max = b_max;
    spec.strategies = split_list<ablp::StrategyKind>(strategies, strategy_item);
    spec.seeds = split_list<std::uint64_t>(seeds, seed_item);
    spec.classifier = sweep_flags.hyperparameters();
    spec.negative_ratio = sweep_flags.negative_ratio();
    spec.test_fraction = sweep_flags.test_fraction;
    spec.mask_pair_edge = sweep_flags.mask_pair_edge;
    spec.threads = threads;
    if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0)) throw UsageError("--test-fraction must be in (0,1)");

    const auto result = ablp::sweep(g, spec);
    std::ostringstream csv;
    ablp::export_csv(result, csv, !no_timing);
    std::size_t failures = 0;
    for (const auto& r : result.records) {
      if (r.error) {
        ++failures;
        std::cerr << "cell a=" << r.a << " b=" << r.b << " " << ablp::to_string(r.strategy) << " seed=" << r.seed
                  << " failed: " << *r.error << '\n';
      }
    }
    json params = sweep_flags.to_json();
    params.erase("a");
    params.erase("b");
    params.erase("strategy");
    params.erase("seed");
    params["a_max"] = a_max;
    params["b_max"] = b_max;
    params["strategies"] = names(spec.strategies);
    params["seeds"] = spec.seeds;
    params["timing"] = !no_timing;
    if (out_csv == "-") {
      std::cout << csv.str();
    } else {
      write_text(out_csv, csv.str());
      write_manifest(out_csv, "sweep", input, params, start);
    }
    if (!heatmap.empty()) {
      std::ostringstream svg;
      ablp::render_heatmap(result, ablp::parse_metric(heatmap_metric), svg);
      write_text(heatmap, svg.str());
    }
    std::cerr << result.records.size() << " cells, " << failures << " failed\n";
    return 0;
  }

  if (train_cmd->parsed()) {
    const auto g = load_graph(input);
    const auto config = train_flags.features();
    const auto full = ablp::build_dataset(g, config, threads);
    const auto ratio = train_flags.negative_ratio();
    const auto data = ratio ? ablp::balance(full, *ratio, train_flags.seed) : full;

    std::optional<ablp::Split> parts;
    if (train_flags.test_fraction > 0.0) {
      if (train_flags.test_fraction >= 1.0) throw UsageError("--test-fraction must be < 1");
      parts = ablp::split(data, train_flags.test_fraction, train_flags.seed);
    }
    const auto& train_rows = parts ? parts->train : data;
    auto model = ablp::train(train_rows.view(), train_rows.labels, train_flags.hyperparameters(), train_flags.seed,
                             threads);
    model.set_featurize_config(config);
    write_text(model_out, ablp::save_model(model));
    write_manifest(model_out, "train", input, train_flags.to_json(), start);
    std::cerr << "trained " << ablp::to_string(model.kind()) << " on " << train_rows.rows() << " rows ("
              << train_rows.positive_count << " positive), feature_length=" << model.feature_length() << '\n';
    if (parts) {
      const auto scores = model.predict_scores(parts->test.view(), threads);
      std::vector<std::uint8_t> predicted(scores.size());
      for (std::size_t i = 0; i < scores.size(); ++i) predicted[i] = scores[i] >= 0.5;
      std::cerr << "held-out metrics:\n" << format_report(ablp::metrics(ablp::confusion(parts->test.labels, predicted)));
    }
    return 0;
  }

  if (eval_cmd->parsed()) {
    const auto g = load_graph(input);
    if (!eval_model.empty()) {
      const auto model = read_model(eval_model);
      auto config = model.featurize_config().value_or(eval_flags.features());
      // Explicit --a/--b override the stored config; the length check then
      // rejects a mismatch.
      if (eval_cmd->count("--a") > 0) config.a = eval_flags.a;
      if (eval_cmd->count("--b") > 0) config.b = eval_flags.b;
      if (config.row_length() != model.feature_length()) {
        throw ablp::ModelError("model feature_length " + std::to_string(model.feature_length()) +
                               " does not match a=" + std::to_string(config.a) + ", b=" + std::to_string(config.b));
      }
      const auto data = ablp::build_dataset(g, config, threads);
      const auto scores = model.predict_scores(data.view(), threads);
      std::vector<std::uint8_t> predicted(scores.size());
      for (std::size_t i = 0; i < scores.size(); ++i) predicted[i] = scores[i] >= 0.5;
      std::cout << "all pairs (" << data.rows() << " rows):\n"
                << format_report(ablp::metrics(ablp::confusion(data.labels, predicted)));
      return 0;
    }
    if (!(eval_flags.test_fraction > 0.0 && eval_flags.test_fraction < 1.0)) {
      throw UsageError("--test-fraction must be in (0,1)");
    }
    const auto config = eval_flags.features();
    const auto t0 = Clock::now();
    const auto result = ablp::run_experiment(g, config, {eval_flags.hyperparameters(), eval_flags.seed},
                                             {eval_flags.negative_ratio(), eval_flags.seed},
                                             {eval_flags.test_fraction, eval_flags.seed}, {threads, true});
    const double wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    std::cout << "a=" << config.a << " b=" << config.b << " strategy=" << eval_flags.strategy
              << " seed=" << eval_flags.seed << '\n';
    std::cout << "test split (" << result.split.test.rows() << " rows):\n" << format_report(result.test);
    if (result.holdout) {
      std::cout << "all pairs not used for training, natural class balance (" << result.holdout->counts.total()
                << " rows):\n"
                << format_report(*result.holdout);
    }
    if (csv_row) {
      ablp::SweepResult one;
      one.records.push_back({config.a, config.b, config.strategy, config.seed, result.test, wall_ms, std::nullopt});
      ablp::export_csv(one, std::cout);
    }
    return 0;
  }

  if (complete_cmd->parsed()) {
    const auto g = load_graph(input);
    const auto model = read_model(complete_model);
    if (!model.featurize_config()) throw ablp::ModelError("model document has no featurize_config");
    ablp::CompletionConfig cfg;
    cfg.epsilon = epsilon;
    cfg.mode = mode == "iterative" ? ablp::CompletionMode::iterative : ablp::CompletionMode::noniterative;
    cfg.max_steps = max_steps;
    cfg.threads = threads;
    const auto trace = ablp::complete(g, model, cfg, *model.featurize_config());

    std::ostringstream text;
    text << std::fixed << std::setprecision(6);
    for (std::size_t step = 0; step < trace.batches.size(); ++step) {
      for (const auto& e : trace.batches[step]) {
        text << step + 1 << ' ' << g.label(e.u) << ' ' << g.label(e.v) << ' ' << e.score << '\n';
      }
    }
    if (complete_out == "-") {
      std::cout << text.str();
    } else {
      write_text(complete_out, text.str());
      write_manifest(complete_out, "complete", input,
                     {{"model", complete_model}, {"epsilon", epsilon}, {"mode", mode}, {"max_steps", max_steps}},
                     start);
    }
    std::cerr << "added " << trace.added_count() << " edge(s) in " << trace.batches.size() << " step(s); edges "
              << g.edge_count() << " -> " << trace.final_graph.edge_count() << '\n';
    return 0;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
