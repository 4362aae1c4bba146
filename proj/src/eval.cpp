#include "ablp/eval.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ablp {

ConfusionCounts confusion(std::span<const std::uint8_t> y_true, std::span<const std::uint8_t> y_pred) {
  if (y_true.size() != y_pred.size()) throw std::invalid_argument("label vectors differ in length");
  ConfusionCounts c;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] > 1 || y_pred[i] > 1) throw std::invalid_argument("labels must be 0 or 1");
    if (y_true[i]) {
      (y_pred[i] ? c.tp : c.fn) += 1;
    } else {
      (y_pred[i] ? c.fp : c.tn) += 1;
    }
  }
  return c;
}

double f1_score(double precision, double recall) {
  const double sum = precision + recall;
  return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

MetricsReport metrics(const ConfusionCounts& c) {
  MetricsReport r;
  r.counts = c;
  if (c.tp + c.fp > 0) r.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) r.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  // From counts: 2TP / (2TP + FP + FN), algebraically equal to 2PR/(P+R).
  if (c.tp > 0) r.f1 = 2.0 * static_cast<double>(c.tp) / static_cast<double>(2 * c.tp + c.fp + c.fn);
  return r;
}

namespace {

std::vector<std::uint8_t> threshold(std::span<const double> scores, double epsilon) {
  std::vector<std::uint8_t> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] >= epsilon ? 1 : 0;
  return out;
}

}  // namespace

ExperimentResult run_experiment(const Graph& g, const FeatureConfig& config, const ClassifierSpec& classifier,
                                const BalanceSpec& balancing, const SplitSpec& splitting, const RunOptions& options) {
  const Dataset full = build_dataset(g, config, options.threads);
  const Dataset data = balancing.negative_ratio ? balance(full, *balancing.negative_ratio, balancing.seed) : full;
  Split parts = split(data, splitting.test_fraction, splitting.seed);

  Classifier model = train(parts.train.view(), parts.train.labels, classifier.hyperparameters, classifier.seed,
                           options.threads);
  model.set_featurize_config(config);

  auto scores = model.predict_scores(parts.test.view(), options.threads);
  const auto predicted = threshold(scores, 0.5);
  MetricsReport test = metrics(confusion(parts.test.labels, predicted));

  std::optional<MetricsReport> holdout;
  if (options.evaluate_holdout) {
    // Pairs are unique per row, so "not trained on" is decided by pair.
    std::vector<std::pair<NodeId, NodeId>> trained = parts.train.pairs;
    std::sort(trained.begin(), trained.end());
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < full.rows(); ++i) {
      if (!std::binary_search(trained.begin(), trained.end(), full.pairs[i])) rest.push_back(i);
    }
    const Dataset unseen = full.subset(rest);
    const auto unseen_scores = model.predict_scores(unseen.view(), options.threads);
    holdout = metrics(confusion(unseen.labels, threshold(unseen_scores, 0.5)));
  }
  return ExperimentResult{test, holdout, std::move(parts), std::move(scores), std::move(model)};
}

SweepResult sweep(const Graph& g, const SweepSpec& spec) {
  if (spec.a_max < 1) throw std::invalid_argument("a_max must be >= 1");
  if (spec.b_max < 0) throw std::invalid_argument("b_max must be >= 0");
  if (spec.strategies.empty()) throw std::invalid_argument("no strategies requested");
  if (spec.seeds.empty()) throw std::invalid_argument("no seeds requested");

  SweepResult result;
  for (int a = 1; a <= spec.a_max; ++a) {
    for (int b = 0; b <= spec.b_max; ++b) {
      for (const auto strategy : spec.strategies) {
        for (const auto seed : spec.seeds) {
          SweepRecord record{a, b, strategy, seed, {}, 0.0, std::nullopt};
          const auto start = std::chrono::steady_clock::now();
          try {
            const FeatureConfig config{a, b, strategy, spec.mask_pair_edge, seed};
            record.metrics = run_experiment(g, config, {spec.classifier, seed}, {spec.negative_ratio, seed},
                                            {spec.test_fraction, seed}, {spec.threads, false})
                                 .test;
          } catch (const std::exception& e) {
            record.error = e.what();
          }
          record.wall_ms =
              std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
          result.records.push_back(std::move(record));
        }
      }
    }
  }
  return result;
}

Metric parse_metric(std::string_view name) {
  if (name == "precision") return Metric::precision;
  if (name == "recall") return Metric::recall;
  if (name == "f1") return Metric::f1;
  throw std::invalid_argument("unknown metric '" + std::string(name) + "'");
}

double metric_value(const MetricsReport& report, Metric metric) {
  switch (metric) {
    case Metric::precision: return report.precision;
    case Metric::recall: return report.recall;
    case Metric::f1: return report.f1;
  }
  return 0.0;
}

namespace {

// Shortest text that parses back to the same double.
std::string shortest(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

}  // namespace

void export_csv(const SweepResult& result, std::ostream& out, bool include_timing) {
  if (result.records.empty()) throw std::invalid_argument("empty sweep result");
  out << "a,b,strategy,seed,precision,recall,f1,tp,fp,fn,tn,wall_ms\n";
  for (const auto& r : result.records) {
    out << r.a << ',' << r.b << ',' << to_string(r.strategy) << ',' << r.seed << ',';
    if (r.error) {
      out << ",,,,,,,";
    } else {
      const auto& c = r.metrics.counts;
      out << shortest(r.metrics.precision) << ',' << shortest(r.metrics.recall) << ',' << shortest(r.metrics.f1)
          << ',' << c.tp << ',' << c.fp << ',' << c.fn << ',' << c.tn << ',';
    }
    if (include_timing) {
      std::ostringstream ms;
      ms << std::fixed << std::setprecision(3) << r.wall_ms;
      out << ms.str();
    }
    out << '\n';
  }
}

namespace {

// Sequential ramp from near-white to dark blue.
std::string ramp_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const int lo[3] = {247, 251, 255};
  const int hi[3] = {8, 48, 107};
  std::ostringstream hex;
  hex << '#' << std::hex << std::setfill('0');
  for (int k = 0; k < 3; ++k) hex << std::setw(2) << static_cast<int>(std::lround(lo[k] + t * (hi[k] - lo[k])));
  return hex.str();
}

}  // namespace

void render_heatmap(const SweepResult& result, Metric metric, std::ostream& out) {
  if (result.records.empty()) throw std::invalid_argument("empty sweep result");

  std::vector<StrategyKind> strategies;
  int a_max = 0, b_max = 0;
  int a_min = result.records.front().a, b_min = result.records.front().b;
  for (const auto& r : result.records) {
    if (std::find(strategies.begin(), strategies.end(), r.strategy) == strategies.end()) strategies.push_back(r.strategy);
    a_max = std::max(a_max, r.a);
    b_max = std::max(b_max, r.b);
    a_min = std::min(a_min, r.a);
    b_min = std::min(b_min, r.b);
  }
  const int rows = a_max - a_min + 1;
  const int cols = b_max - b_min + 1;
  constexpr int cell = 48, margin = 40, title = 24, gap = 30;
  const int panel_w = margin + cols * cell;
  const int panel_h = title + margin + rows * cell;
  const int width = panel_w + 20;
  const int height = static_cast<int>(strategies.size()) * (panel_h + gap) + 40;

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<defs><linearGradient id=\"ramp\">";
  for (int k = 0; k <= 4; ++k) out << "<stop offset=\"" << k * 25 << "%\" stop-color=\"" << ramp_color(k / 4.0) << "\"/>";
  out << "</linearGradient></defs>\n";

  for (std::size_t s = 0; s < strategies.size(); ++s) {
    const int top = static_cast<int>(s) * (panel_h + gap);
    // Seed-averaged value per (a, b).
    std::map<std::pair<int, int>, std::pair<double, int>> cells;
    for (const auto& r : result.records) {
      if (r.strategy != strategies[s] || r.error) continue;
      auto& [sum, n] = cells[{r.a, r.b}];
      sum += metric_value(r.metrics, metric);
      ++n;
    }
    out << "<text x=\"" << margin << "\" y=\"" << top + 16 << "\">" << to_string(strategies[s]) << "</text>\n";
    for (int b = b_min; b <= b_max; ++b) {
      out << "<text x=\"" << margin + (b - b_min) * cell + cell / 2 << "\" y=\"" << top + title + margin - 8
          << "\" text-anchor=\"middle\">b=" << b << "</text>\n";
    }
    for (int a = a_min; a <= a_max; ++a) {
      const int y = top + title + margin + (a - a_min) * cell;
      out << "<text x=\"" << margin - 6 << "\" y=\"" << y + cell / 2 + 4 << "\" text-anchor=\"end\">a=" << a
          << "</text>\n";
      for (int b = b_min; b <= b_max; ++b) {
        const int x = margin + (b - b_min) * cell;
        const auto it = cells.find({a, b});
        const bool present = it != cells.end() && it->second.second > 0;
        const double value = present ? it->second.first / it->second.second : 0.0;
        out << "<rect class=\"cell\" x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell
            << "\" fill=\"" << (present ? ramp_color(value) : std::string("#dddddd")) << "\" stroke=\"#ffffff\"/>\n";
        std::ostringstream label;
        if (present) {
          label << std::fixed << std::setprecision(2) << value;
        } else {
          label << "n/a";
        }
        out << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 4 << "\" text-anchor=\"middle\" fill=\""
            << (value > 0.5 ? "#ffffff" : "#000000") << "\">" << label.str() << "</text>\n";
      }
    }
  }
  const int legend_y = height - 30;
  out << "<rect class=\"legend\" x=\"" << margin << "\" y=\"" << legend_y << "\" width=\"" << cols * cell
      << "\" height=\"10\" fill=\"url(#ramp)\"/>\n";
  out << "<text x=\"" << margin << "\" y=\"" << legend_y + 24 << "\">0</text>\n";
  out << "<text x=\"" << margin + cols * cell << "\" y=\"" << legend_y + 24 << "\" text-anchor=\"end\">1</text>\n";
  out << "</svg>\n";
}

}  // namespace ablp
