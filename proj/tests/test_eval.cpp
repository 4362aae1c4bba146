#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "ablp/eval.hpp"
#include "support/fixtures.hpp"

namespace ablp {
namespace {

TEST(Confusion, Examples) {
  const std::vector<std::uint8_t> t{1, 1, 0, 0}, p{1, 0, 1, 0};
  EXPECT_EQ(confusion(t, p), (ConfusionCounts{1, 1, 1, 1}));
  const auto same = confusion(t, t);
  EXPECT_EQ(same.fp, 0u);
  EXPECT_EQ(same.fn, 0u);
  const std::vector<std::uint8_t> ones(5, 1), zeros(5, 0);
  EXPECT_EQ(confusion(ones, zeros), (ConfusionCounts{0, 0, 5, 0}));
  EXPECT_THROW(confusion(t, std::span(p).first(3)), std::invalid_argument);
  EXPECT_THROW(confusion(std::vector<std::uint8_t>{2}, std::vector<std::uint8_t>{1}), std::invalid_argument);
}

TEST(Metrics, ReportedF1Fixtures) {
  // Precision/recall pairs reported alongside their F1 values.
  const struct {
    double p, r, f1;
  } rows[] = {{0.89, 0.37, 0.52}, {1.00, 0.85, 0.92}, {0.89, 0.69, 0.78}, {0.81, 0.41, 0.54}};
  for (const auto& row : rows) EXPECT_NEAR(f1_score(row.p, row.r), row.f1, 0.005) << row.p << "," << row.r;
  EXPECT_EQ(f1_score(1.0, 1.0), 1.0);
  EXPECT_EQ(f1_score(0.0, 0.0), 0.0);
}

// Reported as P=0.95, R=0.67, F1=0.78. The harmonic mean of the rounded pair
// is 0.7858, so the F1 must come from unrounded counts; check that some P, R
// inside the rounding intervals lands within tolerance of 0.78.
TEST(Metrics, RoundedPairNeedsExactCounts) {
  EXPECT_GT(std::abs(f1_score(0.95, 0.67) - 0.78), 0.005);
  double best = 1.0;
  for (double p = 0.945; p < 0.955; p += 0.0005)
    for (double r = 0.665; r < 0.675; r += 0.0005) best = std::min(best, std::abs(f1_score(p, r) - 0.78));
  EXPECT_LE(best, 0.005);
}

TEST(Metrics, FromCounts) {
  const auto r = metrics({3, 1, 2, 10});
  EXPECT_DOUBLE_EQ(r.precision, 0.75);
  EXPECT_DOUBLE_EQ(r.recall, 0.6);
  EXPECT_NEAR(r.f1, f1_score(0.75, 0.6), 1e-12);
  const auto none = metrics({0, 0, 4, 7});
  EXPECT_EQ(none.precision, 0.0);
  EXPECT_EQ(none.recall, 0.0);
  EXPECT_EQ(none.f1, 0.0);
  EXPECT_EQ(none.counts.fn, 4u);
}

TEST(Metrics, F1BetweenPrecisionAndRecall) {
  std::mt19937_64 engine(1);
  for (int i = 0; i < 2000; ++i) {
    const ConfusionCounts c{engine() % 50, engine() % 50, engine() % 50, engine() % 50};
    const auto r = metrics(c);
    EXPECT_GE(r.f1, 0.0);
    EXPECT_LE(r.f1, 1.0);
    if (r.precision > 0 && r.recall > 0) {
      EXPECT_GE(r.f1, std::min(r.precision, r.recall) - 1e-12);
      EXPECT_LE(r.f1, std::max(r.precision, r.recall) + 1e-12);
      EXPECT_NEAR(r.f1, 2 * r.precision * r.recall / (r.precision + r.recall), 1e-12);
    }
    EXPECT_EQ(f1_score(r.precision, r.recall), f1_score(r.recall, r.precision));
  }
}

TEST(RunExperiment, TwoCliquesSeparable) {
  const auto g = testing::two_cliques(6);
  double total = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto r = run_experiment(g, {3, 1, StrategyKind::degree, false, seed}, {ForestParams{}, seed},
                                  {1.0, seed}, {0.25, seed});
    // Recount from the stored test scores.
    ConfusionCounts c;
    for (std::size_t i = 0; i < r.test_scores.size(); ++i) {
      const bool predicted = r.test_scores[i] >= 0.5;
      const bool actual = r.split.test.labels[i] == 1;
      (actual ? (predicted ? c.tp : c.fn) : (predicted ? c.fp : c.tn)) += 1;
    }
    EXPECT_EQ(c, r.test.counts);
    total += r.test.f1;
  }
  EXPECT_GE(total / 5.0, 0.9);
}

TEST(RunExperiment, EmptyGraphFailsInBalance) {
  EXPECT_THROW(run_experiment(Graph(6), {1, 0}, {}, {}, {}), DataError);
}

TEST(RunExperiment, RepeatableAndHoldout) {
  const auto g = testing::random_graph(40, 0.15, 4);
  const FeatureConfig c{2, 1, StrategyKind::random, false, 3};
  const auto x = run_experiment(g, c, {ForestParams{30}, 3}, {1.0, 3}, {0.25, 3}, {1, true});
  const auto y = run_experiment(g, c, {ForestParams{30}, 3}, {1.0, 3}, {0.25, 3}, {2, true});
  EXPECT_EQ(x.test, y.test);
  ASSERT_TRUE(x.holdout);
  EXPECT_EQ(x.holdout, y.holdout);
  EXPECT_EQ(x.holdout->counts.total(), pair_count(40) - x.split.train.rows());
}

SweepSpec small_spec() {
  SweepSpec spec;
  spec.a_max = 5;
  spec.b_max = 5;
  spec.strategies = {StrategyKind::degree};
  spec.seeds = {7};
  spec.classifier = ForestParams{5};
  return spec;
}

TEST(Sweep, GridShape) {
  const auto g = testing::random_graph(24, 0.2, 5);
  auto spec = small_spec();
  const auto r = sweep(g, spec);
  ASSERT_EQ(r.records.size(), 30u);
  std::size_t i = 0;
  for (int a = 1; a <= 5; ++a)
    for (int b = 0; b <= 5; ++b, ++i) {
      EXPECT_EQ(r.records[i].a, a);
      EXPECT_EQ(r.records[i].b, b);
      EXPECT_FALSE(r.records[i].error);
    }

  spec.a_max = 2;
  spec.b_max = 1;
  spec.strategies = {StrategyKind::random, StrategyKind::degree};
  spec.seeds = {1, 2};
  const auto many = sweep(g, spec);
  ASSERT_EQ(many.records.size(), 16u);
  EXPECT_EQ(many.records[1].strategy, StrategyKind::random);
  EXPECT_EQ(many.records[1].seed, 2u);
  EXPECT_EQ(many.records[2].strategy, StrategyKind::degree);
}

TEST(Sweep, TwoStrategiesTwoSeedsGives120Records) {
  const auto g = testing::random_graph(14, 0.3, 6);
  auto spec = small_spec();
  spec.classifier = TreeParams{};
  spec.strategies = {StrategyKind::degree, StrategyKind::random};
  spec.seeds = {1, 2};
  EXPECT_EQ(sweep(g, spec).records.size(), 120u);
}

TEST(Sweep, FailedCellsAreRecorded) {
  auto spec = small_spec();
  spec.a_max = 1;
  spec.b_max = 1;
  const auto r = sweep(Graph(5), spec);
  ASSERT_EQ(r.records.size(), 2u);
  EXPECT_TRUE(r.records[0].error);
  std::ostringstream csv;
  export_csv(r, csv, false);
  EXPECT_NE(csv.str().find("1,0,degree,7,,,,,,,,\n"), std::string::npos);
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(f);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

TEST(ExportCsv, LinesColumnsAndConsistency) {
  const auto g = testing::random_graph(24, 0.2, 5);
  const auto r = sweep(g, small_spec());
  std::ostringstream out;
  export_csv(r, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "a,b,strategy,seed,precision,recall,f1,tp,fp,fn,tn,wall_ms");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    const auto f = fields(line);
    ASSERT_EQ(f.size(), 12u) << line;
    const ConfusionCounts c{std::stoul(f[7]), std::stoul(f[8]), std::stoul(f[9]), std::stoul(f[10])};
    const auto m = metrics(c);
    EXPECT_NEAR(std::stod(f[4]), m.precision, 1e-12);
    EXPECT_NEAR(std::stod(f[5]), m.recall, 1e-12);
    EXPECT_NEAR(std::stod(f[6]), m.f1, 1e-12);
    EXPECT_FALSE(f[11].empty());
  }
  EXPECT_EQ(rows, 30u);
  EXPECT_THROW(export_csv(SweepResult{}, out), std::invalid_argument);
}

TEST(ExportCsv, ByteIdenticalWithoutTiming) {
  const auto g = testing::random_graph(24, 0.2, 5);
  auto spec = small_spec();
  spec.a_max = 3;
  std::ostringstream first, second;
  export_csv(sweep(g, spec), first, false);
  spec.threads = 3;
  export_csv(sweep(g, spec), second, false);
  EXPECT_EQ(first.str(), second.str());
}

TEST(Heatmap, OneRectPerCellAndOrientation) {
  const auto g = testing::random_graph(24, 0.2, 5);
  const auto r = sweep(g, small_spec());
  std::ostringstream svg;
  render_heatmap(r, Metric::f1, svg);
  const auto text = svg.str();
  std::size_t rects = 0;
  for (auto pos = text.find("class=\"cell\""); pos != std::string::npos; pos = text.find("class=\"cell\"", pos + 1)) ++rects;
  EXPECT_EQ(rects, 30u);
  // a labels descend the page, b labels run left to right.
  EXPECT_LT(text.find(">a=1<"), text.find(">a=5<"));
  EXPECT_LT(text.find(">b=0<"), text.find(">b=5<"));
  EXPECT_EQ(text.rfind("<svg", 0), 0u);
  EXPECT_THROW(render_heatmap(SweepResult{}, Metric::f1, svg), std::invalid_argument);
}

}  // namespace
}  // namespace ablp
