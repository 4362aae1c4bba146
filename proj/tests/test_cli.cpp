#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "ablp/graph.hpp"
#include "support/fixtures.hpp"

namespace ablp {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome run(const std::string& args) {
  const std::string command = std::string(ABLP_CLI_PATH) + " " + args + " 2>/dev/null";
  Outcome result;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return result;
  char buffer[4096];
  std::size_t n;
  while ((n = fread(buffer, 1, sizeof buffer, pipe)) > 0) result.out.append(buffer, n);
  const int status = pclose(pipe);
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("ablp_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write_graph(const Graph& g, const std::string& name = "g.edges") {
    const auto p = dir_ / name;
    std::ofstream out(p);
    write_edge_list(g, out);
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(Cli, Stats) {
  const auto file = write_graph(testing::random_graph_m(61, 270, 3));
  const auto r = run("stats " + file);
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "nodes=61 edges=270 avg_degree=8.85\n");
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run("").code, 1);
  const auto file = write_graph(testing::path_graph(4));
  EXPECT_EQ(run("stats " + file + " --bogus").code, 1);
  EXPECT_EQ(run("stats " + path("missing.edges")).code, 1);
  EXPECT_EQ(run("sweep " + file + " --a-max 0 --out -").code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
}

TEST_F(Cli, BadInputsAreRuntimeErrors) {
  const auto file = write_graph(testing::path_graph(4));
  std::ofstream(path("bad.json")) << "{not json";
  EXPECT_EQ(run("complete " + file + " --model " + path("bad.json") + " --out -").code, 2);
  std::ofstream(path("bad.edges")) << "1 2 3\n";
  EXPECT_EQ(run("stats " + path("bad.edges")).code, 2);
}

TEST_F(Cli, CentralityTop) {
  const auto file = write_graph(testing::star_graph(4));
  const auto r = run("centrality " + file + " --measure degree --top 2");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "1 4.000000\n2 1.000000\n");
}

TEST_F(Cli, SweepCsvAndManifest) {
  const auto file = write_graph(testing::random_graph(20, 0.25, 2));
  const auto r = run("sweep " + file + " --a-max 5 --b-max 5 --strategy degree --seeds 1 --trees 5 --out " +
                     path("s.csv") + " --heatmap " + path("s.svg"));
  ASSERT_EQ(r.code, 0);
  std::istringstream csv(slurp(path("s.csv")));
  std::string line;
  std::size_t lines = 0;
  while (std::getline(csv, line)) ++lines;
  EXPECT_EQ(lines, 31u);
  EXPECT_TRUE(fs::exists(path("s.csv.manifest.json")));
  EXPECT_NE(slurp(path("s.csv.manifest.json")).find("\"sha256\""), std::string::npos);
  EXPECT_NE(slurp(path("s.svg")).find("class=\"cell\""), std::string::npos);
}

TEST_F(Cli, SweepThreadCountDoesNotChangeOutput) {
  const auto file = write_graph(testing::random_graph(20, 0.25, 2));
  const std::string base = "sweep " + file + " --a-max 3 --b-max 2 --strategy degree,random --seeds 1,2 --trees 8 --no-timing";
  ASSERT_EQ(run(base + " --threads 1 --out " + path("one.csv")).code, 0);
  ASSERT_EQ(run(base + " --threads 4 --out " + path("four.csv")).code, 0);
  EXPECT_EQ(slurp(path("one.csv")), slurp(path("four.csv")));
}

TEST_F(Cli, TrainThenComplete) {
  const auto file = write_graph(testing::random_graph(20, 0.25, 2));
  ASSERT_EQ(run("train " + file + " --a 2 --b 1 --trees 10 --out " + path("m.json")).code, 0);
  const auto r = run("complete " + file + " --model " + path("m.json") +
                     " --epsilon 0.5 --mode iterative --max-steps 3 --out -");
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream f(line);
    std::size_t step;
    std::string u, v, score;
    ASSERT_TRUE(f >> step >> u >> v >> score) << line;
    EXPECT_GE(step, 1u);
    EXPECT_LE(step, 3u);
    EXPECT_EQ(score.size(), 8u) << score;  // d.dddddd
  }
  // A model built for another shape is refused.
  EXPECT_EQ(run("eval " + file + " --a 3 --b 1 --model " + path("m.json")).code, 2);
}

}  // namespace
}  // namespace ablp
