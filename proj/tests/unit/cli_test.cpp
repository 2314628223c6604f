#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include <unistd.h>

#include "chainscape/serialize.hpp"
#include "cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
  int code;
  std::string out, err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("chainscape_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CliResult run(std::vector<std::string> args) {
    args.push_back("--out");
    args.push_back(dir_.string());
    std::ostringstream out, err;
    const int code = chainscape::cli::run(args, out, err);
    return {code, out.str(), err.str()};
  }
  std::string read(const std::string& name) {
    std::ifstream in(dir_ / name);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  fs::path write(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name) << text;
    return dir_ / name;
  }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, GraphWritesArtifactsThatRoundTrip) {
  const CliResult r = run({"graph", "--preset", "ode-1mx2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto sg = json::parse(read("stream_graph.json"));
  EXPECT_EQ(sg["nodes"].size(), 2u);
  const auto dot = chainscape::parse_dot(read("stream_graph.dot"));
  EXPECT_EQ(dot.nodes.size(), 2u);
  EXPECT_EQ(dot.edges.size(), 1u);
  EXPECT_TRUE(json::parse(read("cr_cells.json")).contains("cells"));
}

TEST_F(Cli, EveryEmittedDotParses) {
  ASSERT_EQ(run({"graph", "--preset", "square-semiflow", "--levels", "2", "--links"}).code, 0);
  std::size_t seen = 0;
  for (const auto& e : fs::directory_iterator(dir_)) {
    if (e.path().extension() != ".dot") continue;
    ++seen;
    std::ifstream in(e.path());
    std::ostringstream ss;
    ss << in.rdbuf();
    EXPECT_NO_THROW(chainscape::parse_dot(ss.str())) << e.path();
  }
  EXPECT_EQ(seen, 4u);
}

TEST_F(Cli, EmptyChainRecurrenceGivesEmptyGraph) {
  const CliResult r = run({"graph", "--preset", "map-halfplane-shift"});
  ASSERT_EQ(r.code, 0);
  const auto sg = json::parse(read("stream_graph.json"));
  EXPECT_TRUE(sg["nodes"].empty());
  EXPECT_TRUE(sg["edges"].empty());
}

TEST_F(Cli, MalformedSpecReportsOffset) {
  const auto p = write("bad.json", "{\"kind\": \"map\",, }");
  const CliResult r = run({"graph", "--spec", p.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("byte"), std::string::npos) << r.err;
}

TEST_F(Cli, SpecFileRuns) {
  const auto p = write("tent.json",
                       R"js({"kind":"map","dimension":1,"expressions":["min(2*x0, 2 - 2*x0)"],
                           "domain":{"lo":[0],"hi":[1]}})js");
  const CliResult r = run({"graph", "--spec", p.string(), "--grid", "128"});
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST_F(Cli, InputErrorsExitTwo) {
  EXPECT_EQ(run({"graph", "--preset", "nope"}).code, 2);
  EXPECT_EQ(run({"graph"}).code, 2);
  EXPECT_EQ(run({"graph", "--preset", "map-logistic", "--epsilon", "-1"}).code, 2);
  EXPECT_EQ(run({"graph", "--preset", "map-logistic", "--metric", "hyperbolic"}).code, 2);
  EXPECT_EQ(run({"graph", "--preset", "map-logistic", "--grid", "0"}).code, 2);
  EXPECT_EQ(run({"verify", "--preset", "nope"}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"compare-time1", "--preset", "map-logistic"}).code, 2);
}

TEST_F(Cli, CellBudgetGuard) {
  ::setenv("CHAINSCAPE_CELL_BUDGET", "1000", 1);
  const CliResult r = run({"refine", "--preset", "map-logistic", "--levels", "3"});
  ::unsetenv("CHAINSCAPE_CELL_BUDGET");
  EXPECT_EQ(r.code, 2);
}

TEST_F(Cli, AttractorFiles) {
  const CliResult r = run({"attractor", "--preset", "square-semiflow"});
  ASSERT_EQ(r.code, 0) << r.out;
  const auto a = json::parse(read("attractor.json"));
  EXPECT_TRUE(a["connected"].get<bool>());
  EXPECT_TRUE(json::parse(read("trapping_report.json"))["is_forward_invariant"].get<bool>());
  const CliResult gs = run({"attractor", "--preset", "gs-truncated-8"});
  EXPECT_NE(gs.out.find("connected: false"), std::string::npos);
}

TEST_F(Cli, CompareTimeSigmaRefine) {
  EXPECT_EQ(run({"compare-time1", "--preset", "ode-msinpix", "--N-list", "1,2"}).code, 0);
  EXPECT_TRUE(json::parse(read("time_map.json")).is_object());
  const CliResult s = run({"sigma", "--preset", "map-cantor-fixed", "--from", "0", "--to", "1"});
  EXPECT_EQ(s.code, 0) << s.err;
  EXPECT_TRUE(json::parse(read("sigma.json")).is_object());
  EXPECT_EQ(run({"refine", "--preset", "ode-1mx2"}).code, 0);
  const auto ref = json::parse(read("refinement.json"));
  EXPECT_EQ(ref["levels"].size(), 3u);
  EXPECT_FALSE(read("refinement.csv").empty());
}

TEST_F(Cli, VerifySinglePreset) {
  const CliResult r = run({"verify", "--preset", "map-logistic"});
  EXPECT_EQ(r.code, 0) << r.out;
  const auto v = json::parse(read("verify.json"));
  EXPECT_TRUE(v["all_pass"].get<bool>());
  for (const auto& row : v["rows"]) EXPECT_EQ(row["preset"], "map-logistic");
}

TEST_F(Cli, PresetsListsCatalogue) {
  std::ostringstream out, err;
  EXPECT_EQ(chainscape::cli::run({"presets"}, out, err), 0);
  for (const char* n : {"ode-1mx2", "ode-msinpix", "map-logistic", "square-semiflow", "gs-truncated-8",
                        "map-cantor-fixed", "map-halfplane-shift"}) {
    EXPECT_NE(out.str().find(n), std::string::npos) << n;
  }
}
