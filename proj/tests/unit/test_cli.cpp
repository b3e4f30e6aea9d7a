#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <prony/signal_io.hpp>
#include <prony_cli/accuracy.hpp>
#include <prony_cli/commands.hpp>
#include <prony_cli/manifest.hpp>

namespace prony::cli {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("prony_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int call(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return run(args, out_, err_);
  }

  std::vector<std::string> read_lines(const std::string& name) const {
    std::ifstream in(path(name));
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    return lines;
  }

  nlohmann::json read_json(const std::string& name) const {
    std::ifstream in(path(name));
    return nlohmann::json::parse(in);
  }

  int generate(int d, int m, int n, double noise, std::uint64_t seed, const std::string& stem) {
    return call({"generate", "--d", std::to_string(d), "--m", std::to_string(m), "--n", std::to_string(n), "--noise",
                 std::to_string(noise), "--seed", std::to_string(seed), "--out-signal", path(stem + ".json"),
                 "--out-grid", path(stem + ".bin")});
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(CliTest, GenerateWritesSignalGridAndManifest) {
  ASSERT_EQ(generate(3, 5, 20, 0.0, 0, "g"), kExitOk);
  EXPECT_EQ(load_grid(path("g.bin")).values().size(), 74088u);
  const ExponentialSum sum = load_signal(path("g.json"));
  EXPECT_EQ(sum.dim(), 3);
  EXPECT_EQ(sum.terms(), 5);
  EXPECT_EQ(read_json("g.json").at("manifest"), "g.bin.manifest.json");
  const nlohmann::json manifest = read_json("g.bin.manifest.json");
  EXPECT_EQ(manifest.at("command"), "generate");
  EXPECT_EQ(manifest.at("parameters").at("n"), 20);
  EXPECT_TRUE(manifest.at("environment").contains("build_id"));
}

TEST_F(CliTest, GenerateIsSeedDeterministic) {
  ASSERT_EQ(generate(2, 3, 6, 1e-3, 5, "a"), kExitOk);
  ASSERT_EQ(generate(2, 3, 6, 1e-3, 5, "b"), kExitOk);
  ASSERT_EQ(generate(2, 3, 6, 1e-3, 6, "c"), kExitOk);
  EXPECT_TRUE(load_grid(path("a.bin")) == load_grid(path("b.bin")));
  EXPECT_FALSE(load_grid(path("a.bin")) == load_grid(path("c.bin")));
}

TEST_F(CliTest, GenerateFromSignalFile) {
  ASSERT_EQ(generate(2, 2, 3, 0.0, 0, "src"), kExitOk);
  EXPECT_EQ(call({"generate", "--family", "file", "--signal-file", path("src.json"), "--n", "3", "--out-signal",
                  path("copy.json"), "--out-grid", path("copy.bin")}),
            kExitOk);
  EXPECT_TRUE(load_grid(path("src.bin")) == load_grid(path("copy.bin")));
  EXPECT_EQ(call({"generate", "--family", "file", "--n", "3"}), kExitUsage);
  EXPECT_EQ(call({"generate", "--d", "2", "--n", "3"}), kExitUsage);
}

TEST_F(CliTest, RecoverExitCodes) {
  ASSERT_EQ(generate(2, 3, 8, 0.0, 0, "g"), kExitOk);
  EXPECT_EQ(call({"recover", "--grid", path("g.bin"), "--svd", "dense", "--m", "3", "--out", path("r.json"),
                  "--timings-csv", path("t.csv")}),
            kExitOk);
  const nlohmann::json report = read_json("r.json");
  EXPECT_EQ(report.at("rank_detected"), 3);
  EXPECT_FALSE(report.at("rank_anomaly").get<bool>());
  EXPECT_EQ(read_json("r.json.manifest.json").at("command"), "recover");
  const auto csv = read_lines("t.csv");
  ASSERT_EQ(csv.size(), 3u);
  EXPECT_EQ(csv[0], "# prony-csv v1 manifest=r.json.manifest.json");

  EXPECT_EQ(call({"recover", "--grid", path("g.bin"), "--svd", "dense", "--m", "4", "--out", path("r4.json")}),
            kExitRankAnomaly);
  EXPECT_TRUE(read_json("r4.json").at("rank_anomaly").get<bool>());

  EXPECT_EQ(call({"recover", "--grid", path("g.bin"), "--tol-mode", "noise", "--out", path("x.json")}), kExitUsage);
  EXPECT_EQ(call({"recover", "--grid", path("g.bin"), "--tol", "1e-3", "--out", path("x.json")}), kExitUsage);
  EXPECT_EQ(call({"recover", "--grid", path("missing.bin"), "--out", path("x.json")}), kExitUsage);
  EXPECT_EQ(call({"recover", "--grid", path("g.bin"), "--svd", "qr"}), kExitUsage);
}

TEST_F(CliTest, BenchSvdRowsAgreeOnRank) {
  ASSERT_EQ(call({"bench-svd", "--cases", "2,3,6;2,4,7", "--reps", "1", "--out", path("b.csv")}), kExitOk);
  const auto lines = read_lines("b.csv");
  ASSERT_EQ(lines.size(), 2u + 6u);
  EXPECT_EQ(lines[0].rfind("# prony-csv v1 manifest=", 0), 0u);
  EXPECT_EQ(lines[1], "d,m,n,N,backend,rank,time_median_s,reps,sigma_rel_dev,status");
  for (std::size_t i = 2; i < lines.size(); ++i) {
    std::vector<std::string> fields;
    std::stringstream row(lines[i]);
    for (std::string f; std::getline(row, f, ',');) fields.push_back(f);
    ASSERT_EQ(fields.size(), 10u);
    EXPECT_EQ(fields[5], fields[1]);
    EXPECT_EQ(fields[9], "ok");
  }
  EXPECT_EQ(call({"bench-svd", "--cases", "2,3", "--out", path("bad.csv")}), kExitUsage);
}

TEST_F(CliTest, AccuracySweepSchema) {
  ASSERT_EQ(call({"accuracy-sweep", "--eps-list", "0,1e-6", "--d", "2", "--m", "3", "--n", "8", "--svd", "dense",
                  "--out", path("a.csv")}),
            kExitOk);
  const auto lines = read_lines("a.csv");
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[1], "eps,tol_mode,tol,rank,residual_rel,max_t_error,rel_c_error,status");
  EXPECT_EQ(std::stod(lines[2].substr(0, lines[2].find(','))), 0.0);
  EXPECT_NE(lines[2].find(",machine,"), std::string::npos);
  EXPECT_NE(lines[3].find(",noise,"), std::string::npos);
  EXPECT_TRUE(fs::exists(path("a.csv.manifest.json")));
  EXPECT_EQ(call({"accuracy-sweep", "--eps-list", "0,1e-6", "--tol-list", "machine,1e-6,1e-7", "--d", "2", "--m", "3", "--n",
                  "8", "--out", path("b.csv")}),
            kExitUsage);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(call({}), kExitUsage);
  EXPECT_EQ(call({"frobnicate"}), kExitUsage);
  EXPECT_EQ(call({"generate"}), kExitUsage);
  EXPECT_EQ(call({"--help"}), kExitOk);
}

TEST(Matching, GreedyPairsAcrossWrap) {
  RealMatrix truth_t(2, 1);
  truth_t << 0.0, 0.5;
  ComplexVector truth_c(2);
  truth_c << 1.0, 2.0;
  const ExponentialSum truth(truth_t, truth_c);
  RealMatrix t(2, 1);
  t << 0.5 + 1e-9, 1.0 - 1e-9;
  ComplexVector c(2);
  c << 2.0, 1.0;
  const Matching m = match_to_truth(t, c, truth);
  EXPECT_EQ(m.truth_of[0], 1);
  EXPECT_EQ(m.truth_of[1], 0);
  EXPECT_NEAR(m.max_t_error, 1e-9, 1e-15);
  EXPECT_NEAR(m.rel_c_error, 0.0, 1e-15);

  const Matching short_match = match_to_truth(t.topRows(1), c.head(1), truth);
  EXPECT_NEAR(short_match.rel_c_error, 1.0 / std::sqrt(5.0), 1e-15);
}

TEST(Manifest, SidecarNaming) {
  EXPECT_EQ(manifest_path_for("out/x.csv").string(), "out/x.csv.manifest.json");
  EXPECT_EQ(csv_preamble("out/x.csv.manifest.json"), "# prony-csv v1 manifest=x.csv.manifest.json");
}

}  // namespace
}  // namespace prony::cli
