#include "cli.hpp"

#include "simspace/augmentation.hpp"
#include "simspace/csv.hpp"
#include "simspace/data_model.hpp"
#include "simspace/error.hpp"
#include "simspace/experiment.hpp"
#include "simspace/image.hpp"

#include "support/synthetic.hpp"
#include "support/temp_dir.hpp"

#include <gtest/gtest.h>

#include <sstream>

using test_support::TempDir;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "simspace");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = simspace::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::size_t data_rows(const std::filesystem::path& path) { return simspace::csv::read(path).rows.size(); }

// Dissimilarities among 16 stimuli from a hidden 4-D space, a matching
// feature file (4 replicates per stimulus) and the space itself as targets.
void write_experiment_inputs(const TempDir& dir) {
  const auto data = synthetic::grouped_linear(16, 4, 12, 4, 4, 0.05, 0.0, 21);
  simspace::save_feature_csv(data.features, dir / "features.csv");
  simspace::save_configuration_csv(data.targets, dir / "space.csv");
  const auto delta = synthetic::euclidean(data.targets.coords());
  simspace::save_dissimilarity_csv(simspace::DissimilarityMatrix(data.targets.labels(), delta.values()),
                                   dir / "d.csv");
}

}  // namespace

TEST(Cli, MdsWritesConfigurationAndScree) {
  TempDir dir;
  simspace::save_dissimilarity_csv(synthetic::random_dissimilarity(8, 1), dir / "d.csv");
  const auto r = cli({"mds", "--dissimilarities", (dir / "d.csv").string(), "--mode", "nonmetric", "--dims", "2",
                      "--restarts", "8", "--max-iter", "1000", "--seed", "42", "--out", (dir / "cfg.csv").string(),
                      "--scree", (dir / "scree.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(simspace::load_configuration_csv(dir / "cfg.csv").dims(), 2u);
  const auto scree = simspace::csv::read(dir / "scree.csv");
  EXPECT_EQ(scree.header, (std::vector<std::string>{"dims", "metric_stress", "nonmetric_stress", "best_restart",
                                                    "iterations"}));
  EXPECT_EQ(scree.rows.size(), 1u);
}

TEST(Cli, MdsDimensionRange) {
  TempDir dir;
  simspace::save_dissimilarity_csv(synthetic::random_dissimilarity(8, 2), dir / "d.csv");
  const auto r = cli({"mds", "--dissimilarities", (dir / "d.csv").string(), "--dims", "1-3", "--restarts", "4",
                      "--seed", "1", "--out", (dir / "cfg.csv").string(), "--scree", (dir / "scree.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (int t = 1; t <= 3; ++t)
    EXPECT_EQ(simspace::load_configuration_csv(dir / ("cfg_t" + std::to_string(t) + ".csv")).dims(),
              static_cast<std::size_t>(t));
  EXPECT_EQ(data_rows(dir / "scree.csv"), 3u);
}

TEST(Cli, UsageErrorsExitOne) {
  const auto unknown = cli({"mds", "--bogus"});
  EXPECT_EQ(unknown.code, 1);
  EXPECT_NE(unknown.err.find("--bogus"), std::string::npos);
  EXPECT_NE(unknown.err.find("Usage"), std::string::npos);
  EXPECT_EQ(cli({}).code, 1);
  EXPECT_EQ(cli({"frobnicate"}).code, 1);
  const auto missing_seed = cli({"mds", "--dissimilarities", "d.csv", "--out", "c.csv"});
  EXPECT_EQ(missing_seed.code, 1);
  EXPECT_NE(missing_seed.err.find("--seed"), std::string::npos);
  EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST(Cli, ValidationAndRuntimeExitCodes) {
  TempDir dir;
  dir.write("bad.csv", "label,a,b\na,1,2\nb,2,0\n");
  const auto bad = cli({"stress", "--dissimilarities", (dir / "bad.csv").string(), "--configuration",
                        (dir / "bad.csv").string()});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("NonzeroDiagonal"), std::string::npos);
  const auto missing = cli({"pixel-baseline", "--images", (dir / "nowhere").string(), "--block", "2", "--out",
                            (dir / "f.csv").string()});
  EXPECT_EQ(missing.code, 2);
}

TEST(Cli, StressAndCorrelate) {
  TempDir dir;
  const auto x = synthetic::uniform_points(8, 2, 3);
  simspace::save_dissimilarity_csv(synthetic::euclidean(x), dir / "d.csv");
  simspace::save_configuration_csv(simspace::Configuration(synthetic::labels(8), x), dir / "c.csv");
  const auto s = cli({"stress", "--dissimilarities", (dir / "d.csv").string(), "--configuration",
                      (dir / "c.csv").string()});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_NE(s.out.find("metric,"), std::string::npos);
  EXPECT_NE(s.out.find("nonmetric,"), std::string::npos);

  const auto c = cli({"correlate", "--dissimilarities", (dir / "d.csv").string(), "--representation",
                      (dir / "c.csv").string(), "--seed", "1", "--folds", "4", "--out", (dir / "r.csv").string()});
  ASSERT_EQ(c.code, 0) << c.err;
  const auto table = simspace::csv::read(dir / "r.csv");
  EXPECT_EQ(table.header, (std::vector<std::string>{"metric", "weighted", "pearson_r", "spearman_rho", "n_pairs",
                                                    "best"}));
  ASSERT_EQ(table.rows.size(), 6u);
  EXPECT_EQ(table.rows[0][0], "euclidean");
  EXPECT_EQ(table.rows[0][5], "true");
  EXPECT_EQ(table.rows[0][4], "28");
}

TEST(Cli, CorrelateAcceptsFeatureFiles) {
  TempDir dir;
  const auto x = synthetic::uniform_points(6, 3, 4);
  simspace::save_dissimilarity_csv(synthetic::euclidean(x), dir / "d.csv");
  const auto labels = synthetic::labels(6);
  simspace::save_feature_csv(simspace::FeatureMatrix(labels, labels, x), dir / "f.csv");
  const auto c = cli({"correlate", "--dissimilarities", (dir / "d.csv").string(), "--representation",
                      (dir / "f.csv").string(), "--metric", "manhattan", "--weighting", "none", "--seed", "1"});
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_NE(c.out.find("manhattan,false,"), std::string::npos);
}

TEST(Cli, AugmentThenPixelBaseline) {
  TempDir dir;
  std::filesystem::create_directories(dir / "img");
  simspace::save_png(simspace::RasterImage(12, 12, 3, 0.25), dir.path() / "img" / "cat.png");
  simspace::save_png(simspace::RasterImage(12, 12, 3, 0.75), dir.path() / "img" / "dog.png");
  const auto a = cli({"augment", "--images", (dir / "img").string(), "--count", "3", "--seed", "5", "--out",
                      (dir / "aug").string()});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(data_rows(dir / "aug/manifest.csv"), 6u);

  const auto p = cli({"pixel-baseline", "--images", (dir / "aug").string(), "--block", "4,6", "--aggregator",
                      "median", "--out", (dir / "px.csv").string(), "--manifest", (dir / "aug/manifest.csv").string()});
  ASSERT_EQ(p.code, 0) << p.err;
  const auto k4 = simspace::load_feature_csv(dir / "px_k4.csv");
  EXPECT_EQ(k4.rows(), 6u);
  EXPECT_EQ(k4.features(), 27u);
  EXPECT_EQ(k4.groups(), (std::vector<std::string>{"cat", "dog"}));
  EXPECT_EQ(simspace::load_feature_csv(dir / "px_k6.csv").features(), 12u);
}

TEST(Cli, Regress) {
  TempDir dir;
  write_experiment_inputs(dir);
  const auto r = cli({"regress", "--features", (dir / "features.csv").string(), "--targets",
                      (dir / "space.csv").string(), "--regressor", "lasso", "--beta-grid", "0,0.1,10", "--folds",
                      "8", "--seed", "3", "--out", (dir / "report.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto table = simspace::csv::read(dir / "report.csv");
  ASSERT_EQ(table.rows.size(), 3u);
  EXPECT_EQ(table.rows[0][1], "features");
  EXPECT_EQ(table.rows[2][4], "10");

  const auto s = cli({"regress", "--features", (dir / "features.csv").string(), "--targets",
                      (dir / "space.csv").string(), "--regressor", "linear", "--seed", "3", "--shuffle-targets", "9",
                      "--out", (dir / "shuffled.csv").string(), "--feature-space", "pix"});
  ASSERT_EQ(s.code, 0) << s.err;
  const auto shuffled = simspace::csv::read(dir / "shuffled.csv");
  EXPECT_EQ(shuffled.rows[0][1], "pix");
  EXPECT_EQ(shuffled.rows[0][3], "shuffled");

  const auto bad = cli({"regress", "--features", (dir / "features.csv").string(), "--targets",
                        (dir / "space.csv").string(), "--folds", "5", "--seed", "1", "--out",
                        (dir / "x.csv").string()});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("IndivisibleGroups"), std::string::npos);
}

TEST(KeyValueFile, Grammar) {
  const auto f = simspace::KeyValueFile::parse("# top\n[a]\nx = 1 # trailing\ny=two words\n\n[b]\nz=\n");
  EXPECT_EQ(f.get("a", "x"), "1");
  EXPECT_EQ(f.get("a", "y"), "two words");
  EXPECT_EQ(f.get("b", "z"), "");
  EXPECT_FALSE(f.get("b", "x").has_value());
  EXPECT_EQ(f.section("a").size(), 2u);
  EXPECT_THROW(simspace::KeyValueFile::parse("x = 1\n"), simspace::Error);
  EXPECT_THROW(simspace::KeyValueFile::parse("[a]\njunk\n"), simspace::Error);
  EXPECT_THROW(simspace::KeyValueFile::parse("[a]\nx=1\nx=2\n"), simspace::Error);
  EXPECT_THROW(simspace::KeyValueFile::parse("[a\n"), simspace::Error);
}

TEST(ExperimentConfig, Validation) {
  TempDir dir;
  write_experiment_inputs(dir);
  const auto config_error = [&](const std::string& text) {
    dir.write("c.cfg", text);
    try {
      simspace::ExperimentConfig::load(dir / "c.cfg");
    } catch (const simspace::Error& e) {
      return e.kind() == simspace::ErrorKind::Config;
    }
    return false;
  };
  const std::string head = "[experiment]\npreset = exp1\noutput = out\nseed = 1\n";
  EXPECT_FALSE(config_error(head + "[features]\nann = features.csv\n[targets]\nspace = space.csv\n"));
  EXPECT_TRUE(config_error(head + "[features]\nann = missing.csv\n[targets]\nspace = space.csv\n"));
  EXPECT_TRUE(config_error(head + "colour = blue\n[features]\nann = features.csv\n[targets]\nspace = space.csv\n"));
  EXPECT_TRUE(config_error(head + "[features]\nann = features.csv\n"));
  EXPECT_TRUE(config_error("[experiment]\npreset = exp1\noutput = out\n[features]\nann = features.csv\n"));
  EXPECT_TRUE(config_error("[experiment]\npreset = exp9\noutput = out\nseed = 1\n[features]\nann = features.csv\n"));
  EXPECT_TRUE(config_error("[experiment]\npreset = exp3\noutput = out\nseed = 1\n[features]\nann = features.csv\n"));
  EXPECT_TRUE(config_error(head + "[features]\nann = features.csv\n[targets]\nspace = space.csv\n[plots]\nx = 1\n"));
}

TEST(Experiment, Exp1) {
  TempDir dir;
  write_experiment_inputs(dir);
  dir.write("exp1.cfg",
            "[experiment]\npreset = exp1\noutput = out\nseed = 4\nshuffle_seed = 8\nfolds = 8\n"
            "beta_grid = 0.001, 0.01, 0.1\n[features]\nann = features.csv\n[targets]\nspace = space.csv\n");
  const auto r = cli({"experiment", "--config", (dir / "exp1.cfg").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = simspace::csv::read(dir / "out/report.csv");
  ASSERT_EQ(report.rows.size(), 5u);  // baseline, linear x2, lasso x2
  EXPECT_EQ(report.rows[0][0], "baseline");
  EXPECT_EQ(report.rows[1][3], "correct");
  EXPECT_EQ(report.rows[2][3], "shuffled");
  EXPECT_EQ(report.rows[3][0], "lasso");
  EXPECT_EQ(data_rows(dir / "out/sweeps.csv"), 6u);
  const double correct = std::stod(report.rows[1][5]), shuffled = std::stod(report.rows[2][5]);
  EXPECT_LT(correct, shuffled);
}

TEST(Experiment, Exp2BuildsSpacesFromDissimilarities) {
  TempDir dir;
  write_experiment_inputs(dir);
  dir.write("exp2.cfg",
            "[experiment]\npreset = exp2\noutput = out\nseed = 4\nbeta_grid = 0.01\n[features]\nann = features.csv\n"
            "[targets]\nsupplied = space.csv\n[mds]\ndissimilarities = d.csv\nrestarts = 8\ndims = 4\n");
  const auto r = cli({"experiment", "--config", (dir / "exp2.cfg").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = simspace::csv::read(dir / "out/report.csv");
  ASSERT_EQ(report.rows.size(), 9u);  // {baseline, linear, lasso} x 3 spaces
  EXPECT_EQ(report.rows[1][2], "metric_smacof_t4");
  EXPECT_EQ(report.rows[2][2], "nonmetric_smacof_t4");
  EXPECT_TRUE(std::filesystem::exists(dir / "out/space_metric_smacof_t4.csv"));
}

TEST(Experiment, Exp3IsDeterministicAndConfined) {
  TempDir dir;
  write_experiment_inputs(dir);
  const std::string cfg =
      "[experiment]\npreset = exp3\noutput = OUT\nseed = 4\nbeta_grid = 0.01, 0.1\n[features]\nann = features.csv\n"
      "[mds]\ndissimilarities = d.csv\nrestarts = 4\nmin_dims = 1\nmax_dims = 10\n";
  auto with_output = [&](const std::string& name) {
    std::string text = cfg;
    text.replace(text.find("OUT"), 3, name);
    return text;
  };
  const auto inputs_before = dir.read("d.csv") + dir.read("features.csv");
  dir.write("a.cfg", with_output("a"));
  dir.write("b.cfg", with_output("b"));
  ASSERT_EQ(cli({"experiment", "--config", (dir / "a.cfg").string()}).code, 0);
  ASSERT_EQ(cli({"experiment", "--config", (dir / "b.cfg").string()}).code, 0);
  EXPECT_EQ(dir.read("d.csv") + dir.read("features.csv"), inputs_before);

  const auto report = simspace::csv::read(dir / "a/report.csv");
  ASSERT_EQ(report.rows.size(), 30u);  // {baseline, linear, lasso} x t = 1..10
  EXPECT_EQ(report.rows[0][2], "nonmetric_smacof_t1");
  EXPECT_EQ(report.rows[9][2], "nonmetric_smacof_t10");
  EXPECT_EQ(data_rows(dir / "a/scree.csv"), 10u);

  std::size_t files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir / "a")) {
    ++files;
    const auto name = entry.path().filename().string();
    EXPECT_EQ(dir.read("a/" + name), dir.read("b/" + name)) << name;
  }
  EXPECT_EQ(files, 13u);  // report, sweeps, scree, ten spaces
}
