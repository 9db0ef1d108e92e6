#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "plrg/harness.hpp"

namespace {

using namespace plrg;
namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("plrg_harness_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

ExperimentConfig motifs_config(const fs::path& dir, int threads) {
  ExperimentConfig cfg;
  cfg.experiment = Experiment::Motifs;
  cfg.alpha = 1.5;
  cfg.gamma = {1.5};
  cfg.n_list = {60};
  cfg.reps = 1500;
  cfg.seed = 42;
  cfg.output_dir = dir.string();
  cfg.threads = threads;
  return cfg;
}

TEST(Run, CsvBytesDoNotDependOnThreadsOrDirectory) {
  const auto d1 = fresh_dir("threads1");
  const auto d4 = fresh_dir("threads4");
  ASSERT_EQ(run(motifs_config(d1, 1)), 0);
  ASSERT_EQ(run(motifs_config(d4, 4)), 0);
  const auto csv1 = slurp(d1 / "motifs.csv");
  const auto csv4 = slurp(d4 / "motifs.csv");
  ASSERT_FALSE(csv1.empty());
  EXPECT_EQ(csv1, csv4);

  const auto rows = lines_of(csv1);
  ASSERT_EQ(rows.size(), 1 + 8u);  // header plus one row per motif event
  EXPECT_EQ(rows[0], kCsvHeader);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].rfind("motifs,", 0), 0u) << rows[i];
    EXPECT_EQ(std::count(rows[i].begin(), rows[i].end(), ','), 9) << rows[i];
  }
}

TEST(Run, ManifestEchoesConfigAndSubSeeds) {
  const auto dir = fresh_dir("manifest");
  const auto cfg = motifs_config(dir, 0);
  ASSERT_EQ(run(cfg), 0);
  const auto manifest = nlohmann::json::parse(slurp(dir / "motifs_manifest.json"));
  EXPECT_EQ(manifest.at("version").get<std::string>(), kVersion);
  EXPECT_EQ(manifest.at("seed").get<std::uint64_t>(), 42u);
  EXPECT_EQ(manifest.at("config").at("experiment").get<std::string>(), "motifs");
  EXPECT_EQ(manifest.at("config").at("reps").get<std::size_t>(), cfg.reps);
  EXPECT_TRUE(manifest.at("check_failures").empty());

  const auto expected_sub = derive_key(cfg.seed, 1000 + 0, 1, 1);
  EXPECT_EQ(manifest.at("sub_seeds").at("gamma1.5_n60").get<std::uint64_t>(), expected_sub);

  const auto files = manifest.at("files").get<std::vector<std::string>>();
  ASSERT_FALSE(files.empty());
  EXPECT_EQ(fs::path(files[0]).filename(), "motifs.csv");
  for (const auto& f : files) EXPECT_TRUE(fs::exists(f)) << f;
}

TEST(Run, ExitCodesSeparateConfigNumericAndCheckFailures) {
  ExperimentConfig bad = motifs_config(fresh_dir("bad"), 0);
  bad.reps = 0;
  EXPECT_EQ(run(bad), 1);
  bad = motifs_config(fresh_dir("bad2"), 0);
  bad.n_list = {2};  // motifs need three vertices
  EXPECT_EQ(run(bad), 1);
  bad = motifs_config(fresh_dir("bad3"), 0);
  bad.experiment = Experiment::Height;
  bad.x_grid = {0.9};
  EXPECT_EQ(run(bad), 1);

  // parent of output_dir is a regular file: directory creation must fail
  const auto blocker = fs::temp_directory_path() / "plrg_harness_blocker";
  std::ofstream(blocker).put('x');
  ExperimentConfig io = motifs_config(blocker / "sub", 0);
  EXPECT_EQ(run(io), 2);

  // gamma deep in the sparse regime: no replicate produces an edge, and the
  // non-empty gate trips deterministically under the pinned seed
  ExperimentConfig chk;
  chk.experiment = Experiment::Supercritical;
  chk.alpha = 2.0;
  chk.gamma = {20.0};
  chk.n_list = {3};
  chk.reps = 50;
  chk.seed = 1;
  chk.check = true;
  chk.output_dir = fresh_dir("check").string();
  EXPECT_EQ(run(chk), 3);
}

TEST(Run, RegimeTableNamesTheThreeRegimes) {
  const auto dir = fresh_dir("regimes");
  ExperimentConfig cfg;
  cfg.experiment = Experiment::Regimes;
  cfg.alpha = 2.0;
  cfg.gamma = {1.5, 2.0, 3.0};
  cfg.n_list = {100};
  cfg.reps = 1;
  cfg.check = true;
  cfg.output_dir = dir.string();
  ASSERT_EQ(run(cfg), 0);
  const auto rows = lines_of(slurp(dir / "regimes.csv"));
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[1].rfind("regimes,subcritical,", 0), 0u) << rows[1];
  EXPECT_EQ(rows[2].rfind("regimes,supercritical,", 0), 0u) << rows[2];
  EXPECT_EQ(rows[3].rfind("regimes,supercritical,", 0), 0u) << rows[3];
  for (const auto& r : rows) EXPECT_EQ(r.find("critical_indeterminate"), std::string::npos);
}

TEST(Run, EveryExperimentProducesCsvAndManifest) {
  struct Smoke {
    Experiment e;
    double alpha;
    std::vector<double> gamma;
    std::size_t n;
    std::size_t reps;
    bool check;
  };
  const std::vector<Smoke> cases = {
      {Experiment::EdgesVertices, 1.5, {1.5}, 80, 1500, true},
      {Experiment::Supercritical, 2.0, {2.5}, 200, 4000, false},
      {Experiment::Graphex, 1.5, {1.5}, 2, 4000, true},
      {Experiment::Height, 2.0, {0.5}, 400, 250, true},
      {Experiment::Graphon, 1.5, {1.5}, 500, 1, false},
      {Experiment::Bernoulli, 2.0, {2.5}, 300, 300, true},
  };
  for (const auto& c : cases) {
    ExperimentConfig cfg;
    cfg.experiment = c.e;
    cfg.alpha = c.alpha;
    cfg.gamma = c.gamma;
    cfg.n_list = {c.n};
    cfg.reps = c.reps;
    cfg.seed = 7;
    cfg.check = c.check;
    cfg.x_grid = {0.25, 0.5};
    const auto dir = fresh_dir(std::string("smoke_") + experiment_name(c.e));
    cfg.output_dir = dir.string();
    ASSERT_EQ(run(cfg), 0) << experiment_name(c.e);
    const std::string base = experiment_name(c.e);
    const auto rows = lines_of(slurp(dir / (base + ".csv")));
    ASSERT_GE(rows.size(), 2u) << base;
    EXPECT_EQ(rows[0], kCsvHeader);
    EXPECT_TRUE(fs::exists(dir / (base + "_manifest.json")));
  }
}

TEST(Run, GraphexRowsUseSentinelGammaAndN) {
  const auto dir = fresh_dir("graphex_cols");
  ExperimentConfig cfg;
  cfg.experiment = Experiment::Graphex;
  cfg.alpha = 1.5;
  cfg.reps = 2000;
  cfg.output_dir = dir.string();
  ASSERT_EQ(run(cfg), 0);
  const auto rows = lines_of(slurp(dir / "graphex.csv"));
  ASSERT_GE(rows.size(), 2u);
  // the limit model has no gamma or n: those columns print nan and 0
  EXPECT_NE(rows[1].find(",nan,0,"), std::string::npos) << rows[1];
}

TEST(JsonConfig, RoundTripsAndAcceptsScalars) {
  ExperimentConfig cfg;
  cfg.experiment = Experiment::Graphex;
  cfg.alpha = 2.5;
  cfg.gamma = {0.7, 1.9};
  cfg.n_list = {100, 200};
  cfg.reps = 123;
  cfg.seed = 99;
  cfg.x_grid = {0.1, 0.2};
  cfg.output_dir = "somewhere";
  cfg.check = true;
  cfg.threads = 3;
  cfg.graphex_t = 2.5;
  cfg.graphex_x0 = 9.0;

  ExperimentConfig back;
  apply_json_config(back, config_to_json(cfg));
  EXPECT_EQ(back.experiment, cfg.experiment);
  EXPECT_EQ(back.alpha, cfg.alpha);
  EXPECT_EQ(back.gamma, cfg.gamma);
  EXPECT_EQ(back.n_list, cfg.n_list);
  EXPECT_EQ(back.reps, cfg.reps);
  EXPECT_EQ(back.seed, cfg.seed);
  EXPECT_EQ(back.x_grid, cfg.x_grid);
  EXPECT_EQ(back.output_dir, cfg.output_dir);
  EXPECT_EQ(back.check, cfg.check);
  EXPECT_EQ(back.threads, cfg.threads);
  EXPECT_EQ(back.graphex_t, cfg.graphex_t);
  EXPECT_EQ(back.graphex_x0, cfg.graphex_x0);

  ExperimentConfig scalars;
  apply_json_config(scalars, nlohmann::json{{"gamma", 2.5}, {"n", 500}, {"x_grid", 0.3}});
  EXPECT_EQ(scalars.gamma, std::vector<double>{2.5});
  EXPECT_EQ(scalars.n_list, std::vector<std::size_t>{500});
  EXPECT_EQ(scalars.x_grid, std::vector<double>{0.3});

  ExperimentConfig dummy;
  EXPECT_THROW(apply_json_config(dummy, nlohmann::json{{"gama", 1.0}}), std::invalid_argument);
  EXPECT_THROW(apply_json_config(dummy, nlohmann::json::array()), std::invalid_argument);
}

TEST(Names, ParseExperimentAndPlotKind) {
  for (std::size_t i = 0; i < kExperimentNames.size(); ++i)
    EXPECT_EQ(parse_experiment(kExperimentNames[i]), static_cast<Experiment>(i));
  EXPECT_THROW(parse_experiment("edges"), std::invalid_argument);
  EXPECT_EQ(parse_plot_kind("graphon_heatmap"), PlotKind::GraphonHeatmap);
  EXPECT_EQ(parse_plot_kind("boundary_curve"), PlotKind::BoundaryCurve);
  EXPECT_EQ(parse_plot_kind("cov_matrix"), PlotKind::CovMatrix);
  EXPECT_THROW(parse_plot_kind("heatmap"), std::invalid_argument);
}

TEST(PlotData, KindMustMatchTheReportType) {
  GraphonGrid w;
  w.k = 1;
  w.side = 1.0;
  w.values = {0.5};
  BoundaryReport br;
  MomentSummary ms;
  std::ostringstream os;
  EXPECT_THROW(emit_plot_data(os, w, PlotKind::BoundaryCurve), std::invalid_argument);
  EXPECT_THROW(emit_plot_data(os, br, PlotKind::CovMatrix), std::invalid_argument);
  EXPECT_THROW(emit_plot_data(os, ms, PlotKind::GraphonHeatmap), std::invalid_argument);
  emit_plot_data(os, w, PlotKind::GraphonHeatmap);
  EXPECT_FALSE(os.str().empty());
  std::istringstream in(os.str());
  const auto w2 = load_grid(in);
  EXPECT_EQ(w2.k, w.k);
  EXPECT_EQ(w2.values, w.values);
}

TEST(ConfigProblems, CollectsEveryViolation) {
  ExperimentConfig cfg;
  cfg.experiment = Experiment::Supercritical;
  cfg.reps = 0;
  cfg.alpha = 0.0;
  cfg.gamma = {1.0};  // supercritical needs gamma > 2
  cfg.n_list = {};
  cfg.x_grid = {1.5};
  cfg.threads = -1;
  cfg.output_dir.clear();
  const auto problems = config_problems(cfg);
  EXPECT_GE(problems.size(), 6u);

  ExperimentConfig gx;
  gx.experiment = Experiment::Graphex;
  gx.graphex_t = 0.0;
  gx.graphex_x0 = 1.0;
  EXPECT_EQ(config_problems(gx).size(), 2u);

  ExperimentConfig bn;
  bn.experiment = Experiment::Bernoulli;
  bn.alpha = 1.0;
  bn.gamma = {2.5};
  EXPECT_EQ(config_problems(bn).size(), 1u);

  ExperimentConfig ok;
  ok.experiment = Experiment::EdgesVertices;
  ok.n_list = {2};
  EXPECT_TRUE(config_problems(ok).empty());
}

}  // namespace
