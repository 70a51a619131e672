#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "shapaudit/harness/boxplot.hpp"
#include "shapaudit/harness/config.hpp"
#include "shapaudit/harness/experiments.hpp"
#include "shapaudit/harness/report.hpp"
#include "test_util.hpp"

namespace shapaudit {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("shapaudit_harness_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json tiny(const std::string& experiment) {
  return {{"experiment", experiment},
          {"seed", 11},
          {"runs", 2},
          {"data",
           {{"synthetic",
             {{"view_dims", {6, 5}}, {"informative", {2, 2}}, {"samples", 40}, {"effect_size", 2.0}, {"seed", 3}}}}},
          {"model", {{"views", {{{"hidden", {6, 6}}, {"embedding", 3}}, {{"hidden", {6, 6}}, {"embedding", 3}}}},
                     {"fusion_hidden", 6}}},
          {"train", {{"max_iterations", 30}, {"patience", 5}, {"dropout", 0.0}, {"lr", 0.01}}},
          {"forest", {{"trees", 15}}},
          {"subset", {{"percents", {50, 20}}}},
          {"stability", {{"top_k", 3}}}};
}

std::size_t count_metric(const ExperimentReport& r, const std::string& metric) {
  std::size_t n = 0;
  for (const auto& row : r.rows) n += row.metric == metric;
  return n;
}

// ------------------------------------------------------------------ config

TEST(Config, ParsesAndCanonicalizes) {
  const ExperimentConfig cfg = parse_config(tiny("stability"));
  EXPECT_EQ(cfg.kind, ExperimentKind::kStability);
  EXPECT_EQ(cfg.runs, 2u);
  ASSERT_TRUE(cfg.data.synthetic);
  EXPECT_EQ(cfg.data.synthetic->view_dims, (std::vector<std::size_t>{6, 5}));
  EXPECT_EQ(cfg.base_views.size(), 2u);
  EXPECT_EQ(cfg.canonical.at("experiment"), "stability");
  EXPECT_EQ(parse_config(cfg.canonical).canonical, cfg.canonical);
}

TEST(Config, RejectsInvalidValues) {
  auto expect_error = [](json j) { EXPECT_THROW(parse_config(j), ConfigError) << j.dump(); };
  json j = tiny("compression");
  j["runs"] = 0;
  expect_error(j);
  j = tiny("compression");
  j["seeds"] = {1, 2, 3};
  expect_error(j);
  j = tiny("compression");
  j["noise"] = {{"levels", json::array()}};
  expect_error(j);
  j["noise"] = {{"levels", {0, 10, 5}}};
  expect_error(j);
  j["noise"] = {{"levels", {5, 10}}};
  expect_error(j);
  j = tiny("subset");
  j["subset"] = {{"percents", {0}}};
  expect_error(j);
  j["subset"] = {{"percents", {120}}};
  expect_error(j);
  j = tiny("compression");
  j["fusion"] = {"mean"};
  j["sizing"] = {"dynamic"};
  expect_error(j);
  j = tiny("compression");
  j["width_floor"] = 0;
  expect_error(j);
  j = tiny("compression");
  j["model"]["views"][0]["embedding"] = 0;
  expect_error(j);
  j = tiny("compression");
  j["bogus"] = 1;
  expect_error(j);
  j = tiny("compression");
  j["train"]["bogus"] = 1;
  expect_error(j);
  j = tiny("compression");
  j["experiment"] = "ablation";
  expect_error(j);
  j = tiny("compression");
  j.erase("data");
  expect_error(j);
  j = tiny("compression");
  j["data"] = json::object();
  expect_error(j);
}

TEST(Config, LoadResolvesRelativePathsAndOverrides) {
  TempDir dir;
  const json j = {{"experiment", "stability"},
                  {"data", {{"views", {{{"id", "a"}, {"path", "a.csv"}}}}, {"labels", "labels.csv"}}}};
  std::ofstream(dir.path / "cfg.json") << j.dump();
  ExperimentConfig cfg = load_config(dir.path / "cfg.json");
  EXPECT_EQ(cfg.data.views[0].path, dir.path / "a.csv");
  EXPECT_EQ(cfg.data.labels, dir.path / "labels.csv");
  apply_overrides(cfg, 99, 4);
  EXPECT_EQ(cfg.seed, 99u);
  EXPECT_EQ(cfg.canonical.at("runs"), 4);
  EXPECT_THROW(apply_overrides(cfg, std::nullopt, 0), ConfigError);
  EXPECT_THROW(load_config(dir.path / "missing.json"), ConfigError);
  std::ofstream(dir.path / "broken.json") << "{not json";
  EXPECT_THROW(load_config(dir.path / "broken.json"), ConfigError);
}

// ------------------------------------------------------------------ report

ExperimentReport sample_report() {
  ExperimentReport r;
  r.experiment = "compression";
  r.config_hash = "abc";
  r.notes["k"] = "v";
  for (int i = 0; i < 5; ++i) r.add("A", i, 100 + i, "", "m", i + 1.0);
  r.add("B", 0, 7, "f,1", "m", 0.1 + 0.2);
  r.add("A", -1, 0, "", "m", 3.0);
  r.failures.push_back({"B", 1, 8, "boom"});
  return r;
}

TEST(Report, JsonRoundTripIsExact) {
  const ExperimentReport r = sample_report();
  const ExperimentReport back = report_from_json(report_to_json(r));
  EXPECT_EQ(back.rows, r.rows);
  EXPECT_EQ(back.experiment, r.experiment);
  EXPECT_EQ(back.config_hash, r.config_hash);
  EXPECT_EQ(back.notes, r.notes);
  ASSERT_EQ(back.failures.size(), 1u);
  EXPECT_EQ(back.failures[0].message, "boom");

  TempDir dir;
  write_report_json(r, dir.path / "r.json");
  EXPECT_EQ(load_report(dir.path / "r.json").rows, r.rows);
}

TEST(Report, CsvHasHeaderAndOneLinePerRow) {
  TempDir dir;
  const ExperimentReport r = sample_report();
  write_report_csv(r, dir.path / "r.csv");
  std::ifstream in(dir.path / "r.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "condition,run,seed,feature,metric,value");
  std::size_t n = 0;
  while (std::getline(in, line)) ++n;
  EXPECT_EQ(n, r.rows.size());
  EXPECT_EQ(r.values("A", "m").size(), 6u);
}

// ----------------------------------------------------------------- boxplot

TEST(Boxplot, MedianLineAtLayoutPosition) {
  const ExperimentReport r = sample_report();
  BoxplotOptions o;
  o.metric = "m";
  o.condition = "A";
  const Boxplot b = build_boxplot(r, o);
  ASSERT_EQ(b.boxes.size(), 1u);
  EXPECT_EQ(b.boxes[0].count, 5u);
  EXPECT_EQ(b.boxes[0].median, 3.0);
  EXPECT_EQ(b.boxes[0].min, 1.0);
  EXPECT_EQ(b.boxes[0].max, 5.0);
  char y[32];
  std::snprintf(y, sizeof y, "%.2f", b.layout.y(3.0));
  EXPECT_NE(b.svg.find("class=\"median\""), std::string::npos);
  EXPECT_NE(b.svg.find("y1=\"" + std::string(y) + "\""), std::string::npos);
}

TEST(Boxplot, SingleValueIsDegenerateBox) {
  BoxplotOptions o;
  o.metric = "m";
  o.condition = "B";
  const Boxplot b = build_boxplot(sample_report(), o);
  ASSERT_EQ(b.boxes.size(), 1u);
  EXPECT_EQ(b.boxes[0].min, b.boxes[0].max);
  EXPECT_EQ(b.boxes[0].q25, b.boxes[0].q75);
}

TEST(Boxplot, ErrorsWriteNothing) {
  TempDir dir;
  BoxplotOptions o;
  o.metric = "nope";
  EXPECT_THROW(emit_boxplot_svg(sample_report(), o, dir.path / "x.svg"), std::invalid_argument);
  EXPECT_FALSE(fs::exists(dir.path / "x.svg"));
  o.metric = "m";
  EXPECT_THROW(emit_boxplot_svg(ExperimentReport{}, o, dir.path / "x.svg"), std::invalid_argument);
  EXPECT_FALSE(fs::exists(dir.path / "x.svg"));
  emit_boxplot_svg(sample_report(), o, dir.path / "x.svg");
  EXPECT_TRUE(fs::exists(dir.path / "x.svg"));
  EXPECT_THROW(parse_group_key("run"), std::invalid_argument);
}

// ------------------------------------------------------------- experiments

TEST(Compression, RowCountsPerConditionAndRun) {
  json j = tiny("compression");
  j["noise"] = {{"levels", {0, 4, 8}}};
  const ExperimentReport r = run_compression(parse_config(j));
  EXPECT_TRUE(r.failures.empty());
  EXPECT_EQ(count_metric(r, "tau_w"), 6u);
  EXPECT_EQ(count_metric(r, "tau_run_to_run"), 6u);
  EXPECT_EQ(count_metric(r, "mean_abs_phi_original"), 6u);
  EXPECT_EQ(count_metric(r, "mean_abs_phi_noise"), 4u);
  for (double t : r.values("fusion=concat;sizing=static;noise=0", "tau_w")) EXPECT_NEAR(t, 1.0, 1e-12);
  for (const auto& row : r.rows) {
    if (row.metric == "tau_w") {
      EXPECT_GE(row.value, -1.0);
      EXPECT_LE(row.value, 1.0);
    }
  }
  EXPECT_EQ(r.config_hash.size(), 64u);
}

TEST(Compression, SingleZeroLevelSingleRun) {
  json j = tiny("compression");
  j["runs"] = 1;
  const ExperimentReport r = run_compression(parse_config(j));
  ASSERT_EQ(count_metric(r, "tau_w"), 1u);
  EXPECT_NEAR(r.values("fusion=concat;sizing=static;noise=0", "tau_w")[0], 1.0, 1e-12);
  EXPECT_EQ(count_metric(r, "tau_run_to_run"), 0u);
}

TEST(Compression, SeedsIndependentOfAddedConditions) {
  json a = tiny("compression");
  json b = a;
  b["noise"] = {{"levels", {0, 4}}};
  b["sizing"] = {"static", "dynamic"};
  b["width_floor"] = 2;
  const ExperimentConfig ca = parse_config(a), cb = parse_config(b);
  const std::string family = "compression;fusion=concat;sizing=static";
  EXPECT_EQ(run_seed(ca, family, 0), run_seed(cb, family, 0));
  EXPECT_NE(run_seed(ca, family, 0), run_seed(ca, family, 1));
  const ExperimentReport ra = run_compression(ca), rb = run_compression(cb);
  const std::string key = "fusion=concat;sizing=static;noise=0";
  EXPECT_EQ(ra.values(key, "mean_abs_phi_original"), rb.values(key, "mean_abs_phi_original"));
}

TEST(Stability, SingleRunHasZeroSpread) {
  json j = tiny("stability");
  j["runs"] = 1;
  const ExperimentReport r = run_stability(parse_config(j));
  std::size_t checked = 0;
  for (const auto& row : r.rows) {
    if (row.metric == "rank_spread") {
      EXPECT_EQ(row.value, 0.0);
      ++checked;
    }
  }
  EXPECT_EQ(checked, 11u + 6u + 5u);
  EXPECT_EQ(count_metric(r, "top_k"), 3u * 3u);
}

TEST(Stability, RepeatedSeedGivesIdenticalRanks) {
  json j = tiny("stability");
  j["seeds"] = {5, 5};
  const ExperimentReport r = run_stability(parse_config(j));
  for (const auto& row : r.rows) {
    if (row.metric == "rank_spread") {
      EXPECT_EQ(row.value, 0.0) << row.condition << " " << row.feature;
    }
  }
  const auto ranks = r.values("fusion=concat;sizing=static;noise=0;universe=pooled", "rank");
  ASSERT_EQ(ranks.size(), 22u);
  std::set<double> seen(ranks.begin(), ranks.begin() + 11);
  EXPECT_EQ(seen.size(), 11u);
  EXPECT_EQ(*seen.begin(), 1.0);
  EXPECT_EQ(*seen.rbegin(), 11.0);
}

TEST(Subset, MetricsPerPercentAndAll) {
  const ExperimentReport r = run_subset(parse_config(tiny("subset")));
  EXPECT_TRUE(r.failures.empty());
  const std::string base = "fusion=concat;sizing=static;noise=0;p=";
  EXPECT_EQ(r.values(base + "all", "n_features"), (std::vector<double>{11, 11}));
  EXPECT_EQ(r.values(base + "50", "n_features"), (std::vector<double>{6, 6}));
  EXPECT_EQ(r.values(base + "20", "n_features"), (std::vector<double>{3, 3}));
  for (const char* m : {"rf_auc", "v_measure_holdout", "v_measure_train"}) {
    for (double v : r.values(base + "all", m)) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(RunAndWrite, ByteIdenticalOutputs) {
  TempDir a, b;
  const ExperimentConfig cfg = parse_config(tiny("compression"));
  run_and_write(cfg, a.path);
  run_and_write(cfg, b.path, {2});
  for (const char* f : {"report.csv", "report.json", "tau_w.svg"}) {
    ASSERT_TRUE(fs::exists(a.path / f)) << f;
    EXPECT_EQ(slurp(a.path / f), slurp(b.path / f)) << f;
  }
  EXPECT_TRUE(fs::exists(a.path / "run_info.json"));
}

TEST(RunAndWrite, StabilityFigures) {
  TempDir dir;
  run_and_write(parse_config(tiny("stability")), dir.path);
  EXPECT_TRUE(fs::exists(dir.path / "rank_top.svg"));
  EXPECT_TRUE(fs::exists(dir.path / "rank_bottom.svg"));
}

// --------------------------------------------------------------------- cli

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SHAPAUDIT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, ExitCodes) {
  TempDir dir;
  const fs::path good = dir.path / "good.json", bad = dir.path / "bad.json", fail = dir.path / "fail.json";
  std::ofstream(good) << tiny("compression").dump();
  json b = tiny("compression");
  b["runs"] = 0;
  std::ofstream(bad) << b.dump();
  // Fails at run time: the noise view index exceeds the view count.
  json f = tiny("compression");
  f["noise"] = {{"levels", {0, 3}}, {"view", 5}};
  std::ofstream(fail) << f.dump();

  const std::string out = " --out " + (dir.path / "out").string();
  EXPECT_EQ(run_cli("experiment compression --config " + good.string() + out), 0);
  EXPECT_TRUE(fs::exists(dir.path / "out" / "report.json"));
  EXPECT_EQ(run_cli("experiment compression --config " + bad.string() + out), 1);
  EXPECT_EQ(run_cli("experiment stability --config " + good.string() + out), 1);
  EXPECT_EQ(run_cli("experiment compression --no-such-flag"), 1);
  EXPECT_EQ(run_cli("experiment compression --config " + (dir.path / "missing.json").string()), 1);
  const int code = run_cli("experiment compression --config " + fail.string() + out);
  EXPECT_TRUE(code == 1 || code == 2) << code;
  EXPECT_EQ(run_cli("plot --report " + (dir.path / "out" / "report.json").string() + " --metric tau_w --out " +
                    (dir.path / "p.svg").string()),
            0);
  EXPECT_EQ(run_cli("plot --report " + (dir.path / "out" / "report.json").string() + " --metric nope --out " +
                    (dir.path / "q.svg").string()),
            2);
  EXPECT_FALSE(fs::exists(dir.path / "q.svg"));
}

}  // namespace
}  // namespace shapaudit
