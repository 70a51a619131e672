// shapaudit command-line interface.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "shapaudit/harness/boxplot.hpp"
#include "shapaudit/harness/experiments.hpp"
#include "shapaudit/multiview/model_io.hpp"

namespace {

using namespace shapaudit;

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

void configure_logging() {
  const char* level = std::getenv("SHAPAUDIT_LOG");
  spdlog::set_level(level ? spdlog::level::from_str(level) : spdlog::level::info);
  spdlog::set_pattern("[%l] %v");
}

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(1) << '\n';
}

struct Common {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::size_t threads = 1;
};

ExperimentConfig load(const Common& c) {
  ExperimentConfig cfg = load_config(c.config);
  apply_overrides(cfg, c.seed, c.runs);
  return cfg;
}

LayerPlan plan_for(const ExperimentConfig& cfg, const MultiViewDataset& ds) {
  LayerPlan plan;
  plan.views = cfg.base_views;
  if (plan.views.empty()) plan.views.assign(ds.num_views(), ViewLayers{0, 64, 64, 16});
  if (plan.views.size() != ds.num_views()) throw ConfigError("model.views count differs from the data's views");
  for (std::size_t v = 0; v < ds.num_views(); ++v) plan.views[v].input_dim = ds.views[v].features();
  plan.fusion = cfg.fusions.front();
  plan.fusion_hidden = cfg.fusion_hidden;
  plan.num_classes = ds.num_classes();
  try {
    plan.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return plan;
}

int cmd_train(const Common& c) {
  const ExperimentConfig cfg = load(c);
  const PreparedData data = prepare_data(cfg);
  const StandardizedDataset std_data = zscore_standardize(data.raw);
  const LayerPlan plan = plan_for(cfg, std_data.dataset);
  TrainConfig tc = cfg.train;
  tc.seed = cfg.seed;
  const TrainedModel model = train(plan, std_data.dataset, tc);
  std::filesystem::create_directories(c.out);
  save_model(model, std::filesystem::path(c.out) / "model.json");
  write_json(dataset_manifest(cfg, data.raw, std_data.record), std::filesystem::path(c.out) / "dataset_manifest.json");
  spdlog::info("trained: plateau at {}, final phase {} iterations", model.plateau_iteration, model.final_iterations);
  return 0;
}

int cmd_attribute(const Common& c, const std::string& model_path) {
  const ExperimentConfig cfg = load(c);
  const TrainedModel model = load_model(model_path);
  const PreparedData data = prepare_data(cfg);
  const MultiViewDataset ds = zscore_standardize(data.raw).dataset;
  const auto rows = ds.rows_in({Split::kTrain, Split::kValidation});
  const Batch batch = make_batch(ds, rows);
  const BackgroundSet background = make_background(batch, cfg.background, derive_seed(cfg.seed, "background", 0));
  AttributionResult result = deepshap_attribute(model, batch.views, background);
  result.label(ds, rows);
  std::filesystem::create_directories(c.out);
  write_attribution_csv(result, ds.class_names, std::filesystem::path(c.out) / "attributions.csv");
  write_json(attribution_summary_json(result), std::filesystem::path(c.out) / "attribution_summary.json");
  return 0;
}

int cmd_synth(const Common& c) {
  SynthConfig sc;
  if (!c.config.empty()) {
    std::ifstream in(c.config);
    if (!in) throw ConfigError("cannot open config " + c.config);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(e.what());
    }
    try {
      sc.view_dims = j.value("view_dims", sc.view_dims);
      sc.informative = j.value("informative", sc.informative);
      sc.samples = j.value("samples", sc.samples);
      sc.classes = j.value("classes", sc.classes);
      sc.effect_size = j.value("effect_size", sc.effect_size);
      sc.seed = j.value("seed", sc.seed);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(e.what());
    }
  }
  if (c.seed) sc.seed = *c.seed;
  try {
    sc.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const SyntheticData synth = synth_multiview(sc);
  const std::filesystem::path out(c.out);
  std::filesystem::create_directories(out);
  nlohmann::json files = nlohmann::json::array();
  for (const auto& v : synth.dataset.views) {
    const auto path = out / (v.view_id + ".csv");
    write_view_csv(v, path);
    files.push_back({{"view", v.view_id}, {"path", path.filename().string()}, {"sha256", sha256_file(path)}});
  }
  LabelTable labels;
  labels.sample_ids = synth.dataset.sample_ids();
  for (int y : synth.dataset.labels) labels.labels.push_back(synth.dataset.class_names[static_cast<std::size_t>(y)]);
  write_labels_csv(labels, out / "labels.csv");
  files.push_back({{"labels", true}, {"path", "labels.csv"}, {"sha256", sha256_file(out / "labels.csv")}});
  nlohmann::json planted = nlohmann::json::array();
  for (const auto& ref : synth.informative) {
    planted.push_back(synth.dataset.views[ref.view].view_id + ":" +
                      synth.dataset.views[ref.view].feature_names[ref.feature]);
  }
  write_json({{"files", files},
              {"seed", sc.seed},
              {"samples", sc.samples},
              {"classes", sc.classes},
              {"effect_size", sc.effect_size},
              {"planted", planted}},
             out / "manifest.json");
  return 0;
}

int cmd_experiment(const Common& c, const std::string& kind) {
  ExperimentConfig cfg = load(c);
  const ExperimentKind want = parse_experiment(kind);
  if (cfg.canonical.value("experiment", kind) != kind) {
    throw ConfigError("config declares experiment '" + cfg.canonical.value("experiment", std::string()) + "', not '" +
                      kind + "'");
  }
  cfg.kind = want;
  const ExperimentReport report = run_and_write(cfg, c.out, {c.threads});
  if (!report.failures.empty()) {
    spdlog::error("{} run(s) failed; partial report written to {}", report.failures.size(), c.out);
    return kExitRuntime;
  }
  return 0;
}

int cmd_plot(const std::string& report_path, const BoxplotOptions& options, const std::string& out) {
  const ExperimentReport report = load_report(report_path);
  emit_boxplot_svg(report, options, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Multi-view classifier training, DeepSHAP attribution and attribution-consistency experiments"};
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", common.config, "JSON config file");
    if (config_required) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--out", common.out, "Output directory");
    sub->add_option("--seed", common.seed, "Master seed override");
  };

  auto* train_cmd = app.add_subcommand("train", "Train a model and save it as JSON");
  add_common(train_cmd, true);

  std::string model_path;
  auto* attribute_cmd = app.add_subcommand("attribute", "DeepSHAP attributions for a saved model");
  add_common(attribute_cmd, true);
  attribute_cmd->add_option("--model", model_path, "model.json from `train`")->required()->check(CLI::ExistingFile);

  auto* synth_cmd = app.add_subcommand("synth-gen", "Write a synthetic multi-view dataset as CSV");
  add_common(synth_cmd, false);

  std::string kind;
  auto* exp_cmd = app.add_subcommand("experiment", "Run an experiment: compression, stability or subset");
  exp_cmd->add_option("kind", kind, "Experiment kind")
      ->required()
      ->check(CLI::IsMember({"compression", "stability", "subset"}));
  add_common(exp_cmd, true);
  exp_cmd->add_option("--runs", common.runs, "Runs per condition");
  exp_cmd->add_option("--threads", common.threads, "Parallel runs")->check(CLI::PositiveNumber);

  std::string report_path, group = "condition", plot_out = "figure.svg";
  BoxplotOptions plot;
  std::string condition;
  auto* plot_cmd = app.add_subcommand("plot", "Boxplot SVG from a report");
  plot_cmd->add_option("--report", report_path, "report.json")->required()->check(CLI::ExistingFile);
  plot_cmd->add_option("--metric", plot.metric, "Metric to plot")->required();
  plot_cmd->add_option("--group", group, "Group by condition or feature")
      ->check(CLI::IsMember({"condition", "feature"}));
  plot_cmd->add_option("--condition", condition, "Only rows of this condition");
  plot_cmd->add_option("--title", plot.title);
  plot_cmd->add_option("--x-label", plot.x_label);
  plot_cmd->add_option("--y-label", plot.y_label);
  plot_cmd->add_option("--out", plot_out, "Output SVG path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*train_cmd) return cmd_train(common);
    if (*attribute_cmd) return cmd_attribute(common, model_path);
    if (*synth_cmd) return cmd_synth(common);
    if (*exp_cmd) return cmd_experiment(common, kind);
    if (*plot_cmd) {
      plot.group = parse_group_key(group);
      if (!condition.empty()) plot.condition = condition;
      return cmd_plot(report_path, plot, plot_out);
    }
  } catch (const ConfigError& e) {
    spdlog::error("config: {}", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitRuntime;
  }
  return kExitRuntime;
}
