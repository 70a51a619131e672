#include "shapaudit/harness/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <map>
#include <optional>
#include <thread>

#include <spdlog/spdlog.h>

#include "shapaudit/harness/boxplot.hpp"
#include "shapaudit/rankstats/rankstats.hpp"

namespace shapaudit {

namespace {

// ------------------------------------------------------------ data + plans

std::string pooled_name(const MultiViewDataset& ds, std::size_t view, std::size_t feature) {
  return ds.views[view].view_id + ":" + ds.views[view].feature_names[feature];
}

bool pooled_is_noise(const std::string& pooled) {
  const auto colon = pooled.find(':');
  return colon != std::string::npos && is_noise_feature(pooled.substr(colon + 1));
}

std::vector<ViewLayers> base_views(const ExperimentConfig& cfg, const MultiViewDataset& ds) {
  std::vector<ViewLayers> views = cfg.base_views;
  if (views.empty()) views.assign(ds.num_views(), ViewLayers{0, 64, 64, 16});
  if (views.size() != ds.num_views()) {
    throw ConfigError("model.views lists " + std::to_string(views.size()) + " views, data has " +
                      std::to_string(ds.num_views()));
  }
  for (std::size_t v = 0; v < views.size(); ++v) views[v].input_dim = ds.views[v].features();
  return views;
}

LayerPlan condition_plan(const ExperimentConfig& cfg, const MultiViewDataset& original, const MultiViewDataset& data,
                         Fusion fusion, SizingKind sizing) {
  SizingScheme scheme;
  scheme.kind = sizing;
  scheme.floor = cfg.width_floor;
  scheme.hidden_cap = cfg.hidden_cap;
  scheme.base.views = base_views(cfg, original);
  scheme.base.fusion = fusion;
  scheme.base.fusion_hidden = cfg.fusion_hidden;
  scheme.base.num_classes = original.num_classes();
  const auto dims = data.view_dims();
  return apply_sizing(scheme, dims);
}

std::string condition_key(Fusion f, SizingKind s, std::size_t noise) {
  return std::string("fusion=") + fusion_name(f) + ";sizing=" + sizing_name(s) + ";noise=" + std::to_string(noise);
}

std::string family_key(const ExperimentConfig& cfg, Fusion f, SizingKind s) {
  return std::string(experiment_name(cfg.kind)) + ";fusion=" + fusion_name(f) + ";sizing=" + sizing_name(s);
}

struct Condition {
  Fusion fusion;
  SizingKind sizing;
  std::size_t noise;
  std::size_t noise_index;
  std::string key;
  std::string family;
};

std::vector<Condition> conditions(const ExperimentConfig& cfg) {
  std::vector<Condition> out;
  for (Fusion f : cfg.fusions) {
    for (SizingKind s : cfg.sizing) {
      for (std::size_t k = 0; k < cfg.noise_levels.size(); ++k) {
        out.push_back({f, s, cfg.noise_levels[k], k, condition_key(f, s, cfg.noise_levels[k]), family_key(cfg, f, s)});
      }
    }
  }
  return out;
}

/// Standardized dataset per noise level.
std::vector<MultiViewDataset> noisy_datasets(const ExperimentConfig& cfg, const MultiViewDataset& raw) {
  if (cfg.noise_view >= raw.num_views()) throw ConfigError("noise.view is out of range for the data");
  std::vector<MultiViewDataset> out;
  for (std::size_t n : cfg.noise_levels) {
    const NoiseSpec spec{"", n, derive_seed(cfg.seed, "noise", n)};
    out.push_back(zscore_standardize(n == 0 ? raw : add_noise(raw, cfg.noise_view, spec)).dataset);
  }
  return out;
}

// ---------------------------------------------------------------- one run

struct RunOutput {
  FeatureScores pooled;
  std::vector<FeatureScores> per_view;
  std::optional<double> holdout_auc;
  std::size_t plateau = 0;
};

RunOutput train_and_attribute(const ExperimentConfig& cfg, const MultiViewDataset& data, const LayerPlan& plan,
                              std::uint64_t seed) {
  TrainConfig tc = cfg.train;
  tc.seed = seed;
  const TrainedModel model = train(plan, data, tc);

  const auto rows = data.rows_in({Split::kTrain, Split::kValidation});
  const Batch batch = make_batch(data, rows);
  const BackgroundSet background = make_background(batch, cfg.background, derive_seed(seed, "background", 0));
  AttributionResult result = deepshap_attribute(model, batch.views, background);
  result.label(data, rows);

  RunOutput out;
  out.plateau = model.plateau_iteration;
  out.pooled = aggregate_scores(result, Universe::pooled());
  for (std::size_t v = 0; v < data.num_views(); ++v) out.per_view.push_back(aggregate_scores(result, Universe::single(v)));

  const auto test_rows = data.rows_in({Split::kTest});
  if (!test_rows.empty()) {
    const Batch test = make_batch(data, test_rows);
    try {
      out.holdout_auc = auc_score(test.labels, predict_proba(model, test.views, test.mask));
    } catch (const std::invalid_argument& e) {
      spdlog::warn("holdout AUC unavailable: {}", e.what());
    }
  }
  return out;
}

template <typename T>
struct Outcome {
  std::optional<T> value;
  std::string error;
};

/// Runs jobs on `threads` workers; results land in job order.
template <typename T>
std::vector<Outcome<T>> run_jobs(std::vector<std::function<T()>> jobs, std::size_t threads) {
  std::vector<Outcome<T>> results(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        results[i].value = jobs[i]();
      } catch (const std::exception& e) {
        results[i].error = e.what();
      }
    }
  };
  const std::size_t n = std::max<std::size_t>(1, std::min(threads, jobs.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return results;
}

void record_failure(ExperimentReport& report, const std::string& condition, std::size_t run, std::uint64_t seed,
                    const std::string& message) {
  spdlog::error("{} run {} failed: {}", condition, run, message);
  report.add(condition, static_cast<long>(run), seed, "", "run_failed", 1.0);
  report.failures.push_back({condition, static_cast<long>(run), seed, message});
}

ExperimentReport new_report(const ExperimentConfig& cfg) {
  ExperimentReport report;
  report.experiment = experiment_name(cfg.kind);
  report.config_hash = sha256_string(cfg.canonical.dump());
  report.notes = {{"percentile_rule", "nearest-rank"},
                  {"noise_prefix", kNoisePrefix},
                  {"score", "mean |phi| over samples and classes"},
                  {"attribution_rows", "train+validation"},
                  {"run_minus_one", "aggregate over runs"}};
  return report;
}

std::vector<double> original_scores(const FeatureScores& s) {
  std::vector<double> out;
  for (std::size_t i = 0; i < s.names.size(); ++i) {
    if (!pooled_is_noise(s.names[i])) out.push_back(s.values[i]);
  }
  return out;
}

double mean_score(const FeatureScores& s, bool noise) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.names.size(); ++i) {
    if (pooled_is_noise(s.names[i]) == noise) {
      sum += s.values[i];
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

std::vector<std::uint64_t> seeds_for(const ExperimentConfig& cfg, const std::string& family) {
  if (!cfg.seeds.empty()) return cfg.seeds;
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < cfg.runs; ++i) seeds.push_back(run_seed(cfg, family, i));
  return seeds;
}

}  // namespace

std::uint64_t run_seed(const ExperimentConfig& cfg, const std::string& key, std::size_t index) {
  return derive_seed(cfg.seed, key, index);
}

PreparedData prepare_data(const ExperimentConfig& cfg) {
  PreparedData out;
  if (cfg.data.synthetic) {
    SyntheticData synth = synth_multiview(*cfg.data.synthetic);
    out.raw = std::move(synth.dataset);
    for (const auto& ref : synth.informative) out.planted.push_back(pooled_name(out.raw, ref.view, ref.feature));
    if (cfg.data.split_seed) {
      Rng rng(*cfg.data.split_seed, streams::kSplit);
      out.raw.splits = stratified_split(out.raw.labels, cfg.data.fractions, rng);
    }
    return out;
  }
  const CsvOptions csv{cfg.data.impute_median};
  std::vector<ViewMatrix> views;
  for (const auto& v : cfg.data.views) views.push_back(load_view_csv(v.path, v.id, csv));
  const LabelTable labels = load_labels_csv(cfg.data.labels);
  out.raw = assemble_dataset(std::move(views), labels, {cfg.data.allow_missing_views});
  Rng rng(cfg.data.split_seed.value_or(derive_seed(cfg.seed, "split", 0)), streams::kSplit);
  out.raw.splits = stratified_split(out.raw.labels, cfg.data.fractions, rng);
  out.raw.validate();
  return out;
}

nlohmann::json dataset_manifest(const ExperimentConfig& cfg, const MultiViewDataset& raw,
                                const StandardizationRecord& record) {
  nlohmann::json files = nlohmann::json::array();
  for (const auto& v : cfg.data.views) {
    files.push_back({{"view", v.id}, {"path", v.path.string()}, {"sha256", sha256_file(v.path)}});
  }
  if (!cfg.data.synthetic) {
    files.push_back({{"labels", true}, {"path", cfg.data.labels.string()}, {"sha256", sha256_file(cfg.data.labels)}});
  }
  nlohmann::json splits = nlohmann::json::object();
  for (Split s : {Split::kTrain, Split::kValidation, Split::kTest}) splits[split_name(s)] = raw.rows_in({s}).size();
  nlohmann::json transforms = nlohmann::json::array();
  for (std::size_t v = 0; v < record.views.size(); ++v) {
    transforms.push_back({{"view", raw.views[v].view_id},
                          {"features", raw.views[v].feature_names},
                          {"mean", record.views[v].mean},
                          {"sd", record.views[v].sd}});
  }
  nlohmann::json split_seed;
  if (cfg.data.split_seed) {
    split_seed = *cfg.data.split_seed;
  } else if (cfg.data.synthetic) {
    split_seed = {{"synthetic_seed", cfg.data.synthetic->seed}};
  } else {
    split_seed = derive_seed(cfg.seed, "split", 0);
  }
  return {{"files", files},
          {"synthetic", cfg.data.synthetic ? cfg.canonical.at("data").at("synthetic") : nlohmann::json(nullptr)},
          {"samples", raw.samples()},
          {"classes", raw.class_names},
          {"split_counts", splits},
          {"split_seed", split_seed},
          {"fractions", {cfg.data.fractions.train, cfg.data.fractions.validation, cfg.data.fractions.test}},
          {"standardization", transforms}};
}

ExperimentReport run_compression(const ExperimentConfig& cfg, const RunOptions& options) {
  const PreparedData data = prepare_data(cfg);
  if (data.raw.num_views() != 2) throw ConfigError("compression needs a two-view dataset");
  const auto datasets = noisy_datasets(cfg, data.raw);
  const auto conds = conditions(cfg);

  std::vector<std::function<RunOutput()>> jobs;
  std::vector<std::vector<std::uint64_t>> seeds;
  for (const auto& c : conds) {
    seeds.push_back(seeds_for(cfg, c.family));
    const LayerPlan plan = condition_plan(cfg, datasets.front(), datasets[c.noise_index], c.fusion, c.sizing);
    for (std::size_t i = 0; i < cfg.runs; ++i) {
      const MultiViewDataset* ds = &datasets[c.noise_index];
      const std::uint64_t seed = seeds.back()[i];
      jobs.push_back([&cfg, ds, plan, seed] { return train_and_attribute(cfg, *ds, plan, seed); });
    }
  }
  spdlog::info("compression: {} conditions x {} runs", conds.size(), cfg.runs);
  const auto results = run_jobs(std::move(jobs), options.threads);

  // Zero-noise reference of each condition: same fusion and sizing, level 0.
  auto result_at = [&](std::size_t cond, std::size_t run) -> const Outcome<RunOutput>& {
    return results[cond * cfg.runs + run];
  };
  auto reference_of = [&](std::size_t cond) {
    return cond - conds[cond].noise_index;
  };

  ExperimentReport report = new_report(cfg);
  report.notes["tau"] = "original features' pooled scores vs matched-seed zero-noise run";
  for (std::size_t c = 0; c < conds.size(); ++c) {
    for (std::size_t i = 0; i < cfg.runs; ++i) {
      const auto& out = result_at(c, i);
      const std::uint64_t seed = seeds[c][i];
      const auto run = static_cast<long>(i);
      if (!out.value) {
        record_failure(report, conds[c].key, i, seed, out.error);
        continue;
      }
      const auto& ref = result_at(reference_of(c), i);
      if (ref.value) {
        const auto tau = weighted_kendall_tau(original_scores(ref.value->pooled), original_scores(out.value->pooled));
        report.add(conds[c].key, run, seed, "", "tau_w", tau.tau);
      } else {
        record_failure(report, conds[c].key, i, seed, "zero-noise reference run failed");
      }
      if (cfg.runs >= 2) {
        const auto& other = result_at(c, (i + 1) % cfg.runs);
        if (other.value) {
          const auto tau =
              weighted_kendall_tau(original_scores(out.value->pooled), original_scores(other.value->pooled));
          report.add(conds[c].key, run, seed, "", "tau_run_to_run", tau.tau);
        }
      }
      report.add(conds[c].key, run, seed, "", "mean_abs_phi_original", mean_score(out.value->pooled, false));
      if (conds[c].noise > 0) {
        report.add(conds[c].key, run, seed, "", "mean_abs_phi_noise", mean_score(out.value->pooled, true));
      }
      report.add(conds[c].key, run, seed, "", "plateau_iteration", static_cast<double>(out.value->plateau));
      if (out.value->holdout_auc) report.add(conds[c].key, run, seed, "", "model_holdout_auc", *out.value->holdout_auc);
    }
  }
  return report;
}

ExperimentReport run_stability(const ExperimentConfig& cfg, const RunOptions& options) {
  const PreparedData data = prepare_data(cfg);
  const auto datasets = noisy_datasets(cfg, data.raw);
  const auto conds = conditions(cfg);
  const std::size_t runs = cfg.seeds.empty() ? cfg.runs : cfg.seeds.size();

  std::vector<std::function<RunOutput()>> jobs;
  std::vector<std::vector<std::uint64_t>> seeds;
  for (const auto& c : conds) {
    seeds.push_back(seeds_for(cfg, c.family));
    const LayerPlan plan = condition_plan(cfg, datasets.front(), datasets[c.noise_index], c.fusion, c.sizing);
    for (std::size_t i = 0; i < runs; ++i) {
      const MultiViewDataset* ds = &datasets[c.noise_index];
      const std::uint64_t seed = seeds.back()[i];
      jobs.push_back([&cfg, ds, plan, seed] { return train_and_attribute(cfg, *ds, plan, seed); });
    }
  }
  spdlog::info("stability: {} conditions x {} runs", conds.size(), runs);
  const auto results = run_jobs(std::move(jobs), options.threads);

  ExperimentReport report = new_report(cfg);
  report.notes["top_k"] = cfg.top_k;
  report.notes["planted"] = data.planted;
  for (std::size_t c = 0; c < conds.size(); ++c) {
    const MultiViewDataset& ds = datasets[conds[c].noise_index];
    std::vector<std::string> universes{"pooled"};
    for (const auto& v : ds.views) universes.push_back(v.view_id);

    for (std::size_t u = 0; u < universes.size(); ++u) {
      const std::string key = conds[c].key + ";universe=" + universes[u];
      std::vector<RankVector> ranks;
      for (std::size_t i = 0; i < runs; ++i) {
        const auto& out = results[c * runs + i];
        if (!out.value) {
          if (u == 0) record_failure(report, conds[c].key, i, seeds[c][i], out.error);
          continue;
        }
        ranks.push_back(rank_features(u == 0 ? out.value->pooled : out.value->per_view[u - 1]));
        const RankVector& rv = ranks.back();
        for (std::size_t f = 0; f < rv.size(); ++f) {
          report.add(key, static_cast<long>(i), seeds[c][i], rv.names[f], "rank", static_cast<double>(rv.ranks[f]));
        }
      }
      if (ranks.empty()) continue;
      const RankDistribution dist = rank_distribution(ranks);
      for (std::size_t f = 0; f < dist.names.size(); ++f) {
        const RankSummary& s = dist.features[f];
        const std::string& name = dist.names[f];
        report.add(key, -1, 0, name, "rank_min", static_cast<double>(s.min));
        report.add(key, -1, 0, name, "rank_q25", static_cast<double>(s.q25));
        report.add(key, -1, 0, name, "rank_median", static_cast<double>(s.median));
        report.add(key, -1, 0, name, "rank_q75", static_cast<double>(s.q75));
        report.add(key, -1, 0, name, "rank_max", static_cast<double>(s.max));
        report.add(key, -1, 0, name, "rank_mean", s.mean);
        report.add(key, -1, 0, name, "rank_spread", static_cast<double>(s.max - s.min));
      }
      const auto top = dist.top_k(cfg.top_k);
      for (std::size_t k = 0; k < top.size(); ++k) {
        report.add(key, -1, 0, dist.names[top[k]], "top_k", static_cast<double>(k + 1));
      }
      const auto bottom = dist.bottom_k(cfg.top_k);
      for (std::size_t k = 0; k < bottom.size(); ++k) {
        report.add(key, -1, 0, dist.names[bottom[k]], "bottom_k", static_cast<double>(k + 1));
      }
    }
  }
  return report;
}

ExperimentReport run_subset(const ExperimentConfig& cfg, const RunOptions& options) {
  const PreparedData data = prepare_data(cfg);
  const auto datasets = noisy_datasets(cfg, data.raw);
  const auto conds = conditions(cfg);

  struct SubsetOutput {
    RunOutput run;
    std::vector<std::pair<std::string, std::vector<std::pair<std::string, double>>>> metrics;
  };

  std::vector<std::function<SubsetOutput()>> jobs;
  std::vector<std::vector<std::uint64_t>> seeds;
  for (const auto& c : conds) {
    seeds.push_back(seeds_for(cfg, c.family));
    const LayerPlan plan = condition_plan(cfg, datasets.front(), datasets[c.noise_index], c.fusion, c.sizing);
    for (std::size_t i = 0; i < cfg.runs; ++i) {
      const MultiViewDataset* ds = &datasets[c.noise_index];
      const std::uint64_t seed = seeds.back()[i];
      jobs.push_back([&cfg, ds, plan, seed] {
        SubsetOutput out;
        out.run = train_and_attribute(cfg, *ds, plan, seed);
        const RankVector ranks = rank_features(out.run.pooled);

        const auto fit_rows = ds->rows_in({Split::kTrain, Split::kValidation});
        const auto test_rows = ds->rows_in({Split::kTest});
        std::vector<Matrix> blocks;
        for (const auto& v : ds->views) blocks.push_back(v.values);
        const Matrix all = hconcat(blocks);
        const Matrix fit_x = select_rows(all, fit_rows), test_x = select_rows(all, test_rows);
        std::vector<int> fit_y, test_y;
        for (std::size_t r : fit_rows) fit_y.push_back(ds->labels[r]);
        for (std::size_t r : test_rows) test_y.push_back(ds->labels[r]);

        ForestConfig forest = cfg.forest;
        forest.seed = derive_seed(seed, "forest", 0);
        const std::size_t k = ds->num_classes();
        auto evaluate = [&](const std::vector<std::size_t>& cols) {
          const Matrix a = select_cols(fit_x, cols), b = select_cols(test_x, cols);
          std::vector<std::pair<std::string, double>> m;
          m.emplace_back("n_features", static_cast<double>(cols.size()));
          m.emplace_back("rf_auc", auc_score(test_y, rf_fit_predict(a, fit_y, b, k, forest)));
          m.emplace_back("v_measure_holdout", v_measure(test_y, ward_cluster(b, std::min(k, b.rows()))).v_measure);
          m.emplace_back("v_measure_train", v_measure(fit_y, ward_cluster(a, std::min(k, a.rows()))).v_measure);
          return m;
        };
        std::vector<std::size_t> every(all.cols());
        for (std::size_t j = 0; j < every.size(); ++j) every[j] = j;
        out.metrics.emplace_back("all", evaluate(every));
        for (double p : cfg.percents) {
          std::vector<std::size_t> cols = subset_top_p(ranks, p);
          std::sort(cols.begin(), cols.end());
          out.metrics.emplace_back(format_double(p), evaluate(cols));
        }
        return out;
      });
    }
  }
  spdlog::info("subset: {} conditions x {} runs", conds.size(), cfg.runs);
  const auto results = run_jobs(std::move(jobs), options.threads);

  ExperimentReport report = new_report(cfg);
  report.notes["rf_rows"] = "fit on train+validation, scored on test";
  for (std::size_t c = 0; c < conds.size(); ++c) {
    for (std::size_t i = 0; i < cfg.runs; ++i) {
      const auto& out = results[c * cfg.runs + i];
      const std::uint64_t seed = seeds[c][i];
      const auto run = static_cast<long>(i);
      if (!out.value) {
        record_failure(report, conds[c].key, i, seed, out.error);
        continue;
      }
      report.add(conds[c].key, run, seed, "", "plateau_iteration", static_cast<double>(out.value->run.plateau));
      if (out.value->run.holdout_auc) {
        report.add(conds[c].key, run, seed, "", "model_holdout_auc", *out.value->run.holdout_auc);
      }
      for (const auto& [p, metrics] : out.value->metrics) {
        for (const auto& [name, value] : metrics) report.add(conds[c].key + ";p=" + p, run, seed, "", name, value);
      }
    }
  }
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  switch (cfg.kind) {
    case ExperimentKind::kCompression: return run_compression(cfg, options);
    case ExperimentKind::kStability: return run_stability(cfg, options);
    case ExperimentKind::kSubset: return run_subset(cfg, options);
  }
  throw std::logic_error("unhandled experiment kind");
}

namespace {

void try_plot(const ExperimentReport& report, const BoxplotOptions& options, const std::filesystem::path& path) {
  try {
    emit_boxplot_svg(report, options, path);
  } catch (const std::invalid_argument& e) {
    spdlog::warn("figure {} skipped: {}", path.filename().string(), e.what());
  }
}

std::vector<std::string> ranked_members(const ExperimentReport& report, const std::string& condition,
                                        const std::string& metric) {
  std::vector<std::pair<double, std::string>> members;
  for (const auto& r : report.rows) {
    if (r.run < 0 && r.condition == condition && r.metric == metric) members.emplace_back(r.value, r.feature);
  }
  std::sort(members.begin(), members.end());
  std::vector<std::string> out;
  for (auto& m : members) out.push_back(m.second);
  return out;
}

}  // namespace

ExperimentReport run_and_write(const ExperimentConfig& cfg, const std::filesystem::path& out,
                               const RunOptions& options) {
  const std::string started = utc_timestamp();
  std::filesystem::create_directories(out);
  ExperimentReport report = run_experiment(cfg, options);
  write_report_csv(report, out / "report.csv");
  write_report_json(report, out / "report.json");

  BoxplotOptions plot;
  plot.x_label = cfg.x_label.empty() ? "condition" : cfg.x_label;
  switch (cfg.kind) {
    case ExperimentKind::kCompression:
      plot.metric = "tau_w";
      plot.title = "Weighted tau vs zero-noise reference";
      plot.y_label = cfg.y_label.empty() ? "tau_w" : cfg.y_label;
      try_plot(report, plot, out / "tau_w.svg");
      break;
    case ExperimentKind::kSubset:
      plot.metric = "rf_auc";
      plot.title = "Random forest AUC on SHAP-ranked subsets";
      plot.y_label = cfg.y_label.empty() ? "AUC" : cfg.y_label;
      try_plot(report, plot, out / "rf_auc.svg");
      break;
    case ExperimentKind::kStability: {
      const std::string condition =
          condition_key(cfg.fusions.front(), cfg.sizing.front(), cfg.noise_levels.front()) + ";universe=pooled";
      plot.group = GroupKey::kFeature;
      plot.metric = "rank";
      plot.condition = condition;
      plot.x_label = cfg.x_label.empty() ? "feature" : cfg.x_label;
      plot.y_label = cfg.y_label.empty() ? "rank" : cfg.y_label;
      plot.groups = ranked_members(report, condition, "top_k");
      plot.title = "Ranks across runs: top features";
      if (!plot.groups.empty()) try_plot(report, plot, out / "rank_top.svg");
      plot.groups = ranked_members(report, condition, "bottom_k");
      plot.title = "Ranks across runs: bottom features";
      if (!plot.groups.empty()) try_plot(report, plot, out / "rank_bottom.svg");
      break;
    }
  }
  write_run_info(out / "run_info.json", started, utc_timestamp(), report.config_hash);
  return report;
}

}  // namespace shapaudit
