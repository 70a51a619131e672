#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "shapaudit/harness/config.hpp"
#include "shapaudit/harness/report.hpp"

namespace shapaudit {

/// Dataset ready for training, plus the planted features when synthetic
/// (pooled names "<view id>:<feature>").
struct PreparedData {
  MultiViewDataset raw;
  std::vector<std::string> planted;
};

PreparedData prepare_data(const ExperimentConfig& cfg);

/// Input files with checksums, split seed and the standardization record.
nlohmann::json dataset_manifest(const ExperimentConfig& cfg, const MultiViewDataset& raw,
                                const StandardizationRecord& record);

struct RunOptions {
  std::size_t threads = 1;
};

/// Per (fusion, sizing, noise) condition and run: tau_w of the original
/// features' pooled ranking against the matched-seed zero-noise run, the
/// run-to-run tau against the next run of the same condition, mean |phi| of
/// original and noise features, and the model's holdout AUC.
ExperimentReport run_compression(const ExperimentConfig& cfg, const RunOptions& options = {});

/// Rank distributions across runs for the pooled and single-view universes,
/// with top-k / bottom-k membership by mean rank.
ExperimentReport run_stability(const ExperimentConfig& cfg, const RunOptions& options = {});

/// Per condition and run: random forest AUC and Ward V-measure on the top
/// p% SHAP-ranked features and on all features.
ExperimentReport run_subset(const ExperimentConfig& cfg, const RunOptions& options = {});

ExperimentReport run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

/// Runs the experiment and writes report.csv, report.json, the figure SVGs
/// and run_info.json into `out`. Returns the report.
ExperimentReport run_and_write(const ExperimentConfig& cfg, const std::filesystem::path& out,
                               const RunOptions& options = {});

/// Seed for run `index` of the condition family `key`.
std::uint64_t run_seed(const ExperimentConfig& cfg, const std::string& key, std::size_t index);

}  // namespace shapaudit
