#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "shapaudit/dataio/dataset.hpp"
#include "shapaudit/downstream/downstream.hpp"
#include "shapaudit/multiview/train.hpp"
#include "shapaudit/perturb/perturb.hpp"

namespace shapaudit {

/// Invalid or unreadable configuration (CLI exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { kCompression, kStability, kSubset };

const char* experiment_name(ExperimentKind kind);
ExperimentKind parse_experiment(const std::string& name);

struct CsvViewSource {
  std::string id;
  std::filesystem::path path;
};

struct DatasetSource {
  std::optional<SynthConfig> synthetic;
  std::vector<CsvViewSource> views;
  std::filesystem::path labels;
  bool impute_median = false;
  bool allow_missing_views = false;
  SplitFractions fractions;
  std::optional<std::uint64_t> split_seed;  // default: derived from the master seed
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kCompression;
  std::uint64_t seed = 0;
  std::size_t runs = 10;
  DatasetSource data;
  std::vector<ViewLayers> base_views;  // input_dim filled from the data
  std::size_t fusion_hidden = 32;
  TrainConfig train;
  std::vector<std::size_t> noise_levels{0};
  std::size_t noise_view = 0;
  std::vector<SizingKind> sizing{SizingKind::kStatic};
  std::vector<Fusion> fusions{Fusion::kConcat};
  std::size_t width_floor = kDefaultWidthFloor;
  std::size_t hidden_cap = 128;
  std::vector<double> percents{75, 50, 25, 10};
  ForestConfig forest;
  std::size_t background = 0;   // 0 = all final-training rows
  std::size_t top_k = 8;
  std::vector<std::uint64_t> seeds;  // explicit run seeds (overrides derivation)
  std::string x_label;
  std::string y_label;

  /// Canonical JSON form; its SHA-256 is the report's config hash.
  nlohmann::json canonical;

  void validate() const;
};

/// Parses a JSON config. Unknown keys and bad values raise ConfigError.
/// 'experiment' defaults to compression when absent.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Applies CLI overrides and refreshes the canonical form.
void apply_overrides(ExperimentConfig& cfg, std::optional<std::uint64_t> seed, std::optional<std::size_t> runs);

TrainConfig parse_train_config(const nlohmann::json& j);

}  // namespace shapaudit
