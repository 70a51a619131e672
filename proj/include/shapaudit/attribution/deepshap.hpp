#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "shapaudit/multiview/train.hpp"

namespace shapaudit {

/// Reference samples for DeepSHAP: one matrix per view, equal row counts.
struct BackgroundSet {
  std::vector<Matrix> views;

  std::size_t size() const { return views.empty() ? 0 : views.front().rows(); }
};

/// Background from a batch; `k` > 0 draws a seeded subsample of k rows
/// (without replacement, original order kept).
BackgroundSet make_background(const Batch& batch, std::size_t k = 0, std::uint64_t seed = 0);

/// DeepSHAP values indexed by (sample, class, view, feature).
struct AttributionResult {
  std::size_t num_samples = 0;
  std::size_t num_classes = 0;
  std::vector<std::string> sample_ids;
  std::vector<std::string> view_ids;
  std::vector<std::vector<std::string>> feature_names;
  /// Per view: (num_samples * num_classes) x features, row = sample * C + class.
  std::vector<Matrix> phi;
  /// num_samples x num_classes: f_c(x) - mean_b f_c(b) on the logits.
  Matrix deltas;

  double at(std::size_t sample, std::size_t cls, std::size_t view, std::size_t feature) const {
    return phi[view](sample * num_classes + cls, feature);
  }
  std::size_t num_views() const { return phi.size(); }
  /// Names default to "view<v>" / "v<v>_f<j>" / "<row index>" until labelled.
  void label(const MultiViewDataset& dataset, std::span<const std::size_t> rows);
};

inline constexpr double kRescaleDegeneracy = 1e-9;

/// DeepLIFT rescale multiplier for one ReLU unit between input and reference.
double rescale_multiplier(double z_input, double z_reference);

/// DeepLIFT attributions of every class logit, averaged over the background.
///
/// Affine layers propagate multipliers through their weights, ReLUs use the
/// rescale rule, mean fusion hands 1/V of the multiplier to each view and
/// concat fusion routes each slice back to its view. Dropout is off. All
/// views must be present for every sample and every reference.
AttributionResult deepshap_attribute(const TrainedModel& model, std::span<const Matrix> samples,
                                     const BackgroundSet& background);

// ------------------------------------------------------------- aggregation

/// Feature universe: one view, or all views pooled in view order.
struct Universe {
  std::optional<std::size_t> view;

  static Universe pooled() { return {}; }
  static Universe single(std::size_t v) { return {v}; }
  std::string name() const;
};

struct FeatureScores {
  std::vector<std::string> names;
  std::vector<double> values;
};

/// Mean of |phi| over samples and classes, per feature of the universe.
FeatureScores aggregate_scores(const AttributionResult& result, const Universe& universe);

/// Ordinal ranks (1 = most important) with the aggregated score per feature.
struct RankVector {
  std::vector<std::string> names;
  std::vector<double> scores;
  std::vector<std::size_t> ranks;

  std::size_t size() const { return ranks.size(); }
  /// Feature indices from rank 1 downwards.
  std::vector<std::size_t> order() const;
};

/// Descending score; ties go to the lower feature index. NaN is an error.
RankVector rank_features(const FeatureScores& scores);

// ----------------------------------------------------------------- export

/// Long-form CSV: sample_id,class,view,feature,phi.
void write_attribution_csv(const AttributionResult& result, const std::vector<std::string>& class_names,
                           const std::filesystem::path& path);

/// Aggregated scores and ranks for the pooled universe and each view.
nlohmann::json attribution_summary_json(const AttributionResult& result);

}  // namespace shapaudit
