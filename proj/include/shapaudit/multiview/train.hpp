#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "shapaudit/dataio/dataset.hpp"
#include "shapaudit/multiview/network.hpp"
#include "shapaudit/nncore/adam.hpp"
#include "shapaudit/nncore/focal_loss.hpp"

namespace shapaudit {

struct TrainConfig {
  std::size_t max_iterations = 2000;
  std::size_t patience = 50;
  double min_delta = 1e-5;
  double dropout_rate = 0.1;
  std::uint64_t seed = 0;
  FocalLossParams focal;
  AdamConfig adam;
  LossWeights loss_weights;  // empty = 1.0 for the fusion head and every view

  void validate(std::size_t views) const;
};

/// Tracks the best validation loss; reports a plateau after `patience`
/// consecutive observations without an improvement larger than min_delta.
class PlateauMonitor {
 public:
  PlateauMonitor(std::size_t patience, double min_delta);

  /// Returns true when training should stop after this observation.
  bool observe(double loss);
  double best() const { return best_; }
  std::size_t stale() const { return stale_; }

 private:
  std::size_t patience_;
  double min_delta_;
  double best_;
  std::size_t stale_ = 0;
  bool first_ = true;
};

/// ceil(1.2 * iterations), in exact integer arithmetic.
std::size_t retrain_iterations(std::size_t plateau_iteration);

enum class Phase { kPlateauSearch, kFinal };

struct HistoryEntry {
  Phase phase = Phase::kPlateauSearch;
  std::size_t iteration = 0;  // 1-based within the phase
  double train_loss = 0.0;
  std::optional<double> validation_loss;

  bool operator==(const HistoryEntry&) const = default;
};

struct SeedRecord {
  std::uint64_t init_seed = 0;
  std::uint64_t dropout_stream = streams::kDropout;

  bool operator==(const SeedRecord&) const = default;
};

struct TrainedModel {
  LayerPlan plan;
  ModelParams params;
  double dropout_rate = 0.0;
  SeedRecord seeds;
  std::vector<HistoryEntry> history;
  std::size_t plateau_iteration = 0;  // T
  std::size_t final_iterations = 0;   // ceil(1.2 T)

  bool operator==(const TrainedModel&) const = default;
};

/// Thrown when a loss turns non-finite; carries the iteration.
class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, std::size_t iteration)
      : std::runtime_error(what), iteration_(iteration) {}
  std::size_t iteration() const { return iteration_; }

 private:
  std::size_t iteration_;
};

/// Rows of a dataset ready to feed the network.
struct Batch {
  std::vector<Matrix> views;
  std::vector<int> labels;
  PresenceMask mask;
  std::vector<std::size_t> rows;  // dataset row indices

  std::size_t size() const { return labels.size(); }
};

Batch make_batch(const MultiViewDataset& dataset, std::span<const std::size_t> rows);

/// Full-batch Adam on the train split until the validation focal loss of the
/// fusion head plateaus (or max_iterations), giving T. Parameters are then
/// re-initialised from the same seed and trained on train + validation for
/// ceil(1.2 T) iterations; that second model is returned.
TrainedModel train(const LayerPlan& plan, const MultiViewDataset& dataset, const TrainConfig& config);

/// Eval-mode class probabilities of the fusion head.
Matrix predict_proba(const TrainedModel& model, std::span<const Matrix> views, const PresenceMask& mask);

}  // namespace shapaudit
