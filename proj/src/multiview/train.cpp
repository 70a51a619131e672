#include "shapaudit/multiview/train.hpp"

#include <cmath>
#include <limits>

#include <spdlog/spdlog.h>

namespace shapaudit {

void TrainConfig::validate(std::size_t views) const {
  if (max_iterations == 0) throw std::invalid_argument("train: max_iterations must be positive");
  if (patience >= max_iterations) throw std::invalid_argument("train: patience must be < max_iterations");
  if (!(min_delta >= 0.0)) throw std::invalid_argument("train: min_delta must be >= 0");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw std::invalid_argument("train: dropout rate must be in [0, 1)");
  }
  adam.validate();
  if (!loss_weights.empty() && loss_weights.size() != views + 1) {
    throw std::invalid_argument("train: loss weights need fusion + one entry per view");
  }
}

PlateauMonitor::PlateauMonitor(std::size_t patience, double min_delta)
    : patience_(patience), min_delta_(min_delta), best_(std::numeric_limits<double>::infinity()) {}

bool PlateauMonitor::observe(double loss) {
  if (first_ || loss < best_ - min_delta_) {
    first_ = false;
    best_ = loss;
    stale_ = 0;
    return false;
  }
  ++stale_;
  return stale_ >= patience_;
}

std::size_t retrain_iterations(std::size_t plateau_iteration) {
  return (6 * plateau_iteration + 4) / 5;
}

Batch make_batch(const MultiViewDataset& dataset, std::span<const std::size_t> rows) {
  Batch b;
  b.rows.assign(rows.begin(), rows.end());
  for (const auto& v : dataset.views) b.views.push_back(select_rows(v.values, rows));
  for (std::size_t r : rows) b.labels.push_back(dataset.labels[r]);
  b.mask = dataset.mask.select(rows);
  return b;
}

namespace {

struct Optimizer {
  std::vector<AdamState> states;

  Optimizer(const ModelParams& params, const AdamConfig& cfg) {
    params.for_each_tensor([&](const Matrix& m) { states.emplace_back(m.rows(), m.cols(), cfg); });
  }

  void step(ModelParams& params, ModelParams& grads) {
    std::vector<Matrix*> grad_tensors;
    grads.for_each_tensor([&](Matrix& g) { grad_tensors.push_back(&g); });
    std::size_t k = 0;
    params.for_each_tensor([&](Matrix& p) {
      adam_step(p, *grad_tensors[k], states[k]);
      ++k;
    });
  }
};

double eval_fusion_loss(const LayerPlan& plan, const ModelParams& params, const Batch& batch,
                        const FocalLossParams& focal) {
  const ForwardPass pass = forward(plan, params, batch.views, batch.mask);
  return focal_loss(softmax_rows(pass.logits), batch.labels, focal).loss;
}

// Runs `iterations` full-batch steps (or until the monitor fires when a
// validation batch is given). Returns the number of iterations executed.
std::size_t run_phase(const LayerPlan& plan, ModelParams& params, const Batch& train_batch,
                      const Batch* validation, const TrainConfig& cfg, const LossWeights& weights,
                      std::size_t iterations, Phase phase, std::vector<HistoryEntry>& history) {
  Optimizer optimizer(params, cfg.adam);
  Rng dropout_rng(cfg.seed, streams::kDropout);
  PlateauMonitor monitor(cfg.patience, cfg.min_delta);
  ForwardOptions fwd{Mode::kTrain, cfg.dropout_rate, &dropout_rng};

  for (std::size_t it = 1; it <= iterations; ++it) {
    const ForwardPass pass = forward(plan, params, train_batch.views, train_batch.mask, fwd);
    LossGradients lg = backward(plan, params, pass, train_batch.views, train_batch.mask,
                                train_batch.labels, weights, cfg.focal);
    bool finite = std::isfinite(lg.loss);
    lg.grads.for_each_tensor([&](const Matrix& g) { finite = finite && g.all_finite(); });
    if (!finite) throw TrainingError("non-finite training loss at iteration " + std::to_string(it), it);
    optimizer.step(params, lg.grads);

    HistoryEntry entry{phase, it, lg.loss, std::nullopt};
    if (validation != nullptr) {
      const double val = eval_fusion_loss(plan, params, *validation, cfg.focal);
      if (!std::isfinite(val)) {
        throw TrainingError("non-finite validation loss at iteration " + std::to_string(it), it);
      }
      entry.validation_loss = val;
      history.push_back(entry);
      if (monitor.observe(val)) return it;
    } else {
      history.push_back(entry);
    }
  }
  return iterations;
}

}  // namespace

TrainedModel train(const LayerPlan& plan, const MultiViewDataset& dataset, const TrainConfig& config) {
  plan.validate();
  config.validate(plan.views.size());
  if (dataset.num_views() != plan.views.size()) {
    throw std::invalid_argument("train: dataset has " + std::to_string(dataset.num_views()) +
                                " views, plan has " + std::to_string(plan.views.size()));
  }
  for (std::size_t v = 0; v < plan.views.size(); ++v) {
    if (dataset.views[v].features() != plan.views[v].input_dim) {
      throw std::invalid_argument("train: view " + std::to_string(v) + " dimension mismatch");
    }
  }
  if (dataset.num_classes() != plan.num_classes) {
    throw std::invalid_argument("train: class count differs from plan");
  }

  const auto train_rows = dataset.rows_in({Split::kTrain});
  const auto val_rows = dataset.rows_in({Split::kValidation});
  if (train_rows.empty()) throw std::invalid_argument("train: empty train split");
  if (val_rows.empty()) throw std::invalid_argument("train: empty validation split");
  const auto final_rows = dataset.rows_in({Split::kTrain, Split::kValidation});

  const LossWeights weights =
      config.loss_weights.empty() ? default_loss_weights(plan.views.size()) : config.loss_weights;

  TrainedModel model;
  model.plan = plan;
  model.dropout_rate = config.dropout_rate;
  model.seeds = {config.seed, streams::kDropout};

  const Batch train_batch = make_batch(dataset, train_rows);
  const Batch val_batch = make_batch(dataset, val_rows);
  ModelParams search = init_params(plan, config.seed);
  model.plateau_iteration = run_phase(plan, search, train_batch, &val_batch, config, weights,
                                      config.max_iterations, Phase::kPlateauSearch, model.history);
  model.final_iterations = retrain_iterations(model.plateau_iteration);
  spdlog::debug("train: plateau at iteration {}, final phase {} iterations", model.plateau_iteration,
                model.final_iterations);

  const Batch final_batch = make_batch(dataset, final_rows);
  model.params = init_params(plan, config.seed);
  run_phase(plan, model.params, final_batch, nullptr, config, weights, model.final_iterations,
            Phase::kFinal, model.history);
  return model;
}

Matrix predict_proba(const TrainedModel& model, std::span<const Matrix> views, const PresenceMask& mask) {
  const ForwardPass pass = forward(model.plan, model.params, views, mask);
  return softmax_rows(pass.logits);
}

}  // namespace shapaudit
