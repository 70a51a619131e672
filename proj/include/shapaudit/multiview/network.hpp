#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shapaudit/multiview/presence_mask.hpp"
#include "shapaudit/nncore/focal_loss.hpp"
#include "shapaudit/nncore/matrix.hpp"
#include "shapaudit/nncore/rng.hpp"

namespace shapaudit {

enum class Fusion { kMean, kConcat };
enum class Activation { kRelu, kIdentity };

const char* fusion_name(Fusion fusion);
Fusion parse_fusion(const std::string& name);

/// Widths of one marginal network: input -> hidden1 -> hidden2 -> embedding.
struct ViewLayers {
  std::size_t input_dim = 0;
  std::size_t hidden1 = 0;
  std::size_t hidden2 = 0;
  std::size_t embedding = 0;

  bool operator==(const ViewLayers&) const = default;
};

/// Layer plan for the whole multi-view network.
///
/// Each view: affine -> act -> dropout -> affine -> act -> dropout -> affine
/// (embedding), plus an affine per-view head on the embedding. Embeddings are
/// fused (mean or concat), then affine -> act -> dropout -> affine (logits).
/// `activation` is ReLU in every real model; identity exists so that
/// affine-only networks can be built for attribution checks.
struct LayerPlan {
  std::vector<ViewLayers> views;
  Fusion fusion = Fusion::kMean;
  std::size_t fusion_hidden = 32;
  std::size_t num_classes = 2;
  Activation activation = Activation::kRelu;

  void validate() const;
  std::size_t fused_width() const;
  /// Column offset of view v's slice in the fused vector (concat only).
  std::size_t concat_offset(std::size_t view) const;

  bool operator==(const LayerPlan&) const = default;
};

/// Affine map y = x W + b with W stored input-major (in x out).
struct Dense {
  Matrix weight;
  Matrix bias;  // 1 x out

  bool operator==(const Dense&) const = default;
};

struct ViewParams {
  Dense hidden1;
  Dense hidden2;
  Dense embedding;
  Dense head;

  bool operator==(const ViewParams&) const = default;
};

struct ModelParams {
  std::vector<ViewParams> views;
  Dense fusion_hidden;
  Dense output;

  /// Visits every tensor in a fixed order: per view (hidden1 W,b, hidden2
  /// W,b, embedding W,b, head W,b), then fusion hidden W,b, output W,b.
  void for_each_tensor(const std::function<void(Matrix&)>& fn);
  void for_each_tensor(const std::function<void(const Matrix&)>& fn) const;
  std::size_t parameter_count() const;
  std::vector<double> flatten() const;
  void assign_flat(std::span<const double> flat);
  /// Zero-filled tensors with identical shapes.
  ModelParams zeros_like() const;

  bool operator==(const ModelParams&) const = default;
};

/// Zero-filled parameters shaped for the plan.
ModelParams zero_params(const LayerPlan& plan);

/// Fan-in scaled uniform weights, bound sqrt(6 / fan_in); zero biases.
/// Every layer draws from its own fork of Rng(seed, streams::kInit), row by
/// row, so the weights attached to the first k inputs of a layer do not
/// depend on how many inputs follow them.
ModelParams init_params(const LayerPlan& plan, std::uint64_t seed);

enum class Mode { kTrain, kEval };

struct ViewActivations {
  Matrix pre1, act1, pre2, act2;  // act* are post-dropout
  Matrix keep1, keep2;            // scaled dropout masks (train mode only)
  Matrix embedding;
  Matrix logits;                  // per-view head
};

struct ForwardPass {
  std::vector<ViewActivations> views;
  Matrix fused;
  Matrix fusion_pre, fusion_act, fusion_keep;
  Matrix logits;
};

struct ForwardOptions {
  Mode mode = Mode::kEval;
  double dropout_rate = 0.0;
  Rng* rng = nullptr;  // required in train mode when dropout_rate > 0
};

/// Mean over present views (per sample) or concatenation in view order.
/// Concat requires every view present for every sample; mean requires equal
/// widths.
Matrix fuse_latents(std::span<const Matrix> latents, Fusion fusion, const PresenceMask& mask);

ForwardPass forward(const LayerPlan& plan, const ModelParams& params, std::span<const Matrix> batch,
                    const PresenceMask& mask, const ForwardOptions& options = {});

/// Loss weights: index 0 is the fusion head, then one entry per view.
using LossWeights = std::vector<double>;

LossWeights default_loss_weights(std::size_t views);

/// w_fusion * FL(fusion) + sum_v w_v * FL(view v). Per-view terms only use
/// rows where the view is present (all rows when `mask` is null).
double total_loss(const Matrix& fused_logits, std::span<const Matrix> view_logits,
                  std::span<const int> labels, const LossWeights& weights,
                  const FocalLossParams& focal, const PresenceMask* mask = nullptr);

struct LossGradients {
  double loss = 0.0;
  double fusion_loss = 0.0;
  std::vector<double> view_losses;
  ModelParams grads;
};

/// Loss of a forward pass and its gradient with respect to every parameter.
LossGradients backward(const LayerPlan& plan, const ModelParams& params, const ForwardPass& pass,
                       std::span<const Matrix> batch, const PresenceMask& mask,
                       std::span<const int> labels, const LossWeights& weights,
                       const FocalLossParams& focal);

}  // namespace shapaudit
