#include <algorithm>
#include <stdexcept>
#include <string>

#include "shapaudit/multiview/network.hpp"

namespace shapaudit {

namespace {

Matrix affine(const Matrix& x, const Dense& d) {
  Matrix z = matmul(x, d.weight);
  add_row_broadcast(z, d.bias);
  return z;
}

Matrix activate(const Matrix& pre, Activation act) {
  Matrix out = pre;
  if (act == Activation::kRelu) {
    for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
  }
  return out;
}

// Inverted dropout: kept units are scaled by 1/(1-rate) so eval is identity.
Matrix dropout_mask(std::size_t rows, std::size_t cols, double rate, Rng& rng) {
  Matrix keep(rows, cols);
  const double scale = 1.0 / (1.0 - rate);
  for (double& k : keep.data()) k = rng.uniform() < rate ? 0.0 : scale;
  return keep;
}

void apply_activation_grad(Matrix& grad, const Matrix& pre, Activation act) {
  if (act != Activation::kRelu) return;
  auto g = grad.data();
  auto z = pre.data();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(z[i] > 0.0)) g[i] = 0.0;
  }
}

// Rows of `logits` restricted to samples where the view is present.
std::vector<std::size_t> present_rows(const PresenceMask* mask, std::size_t view, std::size_t n) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < n; ++i) {
    if (mask == nullptr || mask->present(i, view)) rows.push_back(i);
  }
  return rows;
}

struct HeadLoss {
  double loss = 0.0;
  Matrix grad;  // n x C, zero rows for absent samples
};

HeadLoss head_loss(const Matrix& logits, std::span<const int> labels,
                   const std::vector<std::size_t>& rows, const FocalLossParams& focal) {
  HeadLoss out{0.0, Matrix(logits.rows(), logits.cols())};
  if (rows.empty()) return out;
  const bool all_rows = rows.size() == logits.rows();
  std::vector<int> sub_labels;
  sub_labels.reserve(rows.size());
  for (std::size_t r : rows) sub_labels.push_back(labels[r]);
  const Matrix probs = softmax_rows(all_rows ? logits : select_rows(logits, rows));
  LossAndGradient lg = focal_loss(probs, sub_labels, focal);
  out.loss = lg.loss;
  if (all_rows) {
    out.grad = std::move(lg.grad_logits);
  } else {
    for (std::size_t k = 0; k < rows.size(); ++k) {
      auto src = lg.grad_logits.row(k);
      std::copy(src.begin(), src.end(), out.grad.row(rows[k]).begin());
    }
  }
  return out;
}

void check_weights(const LossWeights& weights, std::size_t views) {
  if (weights.size() != views + 1) {
    throw std::invalid_argument("loss weights: expected " + std::to_string(views + 1) +
                                " entries (fusion + one per view), got " +
                                std::to_string(weights.size()));
  }
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("loss weights must be nonnegative");
  }
}

void accumulate_dense_grad(Dense& grad, const Matrix& input, const Matrix& upstream) {
  grad.weight = matmul_at_b(input, upstream);
  grad.bias = column_sums(upstream);
}

}  // namespace

Matrix fuse_latents(std::span<const Matrix> latents, Fusion fusion, const PresenceMask& mask) {
  if (latents.empty()) throw std::invalid_argument("fuse_latents: no latents");
  const std::size_t n = latents.front().rows();
  if (mask.samples() != n || mask.views() != latents.size()) {
    throw std::invalid_argument("fuse_latents: mask shape does not match latents");
  }
  for (const auto& l : latents) {
    if (l.rows() != n) throw std::invalid_argument("fuse_latents: row count mismatch");
  }
  if (fusion == Fusion::kConcat) {
    if (!mask.all_present()) {
      throw std::invalid_argument("fuse_latents: concat fusion cannot handle a missing view");
    }
    return hconcat(latents);
  }
  const std::size_t width = latents.front().cols();
  for (const auto& l : latents) {
    if (l.cols() != width) throw std::invalid_argument("fuse_latents: mean fusion needs equal widths");
  }
  Matrix fused(n, width);
  for (std::size_t i = 0; i < n; ++i) {
    auto dst = fused.row(i);
    for (std::size_t v = 0; v < latents.size(); ++v) {
      if (!mask.present(i, v)) continue;
      auto src = latents[v].row(i);
      for (std::size_t c = 0; c < width; ++c) dst[c] += src[c];
    }
    const double count = static_cast<double>(mask.present_count(i));
    for (double& x : dst) x /= count;
  }
  return fused;
}

ForwardPass forward(const LayerPlan& plan, const ModelParams& params, std::span<const Matrix> batch,
                    const PresenceMask& mask, const ForwardOptions& options) {
  if (batch.size() != plan.views.size()) {
    throw std::invalid_argument("forward: expected " + std::to_string(plan.views.size()) +
                                " views, got " + std::to_string(batch.size()));
  }
  const std::size_t n = batch.front().rows();
  for (std::size_t v = 0; v < batch.size(); ++v) {
    if (batch[v].rows() != n) throw std::invalid_argument("forward: views have different row counts");
    if (batch[v].cols() != plan.views[v].input_dim) {
      throw std::invalid_argument("forward: view " + std::to_string(v) + " has " +
                                  std::to_string(batch[v].cols()) + " features, plan expects " +
                                  std::to_string(plan.views[v].input_dim));
    }
  }
  const bool use_dropout = options.mode == Mode::kTrain && options.dropout_rate > 0.0;
  if (use_dropout && options.rng == nullptr) {
    throw std::invalid_argument("forward: train mode with dropout needs an rng");
  }
  if (options.dropout_rate < 0.0 || options.dropout_rate >= 1.0) {
    throw std::invalid_argument("forward: dropout rate must be in [0, 1)");
  }

  ForwardPass pass;
  pass.views.resize(batch.size());
  std::vector<Matrix> embeddings;
  embeddings.reserve(batch.size());
  for (std::size_t v = 0; v < batch.size(); ++v) {
    const ViewParams& p = params.views[v];
    ViewActivations& a = pass.views[v];
    a.pre1 = affine(batch[v], p.hidden1);
    a.act1 = activate(a.pre1, plan.activation);
    if (use_dropout) {
      a.keep1 = dropout_mask(a.act1.rows(), a.act1.cols(), options.dropout_rate, *options.rng);
      hadamard_inplace(a.act1, a.keep1);
    }
    a.pre2 = affine(a.act1, p.hidden2);
    a.act2 = activate(a.pre2, plan.activation);
    if (use_dropout) {
      a.keep2 = dropout_mask(a.act2.rows(), a.act2.cols(), options.dropout_rate, *options.rng);
      hadamard_inplace(a.act2, a.keep2);
    }
    a.embedding = affine(a.act2, p.embedding);
    a.logits = affine(a.embedding, p.head);
    embeddings.push_back(a.embedding);
  }
  pass.fused = fuse_latents(embeddings, plan.fusion, mask);
  pass.fusion_pre = affine(pass.fused, params.fusion_hidden);
  pass.fusion_act = activate(pass.fusion_pre, plan.activation);
  if (use_dropout) {
    pass.fusion_keep = dropout_mask(pass.fusion_act.rows(), pass.fusion_act.cols(),
                                    options.dropout_rate, *options.rng);
    hadamard_inplace(pass.fusion_act, pass.fusion_keep);
  }
  pass.logits = affine(pass.fusion_act, params.output);
  return pass;
}

LossWeights default_loss_weights(std::size_t views) { return LossWeights(views + 1, 1.0); }

double total_loss(const Matrix& fused_logits, std::span<const Matrix> view_logits,
                  std::span<const int> labels, const LossWeights& weights,
                  const FocalLossParams& focal, const PresenceMask* mask) {
  check_weights(weights, view_logits.size());
  const std::size_t n = fused_logits.rows();
  for (const auto& l : view_logits) {
    if (l.rows() != n) throw std::invalid_argument("total_loss: logit blocks differ in row count");
  }
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  double loss = weights[0] * head_loss(fused_logits, labels, all, focal).loss;
  for (std::size_t v = 0; v < view_logits.size(); ++v) {
    if (weights[v + 1] == 0.0) continue;
    loss += weights[v + 1] * head_loss(view_logits[v], labels, present_rows(mask, v, n), focal).loss;
  }
  return loss;
}

LossGradients backward(const LayerPlan& plan, const ModelParams& params, const ForwardPass& pass,
                       std::span<const Matrix> batch, const PresenceMask& mask,
                       std::span<const int> labels, const LossWeights& weights,
                       const FocalLossParams& focal) {
  const std::size_t num_views = plan.views.size();
  check_weights(weights, num_views);
  const std::size_t n = pass.logits.rows();

  LossGradients out;
  out.grads = params.zeros_like();
  out.view_losses.assign(num_views, 0.0);

  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  HeadLoss fusion_head = head_loss(pass.logits, labels, all, focal);
  out.fusion_loss = fusion_head.loss;
  out.loss = weights[0] * fusion_head.loss;
  Matrix d_logits = std::move(fusion_head.grad);
  scale_inplace(d_logits, weights[0]);

  accumulate_dense_grad(out.grads.output, pass.fusion_act, d_logits);
  Matrix d_fusion = matmul_a_bt(d_logits, params.output.weight);
  if (!pass.fusion_keep.empty()) hadamard_inplace(d_fusion, pass.fusion_keep);
  apply_activation_grad(d_fusion, pass.fusion_pre, plan.activation);
  accumulate_dense_grad(out.grads.fusion_hidden, pass.fused, d_fusion);
  const Matrix d_fused = matmul_a_bt(d_fusion, params.fusion_hidden.weight);

  for (std::size_t v = 0; v < num_views; ++v) {
    const ViewParams& p = params.views[v];
    const ViewActivations& a = pass.views[v];
    ViewParams& g = out.grads.views[v];
    const std::size_t width = plan.views[v].embedding;

    // Slice of the fusion gradient that belongs to this view.
    Matrix d_embedding(n, width);
    for (std::size_t i = 0; i < n; ++i) {
      if (!mask.present(i, v)) continue;
      auto dst = d_embedding.row(i);
      if (plan.fusion == Fusion::kMean) {
        const double share = 1.0 / static_cast<double>(mask.present_count(i));
        auto src = d_fused.row(i);
        for (std::size_t c = 0; c < width; ++c) dst[c] = src[c] * share;
      } else {
        const std::size_t offset = plan.concat_offset(v);
        for (std::size_t c = 0; c < width; ++c) dst[c] = d_fused(i, offset + c);
      }
    }

    if (weights[v + 1] != 0.0) {
      HeadLoss view_head = head_loss(a.logits, labels, present_rows(&mask, v, n), focal);
      out.view_losses[v] = view_head.loss;
      out.loss += weights[v + 1] * view_head.loss;
      scale_inplace(view_head.grad, weights[v + 1]);
      accumulate_dense_grad(g.head, a.embedding, view_head.grad);
      add_inplace(d_embedding, matmul_a_bt(view_head.grad, p.head.weight));
    }

    accumulate_dense_grad(g.embedding, a.act2, d_embedding);
    Matrix d2 = matmul_a_bt(d_embedding, p.embedding.weight);
    if (!a.keep2.empty()) hadamard_inplace(d2, a.keep2);
    apply_activation_grad(d2, a.pre2, plan.activation);
    accumulate_dense_grad(g.hidden2, a.act1, d2);
    Matrix d1 = matmul_a_bt(d2, p.hidden2.weight);
    if (!a.keep1.empty()) hadamard_inplace(d1, a.keep1);
    apply_activation_grad(d1, a.pre1, plan.activation);
    accumulate_dense_grad(g.hidden1, batch[v], d1);
  }
  return out;
}

}  // namespace shapaudit
