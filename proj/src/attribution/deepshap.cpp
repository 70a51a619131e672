#include "shapaudit/attribution/deepshap.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace shapaudit {

double rescale_multiplier(double z_input, double z_reference) {
  const double dz = z_input - z_reference;
  if (std::abs(dz) < kRescaleDegeneracy) return z_input > 0.0 ? 1.0 : 0.0;
  const double relu_x = z_input > 0.0 ? z_input : 0.0;
  const double relu_b = z_reference > 0.0 ? z_reference : 0.0;
  return (relu_x - relu_b) / dz;
}

BackgroundSet make_background(const Batch& batch, std::size_t k, std::uint64_t seed) {
  if (!batch.mask.all_present()) {
    throw std::invalid_argument("background: every reference needs all views present");
  }
  if (k == 0 || k >= batch.size()) return {batch.views};
  std::vector<std::size_t> rows(batch.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  Rng rng(seed, streams::kBackground);
  rng.shuffle(std::span<std::size_t>(rows));
  rows.resize(k);
  std::sort(rows.begin(), rows.end());
  BackgroundSet bg;
  for (const auto& v : batch.views) bg.views.push_back(select_rows(v, rows));
  return bg;
}

void AttributionResult::label(const MultiViewDataset& dataset, std::span<const std::size_t> rows) {
  if (rows.size() != num_samples) throw std::invalid_argument("label: row count mismatch");
  if (dataset.num_views() != phi.size()) throw std::invalid_argument("label: view count mismatch");
  sample_ids.clear();
  for (std::size_t r : rows) sample_ids.push_back(dataset.sample_ids().at(r));
  view_ids.clear();
  feature_names.clear();
  for (const auto& v : dataset.views) {
    view_ids.push_back(v.view_id);
    feature_names.push_back(v.feature_names);
  }
}

namespace {

// Multipliers of the ReLU units between one sample row and every reference.
Matrix rescale_block(const Matrix& pre_x, std::size_t sample, const Matrix& pre_b,
                     std::size_t classes, Activation activation) {
  const std::size_t refs = pre_b.rows();
  const std::size_t width = pre_b.cols();
  Matrix out(refs * classes, width, 1.0);
  if (activation == Activation::kIdentity) return out;
  auto zx = pre_x.row(sample);
  for (std::size_t b = 0; b < refs; ++b) {
    auto zb = pre_b.row(b);
    for (std::size_t k = 0; k < width; ++k) {
      const double m = rescale_multiplier(zx[k], zb[k]);
      for (std::size_t c = 0; c < classes; ++c) out(b * classes + c, k) = m;
    }
  }
  return out;
}

void check_views(const LayerPlan& plan, std::span<const Matrix> views, const char* what) {
  if (views.size() != plan.views.size()) {
    throw std::invalid_argument(std::string("deepshap: ") + what + " has the wrong number of views");
  }
  for (std::size_t v = 0; v < views.size(); ++v) {
    if (views[v].cols() != plan.views[v].input_dim) {
      throw std::invalid_argument(std::string("deepshap: ") + what + " view " + std::to_string(v) +
                                  " has " + std::to_string(views[v].cols()) + " features, model expects " +
                                  std::to_string(plan.views[v].input_dim));
    }
    if (views[v].rows() != views.front().rows()) {
      throw std::invalid_argument(std::string("deepshap: ") + what + " views differ in row count");
    }
  }
}

}  // namespace

AttributionResult deepshap_attribute(const TrainedModel& model, std::span<const Matrix> samples,
                                     const BackgroundSet& background) {
  const LayerPlan& plan = model.plan;
  const ModelParams& params = model.params;
  check_views(plan, samples, "samples");
  check_views(plan, background.views, "background");
  if (background.size() == 0) throw std::invalid_argument("deepshap: empty background set");

  const std::size_t n = samples.front().rows();
  const std::size_t refs = background.size();
  const std::size_t classes = plan.num_classes;
  const std::size_t num_views = plan.views.size();
  const PresenceMask sample_mask(n, num_views);
  const PresenceMask ref_mask(refs, num_views);

  const ForwardPass px = forward(plan, params, samples, sample_mask);
  const ForwardPass pb = forward(plan, params, background.views, ref_mask);

  // Transposed weights: multipliers travel output -> input.
  const Matrix out_t = transpose(params.output.weight);
  const Matrix fusion_t = transpose(params.fusion_hidden.weight);
  std::vector<Matrix> emb_t, h2_t, h1_t;
  for (const auto& v : params.views) {
    emb_t.push_back(transpose(v.embedding.weight));
    h2_t.push_back(transpose(v.hidden2.weight));
    h1_t.push_back(transpose(v.hidden1.weight));
  }

  AttributionResult result;
  result.num_samples = n;
  result.num_classes = classes;
  for (std::size_t i = 0; i < n; ++i) result.sample_ids.push_back(std::to_string(i));
  for (std::size_t v = 0; v < num_views; ++v) {
    result.view_ids.push_back("view" + std::to_string(v));
    std::vector<std::string> names;
    for (std::size_t f = 0; f < plan.views[v].input_dim; ++f) {
      names.push_back("v" + std::to_string(v) + "_f" + std::to_string(f));
    }
    result.feature_names.push_back(std::move(names));
    result.phi.emplace_back(n * classes, plan.views[v].input_dim);
  }

  result.deltas = Matrix(n, classes);
  for (std::size_t c = 0; c < classes; ++c) {
    double mean_ref = 0.0;
    for (std::size_t b = 0; b < refs; ++b) mean_ref += pb.logits(b, c);
    mean_ref /= static_cast<double>(refs);
    for (std::size_t i = 0; i < n; ++i) result.deltas(i, c) = px.logits(i, c) - mean_ref;
  }

  const std::size_t rows = refs * classes;  // row = reference * C + class
  const double inv_refs = 1.0 / static_cast<double>(refs);

  for (std::size_t i = 0; i < n; ++i) {
    // Logit c -> post-fusion activation: row c of W_out^T for every reference.
    Matrix m(rows, plan.fusion_hidden);
    for (std::size_t b = 0; b < refs; ++b) {
      for (std::size_t c = 0; c < classes; ++c) {
        auto src = out_t.row(c);
        std::copy(src.begin(), src.end(), m.row(b * classes + c).begin());
      }
    }
    hadamard_inplace(m, rescale_block(px.fusion_pre, i, pb.fusion_pre, classes, plan.activation));
    const Matrix m_fused = matmul(m, fusion_t);

    for (std::size_t v = 0; v < num_views; ++v) {
      const std::size_t width = plan.views[v].embedding;
      Matrix m_emb(rows, width);
      if (plan.fusion == Fusion::kMean) {
        const double share = 1.0 / static_cast<double>(num_views);
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t k = 0; k < width; ++k) m_emb(r, k) = m_fused(r, k) * share;
        }
      } else {
        const std::size_t offset = plan.concat_offset(v);
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t k = 0; k < width; ++k) m_emb(r, k) = m_fused(r, offset + k);
        }
      }
      const ViewActivations& ax = px.views[v];
      const ViewActivations& ab = pb.views[v];
      Matrix m2 = matmul(m_emb, emb_t[v]);
      hadamard_inplace(m2, rescale_block(ax.pre2, i, ab.pre2, classes, plan.activation));
      Matrix m1 = matmul(m2, h2_t[v]);
      hadamard_inplace(m1, rescale_block(ax.pre1, i, ab.pre1, classes, plan.activation));
      const Matrix m_in = matmul(m1, h1_t[v]);

      // phi = mean over references of multiplier * (x - reference).
      const std::size_t d = plan.views[v].input_dim;
      auto x = samples[v].row(i);
      for (std::size_t c = 0; c < classes; ++c) {
        auto out = result.phi[v].row(i * classes + c);
        for (std::size_t b = 0; b < refs; ++b) {
          auto mult = m_in.row(b * classes + c);
          auto ref = background.views[v].row(b);
          for (std::size_t f = 0; f < d; ++f) out[f] += mult[f] * (x[f] - ref[f]);
        }
        for (double& value : out) value *= inv_refs;
      }
    }
  }
  return result;
}

}  // namespace shapaudit
