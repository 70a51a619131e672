#pragma once

#include <cmath>
#include <vector>

#include "shapaudit/multiview/network.hpp"
#include "shapaudit/nncore/matrix.hpp"
#include "shapaudit/nncore/rng.hpp"

namespace shapaudit::testing {

inline Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double scale = 1.0) {
  Matrix m(rows, cols);
  for (double& v : m.data()) v = rng.normal(0.0, scale);
  return m;
}

inline std::vector<Matrix> random_views(const LayerPlan& plan, std::size_t n, Rng& rng) {
  std::vector<Matrix> views;
  for (const auto& v : plan.views) views.push_back(random_matrix(n, v.input_dim, rng));
  return views;
}

inline std::vector<int> random_labels(std::size_t n, std::size_t classes, Rng& rng) {
  std::vector<int> y(n);
  for (auto& v : y) v = static_cast<int>(rng.below(classes));
  return y;
}

/// Random plan with 2-3 views and widths <= 32.
inline LayerPlan random_plan(Rng& rng, Fusion fusion, std::size_t max_width = 32) {
  LayerPlan plan;
  plan.fusion = fusion;
  const std::size_t views = 2 + rng.below(2);
  const std::size_t shared_embedding = 1 + rng.below(max_width);
  for (std::size_t v = 0; v < views; ++v) {
    ViewLayers l;
    l.input_dim = 1 + rng.below(max_width);
    l.hidden1 = 1 + rng.below(max_width);
    l.hidden2 = 1 + rng.below(max_width);
    l.embedding = fusion == Fusion::kMean ? shared_embedding : 1 + rng.below(max_width);
    plan.views.push_back(l);
  }
  plan.fusion_hidden = 1 + rng.below(max_width);
  plan.num_classes = 2 + rng.below(2);
  return plan;
}

/// Bias entries drawn at random too, so activations are not symmetric.
inline ModelParams random_params(const LayerPlan& plan, std::uint64_t seed) {
  ModelParams p = init_params(plan, seed);
  Rng rng(seed, 99);
  p.for_each_tensor([&](Matrix& m) {
    if (m.rows() == 1) {
      for (double& v : m.data()) v = rng.normal(0.0, 0.3);
    }
  });
  return p;
}

}  // namespace shapaudit::testing
