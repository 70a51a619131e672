#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "shapaudit/nncore/matrix.hpp"

namespace shapaudit {

/// Focal loss constants. An empty alpha means alpha_t = 1 for every class.
struct FocalLossParams {
  double gamma = 2.0;
  std::vector<double> alpha;

  double alpha_for(std::size_t cls) const { return alpha.empty() ? 1.0 : alpha[cls]; }
  void validate(std::size_t num_classes) const;
};

struct LossAndGradient {
  double loss = 0.0;
  Matrix grad_logits;  // same shape as the logits that produced the probabilities
};

inline constexpr double kProbabilityFloor = 1e-12;

/// Row-wise softmax with max subtraction.
Matrix softmax_rows(const Matrix& logits);

/// Mean over samples of -alpha_t (1 - p_t)^gamma log(p_t), plus its gradient
/// with respect to the pre-softmax logits.
///
/// `probabilities` must be a softmax output: each row sums to 1 within 1e-9.
/// p_t is clamped to [1e-12, 1 - 1e-12] before the log.
LossAndGradient focal_loss(const Matrix& probabilities, std::span<const int> labels,
                           const FocalLossParams& params);

}  // namespace shapaudit
