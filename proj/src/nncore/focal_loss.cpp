#include "shapaudit/nncore/focal_loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace shapaudit {

void FocalLossParams::validate(std::size_t num_classes) const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("focal loss: gamma must be finite and >= 0");
  }
  if (!alpha.empty()) {
    if (alpha.size() != num_classes) {
      throw std::invalid_argument("focal loss: alpha has " + std::to_string(alpha.size()) +
                                  " entries for " + std::to_string(num_classes) + " classes");
    }
    for (double a : alpha) {
      if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("focal loss: alpha must be in (0, 1]");
    }
  }
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    auto in = logits.row(r);
    auto dst = out.row(r);
    const double max_logit = *std::max_element(in.begin(), in.end());
    double total = 0.0;
    for (std::size_t c = 0; c < in.size(); ++c) {
      dst[c] = std::exp(in[c] - max_logit);
      total += dst[c];
    }
    for (double& v : dst) v /= total;
  }
  return out;
}

LossAndGradient focal_loss(const Matrix& probabilities, std::span<const int> labels,
                           const FocalLossParams& params) {
  const std::size_t n = probabilities.rows();
  const std::size_t num_classes = probabilities.cols();
  if (labels.size() != n) {
    throw std::invalid_argument("focal loss: " + std::to_string(labels.size()) + " labels for " +
                                std::to_string(n) + " rows");
  }
  if (n == 0) throw std::invalid_argument("focal loss: empty batch");
  params.validate(num_classes);

  LossAndGradient out{0.0, Matrix(n, num_classes)};
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto p = probabilities.row(i);
    double row_sum = 0.0;
    for (double v : p) row_sum += v;
    if (std::abs(row_sum - 1.0) > 1e-9) {
      throw std::invalid_argument("focal loss: probability row " + std::to_string(i) +
                                  " sums to " + std::to_string(row_sum));
    }
    const int label = labels[i];
    if (label < 0 || static_cast<std::size_t>(label) >= num_classes) {
      throw std::invalid_argument("focal loss: label " + std::to_string(label) + " at row " +
                                  std::to_string(i) + " out of range");
    }
    const double alpha = params.alpha_for(static_cast<std::size_t>(label));
    const double pt = std::clamp(p[static_cast<std::size_t>(label)], kProbabilityFloor,
                                 1.0 - kProbabilityFloor);
    const double one_minus = 1.0 - pt;
    const double log_pt = std::log(pt);
    const double modulator = std::pow(one_minus, params.gamma);
    out.loss += -alpha * modulator * log_pt;

    // dL/dp_t * p_t; chained through dp_t/dz_j = p_t (delta_tj - p_j).
    const double focus_term =
        params.gamma == 0.0 ? 0.0 : params.gamma * std::pow(one_minus, params.gamma - 1.0) * pt * log_pt;
    const double g = alpha * (focus_term - modulator);
    auto grad = out.grad_logits.row(i);
    for (std::size_t c = 0; c < num_classes; ++c) {
      const double delta = static_cast<int>(c) == label ? 1.0 : 0.0;
      grad[c] = g * (delta - p[c]) * inv_n;
    }
  }
  out.loss *= inv_n;
  return out;
}

}  // namespace shapaudit
