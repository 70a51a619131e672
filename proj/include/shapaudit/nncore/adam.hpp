#pragma once

#include <cstddef>

#include "shapaudit/nncore/matrix.hpp"

namespace shapaudit {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

/// Optimizer state for one parameter tensor.
struct AdamState {
  AdamState() = default;
  AdamState(std::size_t rows, std::size_t cols, AdamConfig config);

  AdamConfig config;
  std::size_t step = 0;
  Matrix first_moment;
  Matrix second_moment;
};

/// One bias-corrected Adam update. Throws before touching anything when the
/// shapes disagree or a gradient entry is not finite.
void adam_step(Matrix& params, const Matrix& grads, AdamState& state);

}  // namespace shapaudit
