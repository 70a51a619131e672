#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace shapaudit {

/// Scalar objective evaluated at a flat parameter vector. The ReLU
/// pre-activations observed during the evaluation are reported so the checker
/// can skip coordinates that sit next to a kink.
struct ObjectiveEvaluation {
  double value = 0.0;
  std::vector<double> relu_preactivations;
};

using Objective = std::function<ObjectiveEvaluation(std::span<const double>)>;

struct GradientCheckReport {
  double max_relative_error = 0.0;
  std::size_t worst_coordinate = 0;
  std::size_t checked = 0;
  std::size_t excluded = 0;
};

inline constexpr double kKinkExclusion = 1e-3;

/// Compares an analytic gradient with central finite differences.
///
/// Error per coordinate is |g_analytic - g_fd| / max(1, |g_fd|). A coordinate
/// is excluded when perturbing it moves some ReLU pre-activation whose
/// magnitude at the base point is below 1e-3. h must lie in [1e-7, 1e-3].
/// `coordinates` restricts the check to a subset; empty means all.
GradientCheckReport gradient_check(const Objective& objective, std::span<const double> params,
                                   std::span<const double> analytic_gradient, double h,
                                   std::span<const std::size_t> coordinates = {});

}  // namespace shapaudit
