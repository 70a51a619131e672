#include "shapaudit/nncore/gradient_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace shapaudit {

namespace {

bool near_kink(const ObjectiveEvaluation& base, const ObjectiveEvaluation& plus,
               const ObjectiveEvaluation& minus) {
  const auto& z = base.relu_preactivations;
  if (plus.relu_preactivations.size() != z.size() || minus.relu_preactivations.size() != z.size()) {
    throw std::invalid_argument("gradient_check: pre-activation count changed between evaluations");
  }
  for (std::size_t k = 0; k < z.size(); ++k) {
    const bool moved = plus.relu_preactivations[k] != z[k] || minus.relu_preactivations[k] != z[k];
    if (moved && std::abs(z[k]) < kKinkExclusion) return true;
  }
  return false;
}

}  // namespace

GradientCheckReport gradient_check(const Objective& objective, std::span<const double> params,
                                   std::span<const double> analytic_gradient, double h,
                                   std::span<const std::size_t> coordinates) {
  if (!(h >= 1e-7 && h <= 1e-3)) throw std::invalid_argument("gradient_check: h must be in [1e-7, 1e-3]");
  if (analytic_gradient.size() != params.size()) {
    throw std::invalid_argument("gradient_check: gradient length does not match parameters");
  }

  std::vector<std::size_t> all;
  if (coordinates.empty()) {
    all.resize(params.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    coordinates = all;
  }

  std::vector<double> work(params.begin(), params.end());
  const ObjectiveEvaluation base = objective(work);

  GradientCheckReport report;
  for (std::size_t i : coordinates) {
    if (i >= params.size()) throw std::out_of_range("gradient_check: coordinate out of range");
    const double original = work[i];
    work[i] = original + h;
    const ObjectiveEvaluation plus = objective(work);
    work[i] = original - h;
    const ObjectiveEvaluation minus = objective(work);
    work[i] = original;
    if (!std::isfinite(plus.value) || !std::isfinite(minus.value)) {
      throw std::runtime_error("gradient_check: non-finite objective at coordinate " +
                               std::to_string(i));
    }
    if (near_kink(base, plus, minus)) {
      ++report.excluded;
      continue;
    }
    const double fd = (plus.value - minus.value) / (2.0 * h);
    const double err = std::abs(analytic_gradient[i] - fd) / std::max(1.0, std::abs(fd));
    ++report.checked;
    if (err > report.max_relative_error) {
      report.max_relative_error = err;
      report.worst_coordinate = i;
    }
  }
  return report;
}

}  // namespace shapaudit
