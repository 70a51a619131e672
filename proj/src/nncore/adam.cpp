#include "shapaudit/nncore/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace shapaudit {

void AdamConfig::validate() const {
  if (!(lr > 0.0)) throw std::invalid_argument("adam: lr must be positive");
  if (!(beta1 > 0.0 && beta1 < 1.0)) throw std::invalid_argument("adam: beta1 must be in (0,1)");
  if (!(beta2 > 0.0 && beta2 < 1.0)) throw std::invalid_argument("adam: beta2 must be in (0,1)");
  if (!(epsilon > 0.0)) throw std::invalid_argument("adam: epsilon must be positive");
}

AdamState::AdamState(std::size_t rows, std::size_t cols, AdamConfig cfg)
    : config(cfg), first_moment(rows, cols), second_moment(rows, cols) {
  config.validate();
}

void adam_step(Matrix& params, const Matrix& grads, AdamState& state) {
  require_same_shape(params, grads, "adam_step(params, grads)");
  require_same_shape(params, state.first_moment, "adam_step(params, state)");
  if (!grads.all_finite()) throw std::invalid_argument("adam_step: non-finite gradient");

  const AdamConfig& cfg = state.config;
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(cfg.beta1, t);
  const double correction2 = 1.0 - std::pow(cfg.beta2, t);

  auto p = params.data();
  auto g = grads.data();
  auto m = state.first_moment.data();
  auto v = state.second_moment.data();
  for (std::size_t i = 0; i < p.size(); ++i) {
    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
    const double m_hat = m[i] / correction1;
    const double v_hat = v[i] / correction2;
    p[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
  }
}

}  // namespace shapaudit
