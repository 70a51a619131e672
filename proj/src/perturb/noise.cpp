#include <cmath>
#include <vector>
#include <stdexcept>

#include "shapaudit/perturb/perturb.hpp"

namespace shapaudit {

bool is_noise_feature(const std::string& name) { return name.rfind(kNoisePrefix, 0) == 0; }

ViewMatrix gen_noise_features(const ViewMatrix& view, const NoiseSpec& spec) {
  if (!spec.view_id.empty() && spec.view_id != view.view_id) {
    throw std::invalid_argument("noise: spec targets view '" + spec.view_id + "', got '" + view.view_id + "'");
  }
  const std::size_t n = view.samples();
  const std::size_t d = view.features();
  if (d == 0) throw std::invalid_argument("noise: view '" + view.view_id + "' has no features");
  if (spec.n_noise == 0) return view;
  if (n < 2) throw std::invalid_argument("noise: need at least two samples for a variance");

  std::vector<double> means(d, 0.0), variances(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = view.values.row(i);
    for (std::size_t f = 0; f < d; ++f) means[f] += row[f];
  }
  for (double& m : means) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = view.values.row(i);
    for (std::size_t f = 0; f < d; ++f) {
      const double c = row[f] - means[f];
      variances[f] += c * c;
    }
  }
  for (double& v : variances) v /= static_cast<double>(n - 1);

  Rng rng(spec.seed, streams::kNoise);
  Matrix noise(n, spec.n_noise);
  for (std::size_t j = 0; j < spec.n_noise; ++j) {
    const auto src = static_cast<std::size_t>(rng.below(d));
    if (!(variances[src] >= 0.0)) throw std::logic_error("noise: negative sample variance");
    const double sd = std::sqrt(variances[src]);
    for (std::size_t i = 0; i < n; ++i) noise(i, j) = rng.normal(means[src], sd);
  }

  ViewMatrix out = view;
  const std::vector<Matrix> parts{view.values, noise};
  out.values = hconcat(parts);
  for (std::size_t j = 0; j < spec.n_noise; ++j) out.feature_names.push_back(kNoisePrefix + std::to_string(j));
  return out;
}

MultiViewDataset add_noise(const MultiViewDataset& dataset, std::size_t view, const NoiseSpec& spec) {
  if (view >= dataset.num_views()) throw std::invalid_argument("noise: view index out of range");
  MultiViewDataset out = dataset;
  out.views[view] = gen_noise_features(dataset.views[view], spec);
  return out;
}

}  // namespace shapaudit
